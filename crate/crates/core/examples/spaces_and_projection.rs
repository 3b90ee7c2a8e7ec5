//! Finite element spaces, injection into the discontinuous space and the
//! column-wise L² projection back.
//!
//! ```text
//! cargo run --example spaces_and_projection
//! ```

use std::sync::Arc;

use embedded_dg::operators::{consistent_mass, lumped_mass};
use embedded_dg::projection::{inject, Projector};
use embedded_dg::{Field, FieldSpace, Mesh, SpaceKind};

fn main() -> embedded_dg::Result<()> {
    let mesh = Arc::new(Mesh::unit_square(8, 6, true)?);
    for kind in [
        SpaceKind::Dg0,
        SpaceKind::Dg1Dg1,
        SpaceKind::Dg1Dg2,
        SpaceKind::Dg1Cg2,
    ] {
        let space = FieldSpace::new(kind, mesh.clone());
        println!(
            "{kind:?}: {} local dofs, {} global dofs",
            kind.local_dofs(),
            space.num_dofs()
        );
    }

    let cg = FieldSpace::new(SpaceKind::Dg1Cg2, mesh.clone());
    let m = consistent_mass(&cg);
    let lumped = lumped_mass(&cg);
    println!(
        "DG1xCG2 mass: {} nonzeros, total {:.6} (lumped total {:.6})",
        m.nnz(),
        m.data().iter().sum::<f64>(),
        lumped.iter().sum::<f64>()
    );

    let theta = Field::interpolate(cg.clone(), |x, y| (6.0 * x).sin() * (1.0 + y * y));
    let injected = inject(&theta)?;
    let projector = Projector::new(cg)?;
    let back = projector.project(&injected)?;
    println!("|P I θ − θ|_max = {:.2e}", back.max_abs_diff(&theta)?);

    // a discontinuous perturbation: P keeps the mass and does not raise the norm
    let mut rough = injected.clone();
    for (k, c) in rough.coeffs_mut().iter_mut().enumerate() {
        *c += if k % 3 == 0 { 0.1 } else { -0.05 };
    }
    let projected = projector.project(&rough)?;
    println!(
        "mass {:.12} -> {:.12}, L² norm {:.6} -> {:.6}",
        rough.integral(),
        projected.integral(),
        rough.l2_norm(),
        projected.l2_norm()
    );
    Ok(())
}
