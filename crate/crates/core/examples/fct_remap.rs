//! Flux-corrected remap from `DG1xDG2` to `DG1xCG2` compared with the plain
//! L² projection on a discontinuous field.
//!
//! ```text
//! cargo run --example fct_remap
//! ```

use std::sync::Arc;

use embedded_dg::limiters::FluxCorrectedRemap;
use embedded_dg::{Field, FieldSpace, Mesh, SpaceKind};

fn main() -> embedded_dg::Result<()> {
    let mesh = Arc::new(Mesh::unit_square(12, 12, false)?);
    let dg = FieldSpace::new(SpaceKind::Dg1Dg2, mesh.clone());
    let cg = FieldSpace::new(SpaceKind::Dg1Cg2, mesh.clone());

    // a piecewise-constant square pulse: its projection into the vertically
    // continuous space oscillates at the jumps in y
    let mut coeffs = vec![0.0; dg.num_dofs()];
    for e in 0..mesh.num_elements() {
        let (i, j) = mesh.element_ij(e);
        if (4..8).contains(&i) && (4..8).contains(&j) {
            for &g in dg.element_dofs(e) {
                coeffs[g] = 1.0;
            }
        }
    }
    let theta_hat = Field::new(dg, coeffs)?;

    let remap = FluxCorrectedRemap::new(cg)?;
    let out = remap.remap(&theta_hat)?;
    let range = |f: &Field| format!("[{:+.4}, {:.4}]", f.min_coeff(), f.max_coeff());
    println!("input      {}", range(&theta_hat));
    println!("projection {}  (high order)", range(&out.high));
    println!("low order  {}", range(&out.low));
    println!("corrected  {}", range(&out.corrected));
    println!(
        "mass: input {:.12}, corrected {:.12}",
        theta_hat.integral(),
        out.corrected.integral()
    );
    let limited = out.alpha.iter().filter(|&&a| a < 1.0).count();
    println!("{limited} of {} elements have α < 1", out.alpha.len());
    Ok(())
}
