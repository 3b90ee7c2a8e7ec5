//! Vertex-based slope limiting of a `DG1xDG2` field: Taylor split, the two
//! correction factors, and the limited field.
//!
//! ```text
//! cargo run --example slope_limiter
//! ```

use std::sync::Arc;

use embedded_dg::limiters::{limit_dg1xdg2, vertex_bounds_from_means};
use embedded_dg::taylor::taylor_decompose;
use embedded_dg::{Field, FieldSpace, Mesh, SpaceKind};

fn main() -> embedded_dg::Result<()> {
    let mesh = Arc::new(Mesh::unit_square(10, 10, true)?);
    let dg = FieldSpace::new(SpaceKind::Dg1Dg2, mesh.clone());

    // a spike one node wide in x on top of a smooth profile in y
    let theta = Field::interpolate(dg, |x, y| {
        let step = if x > 0.25 && x < 0.35 { 1.0 } else { 0.0 };
        step + 0.5 * (std::f64::consts::PI * y).sin()
    });

    let e = mesh.element_index(3, 2);
    let split = taylor_decompose(&theta, e)?;
    println!(
        "element {e}: mean {:.4}, line means {:?}, slopes {:?}, curvatures {:?}",
        split.mean, split.line_mean, split.slope, split.curvature
    );

    let bounds = vertex_bounds_from_means(&theta)?;
    let (limited, factors) = limit_dg1xdg2(&theta)?;
    let active0 = factors.alpha0.iter().filter(|&&a| a < 1.0).count();
    let active1 = factors.alpha1.iter().filter(|&&a| a < 1.0).count();
    println!(
        "{active0} elements with α0 < 1, {active1} with α1 < 1 (of {})",
        mesh.num_elements()
    );
    for i in 0..mesh.nx() {
        let e = mesh.element_index(i, 2);
        println!(
            "  column {i}: α0 = {:.3}, α1 = {:.3}",
            factors.alpha0[e], factors.alpha1[e]
        );
    }

    let means_kept = (0..mesh.num_elements())
        .all(|e| (theta.element_mean(e) - limited.element_mean(e)).abs() < 1e-12);
    println!("element means unchanged: {means_kept}");
    println!(
        "vertex bounds span [{:.3}, {:.3}]",
        bounds.min.iter().copied().fold(f64::INFINITY, f64::min),
        bounds.max.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    );
    Ok(())
}
