//! The upwind DG propagator with SSPRK3 on `DG1xDG2`, without limiting:
//! a bump translated once around a periodic domain.
//!
//! ```text
//! cargo run --release --example dg_transport
//! ```

use std::sync::Arc;

use embedded_dg::transport::Transport;
use embedded_dg::{Field, FieldSpace, Mesh, SpaceKind, VelocityField};

fn main() -> embedded_dg::Result<()> {
    let n = 32;
    let mesh = Arc::new(Mesh::unit_square(n, n, true)?);
    let dg = FieldSpace::new(SpaceKind::Dg1Dg2, mesh.clone());
    let velocity = VelocityField::Translation;
    let transport = Transport::new(dg.clone(), velocity)?;

    let bump = |x: f64, y: f64| (-((x - 0.5).powi(2) + (y - 0.5).powi(2)) / 0.01).exp();
    let mut theta = Field::interpolate(dg, bump);
    let (mass0, norm0) = (theta.integral(), theta.l2_norm());

    let dt = velocity.courant_dt(&mesh, 0.3).expect("non-zero velocity");
    let steps = (1.0 / dt).round() as usize;
    let dt = 1.0 / steps as f64;
    for k in 0..steps {
        theta = transport.ssprk3_step(&theta, k as f64 * dt, dt, None)?;
    }
    println!("{steps} steps of dt = {dt:.5}");
    println!("mass   {mass0:.12} -> {:.12}", theta.integral());
    println!("L²     {norm0:.6} -> {:.6}", theta.l2_norm());
    println!("error after one period: {:.3e}", theta.l2_distance_to(bump));
    println!(
        "range  [{:.4}, {:.4}] (unlimited, so small undershoots appear)",
        theta.min_coeff(),
        theta.max_coeff()
    );
    Ok(())
}
