//! Convergence of the limited scheme for the reversing deformational flow
//! on the four standard meshes.
//!
//! ```text
//! cargo run --release --example deformational_convergence -- [cospi|verbatim]
//! ```

use embedded_dg::harness::{
    least_squares_order, run_experiment, ExperimentName, ExperimentSpec, IcVariant, SpecOverrides,
};

fn main() -> embedded_dg::Result<()> {
    let variant: IcVariant = std::env::args()
        .nth(1)
        .as_deref()
        .unwrap_or("cospi")
        .parse()?;
    let layer = SpecOverrides {
        ic_variant: Some(variant),
        ..Default::default()
    };
    let spec = ExperimentSpec::resolve(ExperimentName::ConvergenceSuite, &[&layer])?;
    let report = run_experiment(&spec)?;
    let rows = report.convergence.as_deref().unwrap_or_default();
    println!("initial condition: {variant}");
    println!("{:>8}  {:>12}  {:>6}", "dx", "L² error", "order");
    for r in rows {
        let order = r
            .observed_order
            .map(|p| format!("{p:.3}"))
            .unwrap_or_default();
        println!("{:>8}  {:>12.6e}  {order:>6}", r.dx, r.l2_error);
    }
    println!("least-squares order {:.3}", least_squares_order(rows));
    Ok(())
}
