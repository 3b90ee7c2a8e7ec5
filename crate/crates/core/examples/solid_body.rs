//! Solid-body rotation of the slotted cylinder, cone and hump with the
//! limited scheme, optionally writing monitors and field files.
//!
//! ```text
//! cargo run --release --example solid_body -- [n] [out-dir]
//! ```

use std::path::PathBuf;

use embedded_dg::harness::{run_experiment, ExperimentName, ExperimentSpec, SpecOverrides};

fn main() -> embedded_dg::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(100, |s| s.parse().expect("mesh size"));
    let layer = SpecOverrides {
        nx: Some(n),
        ny: Some(n),
        out: args.next().map(PathBuf::from),
        ..Default::default()
    };
    let spec = ExperimentSpec::resolve(ExperimentName::SolidBody, &[&layer])?;
    let report = run_experiment(&spec)?;
    let run = &report.runs[0];
    let (lo, hi) = run
        .trajectory
        .monitors
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| {
            (lo.min(m.min), hi.max(m.max))
        });
    println!(
        "{n}x{n}, {} steps of {:.4e} to t = 2π",
        run.summary.steps, run.summary.dt
    );
    println!("range over the run: [{lo:.3e}, {:.12}]", hi);
    println!("mass drift {:.3e}", run.summary.mass_drift);
    println!(
        "L² error after one revolution {:.4e}",
        run.summary.l2_error.unwrap_or(f64::NAN)
    );
    Ok(())
}
