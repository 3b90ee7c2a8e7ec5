//! Translation of a discontinuous strip on a curved background, limited
//! against unlimited.
//!
//! ```text
//! cargo run --release --example curvy_bump
//! ```

use embedded_dg::harness::{run_experiment, ExperimentName, ExperimentSpec, SpecOverrides};
use embedded_dg::scheme::Mode;

fn main() -> embedded_dg::Result<()> {
    for mode in [Mode::Unlimited, Mode::Limited] {
        let layer = SpecOverrides {
            mode: Some(mode),
            ..Default::default()
        };
        let spec = ExperimentSpec::resolve(ExperimentName::CurvyBump, &[&layer])?;
        let report = run_experiment(&spec)?;
        let s = &report.runs[0].summary;
        println!(
            "{mode:>9}: final range [{:+.5}, {:.5}], mass drift {:.1e}, L² error {:.4e}",
            s.min,
            s.max,
            s.mass_drift,
            s.l2_error.unwrap_or(f64::NAN)
        );
    }
    println!("initial range [0, 2]");
    Ok(())
}
