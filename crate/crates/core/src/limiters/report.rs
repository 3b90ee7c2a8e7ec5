use std::io::{self, Write};

use crate::limiters::slope::SlopeFactors;

/// Limiter factors of one scheme step plus global range monitors.
#[derive(Clone, Debug, Default)]
pub struct LimiterReport {
    /// Slope limiter factor for the linear part (last application in the step).
    pub alpha0: Vec<f64>,
    /// Vertical quadratic factor (last application in the step).
    pub alpha1: Vec<f64>,
    /// Flux-corrected remap factor.
    pub alpha_fct: Vec<f64>,
    pub min_before: f64,
    pub max_before: f64,
    pub min_after: f64,
    pub max_after: f64,
}

impl LimiterReport {
    pub fn new(
        slope: &SlopeFactors,
        alpha_fct: Vec<f64>,
        before: (f64, f64),
        after: (f64, f64),
    ) -> Self {
        LimiterReport {
            alpha0: slope.alpha0.clone(),
            alpha1: slope.alpha1.clone(),
            alpha_fct,
            min_before: before.0,
            max_before: before.1,
            min_after: after.0,
            max_after: after.1,
        }
    }

    pub fn factors_in_unit_interval(&self) -> bool {
        self.alpha0
            .iter()
            .chain(&self.alpha1)
            .chain(&self.alpha_fct)
            .all(|a| (0.0..=1.0).contains(a))
    }

    /// Number of elements where any factor is below 1.
    pub fn active_elements(&self) -> usize {
        (0..self.alpha_fct.len())
            .filter(|&e| {
                self.alpha0.get(e).is_some_and(|&a| a < 1.0)
                    || self.alpha1.get(e).is_some_and(|&a| a < 1.0)
                    || self.alpha_fct[e] < 1.0
            })
            .count()
    }

    /// CSV rows `element,alpha0,alpha1,alpha_fct`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "element,alpha0,alpha1,alpha_fct")?;
        for (e, af) in self.alpha_fct.iter().enumerate() {
            let a0 = self.alpha0.get(e).copied().unwrap_or(1.0);
            let a1 = self.alpha1.get(e).copied().unwrap_or(1.0);
            writeln!(out, "{e},{a0},{a1},{af}")?;
        }
        Ok(())
    }
}
