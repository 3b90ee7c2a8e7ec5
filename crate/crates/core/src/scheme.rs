//! Composition of the embedded scheme and the time-stepping driver.
//!
//! One step maps a `DG1xCG2` field to the next:
//!
//! - unlimited: `θⁿ⁺¹ = P A I θⁿ`, the L² projection of an SSPRK3 step of
//!   the injected field;
//! - limited: `θⁿ⁺¹ = P̃ Ã I θⁿ`, where `Ã` applies the slope limiter before
//!   and after every stage and `P̃` is the flux-corrected remap.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::limiters::{FluxCorrectedRemap, LimiterReport, SlopeLimiter};
use crate::mesh::Mesh;
use crate::projection::{inject_into, Projector};
use crate::space::{FieldSpace, SpaceKind};
use crate::transport::{ExteriorFlux, Transport};
use crate::velocity::VelocityField;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Unlimited,
    #[default]
    Limited,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Unlimited => "unlimited",
            Mode::Limited => "limited",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unlimited" => Ok(Mode::Unlimited),
            "limited" => Ok(Mode::Limited),
            _ => Err(Error::Config(format!("unknown mode `{s}`"))),
        }
    }
}

/// Time-stepping parameters of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub mode: Mode,
    pub dt: f64,
    pub t_end: f64,
    pub velocity: VelocityField,
    #[serde(default)]
    pub exterior_flux: ExteriorFlux,
    /// Name of the initial condition, recorded for output only.
    pub initial_condition: String,
    /// Record monitors every this many steps (the final step is always kept).
    pub monitor_every: usize,
}

impl SchemeConfig {
    pub fn new(mode: Mode, dt: f64, t_end: f64, velocity: VelocityField) -> Self {
        SchemeConfig {
            mode,
            dt,
            t_end,
            velocity,
            exterior_flux: ExteriorFlux::default(),
            initial_condition: String::new(),
            monitor_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return Err(Error::Config(format!(
                "end time {} must be at least the time step {}",
                self.t_end, self.dt
            )));
        }
        if self.monitor_every == 0 {
            return Err(Error::Config("monitor cadence must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps to reach `t_end`; the last one may be shorter.
    ///
    /// A ratio within `1e-9` of an integer counts as that integer, so a
    /// `t_end` that is a multiple of `dt` up to rounding gets no sliver step.
    pub fn num_steps(&self) -> usize {
        let ratio = self.t_end / self.dt;
        let nearest = ratio.round();
        if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
            nearest.max(1.0) as usize
        } else {
            ratio.ceil() as usize
        }
    }

    /// `(t_n, Δt_n)` for every step, landing exactly on `t_end`.
    pub fn steps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.num_steps();
        (0..n).map(move |k| {
            let t = k as f64 * self.dt;
            let dt = if k + 1 == n { self.t_end - t } else { self.dt };
            (t, dt)
        })
    }
}

/// Global diagnostics of a `DG1xCG2` field at one time level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monitor {
    pub step: usize,
    pub t: f64,
    pub min: f64,
    pub max: f64,
    pub mass: f64,
    pub l2norm: f64,
}

impl Monitor {
    pub fn of(field: &Field, step: usize, t: f64) -> Self {
        Monitor {
            step,
            t,
            min: field.min_coeff(),
            max: field.max_coeff(),
            mass: field.integral(),
            l2norm: field.l2_norm(),
        }
    }

    pub const CSV_HEADER: &'static str = "step,t,min,max,mass,l2norm";

    pub fn write_csv<W: Write>(monitors: &[Monitor], mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for m in monitors {
            writeln!(
                out,
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                m.step, m.t, m.min, m.max, m.mass, m.l2norm
            )?;
        }
        Ok(())
    }
}

/// Result of [`Scheme::run`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub final_field: Field,
    pub final_time: f64,
    pub steps: usize,
    /// Monitors at step 0 and at the requested cadence.
    pub monitors: Vec<Monitor>,
}

impl Trajectory {
    /// Largest relative deviation of the recorded mass from its initial value.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.monitors.first().map_or(0.0, |m| m.mass);
        let scale = m0.abs().max(f64::MIN_POSITIVE);
        self.monitors
            .iter()
            .map(|m| (m.mass - m0).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// Operators of the embedded scheme on one mesh, built once per run.
pub struct Scheme {
    config: SchemeConfig,
    cg: Arc<FieldSpace>,
    dg: Arc<FieldSpace>,
    transport: Transport,
    projector: Projector,
    remap: Option<FluxCorrectedRemap>,
    slope: SlopeLimiter,
    report: Option<LimiterReport>,
}

impl Scheme {
    pub fn new(mesh: Arc<Mesh>, config: SchemeConfig) -> Result<Self> {
        config.validate()?;
        let cg = FieldSpace::new(SpaceKind::Dg1Cg2, mesh.clone());
        let dg = FieldSpace::new(SpaceKind::Dg1Dg2, mesh);
        let remap = match config.mode {
            Mode::Limited => Some(FluxCorrectedRemap::new(cg.clone())?),
            Mode::Unlimited => None,
        };
        Ok(Scheme {
            transport: Transport::new(dg.clone(), config.velocity)?
                .with_exterior_flux(config.exterior_flux),
            projector: Projector::new(cg.clone())?,
            remap,
            slope: SlopeLimiter::new(),
            report: None,
            config,
            cg,
            dg,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    /// The `DG1xCG2` space the scheme evolves.
    pub fn space(&self) -> &Arc<FieldSpace> {
        &self.cg
    }

    /// The `DG1xDG2` space of the propagator.
    pub fn dg_space(&self) -> &Arc<FieldSpace> {
        &self.dg
    }

    /// Limiter diagnostics of the last limited step.
    pub fn last_report(&self) -> Option<&LimiterReport> {
        self.report.as_ref()
    }

    /// One step of length `dt` from time `t`.
    pub fn step(&mut self, theta: &Field, t: f64, dt: f64) -> Result<Field> {
        if !theta.space().same_as(&self.cg) {
            theta.space().expect_kind(SpaceKind::Dg1Cg2)?;
            return Err(Error::MeshMismatch);
        }
        let injected = inject_into(theta, &self.dg)?;
        match &self.remap {
            None => {
                let advanced = self.transport.ssprk3_step(&injected, t, dt, None)?;
                self.projector.project(&advanced)
            }
            Some(remap) => {
                let advanced =
                    self.transport
                        .ssprk3_step(&injected, t, dt, Some(&mut self.slope))?;
                let out = remap.remap(&advanced)?;
                if !out.corrected.is_finite() {
                    return Err(Error::NonFinite {
                        context: "flux-corrected remap",
                        element: None,
                    });
                }
                self.report = Some(LimiterReport::new(
                    self.slope.last_factors(),
                    out.alpha,
                    (theta.min_coeff(), theta.max_coeff()),
                    (out.corrected.min_coeff(), out.corrected.max_coeff()),
                ));
                Ok(out.corrected)
            }
        }
    }

    /// Advance `theta0` to `t_end`, recording monitors.
    ///
    /// A failing step aborts the run with [`Error::Aborted`] carrying the
    /// step index and start time of that step.
    pub fn run(&mut self, theta0: &Field) -> Result<Trajectory> {
        self.run_with(theta0, |_, _, _| Ok(()))
    }

    /// As [`Scheme::run`], calling `observe(step, t, field)` after every step.
    pub fn run_with(
        &mut self,
        theta0: &Field,
        mut observe: impl FnMut(usize, f64, &Field) -> Result<()>,
    ) -> Result<Trajectory> {
        let n = self.config.num_steps();
        let every = self.config.monitor_every;
        let mut monitors = vec![Monitor::of(theta0, 0, 0.0)];
        let mut theta = theta0.clone();
        let mut time = 0.0;
        let steps: Vec<_> = self.config.steps().collect();
        for (k, (t, dt)) in steps.into_iter().enumerate() {
            theta = self.step(&theta, t, dt).map_err(|e| Error::Aborted {
                step: k,
                time: t,
                source: Box::new(e),
            })?;
            time = if k + 1 == n {
                self.config.t_end
            } else {
                t + dt
            };
            let step = k + 1;
            if step % every == 0 || step == n {
                monitors.push(Monitor::of(&theta, step, time));
            }
            observe(step, time, &theta)?;
        }
        Ok(Trajectory {
            final_field: theta,
            final_time: time,
            steps: n,
            monitors,
        })
    }
}
