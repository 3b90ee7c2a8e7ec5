//! Experiment runner: the three transport test cases, the convergence suite,
//! configuration layering and output files.
//!
//! An [`ExperimentSpec`] starts from the preset of its experiment and is
//! refined by [`SpecOverrides`] layers (a TOML file, then command-line
//! flags). [`run_experiment`] runs it and writes, per run, `monitors.csv`,
//! `field.csv`, `field.vtk` and `summary.csv`; the convergence suite adds
//! `convergence.csv`.

pub mod initial;
pub mod output;

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::mesh::Mesh;
use crate::scheme::{Mode, Scheme, SchemeConfig, Trajectory};
use crate::transport::ExteriorFlux;
use crate::velocity::VelocityField;

pub use initial::{
    curvy_bump_value, deformational_value, init_curvy_bump, init_deformational, init_solid_body,
    l2_error, solid_body_value, IcVariant,
};
pub use output::{
    convergence_rows, least_squares_order, pairwise_order, ConvergenceRow, RunSummary,
};

/// Time step of the deformational runs.
pub const DEFORMATIONAL_DT: f64 = 0.000856898;

/// Mesh widths of the convergence suite, coarse to fine.
pub const SUITE_DX: [f64; 4] = [0.05, 0.02, 0.0125, 0.01];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    SolidBody,
    CurvyBump,
    Deformational,
    ConvergenceSuite,
}

impl ExperimentName {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentName::SolidBody => "solid_body",
            ExperimentName::CurvyBump => "curvy_bump",
            ExperimentName::Deformational => "deformational",
            ExperimentName::ConvergenceSuite => "convergence_suite",
        }
    }

    pub fn velocity(self) -> VelocityField {
        match self {
            ExperimentName::SolidBody => VelocityField::SolidBody,
            ExperimentName::CurvyBump => VelocityField::Translation,
            ExperimentName::Deformational | ExperimentName::ConvergenceSuite => {
                VelocityField::Deformational
            }
        }
    }

    pub fn periodic_x(self) -> bool {
        !matches!(self, ExperimentName::SolidBody)
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "solid_body" => Ok(ExperimentName::SolidBody),
            "curvy_bump" => Ok(ExperimentName::CurvyBump),
            "deformational" => Ok(ExperimentName::Deformational),
            "convergence_suite" | "convergence" => Ok(ExperimentName::ConvergenceSuite),
            _ => Err(Error::Config(format!("unknown experiment `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeStep {
    Fixed(f64),
    /// `Δt = C · min(dx, dy) / max|u|`, speed taken at `t = 0`.
    Courant(f64),
}

/// A fully specified experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub nx: usize,
    pub ny: usize,
    pub time_step: TimeStep,
    pub t_end: f64,
    pub mode: Mode,
    pub ic_variant: IcVariant,
    pub exterior_flux: ExteriorFlux,
    pub monitor_every: usize,
    /// Mesh widths of the convergence suite (square meshes, `n = 1/Δx`).
    pub suite_dx: Vec<f64>,
    /// Where to write files; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Standard configuration of each experiment.
    pub fn preset(name: ExperimentName) -> Self {
        let (n, time_step, t_end) = match name {
            ExperimentName::SolidBody => (100, TimeStep::Courant(0.3), 2.0 * PI),
            ExperimentName::CurvyBump => (100, TimeStep::Courant(0.3), 0.4),
            ExperimentName::Deformational | ExperimentName::ConvergenceSuite => {
                (100, TimeStep::Fixed(DEFORMATIONAL_DT), 1.0)
            }
        };
        ExperimentSpec {
            name,
            nx: n,
            ny: n,
            time_step,
            t_end,
            mode: Mode::Limited,
            ic_variant: IcVariant::Verbatim,
            exterior_flux: ExteriorFlux::Closed,
            monitor_every: 1,
            suite_dx: SUITE_DX.to_vec(),
            out_dir: None,
        }
    }

    /// Apply one configuration layer on top of this spec.
    pub fn apply(&mut self, layer: &SpecOverrides) -> Result<()> {
        if let Some(name) = layer.experiment {
            if name != self.name {
                return Err(Error::Config(format!(
                    "override for `{name}` applied to `{}`",
                    self.name
                )));
            }
        }
        if let Some(n) = layer.nx {
            self.nx = n;
        }
        if let Some(n) = layer.ny {
            self.ny = n;
        }
        match (layer.dt, layer.courant) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either dt or courant, not both".into()))
            }
            (Some(dt), None) => self.time_step = TimeStep::Fixed(dt),
            (None, Some(c)) => self.time_step = TimeStep::Courant(c),
            (None, None) => {}
        }
        if let Some(t) = layer.t_end {
            self.t_end = t;
        }
        if let Some(m) = layer.mode {
            self.mode = m;
        }
        if let Some(v) = layer.ic_variant {
            self.ic_variant = v;
        }
        if let Some(f) = layer.exterior_flux {
            self.exterior_flux = f;
        }
        if let Some(k) = layer.monitor_every {
            self.monitor_every = k;
        }
        if let Some(dx) = &layer.suite_dx {
            self.suite_dx = dx.clone();
        }
        if let Some(out) = &layer.out {
            self.out_dir = Some(out.clone());
        }
        Ok(())
    }

    /// Preset of `name` refined by `layers` in order (later layers win).
    pub fn resolve(name: ExperimentName, layers: &[&SpecOverrides]) -> Result<Self> {
        let mut spec = Self::preset(name);
        for layer in layers {
            spec.apply(layer)?;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::Config("mesh counts must be positive".into()));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match self.time_step {
            TimeStep::Fixed(dt) if !positive(dt) => {
                return Err(Error::Config(format!(
                    "time step must be positive, got {dt}"
                )))
            }
            TimeStep::Courant(c) if !positive(c) => {
                return Err(Error::Config(format!(
                    "Courant number must be positive, got {c}"
                )))
            }
            _ => {}
        }
        if !positive(self.t_end) {
            return Err(Error::Config(format!(
                "end time must be positive, got {}",
                self.t_end
            )));
        }
        if self.name == ExperimentName::ConvergenceSuite {
            if self.suite_dx.len() < 2 {
                return Err(Error::Config(
                    "the convergence suite needs two or more meshes".into(),
                ));
            }
            for &dx in &self.suite_dx {
                suite_cells(dx)?;
            }
        }
        Ok(())
    }

    fn mesh_with(&self, nx: usize, ny: usize) -> Result<Arc<Mesh>> {
        Ok(Arc::new(Mesh::unit_square(nx, ny, self.name.periodic_x())?))
    }

    /// The mesh of a single run.
    pub fn mesh(&self) -> Result<Arc<Mesh>> {
        self.mesh_with(self.nx, self.ny)
    }

    /// Scheme configuration on `mesh`.
    pub fn scheme_config(&self, mesh: &Mesh) -> Result<SchemeConfig> {
        let velocity = self.name.velocity();
        let dt = match self.time_step {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Courant(c) => velocity.courant_dt(mesh, c).ok_or_else(|| {
                Error::Config("Courant time step needs a non-zero velocity".into())
            })?,
        };
        let cfg = SchemeConfig {
            mode: self.mode,
            dt,
            t_end: self.t_end,
            velocity,
            exterior_flux: self.exterior_flux,
            initial_condition: self.initial_condition_name(),
            monitor_every: self.monitor_every,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn initial_condition_name(&self) -> String {
        match self.name {
            ExperimentName::Deformational | ExperimentName::ConvergenceSuite => {
                format!("deformational/{}", self.ic_variant)
            }
            other => other.name().to_string(),
        }
    }

    /// Nodal interpolant of the initial condition on `mesh`.
    pub fn initial_field(&self, mesh: &Arc<Mesh>) -> Field {
        match self.name {
            ExperimentName::SolidBody => init_solid_body(mesh),
            ExperimentName::CurvyBump => init_curvy_bump(mesh),
            ExperimentName::Deformational | ExperimentName::ConvergenceSuite => {
                init_deformational(mesh, self.ic_variant)
            }
        }
    }

    /// Exact solution at `t`, where known.
    pub fn exact_solution(&self, t: f64) -> Option<Box<dyn Fn(f64, f64) -> f64 + Send + Sync>> {
        match self.name {
            ExperimentName::SolidBody => {
                let (s, c) = t.sin_cos();
                Some(Box::new(move |x, y| {
                    let (px, py) = (x - 0.5, y - 0.5);
                    solid_body_value(0.5 + c * px + s * py, 0.5 - s * px + c * py)
                }))
            }
            ExperimentName::CurvyBump => Some(Box::new(move |x, y| {
                curvy_bump_value((x - t).rem_euclid(1.0), y)
            })),
            ExperimentName::Deformational | ExperimentName::ConvergenceSuite => {
                // the flow reverses and returns the field to its start at t = 1
                let v = self.ic_variant;
                (t.abs() < 1e-12 || (t - 1.0).abs() < 1e-12)
                    .then(|| Box::new(move |x, y| deformational_value(x, y, v)) as Box<_>)
            }
        }
    }
}

/// Number of cells for a suite width; `1/Δx` must be an integer.
fn suite_cells(dx: f64) -> Result<usize> {
    let n = (1.0 / dx).round();
    if !(dx > 0.0) || n < 1.0 || (n * dx - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "suite width {dx} does not divide the unit square"
        )));
    }
    Ok(n as usize)
}

/// Optional settings; the TOML file and the command line each give one layer.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecOverrides {
    pub experiment: Option<ExperimentName>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub dt: Option<f64>,
    pub courant: Option<f64>,
    pub t_end: Option<f64>,
    pub mode: Option<Mode>,
    pub ic_variant: Option<IcVariant>,
    pub exterior_flux: Option<ExteriorFlux>,
    pub monitor_every: Option<usize>,
    pub suite_dx: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

impl SpecOverrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

/// One scheme run of an experiment.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub trajectory: Trajectory,
}

/// Everything [`run_experiment`] produced.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub runs: Vec<RunOutcome>,
    /// Present for the convergence suite.
    pub convergence: Option<Vec<ConvergenceRow>>,
}

impl ExperimentReport {
    pub fn least_squares_order(&self) -> Option<f64> {
        self.convergence.as_deref().map(least_squares_order)
    }
}

fn run_one(spec: &ExperimentSpec, nx: usize, ny: usize, dir: Option<&Path>) -> Result<RunOutcome> {
    let mesh = spec.mesh_with(nx, ny)?;
    let cfg = spec.scheme_config(&mesh)?;
    let theta0 = spec.initial_field(&mesh);
    let mut scheme = Scheme::new(mesh, cfg.clone())?;
    let trajectory = match scheme.run(&theta0) {
        Ok(t) => t,
        Err(e) => {
            if let Some(dir) = dir {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("abort.txt"), format!("{e}\n"))?;
            }
            return Err(e);
        }
    };
    let l2 = spec
        .exact_solution(trajectory.final_time)
        .map(|exact| l2_error(&trajectory.final_field, exact));
    let summary = RunSummary {
        experiment: spec.name.to_string(),
        mode: spec.mode.to_string(),
        nx,
        ny,
        dt: cfg.dt,
        steps: trajectory.steps,
        t_end: trajectory.final_time,
        min: trajectory.final_field.min_coeff(),
        max: trajectory.final_field.max_coeff(),
        mass_drift: trajectory.mass_drift(),
        l2_error: l2,
    };
    if let Some(dir) = dir {
        output::write_monitors(&dir.join("monitors.csv"), &trajectory.monitors)?;
        output::write_field_files(dir, &trajectory.final_field, "theta")?;
        output::write_summary_file(&dir.join("summary.csv"), std::slice::from_ref(&summary))?;
    }
    Ok(RunOutcome {
        summary,
        trajectory,
    })
}

/// Run `spec` and write its files.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let out = spec.out_dir.as_deref();
    if spec.name != ExperimentName::ConvergenceSuite {
        let run = run_one(spec, spec.nx, spec.ny, out)?;
        return Ok(ExperimentReport {
            runs: vec![run],
            convergence: None,
        });
    }

    let cells: Vec<usize> = spec
        .suite_dx
        .iter()
        .map(|&dx| suite_cells(dx))
        .collect::<Result<_>>()?;
    let dirs: Vec<Option<PathBuf>> = cells
        .iter()
        .map(|n| out.map(|d| d.join(format!("n{n}"))))
        .collect();
    let results: Vec<Result<RunOutcome>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .iter()
            .zip(&dirs)
            .map(|(&n, dir)| scope.spawn(move || run_one(spec, n, n, dir.as_deref())))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence run panicked"))
            .collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;

    let pairs: Vec<(f64, f64)> = spec
        .suite_dx
        .iter()
        .zip(&runs)
        .map(|(&dx, r)| {
            r.summary.l2_error.map(|e| (dx, e)).ok_or_else(|| {
                Error::Config(
                    "the convergence suite needs an end time with a known solution".into(),
                )
            })
        })
        .collect::<Result<_>>()?;
    let rows = convergence_rows(&pairs);
    if let Some(dir) = out {
        output::write_convergence_file(&dir.join("convergence.csv"), &rows)?;
        let summaries: Vec<_> = runs.iter().map(|r| r.summary.clone()).collect();
        output::write_summary_file(&dir.join("summary.csv"), &summaries)?;
    }
    Ok(ExperimentReport {
        runs,
        convergence: Some(rows),
    })
}
