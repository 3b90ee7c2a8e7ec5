//! `edg`: run the transport experiments from the command line.
//!
//! Exit status: 0 on success, 2 on a numerical abort, 3 on a configuration
//! error, 1 on other failures (for example I/O).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use embedded_dg::harness::{
    least_squares_order, run_experiment, ExperimentName, ExperimentReport, ExperimentSpec,
    IcVariant, SpecOverrides,
};
use embedded_dg::scheme::Mode;
use embedded_dg::transport::ExteriorFlux;
use embedded_dg::Error;

#[derive(Parser)]
#[command(name = "edg", version, about = "Embedded DG transport experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run(RunArgs),
    /// Run the deformational-flow convergence suite.
    Convergence(CommonArgs),
}

#[derive(Args)]
struct RunArgs {
    /// solid_body, curvy_bump, deformational or convergence_suite.
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// Courant number; the time step follows from the largest initial speed.
    #[arg(long, conflicts_with = "dt", allow_negative_numbers = true)]
    courant: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long, conflicts_with = "unlimited")]
    limited: bool,
    #[arg(long)]
    unlimited: bool,
    /// Flux through the non-periodic boundary: closed or upwind.
    #[arg(long)]
    exterior_flux: Option<String>,
    /// Deformational initial condition: verbatim or cospi.
    #[arg(long)]
    ic_variant: Option<String>,
    /// Record monitors every this many steps.
    #[arg(long)]
    monitor_every: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with default settings; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(&self) -> Result<SpecOverrides, Error> {
        let mode = match (self.limited, self.unlimited) {
            (true, _) => Some(Mode::Limited),
            (_, true) => Some(Mode::Unlimited),
            _ => None,
        };
        Ok(SpecOverrides {
            dt: self.dt,
            mode,
            ic_variant: self
                .ic_variant
                .as_deref()
                .map(str::parse::<IcVariant>)
                .transpose()?,
            exterior_flux: self
                .exterior_flux
                .as_deref()
                .map(str::parse::<ExteriorFlux>)
                .transpose()?,
            monitor_every: self.monitor_every,
            out: self.out.clone(),
            ..Default::default()
        })
    }

    fn file(&self) -> Result<SpecOverrides, Error> {
        match &self.config {
            Some(path) => SpecOverrides::from_file(path),
            None => Ok(SpecOverrides::default()),
        }
    }
}

fn resolve(command: &Command) -> Result<ExperimentSpec, Error> {
    match command {
        Command::Run(args) => {
            let file = args.common.file()?;
            let mut cli = args.common.overrides()?;
            cli.experiment = args.experiment.as_deref().map(str::parse).transpose()?;
            cli.nx = args.nx;
            cli.ny = args.ny;
            cli.courant = args.courant;
            cli.t_end = args.t_end;
            resolve_layers(file, cli)
        }
        Command::Convergence(common) => {
            let mut file = common.file()?;
            let cli = common.overrides()?;
            match file.experiment {
                None | Some(ExperimentName::ConvergenceSuite) => {}
                Some(other) => {
                    return Err(Error::Config(format!(
                        "config file is for `{other}`, not the convergence suite"
                    )))
                }
            }
            file.experiment = Some(ExperimentName::ConvergenceSuite);
            resolve_layers(file, cli)
        }
    }
}

fn resolve_layers(file: SpecOverrides, mut cli: SpecOverrides) -> Result<ExperimentSpec, Error> {
    let name = cli
        .experiment
        .or(file.experiment)
        .ok_or_else(|| Error::Config("no experiment given (use --experiment)".into()))?;
    cli.experiment = None;
    let file = SpecOverrides {
        experiment: None,
        ..file
    };
    ExperimentSpec::resolve(name, &[&file, &cli])
}

fn report(spec: &ExperimentSpec, report: &ExperimentReport) {
    println!("experiment {} ({})", spec.name, spec.mode);
    for run in &report.runs {
        let s = &run.summary;
        print!(
            "  {}x{}  dt={:.6e}  steps={}  t={:.6}  min={:.6e}  max={:.6e}  mass_drift={:.3e}",
            s.nx, s.ny, s.dt, s.steps, s.t_end, s.min, s.max, s.mass_drift
        );
        match s.l2_error {
            Some(e) => println!("  l2_error={e:.6e}"),
            None => println!(),
        }
    }
    if let Some(rows) = &report.convergence {
        println!("  dx        l2_error      order");
        for r in rows {
            let order = r
                .observed_order
                .map(|p| format!("{p:.3}"))
                .unwrap_or_default();
            println!("  {:<8}  {:.6e}  {order}", r.dx, r.l2_error);
        }
        println!("  least-squares order {:.3}", least_squares_order(rows));
    }
    if let Some(dir) = &spec.out_dir {
        println!("  output in {}", dir.display());
    }
}

fn exit_code(err: &Error) -> ExitCode {
    if err.is_numerical() {
        ExitCode::from(2)
    } else if matches!(err, Error::Config(_)) {
        ExitCode::from(3)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = resolve(&cli.command).and_then(|spec| {
        let r = run_experiment(&spec)?;
        report(&spec, &r);
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("edg: {e}");
            exit_code(&e)
        }
    }
}
