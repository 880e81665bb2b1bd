//! `atomchain`: run chain experiments from a config file and flags.
//!
//! Exit codes: 0 success, 1 I/O or unexpected failure, 2 configuration
//! error, 3 domain or validity-horizon error, 4 numerical abort.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use crate::config::{
    BoundaryConfig, ConfigError, ExperimentConfig, MeasureFlag, OutputFormat, ReferenceChoice,
};

#[derive(Parser)]
#[command(name = "atomchain", version, about = "Atomic chain simulations and their continuum limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chain runs over a mesh sweep, writing field snapshots.
    Simulate {
        #[command(flatten)]
        base: BaseArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// End-loaded chain runs that stop at the first broken bond.
    Fracture {
        #[command(flatten)]
        base: BaseArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Exact Riemann solution of the defect or end-load problem.
    Riemann {
        #[command(flatten)]
        base: BaseArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Number of sample points.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Equilibrium with end displacement `a` and its stability.
    Static {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long)]
        a: Option<f64>,
        /// Stress level of the two-phase solution.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Linear growth spectrum of the uniform state `a`, checked by a run.
    Stability {
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long)]
        a: Option<f64>,
        /// Cells of the linearized chain.
        #[arg(long = "chain-cells")]
        chain_cells: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        amplitude: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Error tables of the mesh sweep against a reference.
    Consistency {
        #[command(flatten)]
        base: BaseArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_enum)]
        reference: Option<ReferenceChoice>,
    },
}

#[derive(Args)]
struct BaseArgs {
    /// TOML or JSON configuration; a run manifest is accepted too.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Stress prefactor `3A` of the potential.
    #[arg(long)]
    three_a: Option<f64>,
    #[arg(long)]
    eta_cut: Option<f64>,
    #[arg(long)]
    rho0: Option<f64>,
    /// Output directory.
    #[arg(long, env = "ATOMCHAIN_OUT")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Also write SVG plots.
    #[arg(long)]
    plot: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    s1: Option<f64>,
    #[arg(long)]
    s2: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Comma-separated cell counts.
    #[arg(long, value_delimiter = ',')]
    cells: Option<Vec<usize>>,
    /// Viscosity of the viscous runs.
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, value_enum, value_delimiter = ',')]
    measures: Option<Vec<MeasureFlag>>,
    /// Pull the left end with this velocity.
    #[arg(long, allow_negative_numbers = true)]
    v0: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    /// Comma-separated output times; replaces dt and count.
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    #[arg(long)]
    monitor_dt: Option<f64>,
    /// Fixed mollifier scale.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    max_step: Option<f64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl BaseArgs {
    fn load(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(t) = self.three_a {
            cfg.potential.three_a = Some(t);
            cfg.potential.energy_scale = None;
        }
        set(&mut cfg.potential.eta_cut, self.eta_cut);
        set(&mut cfg.mesh.rho0, self.rho0);
        set(&mut cfg.output.dir, self.out.clone());
        set(&mut cfg.output.format, self.format);
        cfg.output.plot |= self.plot;
        Ok(cfg)
    }
}

impl SweepArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        set(&mut cfg.defect.s1, self.s1);
        set(&mut cfg.defect.s2, self.s2);
        set(&mut cfg.defect.delta, self.delta);
        set(&mut cfg.mesh.cells, self.cells.clone());
        set(&mut cfg.dynamics.mu, self.mu);
        set(&mut cfg.dynamics.measures, self.measures.clone());
        if let Some(v0) = self.v0 {
            cfg.boundary = BoundaryConfig::EndLoad { v0 };
        }
        set(&mut cfg.times.dt, self.dt);
        set(&mut cfg.times.count, self.count);
        if self.dt.is_some() || self.count.is_some() {
            cfg.times.list = None;
        }
        if let Some(list) = &self.times {
            cfg.times.list = Some(list.clone());
        }
        if self.monitor_dt.is_some() {
            cfg.times.monitor_dt = self.monitor_dt;
        }
        if self.eps.is_some() {
            cfg.averaging.eps = self.eps;
        }
        set(&mut cfg.averaging.tau, self.tau);
        set(&mut cfg.integrator.rel_tol, self.rel_tol);
        set(&mut cfg.integrator.abs_tol, self.abs_tol);
        if self.max_step.is_some() {
            cfg.integrator.max_step = self.max_step;
        }
    }
}

/// Default end-load velocity of the `fracture` command.
const FRACTURE_V0: f64 = -0.05;

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { base, sweep } => {
            let cfg = configure(&base, Some(&sweep), |_| {})?;
            commands::simulate(&cfg, "simulate", false)
        }
        Command::Fracture { base, sweep } => {
            let cfg = configure(&base, Some(&sweep), |cfg| {
                if cfg.boundary == BoundaryConfig::Fixed {
                    cfg.boundary = BoundaryConfig::EndLoad { v0: FRACTURE_V0 };
                }
            })?;
            commands::simulate(&cfg, "fracture", true)
        }
        Command::Riemann { base, sweep, points } => {
            let cfg = configure(&base, Some(&sweep), |cfg| set(&mut cfg.riemann.points, points))?;
            commands::riemann(&cfg)
        }
        Command::Static { base, a, c } => {
            let cfg = configure(&base, None, |cfg| {
                set(&mut cfg.statics.a, a);
                if c.is_some() {
                    cfg.statics.c = c;
                }
            })?;
            commands::statics(&cfg)
        }
        Command::Stability { base, a, chain_cells, amplitude, t_end } => {
            let cfg = configure(&base, None, |cfg| {
                set(&mut cfg.stability.a, a);
                set(&mut cfg.stability.cells, chain_cells);
                set(&mut cfg.stability.amplitude, amplitude);
                set(&mut cfg.stability.t_end, t_end);
            })?;
            commands::stability(&cfg)
        }
        Command::Consistency { base, sweep, reference } => {
            let cfg = configure(&base, Some(&sweep), |cfg| set(&mut cfg.consistency.reference, reference))?;
            commands::consistency(&cfg)
        }
    }
}

fn configure(
    base: &BaseArgs,
    sweep: Option<&SweepArgs>,
    extra: impl FnOnce(&mut ExperimentConfig),
) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = base.load()?;
    if let Some(s) = sweep {
        s.apply(&mut cfg);
    }
    extra(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use atomchain::Error as E;
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    if err.downcast_ref::<commands::RunsAborted>().is_some() {
        return 4;
    }
    match err.downcast_ref::<E>() {
        Some(E::Config(_) | E::InvalidParameter(_)) => 2,
        Some(
            E::IntegrationAborted { .. }
            | E::StepUnderflow { .. }
            | E::Crossed { .. }
            | E::Structure { .. }
            | E::RegimeMismatch(_)
            | E::Diagnostic(_),
        ) => 4,
        Some(_) => 3,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {:#}", err);
            ExitCode::from(exit_code(&err))
        }
    }
}
