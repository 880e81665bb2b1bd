//! The experiment commands. Each writes its files plus `manifest.json`.

use std::fmt;
use std::path::Path;

use anyhow::{Context, Result};
use atomchain::analysis::{
    consistency_table, energy_report, growth_spectrum, linearized_growth_run, measure_growth_rate, Measure,
    Reference, Regime,
};
use atomchain::averaging::space_time_average;
use atomchain::experiment::{run_chain, AbortRecord, Loading};
use atomchain::riemann::RiemannState;
use atomchain::statics::{classify_stability, equilibrium};
use atomchain::{
    ConsistencyReport, CriticalConstants, FieldSnapshot, FractureReport, LennardJones, RiemannSolution,
    RiemannSolver, RunOutput, RunSpec,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{BoundaryConfig, ExperimentConfig, MeasureFlag, ReferenceChoice};
use crate::output::{ensure_dir, plot_snapshot, sample_stem, write_json, write_snapshot};

/// A run stopped by the integrator. Mapped to exit code 4 once the manifest
/// has been written.
#[derive(Debug)]
pub struct RunsAborted(pub Vec<String>);

impl fmt::Display for RunsAborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} run(s) aborted: {}", self.0.len(), self.0.join("; "))
    }
}

impl std::error::Error for RunsAborted {}

#[derive(Serialize)]
struct Manifest<'a, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a ExperimentConfig,
    constants: CriticalConstants,
    result: R,
    events: Vec<Event>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Event {
    Fracture { run: String, cells: usize, report: FractureReport },
    Abort { run: String, cells: usize, record: AbortRecord },
}

fn write_manifest<R: Serialize>(
    cfg: &ExperimentConfig,
    pot: &LennardJones,
    command: &'static str,
    result: R,
    events: Vec<Event>,
) -> Result<()> {
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: cfg,
        constants: *pot.constants(),
        result,
        events,
    };
    write_json(&cfg.output.dir.join("manifest.json"), &manifest)
}

// ---------------------------------------------------------------------------
// Chain runs

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Dynamics {
    Conservative,
    Viscous,
}

impl Dynamics {
    fn label(self) -> &'static str {
        match self {
            Dynamics::Conservative => "conservative",
            Dynamics::Viscous => "viscous",
        }
    }
}

fn dynamics_for(cfg: &ExperimentConfig) -> Vec<Dynamics> {
    let m = &cfg.dynamics.measures;
    let mut out = Vec::new();
    if m.contains(&MeasureFlag::Raw) || m.contains(&MeasureFlag::Mollified) {
        out.push(Dynamics::Conservative);
    }
    if m.contains(&MeasureFlag::Viscous) {
        out.push(Dynamics::Viscous);
    }
    out
}

fn loading(cfg: &ExperimentConfig) -> Loading<f64> {
    match cfg.boundary {
        BoundaryConfig::Fixed => Loading::Fixed,
        BoundaryConfig::EndLoad { v0 } => Loading::EndLoad { v0 },
    }
}

fn run_spec(cfg: &ExperimentConfig, cells: usize, dynamics: Dynamics, stop_at_fracture: bool) -> RunSpec {
    let mu = match dynamics {
        Dynamics::Conservative => 0.0,
        Dynamics::Viscous => cfg.dynamics.mu,
    };
    let mut spec = RunSpec::new(cfg.defect(), cells, cfg.sample_times())
        .with_viscosity(mu)
        .with_loading(loading(cfg))
        .with_tolerances(cfg.integrator.rel_tol, cfg.integrator.abs_tol);
    spec.rho0 = cfg.mesh.rho0;
    spec.max_step = cfg.integrator.max_step;
    spec.stop_at_fracture = stop_at_fracture;
    spec
}

/// Output-time snapshots of a run, with the mollified fields when asked for.
struct Sampled {
    raw: Vec<FieldSnapshot>,
    averaged: Vec<Option<FieldSnapshot>>,
    eps: Option<f64>,
}

fn is_output_time(cfg_times: &[f64], t: f64) -> bool {
    cfg_times.iter().any(|&s| (s - t).abs() <= 1e-12 * s.abs().max(1.0))
}

fn sample_run(cfg: &ExperimentConfig, out: &RunOutput, cells: usize, averaged: bool) -> Result<Sampled> {
    let times = cfg.output_times();
    let series: Vec<FieldSnapshot> = out.states.iter().map(|s| s.to_snapshot()).collect();
    let eps = averaged.then(|| cfg.averaging.eps_for(cells));
    let mut raw = Vec::new();
    let mut avg = Vec::new();
    for snap in series.iter().filter(|s| is_output_time(&times, s.t)) {
        avg.push(match eps {
            Some(e) => Some(space_time_average(&series, snap.t, e, cfg.averaging.tau)?),
            None => None,
        });
        raw.push(snap.clone());
    }
    Ok(Sampled { raw, averaged: avg, eps })
}

#[derive(Debug, Clone, Serialize)]
struct RunRecord {
    cells: usize,
    dynamics: Dynamics,
    mu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    samples: usize,
    final_time: f64,
    initial_energy: f64,
    max_relative_energy_drift: f64,
    files: Vec<String>,
    plots: Vec<String>,
    fracture: Option<FractureReport>,
    abort: Option<AbortRecord>,
    steps: atomchain::integrator::StepStats,
}

fn simulate_one(
    cfg: &ExperimentConfig,
    pot: &LennardJones,
    cells: usize,
    dynamics: Dynamics,
    stop_at_fracture: bool,
) -> Result<RunRecord> {
    let spec = run_spec(cfg, cells, dynamics, stop_at_fracture);
    let out = run_chain(pot, &spec).with_context(|| format!("run M = {} ({})", cells, dynamics.label()))?;
    let averaged = dynamics == Dynamics::Conservative && cfg.dynamics.measures.contains(&MeasureFlag::Mollified);
    let sampled = sample_run(cfg, &out, cells, averaged)?;
    let dir = &cfg.output.dir;
    let mut files = Vec::new();
    let mut plots = Vec::new();
    for (snap, avg) in sampled.raw.iter().zip(&sampled.averaged) {
        let stem = sample_stem(cells, dynamics.label(), snap.t);
        files.push(write_snapshot(dir, &stem, snap, avg.as_ref(), cfg.output.format)?);
        if cfg.output.plot {
            plots.push(plot_snapshot(dir, &stem, snap, avg.as_ref())?);
        }
    }
    let energy = energy_report(&out.energies, 0.0)?;
    Ok(RunRecord {
        cells,
        dynamics,
        mu: spec.mu,
        eps: sampled.eps,
        samples: out.states.len(),
        final_time: out.final_state().map_or(0.0, |s| s.t),
        initial_energy: energy.initial,
        max_relative_energy_drift: energy.max_relative_drift,
        files,
        plots,
        fracture: out.fracture,
        abort: out.abort,
        steps: out.stats,
    })
}

fn events_of(records: &[RunRecord]) -> Vec<Event> {
    let mut events = Vec::new();
    for r in records {
        let run = format!("M{}_{}", r.cells, r.dynamics.label());
        if let Some(report) = r.fracture {
            events.push(Event::Fracture { run: run.clone(), cells: r.cells, report });
        }
        if let Some(record) = &r.abort {
            events.push(Event::Abort { run, cells: r.cells, record: record.clone() });
        }
    }
    events
}

fn aborted(events: &[Event]) -> Result<()> {
    let msgs: Vec<String> = events
        .iter()
        .filter_map(|e| match e {
            Event::Abort { run, record, .. } => Some(format!("{} at t = {}: {}", run, record.t, record.message)),
            Event::Fracture { .. } => None,
        })
        .collect();
    if msgs.is_empty() {
        Ok(())
    } else {
        Err(RunsAborted(msgs).into())
    }
}

/// Chain runs over every mesh, conservative and/or viscous.
pub fn simulate(cfg: &ExperimentConfig, command: &'static str, stop_at_fracture: bool) -> Result<()> {
    let pot = cfg.potential()?;
    ensure_dir(&cfg.output.dir)?;
    let jobs: Vec<(usize, Dynamics)> =
        cfg.mesh.cells.iter().flat_map(|&m| dynamics_for(cfg).into_iter().map(move |d| (m, d))).collect();
    let records = jobs
        .par_iter()
        .map(|&(m, d)| simulate_one(cfg, &pot, m, d, stop_at_fracture))
        .collect::<Result<Vec<_>>>()?;
    let events = events_of(&records);
    for r in &records {
        let state = match (&r.fracture, &r.abort) {
            (_, Some(a)) => format!("aborted at t = {:.6}", a.t),
            (Some(f), None) => format!("fracture at t = {:.6}, X = {:.6}", f.t, f.location),
            (None, None) => "ok".to_string(),
        };
        println!("M = {:5} {:12} samples {:5} t_end {:.6}  {}", r.cells, r.dynamics.label(), r.samples, r.final_time, state);
    }
    write_manifest(cfg, &pot, command, &records, events.clone())?;
    aborted(&events)
}

// ---------------------------------------------------------------------------
// Exact Riemann solution

fn exact_solution(cfg: &ExperimentConfig, pot: &LennardJones) -> Result<RiemannSolution> {
    let solver = RiemannSolver::new(*pot);
    Ok(match cfg.boundary {
        BoundaryConfig::Fixed => solver.defect_problem(&cfg.defect())?,
        BoundaryConfig::EndLoad { v0 } => solver.end_load_fan(v0, RiemannState::new(cfg.defect.s1, 0.0))?,
    })
}

fn check_horizon(sol: &RiemannSolution, times: &[f64]) -> Result<()> {
    if let Some(&t) = times.iter().find(|&&t| t >= sol.horizon) {
        return Err(atomchain::Error::Horizon { t, horizon: sol.horizon }.into());
    }
    Ok(())
}

#[derive(Serialize)]
struct RiemannRecord<'a> {
    solution: &'a RiemannSolution,
    wave_speeds: Vec<f64>,
    files: Vec<String>,
    plots: Vec<String>,
}

pub fn riemann(cfg: &ExperimentConfig) -> Result<()> {
    let pot = cfg.potential()?;
    let sol = exact_solution(cfg, &pot)?;
    let times = cfg.output_times();
    check_horizon(&sol, &times)?;
    ensure_dir(&cfg.output.dir)?;
    let n = cfg.riemann.points;
    let xs = FieldSnapshot::cell_centres(n);
    let mut files = Vec::new();
    let mut plots = Vec::new();
    for &t in &times {
        let snap = sol.to_snapshot(&xs, t)?;
        let stem = sample_stem(n, "exact", t);
        files.push(write_snapshot(&cfg.output.dir, &stem, &snap, None, cfg.output.format)?);
        if cfg.output.plot {
            plots.push(plot_snapshot(&cfg.output.dir, &stem, &snap, None)?);
        }
    }
    for w in &sol.waves {
        println!(
            "{:?}: F {:.6} -> {:.6}, speed [{:.6}, {:.6}]",
            w.kind, w.left.strain, w.right.strain, w.speed_range.0, w.speed_range.1
        );
    }
    if sol.waves.is_empty() {
        println!("constant solution, no waves");
    }
    println!("horizon {}", sol.horizon);
    let record = RiemannRecord { solution: &sol, wave_speeds: sol.waves.iter().map(|w| w.speed()).collect(), files, plots };
    write_json(&cfg.output.dir.join("riemann.json"), &record)?;
    write_manifest(cfg, &pot, "riemann", &record, Vec::new())
}

// ---------------------------------------------------------------------------
// Statics and linear stability

#[derive(Serialize)]
struct StaticRecord {
    a: f64,
    c: Option<f64>,
    equilibrium: atomchain::Equilibrium,
    energy: f64,
    stability: atomchain::StabilityVerdict,
}

pub fn statics(cfg: &ExperimentConfig) -> Result<()> {
    let pot = cfg.potential()?;
    let s = &cfg.statics;
    let eq = equilibrium(&pot, s.a, s.c)?;
    let record = StaticRecord {
        a: s.a,
        c: s.c,
        equilibrium: eq,
        energy: eq.energy(&pot)?,
        stability: classify_stability(&pot, eq.into())?,
    };
    ensure_dir(&cfg.output.dir)?;
    write_json(&cfg.output.dir.join("static.json"), &record)?;
    println!("{}", serde_json::to_string_pretty(&record)?);
    write_manifest(cfg, &pot, "static", &record, Vec::new())
}

#[derive(Serialize)]
struct StabilityRecord {
    spectrum: atomchain::GrowthSpectrum,
    predicted_rate: Option<f64>,
    measured_rate: Option<f64>,
    relative_error: Option<f64>,
}

pub fn stability(cfg: &ExperimentConfig) -> Result<()> {
    let pot = cfg.potential()?;
    let s = &cfg.stability;
    let spectrum = growth_spectrum(&pot, s.a, s.cells, cfg.mesh.rho0)?;
    let predicted = spectrum.max_rate();
    let measured = if spectrum.regime == Regime::Unstable {
        let times: Vec<f64> = (0..s.samples).map(|k| s.t_end * k as f64 / (s.samples - 1) as f64).collect();
        let series = linearized_growth_run(&pot, s.a, s.cells, cfg.mesh.rho0, s.amplitude, times)?;
        Some(measure_growth_rate(&series.times, &series.norms)?)
    } else {
        None
    };
    let relative_error = predicted.zip(measured).map(|(p, m)| (m - p) / p);
    let record = StabilityRecord { spectrum, predicted_rate: predicted, measured_rate: measured, relative_error };
    ensure_dir(&cfg.output.dir)?;
    write_json(&cfg.output.dir.join("stability.json"), &record)?;
    println!("{}", serde_json::to_string_pretty(&record)?);
    write_manifest(cfg, &pot, "stability", &record, Vec::new())
}

// ---------------------------------------------------------------------------
// Mesh consistency

struct MeshRun {
    cells: usize,
    dynamics: Dynamics,
    sampled: Sampled,
    abort: Option<AbortRecord>,
    fracture: Option<FractureReport>,
}

fn consistency_runs(cfg: &ExperimentConfig, pot: &LennardJones) -> Result<Vec<MeshRun>> {
    let jobs: Vec<(usize, Dynamics)> =
        cfg.mesh.cells.iter().flat_map(|&m| dynamics_for(cfg).into_iter().map(move |d| (m, d))).collect();
    jobs.par_iter()
        .map(|&(cells, dynamics)| {
            let out = run_chain(pot, &run_spec(cfg, cells, dynamics, false))
                .with_context(|| format!("run M = {} ({})", cells, dynamics.label()))?;
            let averaged =
                dynamics == Dynamics::Conservative && cfg.dynamics.measures.contains(&MeasureFlag::Mollified);
            let sampled = sample_run(cfg, &out, cells, averaged)?;
            Ok(MeshRun { cells, dynamics, sampled, abort: out.abort, fracture: out.fracture })
        })
        .collect()
}

fn cases_for(runs: &[MeshRun], measure: MeasureFlag, k: usize) -> Vec<(usize, FieldSnapshot)> {
    runs.iter()
        .filter_map(|r| {
            let snap = match (measure, r.dynamics) {
                (MeasureFlag::Raw, Dynamics::Conservative) => r.sampled.raw.get(k)?.clone(),
                (MeasureFlag::Mollified, Dynamics::Conservative) => r.sampled.averaged.get(k)?.clone()?,
                (MeasureFlag::Viscous, Dynamics::Viscous) => r.sampled.raw.get(k)?.clone(),
                _ => return None,
            };
            Some((r.cells, snap))
        })
        .collect()
}

#[derive(Serialize)]
struct ConsistencyRecord {
    reports: Vec<ConsistencyReport>,
    all_monotone: bool,
}

pub fn consistency(cfg: &ExperimentConfig) -> Result<()> {
    let pot = cfg.potential()?;
    let times = cfg.output_times();
    let exact = match cfg.consistency.reference {
        ReferenceChoice::ExactRiemann => {
            let sol = exact_solution(cfg, &pot)?;
            check_horizon(&sol, &times)?;
            Some(sol)
        }
        ReferenceChoice::FinestMesh => None,
    };
    ensure_dir(&cfg.output.dir)?;
    let runs = consistency_runs(cfg, &pot)?;
    let mut events = Vec::new();
    for r in &runs {
        let run = format!("M{}_{}", r.cells, r.dynamics.label());
        if let Some(report) = r.fracture {
            events.push(Event::Fracture { run: run.clone(), cells: r.cells, report });
        }
        if let Some(record) = &r.abort {
            events.push(Event::Abort { run, cells: r.cells, record: record.clone() });
        }
    }
    if !events.iter().any(|e| matches!(e, Event::Abort { .. })) {
        let mut reports = Vec::new();
        for &flag in &cfg.dynamics.measures {
            let measure = match flag {
                MeasureFlag::Raw => Measure::Raw,
                MeasureFlag::Mollified => Measure::Mollified,
                MeasureFlag::Viscous => Measure::Viscous,
            };
            for k in 0..times.len() {
                let cases = cases_for(&runs, flag, k);
                let reference = match &exact {
                    Some(sol) => Reference::ExactRiemann(sol),
                    None => Reference::FinestMesh,
                };
                reports.push(consistency_table(&cases, measure, reference)?);
            }
        }
        print_reports(&reports);
        write_table(&cfg.output.dir.join("consistency.csv"), &reports)?;
        let record = ConsistencyRecord { all_monotone: reports.iter().all(|r| r.monotone), reports };
        write_manifest(cfg, &pot, "consistency", &record, events.clone())?;
    } else {
        write_manifest(cfg, &pot, "consistency", (), events.clone())?;
    }
    aborted(&events)
}

fn print_reports(reports: &[ConsistencyReport]) {
    for r in reports {
        println!("{:?} at t = {:.6} ({:?}), monotone: {}", r.measure, r.t, r.reference, r.monotone);
        for row in &r.rows {
            println!("  M = {:5}  L2 {:.6e}  Linf {:.6e}", row.cells, row.l2, row.linf);
        }
    }
}

fn write_table(path: &Path, reports: &[ConsistencyReport]) -> Result<()> {
    let mut text = String::from("measure,t,M,l2,linf\n");
    for r in reports {
        let measure = serde_json::to_value(r.measure)?;
        for row in &r.rows {
            text.push_str(&format!(
                "{},{:.16e},{},{:.16e},{:.16e}\n",
                measure.as_str().unwrap_or("?"),
                r.t,
                row.cells,
                row.l2,
                row.linf
            ));
        }
    }
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
