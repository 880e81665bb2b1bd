//! Driving one chain run: initial state, boundary loading, sampling, events.

use serde::Serialize;

use crate::chain::{
    build_initial_state, detect_fracture, discrete_energy, BoundaryCondition, ChainModel, ChainState,
    DefectSpec, FractureReport,
};
use crate::error::{Error, Result};
use crate::integrator::{integrate_observed, IntegratorConfig, StepStats};
use crate::potential::LennardJones;
use crate::scalar::Real;
use crate::statics::{equilibrium, Equilibrium};

/// Loading of the left end. The right end is always held at `φ_M = a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Loading<T> {
    Fixed,
    EndLoad { v0: T },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec<T> {
    pub defect: DefectSpec<T>,
    pub cells: usize,
    pub rho0: T,
    /// Artificial viscosity; zero gives the conservative chain.
    pub mu: T,
    pub loading: Loading<T>,
    /// Sample times, strictly increasing and non-negative.
    pub times: Vec<T>,
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: Option<T>,
    /// Stop at the first sample showing a broken bond.
    pub stop_at_fracture: bool,
}

impl<T: Real> RunSpec<T> {
    pub fn new(defect: DefectSpec<T>, cells: usize, times: Vec<T>) -> Self {
        Self {
            defect,
            cells,
            rho0: T::one(),
            mu: T::zero(),
            loading: Loading::Fixed,
            times,
            rel_tol: T::lit(1e-6),
            abs_tol: T::lit(1e-9),
            max_step: None,
            stop_at_fracture: false,
        }
    }

    pub fn with_viscosity(mut self, mu: T) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_loading(mut self, loading: Loading<T>) -> Self {
        self.loading = loading;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: T, abs_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    /// `t_k = k·dt`, `k = 0..=count`.
    pub fn uniform_times(dt: T, count: usize) -> Vec<T> {
        (0..=count).map(|k| dt * T::from_count(k)).collect()
    }
}

/// Samples and events of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput<T> {
    pub states: Vec<ChainState<T>>,
    pub energies: Vec<T>,
    pub fracture: Option<FractureReport<T>>,
    /// Set when the integrator gave up; the samples before it remain valid.
    pub abort: Option<AbortRecord>,
    pub stats: StepStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbortRecord {
    pub t: f64,
    pub message: String,
    /// Crossed cell, when the abort came from a neighbour crossing.
    pub crossed_cell: Option<usize>,
}

impl<T: Real> RunOutput<T> {
    pub fn times(&self) -> Vec<T> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn final_state(&self) -> Option<&ChainState<T>> {
        self.states.last()
    }
}

pub fn initial_state<T: Real>(pot: &LennardJones<T>, spec: &RunSpec<T>) -> Result<ChainState<T>> {
    let state = build_initial_state(pot, &spec.defect, spec.cells, spec.rho0)?;
    Ok(match spec.loading {
        Loading::Fixed => state,
        Loading::EndLoad { v0 } => {
            let a = state.bc.right_position();
            state.with_boundary(BoundaryCondition::EndLoad { v0, a })
        }
    })
}

/// Integrates the chain and records the samples. Integration aborts are
/// reported in the output; configuration and domain errors are returned.
pub fn run_chain<T: Real>(pot: &LennardJones<T>, spec: &RunSpec<T>) -> Result<RunOutput<T>> {
    if spec.times.is_empty() {
        return Err(Error::Config("no sample times".into()));
    }
    let state0 = initial_state(pot, spec)?;
    let model = ChainModel::new(*pot, &state0, spec.mu)?;
    let mut cfg = IntegratorConfig::with_tolerances(spec.rel_tol, spec.abs_tol).with_samples(spec.times.clone());
    cfg.max_step = spec.max_step;

    let mut states = Vec::with_capacity(spec.times.len());
    let mut energies = Vec::with_capacity(spec.times.len());
    let mut fracture = None;
    let result = integrate_observed(&model, state0.t, &state0.unknowns(), &cfg, |t, y| {
        let s = state0.from_unknowns(t, y);
        if let Some(cell) = s.crossed {
            return Err(Error::Crossed { cell });
        }
        energies.push(discrete_energy(pot, &s)?);
        if fracture.is_none() {
            fracture = detect_fracture(pot, &s);
        }
        states.push(s);
        Ok(!(spec.stop_at_fracture && fracture.is_some()))
    });
    let (stats, abort) = match result {
        Ok(stats) => (stats, None),
        Err(Error::IntegrationAborted { t, reason, .. }) => {
            let crossed_cell = match *reason {
                Error::Crossed { cell } => Some(cell),
                _ => None,
            };
            (StepStats::default(), Some(AbortRecord { t, message: reason.to_string(), crossed_cell }))
        }
        Err(Error::Crossed { cell }) => {
            let t = states.last().map(|s: &ChainState<T>| s.t.as_f64()).unwrap_or(0.0);
            (
                StepStats::default(),
                Some(AbortRecord { t, message: format!("neighbouring nodes crossed in cell {}", cell), crossed_cell: Some(cell) }),
            )
        }
        Err(e @ Error::StepUnderflow { t, .. }) => {
            (StepStats::default(), Some(AbortRecord { t, message: e.to_string(), crossed_cell: None }))
        }
        Err(e) => return Err(e),
    };
    Ok(RunOutput { states, energies, fracture, abort, stats })
}

/// Static state the fixed-end run relaxes to: the uniform strain `a = φ_M`,
/// realized through the equilibrium problem at stress level `σ(a)`.
pub fn static_reference<T: Real>(pot: &LennardJones<T>, defect: &DefectSpec<T>) -> Result<Equilibrium<T>> {
    let a = defect.end_position();
    if a < T::one() {
        return equilibrium(pot, a, None);
    }
    equilibrium(pot, a, Some(pot.sigma(a)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_run_samples_every_time() {
        let pot = LennardJones::<f64>::default();
        let spec = RunSpec::new(DefectSpec::new(1.0, 1.1, 0.1), 16, RunSpec::uniform_times(0.01, 4));
        let out = run_chain(&pot, &spec).unwrap();
        assert_eq!(out.states.len(), 5);
        assert_eq!(out.energies.len(), 5);
        assert!(out.fracture.is_none() && out.abort.is_none());
        assert!((out.states[4].t - 0.04).abs() < 1e-15);
        let drift = (out.energies[4] - out.energies[0]).abs() / out.energies[0].abs();
        assert!(drift < 1e-5, "{}", drift);
    }

    #[test]
    fn end_load_moves_the_left_end() {
        let pot = LennardJones::<f64>::default();
        let spec = RunSpec::new(DefectSpec::new(1.0, 1.1, 0.1), 16, vec![0.0, 0.1])
            .with_loading(Loading::EndLoad { v0: -0.05 });
        let out = run_chain(&pot, &spec).unwrap();
        assert!((out.states[1].positions[0] + 0.005).abs() < 1e-15);
    }

    #[test]
    fn empty_times_is_a_config_error() {
        let pot = LennardJones::<f64>::default();
        let spec = RunSpec::new(DefectSpec::new(1.0, 1.1, 0.1), 16, vec![]);
        assert!(matches!(run_chain(&pot, &spec), Err(Error::Config(_))));
    }

    #[test]
    fn reference_is_uniform_end_strain() {
        let pot = LennardJones::<f64>::default();
        for (s2, delta) in [(1.1, 0.2), (1.3, 0.2), (1.3, 0.03)] {
            let d = DefectSpec::new(1.0, s2, delta);
            let a = d.end_position();
            let r = static_reference(&pot, &d).unwrap();
            for x in [0.1, 0.5, 0.9] {
                assert!((r.position_at(x) - a * x).abs() < 1e-10, "{} {}", s2, x);
            }
        }
    }
}
