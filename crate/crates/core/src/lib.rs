//! One-dimensional Lennard-Jones chain: statics, semi-discrete dynamics,
//! exact Riemann solutions of the continuum limit, and the diagnostics that
//! compare them.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`.

pub mod analysis;
pub mod averaging;
pub mod chain;
pub mod error;
pub mod experiment;
pub mod numerics;
pub mod integrator;
pub mod potential;
pub mod riemann;
pub mod snapshot;
pub mod scalar;
pub mod statics;

pub use error::{Error, Result};
pub use scalar::Real;

pub type LennardJones = potential::LennardJones<f64>;
pub type PotentialParams = potential::PotentialParams<f64>;
pub type CriticalConstants = potential::CriticalConstants<f64>;
pub type StabilityVerdict = statics::StabilityVerdict<f64>;
pub type Equilibrium = statics::Equilibrium<f64>;
pub type DefectSpec = chain::DefectSpec<f64>;
pub type BoundaryCondition = chain::BoundaryCondition<f64>;
pub type ChainState = chain::ChainState<f64>;
pub type FractureReport = chain::FractureReport<f64>;
pub type IntegratorConfig = integrator::IntegratorConfig<f64>;
pub type RiemannSolver = riemann::RiemannSolver<f64>;
pub type RiemannSolution = riemann::RiemannSolution<f64>;
pub type RiemannState = riemann::RiemannState<f64>;
pub type FieldSnapshot = snapshot::FieldSnapshot<f64>;
pub type Mollifier = averaging::Mollifier<f64>;
pub type GrowthSpectrum = analysis::GrowthSpectrum<f64>;
pub type ConsistencyReport = analysis::ConsistencyReport<f64>;
pub type RunSpec = experiment::RunSpec<f64>;
pub type RunOutput = experiment::RunOutput<f64>;
