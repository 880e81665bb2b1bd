//! Semi-discrete chain on `[0, 1]` with `M` cells:
//!
//! ```text
//! ρ₀ φ_j'' = (σ(s_j) − σ(s_{j−1}))/ΔX + μ (v_{j+1} − 2v_j + v_{j−1})/ΔX²,   s_j = (φ_{j+1} − φ_j)/ΔX
//! ```
//!
//! With `ΔX = ε` the conservative part coincides with nearest-neighbour
//! molecular dynamics, see [`md_rhs`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::SecondOrderSystem;
use crate::potential::LennardJones;
use crate::scalar::Real;
use crate::snapshot::{FieldSnapshot, Provenance};

/// Piecewise-constant initial strain: `s2` on `(½ − δ, ½ + δ)`, `s1` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefectSpec<T> {
    pub s1: T,
    pub s2: T,
    pub delta: T,
}

impl<T: Real> DefectSpec<T> {
    pub fn new(s1: T, s2: T, delta: T) -> Self {
        Self { s1, s2, delta }
    }

    pub fn validate(&self, pot: &LennardJones<T>) -> Result<()> {
        let half = T::lit(0.5);
        if !(self.delta > T::zero() && self.delta < half) {
            return Err(Error::InvalidParameter(format!(
                "defect half-width must lie in (0, 1/2), got {}",
                self.delta
            )));
        }
        let zc = pot.cutoff_strain();
        for (name, s) in [("s1", self.s1), ("s2", self.s2)] {
            if !(s > T::zero() && s <= zc) {
                return Err(Error::InvalidParameter(format!(
                    "{} = {} outside (0, z_cut = {}]",
                    name, s, zc
                )));
            }
        }
        Ok(())
    }

    /// Defect amplitude `η = s2 − 1`.
    pub fn eta(&self) -> T {
        self.s2 - T::one()
    }

    /// Right end `φ(1) = s1(1 − 2δ) + 2δ s2`.
    pub fn end_position(&self) -> T {
        let two_delta = self.delta + self.delta;
        self.s1 * (T::one() - two_delta) + self.s2 * two_delta
    }

    pub fn strain_at(&self, x: T) -> T {
        let half = T::lit(0.5);
        if (x - half).abs() < self.delta {
            self.s2
        } else {
            self.s1
        }
    }

    /// Exact integral `∫₀^X F`.
    pub fn position_at(&self, x: T) -> T {
        let half = T::lit(0.5);
        let lo = half - self.delta;
        let hi = half + self.delta;
        let zero = T::zero();
        self.s1 * x.min(lo) + self.s2 * (x - lo).max(zero).min(hi - lo) + self.s1 * (x - hi).max(zero)
    }
}

/// Conditions at the ends of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryCondition<T> {
    /// `φ₀ = 0`, `φ_M = a`.
    Fixed { a: T },
    /// `φ₀ = v0·t`, `φ_M = a`. Negative `v0` stretches the chain.
    EndLoad { v0: T, a: T },
}

impl<T: Real> BoundaryCondition<T> {
    pub fn right_position(&self) -> T {
        match *self {
            BoundaryCondition::Fixed { a } | BoundaryCondition::EndLoad { a, .. } => a,
        }
    }

    pub fn left_position(&self, t: T) -> T {
        match *self {
            BoundaryCondition::Fixed { .. } => T::zero(),
            BoundaryCondition::EndLoad { v0, .. } => v0 * t,
        }
    }

    pub fn left_velocity(&self) -> T {
        match *self {
            BoundaryCondition::Fixed { .. } => T::zero(),
            BoundaryCondition::EndLoad { v0, .. } => v0,
        }
    }
}

/// Node positions and velocities `j = 0..=M` at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainState<T> {
    pub positions: Vec<T>,
    pub velocities: Vec<T>,
    pub cells: usize,
    pub rho0: T,
    pub t: T,
    pub bc: BoundaryCondition<T>,
    /// First cell found with `φ_{j+1} ≤ φ_j`. A crossed state is refused by
    /// every right-hand side.
    pub crossed: Option<usize>,
}

impl<T: Real> ChainState<T> {
    pub fn new(
        positions: Vec<T>,
        velocities: Vec<T>,
        rho0: T,
        t: T,
        bc: BoundaryCondition<T>,
    ) -> Result<Self> {
        let n = positions.len();
        if n < 3 || velocities.len() != n {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 cells and matching velocities, got {} positions and {} velocities",
                n,
                velocities.len()
            )));
        }
        if !(rho0 > T::zero()) {
            return Err(Error::InvalidParameter(format!("density must be positive, got {}", rho0)));
        }
        let mut state = Self { positions, velocities, cells: n - 1, rho0, t, bc, crossed: None };
        state.apply_boundary();
        state.check_order();
        Ok(state)
    }

    /// Uniformly strained chain `φ_j = a X_j` at rest.
    pub fn uniform(a: T, cells: usize, rho0: T) -> Result<Self> {
        let m = T::from_count(cells);
        let positions = (0..=cells).map(|j| a * T::from_count(j) / m).collect();
        Self::new(positions, vec![T::zero(); cells + 1], rho0, T::zero(), BoundaryCondition::Fixed { a })
    }

    pub fn dx(&self) -> T {
        T::one() / T::from_count(self.cells)
    }

    /// Node coordinates `X_j = j/M`.
    pub fn nodes(&self) -> Vec<T> {
        let m = T::from_count(self.cells);
        (0..=self.cells).map(|j| T::from_count(j) / m).collect()
    }

    pub fn strains(&self) -> Vec<T> {
        let m = T::from_count(self.cells);
        self.positions.windows(2).map(|w| (w[1] - w[0]) * m).collect()
    }

    /// Sets the end nodes from the boundary condition at `self.t`.
    pub fn apply_boundary(&mut self) {
        let m = self.cells;
        self.positions[0] = self.bc.left_position(self.t);
        self.velocities[0] = self.bc.left_velocity();
        self.positions[m] = self.bc.right_position();
        self.velocities[m] = T::zero();
    }

    /// Marks the state as crossed if two neighbours touch or swap.
    pub fn check_order(&mut self) -> Option<usize> {
        if self.crossed.is_none() {
            self.crossed = self.positions.windows(2).position(|w| !(w[1] > w[0]));
        }
        self.crossed
    }

    pub fn with_boundary(mut self, bc: BoundaryCondition<T>) -> Self {
        self.bc = bc;
        self.apply_boundary();
        self.check_order();
        self
    }

    /// Interior unknowns `[φ_1..φ_{M−1}; φ'_1..φ'_{M−1}]`.
    pub fn unknowns(&self) -> Vec<T> {
        let m = self.cells;
        let mut y = Vec::with_capacity(2 * (m - 1));
        y.extend_from_slice(&self.positions[1..m]);
        y.extend_from_slice(&self.velocities[1..m]);
        y
    }

    /// The state at time `t` with interior unknowns `y`.
    pub fn from_unknowns(&self, t: T, y: &[T]) -> Self {
        let m = self.cells;
        let n = m - 1;
        let mut s = Self {
            positions: self.positions.clone(),
            velocities: self.velocities.clone(),
            cells: m,
            rho0: self.rho0,
            t,
            bc: self.bc,
            crossed: None,
        };
        s.positions[1..m].copy_from_slice(&y[..n]);
        s.velocities[1..m].copy_from_slice(&y[n..2 * n]);
        s.apply_boundary();
        s.check_order();
        s
    }

    /// Cell-centred snapshot: `F` is the cell strain, `v` and `φ` are the
    /// averages of the two bounding nodes.
    pub fn to_snapshot(&self) -> FieldSnapshot<T> {
        let half = T::lit(0.5);
        FieldSnapshot {
            t: self.t,
            dx: self.dx(),
            x: FieldSnapshot::cell_centres(self.cells),
            strain: self.strains(),
            velocity: self.velocities.windows(2).map(|w| (w[0] + w[1]) * half).collect(),
            position: self.positions.windows(2).map(|w| (w[0] + w[1]) * half).collect(),
            provenance: Provenance::Raw,
        }
    }
}

/// Initial state: `φ` is the exact integral of the defect strain, at rest,
/// with fixed ends `φ₀ = 0`, `φ_M = a`.
pub fn build_initial_state<T: Real>(
    pot: &LennardJones<T>,
    defect: &DefectSpec<T>,
    cells: usize,
    rho0: T,
) -> Result<ChainState<T>> {
    if cells < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 cells, got {}", cells)));
    }
    defect.validate(pot)?;
    let m = T::from_count(cells);
    let positions: Vec<T> = (0..=cells).map(|j| defect.position_at(T::from_count(j) / m)).collect();
    let a = defect.end_position();
    ChainState::new(positions, vec![T::zero(); cells + 1], rho0, T::zero(), BoundaryCondition::Fixed { a })
}

/// Right-hand side for the interior nodes, shared by the state-level
/// functions and [`ChainModel`].
#[allow(clippy::too_many_arguments)]
fn interior_acceleration<T: Real>(
    pot: &LennardJones<T>,
    cells: usize,
    rho0: T,
    mu: T,
    left: (T, T),
    right: (T, T),
    q: &[T],
    p: &[T],
    out: &mut [T],
) -> Result<()> {
    let m = T::from_count(cells);
    let pos = |j: usize| -> T {
        if j == 0 {
            left.0
        } else if j == cells {
            right.0
        } else {
            q[j - 1]
        }
    };
    let vel = |j: usize| -> T {
        if j == 0 {
            left.1
        } else if j == cells {
            right.1
        } else {
            p[j - 1]
        }
    };
    let inv_rho = rho0.recip();
    let mut stress_left = {
        let s = (pos(1) - pos(0)) * m;
        if !(s > T::zero()) {
            return Err(Error::Crossed { cell: 0 });
        }
        pot.sigma_unchecked(s)
    };
    let visc = mu * m * m;
    for j in 1..cells {
        let s = (pos(j + 1) - pos(j)) * m;
        if !(s > T::zero()) {
            return Err(Error::Crossed { cell: j });
        }
        let stress_right = pot.sigma_unchecked(s);
        let mut acc = (stress_right - stress_left) * m;
        if mu != T::zero() {
            acc += visc * (vel(j + 1) - vel(j) - vel(j) + vel(j - 1));
        }
        out[j - 1] = acc * inv_rho;
        stress_left = stress_right;
    }
    Ok(())
}

fn state_rhs<T: Real>(pot: &LennardJones<T>, state: &ChainState<T>, mu: T) -> Result<Vec<T>> {
    if let Some(cell) = state.crossed {
        return Err(Error::Crossed { cell });
    }
    if mu < T::zero() {
        return Err(Error::InvalidParameter(format!("viscosity must be non-negative, got {}", mu)));
    }
    let m = state.cells;
    let mut out = vec![T::zero(); m + 1];
    interior_acceleration(
        pot,
        m,
        state.rho0,
        mu,
        (state.positions[0], state.velocities[0]),
        (state.positions[m], state.velocities[m]),
        &state.positions[1..m],
        &state.velocities[1..m],
        &mut out[1..m],
    )?;
    // Both boundary conditions prescribe end motion with zero acceleration.
    Ok(out)
}

/// Accelerations `φ_j''`, `j = 0..=M`, of the conservative system.
pub fn rhs_conservative<T: Real>(pot: &LennardJones<T>, state: &ChainState<T>) -> Result<Vec<T>> {
    state_rhs(pot, state, T::zero())
}

/// Accelerations with the viscous term `μ Δ_h v`.
pub fn rhs_viscous<T: Real>(pot: &LennardJones<T>, state: &ChainState<T>, mu: T) -> Result<Vec<T>> {
    state_rhs(pot, state, mu)
}

/// Molecular dynamics accelerations `m x_i'' = Φ'(x_{i+1} − x_i, ε) − Φ'(x_i − x_{i−1}, ε)`.
/// The end atoms are held (zero acceleration).
pub fn md_rhs<T: Real>(pot: &LennardJones<T>, positions: &[T], mass: T, eps: T) -> Result<Vec<T>> {
    if let Some(cell) = positions.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::Crossed { cell });
    }
    let n = positions.len();
    let mut out = vec![T::zero(); n];
    if n < 3 {
        return Ok(out);
    }
    let mut force_left = pot.pair_force(positions[1] - positions[0], eps)?;
    for i in 1..n - 1 {
        let force_right = pot.pair_force(positions[i + 1] - positions[i], eps)?;
        out[i] = (force_right - force_left) / mass;
        force_left = force_right;
    }
    Ok(out)
}

/// `E^d = (ρ₀/2M) Σ_{j=1}^{M−1} v_j² + (1/M) Σ_{j=1}^{M} Θ(s_j)`.
pub fn discrete_energy<T: Real>(pot: &LennardJones<T>, state: &ChainState<T>) -> Result<T> {
    let m = state.cells;
    let mf = T::from_count(m);
    let kinetic: T = state.velocities[1..m].iter().map(|&v| v * v).sum();
    let mut potential = T::zero();
    for s in state.strains() {
        potential += pot.theta(s)?;
    }
    Ok(state.rho0 * kinetic / (mf + mf) + potential / mf)
}

/// First broken bond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FractureReport<T> {
    pub t: T,
    pub cell: usize,
    /// Cell midpoint `(j + ½)ΔX`.
    pub location: T,
    pub strain: T,
}

/// The first cell with strain `≥ z_cut`, if any.
pub fn detect_fracture<T: Real>(pot: &LennardJones<T>, state: &ChainState<T>) -> Option<FractureReport<T>> {
    let zc = pot.cutoff_strain();
    let m = T::from_count(state.cells);
    state
        .strains()
        .into_iter()
        .enumerate()
        .find(|&(_, s)| s >= zc)
        .map(|(cell, strain)| FractureReport {
            t: state.t,
            cell,
            location: (T::from_count(cell) + T::lit(0.5)) / m,
            strain,
        })
}

/// The chain as a second-order system in its interior unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainModel<T> {
    pub pot: LennardJones<T>,
    pub cells: usize,
    pub rho0: T,
    pub mu: T,
    pub bc: BoundaryCondition<T>,
}

impl<T: Real> ChainModel<T> {
    pub fn new(pot: LennardJones<T>, state: &ChainState<T>, mu: T) -> Result<Self> {
        if !(mu >= T::zero()) {
            return Err(Error::InvalidParameter(format!("viscosity must be non-negative, got {}", mu)));
        }
        Ok(Self { pot, cells: state.cells, rho0: state.rho0, mu, bc: state.bc })
    }
}

impl<T: Real> SecondOrderSystem<T> for ChainModel<T> {
    fn dim(&self) -> usize {
        self.cells - 1
    }

    fn acceleration(&self, t: T, q: &[T], p: &[T], out: &mut [T]) -> Result<()> {
        interior_acceleration(
            &self.pot,
            self.cells,
            self.rho0,
            self.mu,
            (self.bc.left_position(t), self.bc.left_velocity()),
            (self.bc.right_position(), T::zero()),
            q,
            p,
            out,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lj() -> LennardJones<f64> {
        LennardJones::default()
    }

    #[test]
    fn initial_state_is_exact_integral() {
        let p = lj();
        let d = DefectSpec::new(1.0, 1.1, 0.1);
        let s = build_initial_state(&p, &d, 10, 1.0).unwrap();
        assert!((s.bc.right_position() - 1.02).abs() < 1e-15);
        assert!((s.positions[4] - 0.4).abs() < 1e-15);
        assert!((s.positions[5] - 0.51).abs() < 1e-15);
        assert!((s.positions[6] - 0.62).abs() < 1e-15);
        assert!(s.velocities.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn straddling_cells_are_split() {
        let p = lj();
        let d = DefectSpec::new(1.0, 1.3, 0.1);
        let s = build_initial_state(&p, &d, 128, 1.0).unwrap();
        let strains = s.strains();
        for (j, &f) in strains.iter().enumerate() {
            let (x0, x1) = (j as f64 / 128.0, (j + 1) as f64 / 128.0);
            if x0 >= 0.4 && x1 <= 0.6 {
                assert!((f - 1.3).abs() < 1e-12);
            } else if x1 <= 0.4 || x0 >= 0.6 {
                assert!((f - 1.0).abs() < 1e-12);
            } else {
                assert!(f > 1.0 && f < 1.3);
            }
        }
        // cell 51 covers [0.3984, 0.40625]; 0.8 of it lies in the defect
        assert!((strains[51] - 1.24).abs() < 1e-12);
        assert!((s.bc.right_position() - 1.06).abs() < 1e-14);
    }

    #[test]
    fn stress_free_chain_is_at_rest() {
        let p = lj();
        let s = build_initial_state(&p, &DefectSpec::new(1.0, 1.0, 0.2), 16, 1.0).unwrap();
        for (j, &x) in s.nodes().iter().enumerate() {
            assert!((s.positions[j] - x).abs() < 1e-15);
        }
        assert!(rhs_conservative(&p, &s).unwrap().iter().all(|&a| a == 0.0));
        assert!((discrete_energy(&p, &s).unwrap() + 1.0 / 48.0).abs() < 1e-15);
        assert!(detect_fracture(&p, &s).is_none());
    }

    #[test]
    fn uniform_chain_is_an_equilibrium() {
        let p = lj();
        let s = ChainState::uniform(1.2, 12, 1.0).unwrap();
        assert!(rhs_conservative(&p, &s).unwrap().iter().all(|&a| a.abs() < 1e-12));
        assert!((discrete_energy(&p, &s).unwrap() - p.theta(1.2).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn single_displaced_node() {
        let p = lj();
        let mut s = ChainState::uniform(1.0, 4, 2.0).unwrap();
        s.positions[2] = 0.55;
        let acc = rhs_conservative(&p, &s).unwrap();
        let sig = |f: f64| 0.25 * (f.powi(-7) - f.powi(-13));
        let (s1, s2) = ((0.55 - 0.25) * 4.0, (0.75 - 0.55) * 4.0);
        let expect1 = (sig(s1) - sig(1.0)) * 4.0 / 2.0;
        let expect2 = (sig(s2) - sig(s1)) * 4.0 / 2.0;
        let expect3 = (sig(1.0) - sig(s2)) * 4.0 / 2.0;
        assert!((acc[1] - expect1).abs() < 1e-12 * expect1.abs().max(1.0));
        assert!((acc[2] - expect2).abs() < 1e-12 * expect2.abs().max(1.0));
        assert!((acc[3] - expect3).abs() < 1e-12 * expect3.abs().max(1.0));
        assert_eq!((acc[0], acc[4]), (0.0, 0.0));
    }

    #[test]
    fn viscous_term() {
        let p = lj();
        let mut s = build_initial_state(&p, &DefectSpec::new(1.0, 1.1, 0.1), 20, 1.0).unwrap();
        assert_eq!(rhs_viscous(&p, &s, 0.0).unwrap(), rhs_conservative(&p, &s).unwrap());
        let base = rhs_conservative(&p, &s).unwrap();
        // v = 0.3 − 0.7X in the interior; ends are pinned at rest, so look
        // away from the boundary stencils.
        for (j, x) in s.nodes().into_iter().enumerate().take(20).skip(1) {
            s.velocities[j] = 0.3 - 0.7 * x;
        }
        let visc = rhs_viscous(&p, &s, 0.5).unwrap();
        for j in 2..19 {
            assert!((visc[j] - base[j]).abs() < 1e-9, "node {j}");
        }
        assert!(matches!(rhs_viscous(&p, &s, -1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn crossed_state_is_refused() {
        let p = lj();
        let mut s = ChainState::uniform(1.0, 4, 1.0).unwrap();
        s.positions[2] = s.positions[1];
        assert_eq!(s.check_order(), Some(1));
        assert!(matches!(rhs_conservative(&p, &s), Err(Error::Crossed { cell: 1 })));
        assert!(matches!(md_rhs(&p, &s.positions, 1.0, 0.25), Err(Error::Crossed { .. })));
    }

    #[test]
    fn md_equispaced_and_stretch() {
        let p = lj();
        let eps = 0.1;
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * eps).collect();
        assert!(md_rhs(&p, &xs, 1.0, eps).unwrap().iter().all(|&a| a.abs() < 1e-12));
        let acc = md_rhs(&p, &[0.0, eps, 3.0 * eps], 1.0, eps).unwrap();
        let phi_prime = |r: f64| 0.25 * (eps.powi(6) * r.powi(-7) - eps.powi(12) * r.powi(-13));
        assert!((acc[1] - phi_prime(2.0 * eps)).abs() < 1e-12);
    }

    #[test]
    fn md_matches_chain_with_unit_scaling() {
        let p = lj();
        let mut s = build_initial_state(&p, &DefectSpec::new(1.0, 1.15, 0.2), 16, 1.3).unwrap();
        s.positions[7] += 0.01;
        let chain = rhs_conservative(&p, &s).unwrap();
        let md = md_rhs(&p, &s.positions, s.rho0, s.dx()).unwrap();
        for (a, b) in chain.iter().zip(&md) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn fracture_detection() {
        let p = lj();
        let mut s = ChainState::uniform(1.0, 8, 1.0).unwrap();
        let stretch = p.cutoff_strain() * 1.01 - 1.0;
        for x in s.positions[4..].iter_mut() {
            *x += stretch / 8.0;
        }
        let report = detect_fracture(&p, &s).unwrap();
        assert_eq!(report.cell, 3);
        assert!((report.location - 3.5 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn end_load_boundary() {
        let bc = BoundaryCondition::EndLoad { v0: -0.05, a: 1.0 };
        let s = ChainState::<f64>::uniform(1.0, 8, 1.0).unwrap().with_boundary(bc);
        let later = s.from_unknowns(2.0, &s.unknowns());
        assert!((later.positions[0] + 0.1).abs() < 1e-15);
        assert_eq!(later.velocities[0], -0.05);
    }

    #[test]
    fn model_matches_state_rhs() {
        let p = lj();
        let mut s = build_initial_state(&p, &DefectSpec::new(1.0, 1.1, 0.1), 16, 1.0).unwrap();
        for (j, v) in s.velocities.iter_mut().enumerate().take(16).skip(1) {
            *v = (j as f64).sin() * 0.01;
        }
        let model = ChainModel::new(p, &s, 0.01).unwrap();
        let y = s.unknowns();
        let mut out = vec![0.0; 15];
        model.acceleration(0.0, &y[..15], &y[15..], &mut out).unwrap();
        assert_eq!(&out[..], &rhs_viscous(&p, &s, 0.01).unwrap()[1..16]);
    }
}
