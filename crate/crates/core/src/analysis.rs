//! Diagnostics over runs: linear stability spectra, energy and bound
//! monitors, front tracking, mesh consistency, oscillation wavelength and
//! relaxation to statics.

use serde::Serialize;

use crate::averaging::{choose_eps, mollify};
use crate::chain::ChainState;
use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorConfig, SecondOrderSystem};
use crate::numerics::linear_fit_slope;
use crate::potential::LennardJones;
use crate::riemann::RiemannSolution;
use crate::scalar::Real;
use crate::snapshot::FieldSnapshot;
use crate::statics::Equilibrium;

// ---------------------------------------------------------------------------
// Linear stability of a uniform state

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    StableOscillatory,
    Unstable,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSpectrum<T> {
    pub strain: T,
    pub cells: usize,
    /// `λ_i = −4 sin²(iπ/2M)`, `i = 1..M−1`.
    pub eigenvalues: Vec<T>,
    /// `α_i = σ′(a) λ_i / (ρ₀ ΔX²)`.
    pub alpha: Vec<T>,
    /// `√α_i` for the positive `α_i`.
    pub rates: Vec<T>,
    pub regime: Regime,
}

impl<T: Real> GrowthSpectrum<T> {
    pub fn max_rate(&self) -> Option<T> {
        self.rates.iter().copied().reduce(T::max)
    }
}

/// Eigenvalues of the Dirichlet second-difference matrix `tridiag(1, −2, 1)`
/// of size `M − 1`.
pub fn difference_eigenvalues<T: Real>(cells: usize) -> Vec<T> {
    let m = T::from_count(cells);
    (1..cells)
        .map(|i| {
            let s = (T::from_count(i) * T::PI() / (m + m)).sin();
            -T::lit(4.0) * s * s
        })
        .collect()
}

pub fn growth_spectrum<T: Real>(pot: &LennardJones<T>, a: T, cells: usize, rho0: T) -> Result<GrowthSpectrum<T>> {
    if !(a > T::zero() && a < pot.cutoff_strain()) {
        return Err(Error::OutOfRange(format!(
            "equilibrium strain {} outside (0, z_cut = {})",
            a,
            pot.cutoff_strain()
        )));
    }
    if cells < 2 || !(rho0 > T::zero()) {
        return Err(Error::InvalidParameter(format!("need M ≥ 2 and ρ₀ > 0, got M = {}, ρ₀ = {}", cells, rho0)));
    }
    let mut slope = pot.sigma_prime(a)?;
    // σ′ is evaluated with round-off near the sonic strain
    let scale = pot.sigma_prime(T::one())?;
    if slope.abs() <= T::lit(64.0) * T::epsilon() * scale {
        slope = T::zero();
    }
    let m = T::from_count(cells);
    let eigenvalues = difference_eigenvalues::<T>(cells);
    let alpha: Vec<T> = eigenvalues.iter().map(|&l| slope * l * m * m / rho0).collect();
    let rates = alpha.iter().filter(|&&x| x > T::zero()).map(|&x| x.sqrt()).collect();
    let regime = if slope > T::zero() {
        Regime::StableOscillatory
    } else if slope < T::zero() {
        Regime::Unstable
    } else {
        Regime::Marginal
    };
    Ok(GrowthSpectrum { strain: a, cells, eigenvalues, alpha, rates, regime })
}

/// `ρ₀ ψ̈_j = σ′(a)(ψ_{j+1} − 2ψ_j + ψ_{j−1})/ΔX²` with `ψ₀ = ψ_M = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizedChain<T> {
    pub cells: usize,
    pub rho0: T,
    pub slope: T,
}

impl<T: Real> LinearizedChain<T> {
    pub fn new(pot: &LennardJones<T>, a: T, cells: usize, rho0: T) -> Result<Self> {
        if cells < 2 || !(rho0 > T::zero()) {
            return Err(Error::InvalidParameter(format!("need M ≥ 2 and ρ₀ > 0, got M = {}, ρ₀ = {}", cells, rho0)));
        }
        Ok(Self { cells, rho0, slope: pot.sigma_prime(a)? })
    }
}

impl<T: Real> SecondOrderSystem<T> for LinearizedChain<T> {
    fn dim(&self) -> usize {
        self.cells - 1
    }

    fn acceleration(&self, _t: T, q: &[T], _p: &[T], out: &mut [T]) -> Result<()> {
        let m = T::from_count(self.cells);
        let k = self.slope * m * m / self.rho0;
        let n = q.len();
        for j in 0..n {
            let left = if j == 0 { T::zero() } else { q[j - 1] };
            let right = if j + 1 == n { T::zero() } else { q[j + 1] };
            out[j] = k * (right - q[j] - q[j] + left);
        }
        Ok(())
    }
}

/// `‖ψ‖` over time for a linearized run started from `ψ_j(0) = amplitude`
/// at rest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSeries<T> {
    pub times: Vec<T>,
    pub norms: Vec<T>,
}

pub fn linearized_growth_run<T: Real>(
    pot: &LennardJones<T>,
    a: T,
    cells: usize,
    rho0: T,
    amplitude: T,
    times: Vec<T>,
) -> Result<GrowthSeries<T>> {
    let sys = LinearizedChain::new(pot, a, cells, rho0)?;
    let n = sys.dim();
    let mut y0 = vec![amplitude; n];
    y0.extend(std::iter::repeat(T::zero()).take(n));
    let cfg = IntegratorConfig::with_tolerances(T::lit(1e-10), T::lit(1e-14) * amplitude.abs().max(T::tol_floor()))
        .with_samples(times);
    let traj = integrate(&sys, T::zero(), &y0, &cfg)?;
    let dx = T::one() / T::from_count(cells);
    let norms = traj
        .states
        .iter()
        .map(|y| (dx * y[..n].iter().map(|&v| v * v).sum::<T>()).sqrt())
        .collect();
    Ok(GrowthSeries { times: traj.times, norms })
}

/// Least-squares slope of `ln‖ψ‖` over the last half of the samples.
///
/// The window must grow monotonically by at least one e-fold, otherwise the
/// series is not in the unstable regime.
pub fn measure_growth_rate<T: Real>(times: &[T], norms: &[T]) -> Result<T> {
    if times.len() != norms.len() || times.len() < 6 {
        return Err(Error::InvalidParameter(format!(
            "need at least 6 paired samples, got {} times and {} norms",
            times.len(),
            norms.len()
        )));
    }
    let start = times.len() / 2;
    let (ts, ns) = (&times[start..], &norms[start..]);
    if ns.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
        return Err(Error::RegimeMismatch("series touches zero or is not finite".into()));
    }
    if ns.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::RegimeMismatch("series is not growing over the fit window".into()));
    }
    let logs: Vec<T> = ns.iter().map(|x| x.ln()).collect();
    if logs[logs.len() - 1] - logs[0] < T::one() {
        return Err(Error::RegimeMismatch("less than one e-fold of growth over the fit window".into()));
    }
    linear_fit_slope(ts, &logs).ok_or_else(|| Error::Diagnostic("degenerate fit window".into()))
}

// ---------------------------------------------------------------------------
// Energy and bound monitors

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport<T> {
    pub initial: T,
    /// `max_k |E_k − E_0| / |E_0|`.
    pub max_relative_drift: T,
    /// Largest single increase `E_{k+1} − E_k` (negative if always falling).
    pub max_increase: T,
    /// Every increase is within the slack.
    pub nonincreasing: bool,
}

pub fn energy_report<T: Real>(energies: &[T], slack: T) -> Result<EnergyReport<T>> {
    let Some(&initial) = energies.first() else {
        return Err(Error::Diagnostic("empty energy series".into()));
    };
    let max_relative_drift = energies
        .iter()
        .map(|&e| (e - initial).abs() / initial.abs())
        .fold(T::zero(), T::max);
    let max_increase = energies.windows(2).map(|w| w[1] - w[0]).fold(T::neg_infinity(), T::max);
    Ok(EnergyReport { initial, max_relative_drift, max_increase, nonincreasing: !(max_increase > slack) })
}

/// Position and velocity bounds over a fixed-end run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionBounds<T> {
    pub a: T,
    pub min_position: T,
    pub max_position: T,
    /// `0 ≤ φ_j ≤ a` at every sample.
    pub positions_ok: bool,
    /// `max_t ‖v‖₂` with `‖v‖₂² = (1/M) Σ v_j²`.
    pub max_velocity_norm: T,
    /// `(2/ρ₀)(E^d(0) + |Θ_min|)`.
    pub velocity_bound: T,
    pub velocity_ok: bool,
    /// `√((2/ρ₀)(E^d(0) + |Θ_min|))`, the bound the energy identity gives for `‖v‖₂`.
    pub velocity_bound_sqrt: T,
    pub velocity_sqrt_ok: bool,
}

pub fn solution_bounds<T: Real>(
    pot: &LennardJones<T>,
    states: &[ChainState<T>],
    initial_energy: T,
) -> Result<SolutionBounds<T>> {
    let Some(first) = states.first() else {
        return Err(Error::Diagnostic("empty state series".into()));
    };
    let a = first.bc.right_position();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    let mut vmax = T::zero();
    for s in states {
        for &p in &s.positions {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        let m = T::from_count(s.cells);
        let norm = (s.velocities.iter().map(|&v| v * v).sum::<T>() / m).sqrt();
        vmax = vmax.max(norm);
    }
    let bound = (initial_energy + pot.min_energy().abs()) * T::lit(2.0) / first.rho0;
    let root = bound.max(T::zero()).sqrt();
    Ok(SolutionBounds {
        a,
        min_position: lo,
        max_position: hi,
        positions_ok: lo >= T::zero() && hi <= a,
        max_velocity_norm: vmax,
        velocity_bound: bound,
        velocity_ok: vmax <= bound,
        velocity_bound_sqrt: root,
        velocity_sqrt_ok: vmax <= root,
    })
}

// ---------------------------------------------------------------------------
// Front tracking

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontTrack<T> {
    pub times: Vec<T>,
    pub locations: Vec<T>,
    pub speed: T,
}

/// Location of the steepest `|∂F/∂X|` within `[lo, hi]`, refined by a
/// parabola through the neighbouring differences.
pub fn locate_front<T: Real>(field: &FieldSnapshot<T>, lo: T, hi: T) -> Result<T> {
    let n = field.len();
    if n < 3 {
        return Err(Error::Diagnostic("snapshot too short to locate a front".into()));
    }
    let grad: Vec<T> = field.strain.windows(2).map(|w| ((w[1] - w[0]) / field.dx).abs()).collect();
    let mid = |k: usize| (field.x[k] + field.x[k + 1]) * T::lit(0.5);
    let best = (0..grad.len())
        .filter(|&k| mid(k) >= lo && mid(k) <= hi)
        .max_by(|&i, &j| grad[i].partial_cmp(&grad[j]).unwrap_or(std::cmp::Ordering::Equal));
    let Some(k) = best else {
        return Err(Error::Diagnostic(format!("no grid points in the search window [{}, {}]", lo, hi)));
    };
    let scale = field.strain.iter().fold(T::zero(), |m, f| m.max(f.abs())).max(T::one());
    if grad[k] * field.dx <= T::lit(1e-9) * scale {
        return Err(Error::Diagnostic("no front detected: the field is flat".into()));
    }
    let mut x = mid(k);
    if k > 0 && k + 1 < grad.len() {
        let (gm, g0, gp) = (grad[k - 1], grad[k], grad[k + 1]);
        let den = gm - g0 - g0 + gp;
        if den < T::zero() {
            let off = (T::lit(0.5) * (gm - gp) / den).max(-T::lit(0.5)).min(T::lit(0.5));
            x += off * (mid(k + 1) - mid(k));
        }
    }
    Ok(x)
}

/// Tracks the front through `snapshots`: the first location is searched in
/// `search`, later ones within `half_width` of the previous location.
/// The speed is the least-squares slope of location against time.
pub fn measure_shock_speed<T: Real>(
    snapshots: &[FieldSnapshot<T>],
    search: (T, T),
    half_width: T,
) -> Result<FrontTrack<T>> {
    if snapshots.len() < 2 {
        return Err(Error::Diagnostic("front tracking needs at least two snapshots".into()));
    }
    let mut times = Vec::with_capacity(snapshots.len());
    let mut locations: Vec<T> = Vec::with_capacity(snapshots.len());
    for s in snapshots {
        let (lo, hi) = match locations.last() {
            None => search,
            Some(&p) => ((p - half_width).max(search.0), (p + half_width).min(search.1)),
        };
        locations.push(locate_front(s, lo, hi)?);
        times.push(s.t);
    }
    let speed = linear_fit_slope(&times, &locations)
        .ok_or_else(|| Error::Diagnostic("snapshot times are degenerate".into()))?;
    Ok(FrontTrack { times, locations, speed })
}

// ---------------------------------------------------------------------------
// Mesh consistency

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Raw,
    Mollified,
    Viscous,
}

#[derive(Debug, Clone, Copy)]
pub enum Reference<'a, T> {
    ExactRiemann(&'a RiemannSolution<T>),
    /// The case with the largest `M`.
    FinestMesh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    ExactRiemann,
    FinestMesh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencyRow<T> {
    pub cells: usize,
    pub l2: T,
    pub linf: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport<T> {
    pub t: T,
    pub measure: Measure,
    pub reference: ReferenceKind,
    /// Common sampling grid (cell centres of the coarsest mesh).
    pub grid: Vec<T>,
    /// Rows in increasing `M`.
    pub rows: Vec<ConsistencyRow<T>>,
    /// Relative slack used by the verdict.
    pub slack: T,
    /// `e_{k+1} ≤ (1 + slack) e_k` for the L² errors.
    pub monotone: bool,
}

pub const CONSISTENCY_SLACK: f64 = 0.05;

/// Strain errors of each case against the reference, on the coarsest grid,
/// with finer fields restricted by piecewise-linear interpolation.
pub fn consistency_table<T: Real>(
    cases: &[(usize, FieldSnapshot<T>)],
    measure: Measure,
    reference: Reference<'_, T>,
) -> Result<ConsistencyReport<T>> {
    if cases.is_empty() {
        return Err(Error::Config("consistency table needs at least one mesh".into()));
    }
    let mut sorted: Vec<&(usize, FieldSnapshot<T>)> = cases.iter().collect();
    sorted.sort_by_key(|c| c.0);
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Config("repeated mesh size in consistency table".into()));
    }
    let t = sorted[0].1.t;
    let tol = T::lit(1e-12) * t.abs().max(T::one());
    for (m, s) in &sorted {
        if (s.t - t).abs() > tol {
            return Err(Error::Config(format!("mesh {} sampled at t = {}, expected {}", m, s.t, t)));
        }
        if s.len() != *m {
            return Err(Error::Config(format!("mesh {} snapshot has {} samples", m, s.len())));
        }
    }
    let grid = sorted[0].1.x.clone();
    let dx = sorted[0].1.dx;
    let (kind, exact): (ReferenceKind, Vec<T>) = match reference {
        Reference::ExactRiemann(sol) => (
            ReferenceKind::ExactRiemann,
            grid.iter().map(|&x| sol.sample(x, t).map(|u| u.strain)).collect::<Result<_>>()?,
        ),
        Reference::FinestMesh => {
            let fine = &sorted[sorted.len() - 1].1;
            (ReferenceKind::FinestMesh, grid.iter().map(|&x| fine.interpolate(&fine.strain, x)).collect())
        }
    };
    let rows: Vec<ConsistencyRow<T>> = sorted
        .iter()
        .map(|(m, s)| {
            let mut sq = T::zero();
            let mut linf = T::zero();
            for (&x, &r) in grid.iter().zip(&exact) {
                let e = (s.interpolate(&s.strain, x) - r).abs();
                sq += e * e;
                linf = linf.max(e);
            }
            ConsistencyRow { cells: *m, l2: (dx * sq).sqrt(), linf }
        })
        .collect();
    let slack = T::lit(CONSISTENCY_SLACK);
    let monotone = rows.windows(2).all(|w| w[1].l2 <= (T::one() + slack) * w[0].l2);
    Ok(ConsistencyReport { t, measure, reference: kind, grid, rows, slack, monotone })
}

// ---------------------------------------------------------------------------
// Oscillation wavelength

pub const MIN_WINDOW_SAMPLES: usize = 4;

/// Dominant wavelength of `F − F_avg` on `window`, from a Hann-windowed,
/// zero-padded discrete spectrum over wavenumbers `[1/L, M/2]`.
///
/// `detrend_eps` defaults to the standard policy for the snapshot's mesh.
/// Returns `None` when the detrended field is flat.
pub fn oscillation_wavelength<T: Real>(
    field: &FieldSnapshot<T>,
    window: (T, T),
    detrend_eps: Option<T>,
) -> Result<Option<T>> {
    let eps = detrend_eps.unwrap_or_else(|| choose_eps(field.len()));
    let smooth = mollify(field, eps)?;
    let idx: Vec<usize> = (0..field.len()).filter(|&k| field.x[k] >= window.0 && field.x[k] <= window.1).collect();
    if idx.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::Diagnostic(format!(
            "window [{}, {}] holds {} samples, need at least {}",
            window.0,
            window.1,
            idx.len(),
            MIN_WINDOW_SAMPLES
        )));
    }
    let xs: Vec<T> = idx.iter().map(|&k| field.x[k]).collect();
    let mut f: Vec<T> = idx.iter().map(|&k| field.strain[k] - smooth.strain[k]).collect();
    let mean = f.iter().copied().sum::<T>() / T::from_count(f.len());
    f.iter_mut().for_each(|v| *v -= mean);
    let scale = field.strain.iter().fold(T::one(), |m, v| m.max(v.abs()));
    if f.iter().all(|v| v.abs() <= T::lit(1e-10) * scale) {
        return Ok(None);
    }
    let n = f.len();
    let last = T::from_count(n - 1);
    for (i, v) in f.iter_mut().enumerate() {
        *v *= T::lit(0.5) * (T::one() - (T::TAU() * T::from_count(i) / last).cos());
    }
    let length = xs[n - 1] - xs[0] + field.dx;
    let power = |k: T| {
        let (mut re, mut im) = (T::zero(), T::zero());
        for (&x, &v) in xs.iter().zip(&f) {
            let ph = T::TAU() * k * x;
            re += v * ph.cos();
            im -= v * ph.sin();
        }
        re * re + im * im
    };
    let k_lo = T::one() / length;
    let k_hi = T::lit(0.5) / field.dx;
    let step = k_lo / T::lit(16.0);
    let count = ((k_hi - k_lo) / step).floor().to_usize().unwrap_or(0);
    let spectrum: Vec<T> = (0..=count).map(|i| power(k_lo + step * T::from_count(i))).collect();
    let best = (0..spectrum.len())
        .max_by(|&i, &j| spectrum[i].partial_cmp(&spectrum[j]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    let mut k = k_lo + step * T::from_count(best);
    if best > 0 && best + 1 < spectrum.len() {
        let (pm, p0, pp) = (spectrum[best - 1], spectrum[best], spectrum[best + 1]);
        let den = pm - p0 - p0 + pp;
        if den < T::zero() {
            k += step * (T::lit(0.5) * (pm - pp) / den).max(-T::lit(0.5)).min(T::lit(0.5));
        }
    }
    Ok(Some(T::one() / k))
}

// ---------------------------------------------------------------------------
// Relaxation to statics

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaticConvergence<T> {
    pub times: Vec<T>,
    /// `(ΔX Σ_j (φ_static(X_j) − φ_j)²)^{1/2}`.
    pub norms: Vec<T>,
    /// Final norm over initial norm.
    pub ratio: T,
    /// `ratio < 10⁻³`.
    pub converged: bool,
}

pub const STATIC_CONVERGENCE_RATIO: f64 = 1e-3;

pub fn static_convergence<T: Real>(
    states: &[ChainState<T>],
    reference: &Equilibrium<T>,
) -> Result<StaticConvergence<T>> {
    if states.is_empty() {
        return Err(Error::Diagnostic("empty state series".into()));
    }
    let mut times = Vec::with_capacity(states.len());
    let mut norms = Vec::with_capacity(states.len());
    for s in states {
        let dx = s.dx();
        let sq: T = s
            .nodes()
            .iter()
            .zip(&s.positions)
            .map(|(&x, &p)| {
                let e = reference.position_at(x) - p;
                e * e
            })
            .sum();
        times.push(s.t);
        norms.push((dx * sq).sqrt());
    }
    let first = norms[0];
    let last = norms[norms.len() - 1];
    let ratio = if first > T::zero() { last / first } else if last > T::zero() { T::infinity() } else { T::zero() };
    Ok(StaticConvergence { times, norms, ratio, converged: ratio < T::lit(STATIC_CONVERGENCE_RATIO) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::Provenance;

    fn lj() -> LennardJones<f64> {
        LennardJones::default()
    }

    fn field(cells: usize, t: f64, f: impl Fn(f64) -> f64) -> FieldSnapshot<f64> {
        let x = FieldSnapshot::cell_centres(cells);
        let strain: Vec<f64> = x.iter().map(|&x| f(x)).collect();
        FieldSnapshot {
            t,
            dx: 1.0 / cells as f64,
            velocity: vec![0.0; cells],
            position: vec![0.0; cells],
            x,
            strain,
            provenance: Provenance::Raw,
        }
    }

    #[test]
    fn spectrum_two_cells() {
        let s = growth_spectrum(&lj(), 1.2, 2, 1.0).unwrap();
        assert_eq!(s.regime, Regime::Unstable);
        assert!((s.eigenvalues[0] + 2.0).abs() < 1e-15);
        assert!((s.alpha[0] - 1.2309018396704063).abs() < 1e-12);
        assert!((s.max_rate().unwrap() - 1.1094601568647728).abs() < 1e-12);
    }

    #[test]
    fn spectrum_regimes() {
        let p = lj();
        let s = growth_spectrum(&p, 0.9, 16, 1.0).unwrap();
        assert_eq!(s.regime, Regime::StableOscillatory);
        assert!(s.alpha.iter().all(|&a| a < 0.0) && s.rates.is_empty());
        let s = growth_spectrum(&p, p.sonic_strain(), 8, 1.0).unwrap();
        assert_eq!(s.regime, Regime::Marginal);
        assert!(s.alpha.iter().all(|&a| a == 0.0));
        assert!(growth_spectrum(&p, 3.0, 8, 1.0).is_err());
    }

    #[test]
    fn growth_rate_matches_spectrum() {
        let p = lj();
        let times: Vec<f64> = (0..=100).map(|k| 0.05 * k as f64).collect();
        let run = linearized_growth_run(&p, 1.2, 2, 1.0, 1e-3, times).unwrap();
        let rate = measure_growth_rate(&run.times, &run.norms).unwrap();
        assert!((rate / 1.1094601568647728 - 1.0).abs() < 0.02, "{}", rate);
    }

    #[test]
    fn stable_run_is_a_regime_mismatch() {
        let p = lj();
        let times: Vec<f64> = (0..=100).map(|k| 0.05 * k as f64).collect();
        let run = linearized_growth_run(&p, 0.9, 2, 1.0, 1e-3, times).unwrap();
        assert!(matches!(measure_growth_rate(&run.times, &run.norms), Err(Error::RegimeMismatch(_))));
    }

    #[test]
    fn energy_report_flags_increase() {
        let r = energy_report(&[1.0f64, 0.9, 0.95], 1e-10).unwrap();
        assert!(!r.nonincreasing);
        assert!((r.max_relative_drift - 0.1).abs() < 1e-15);
        assert!(energy_report(&[1.0, 0.9, 0.8], 1e-10).unwrap().nonincreasing);
    }

    #[test]
    fn front_in_a_step() {
        let s = field(100, 0.0, |x| if x < 0.42 { 1.0 } else { 1.1 });
        let x = locate_front(&s, 0.3, 0.6).unwrap();
        assert!((x - 0.42).abs() <= 0.01);
        let flat = field(100, 0.0, |_| 1.02);
        assert!(matches!(locate_front(&flat, 0.0, 1.0), Err(Error::Diagnostic(_))));
    }

    #[test]
    fn tracked_speed_of_a_moving_step() {
        let snaps: Vec<_> = (0..10)
            .map(|k| {
                let t = 0.01 * k as f64;
                field(4000, t, move |x| if x < 0.4 + 0.5 * t { 1.0 } else { 1.1 })
            })
            .collect();
        let track = measure_shock_speed(&snaps, (0.3, 0.6), 0.05).unwrap();
        assert!((track.speed - 0.5).abs() < 5e-3, "{}", track.speed);
    }

    #[test]
    fn self_reference_has_zero_error() {
        let s = field(32, 0.04, |x| 1.0 + 0.1 * x);
        let r = consistency_table(&[(32, s)], Measure::Mollified, Reference::FinestMesh).unwrap();
        assert_eq!(r.rows[0].l2, 0.0);
        assert!(r.monotone);
    }

    #[test]
    fn mismatched_times_are_config_errors() {
        let a = field(16, 0.04, |x| x);
        let b = field(32, 0.05, |x| x);
        assert!(matches!(
            consistency_table(&[(16, a), (32, b)], Measure::Raw, Reference::FinestMesh),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn wavelength_of_a_sinusoid() {
        let s = field(128, 0.0, |x| 1.0 + 0.01 * (std::f64::consts::TAU * 20.0 * x).sin());
        let w = oscillation_wavelength(&s, (0.0, 1.0), None).unwrap().unwrap();
        assert!((w - 0.05).abs() < 1.0 / 128.0, "{}", w);
        let flat = field(128, 0.0, |_| 1.02);
        assert_eq!(oscillation_wavelength(&flat, (0.0, 1.0), None).unwrap(), None);
        assert!(oscillation_wavelength(&s, (0.5, 0.52), None).is_err());
    }

    #[test]
    fn static_convergence_ratio() {
        let mut a = ChainState::<f64>::uniform(1.0, 8, 1.0).unwrap();
        let reference = Equilibrium::Uniform { strain: 1.0 };
        let mut b = a.clone();
        a.positions[4] += 0.1;
        b.positions[4] += 1e-5;
        b.t = 1.0;
        let r = static_convergence(&[a, b], &reference).unwrap();
        assert!((r.ratio - 1e-4).abs() < 1e-12);
        assert!(r.converged);
    }
}
