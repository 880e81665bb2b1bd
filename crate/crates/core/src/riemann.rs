//! Exact solutions of the p-system `F_t − v_X = 0`, `v_t − σ(F)_X = 0` for
//! piecewise-constant data with hyperbolic left state.
//!
//! Wave curves through `U_l = (F_l, v_l)`:
//!
//! ```text
//! S1:  v = v_l − √((F − F_l)(σ(F) − σ(F_l))),   F ≤ F_l
//! S2:  v = v_l − √((F − F_l)(σ(F) − σ(F_l))),   F_l ≤ F ≤ F̄(F_l)
//! R1:  v = v_l + ∫_{F_l}^{F} c,                   F_l ≤ F ≤ r
//! R2:  v = v_l − ∫_{F_l}^{F} c,                   F ≤ F_l
//! ```

use serde::Serialize;

use crate::chain::DefectSpec;
use crate::error::{Error, Result};
use crate::numerics::{bisect, integrate};
use crate::potential::LennardJones;
use crate::scalar::Real;
use crate::snapshot::{FieldSnapshot, Provenance};

const QUAD_TOL: f64 = 1e-13;
const ROOT_TOL: f64 = 1e-15;
/// Interior points of the chord admissibility check.
pub const ADMISSIBILITY_POINTS: usize = 64;
/// Points of the diagnostic sweep used to bracket the middle state.
pub const SWEEP_POINTS: usize = 64;

/// `U = (F, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiemannState<T> {
    #[serde(rename = "F")]
    pub strain: T,
    #[serde(rename = "v")]
    pub velocity: T,
}

impl<T: Real> RiemannState<T> {
    pub fn new(strain: T, velocity: T) -> Self {
        Self { strain, velocity }
    }

    /// Mirror image under `X ↦ 1 − X`.
    pub fn mirrored(self) -> Self {
        Self { strain: self.strain, velocity: -self.velocity }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Shock1,
    Shock2,
    Rarefaction1,
    Rarefaction2,
    StationaryShock,
}

impl WaveKind {
    pub fn is_shock(self) -> bool {
        matches!(self, WaveKind::Shock1 | WaveKind::Shock2 | WaveKind::StationaryShock)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Wave<T> {
    pub kind: WaveKind,
    pub left: RiemannState<T>,
    pub right: RiemannState<T>,
    /// `(ξ_lo, ξ_hi)` in similarity coordinates; equal for shocks.
    pub speed_range: (T, T),
}

impl<T: Real> Wave<T> {
    /// Shock speed, or the midpoint of a fan.
    pub fn speed(&self) -> T {
        (self.speed_range.0 + self.speed_range.1) * T::lit(0.5)
    }
}

/// How a fan in similarity coordinates is placed on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layout<T> {
    /// One fan centred at `origin`.
    Single { origin: T },
    /// Fan centred at `origin < ½` on the left half, its mirror image
    /// (`F(X) = F(1 − X)`, `v(X) = −v(1 − X)`) on the right half.
    Mirrored { origin: T },
    /// Fan emanating from the left end `X = 0`, which moves with `v0`.
    LeftEnd { v0: T },
}

/// Ordered wave fan with the constant states between waves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiemannSolution<T> {
    #[serde(skip)]
    pot: LennardJones<T>,
    pub layout: Layout<T>,
    /// Left to right. Zero-strength waves are omitted.
    pub waves: Vec<Wave<T>>,
    /// `waves.len() + 1` constant states.
    pub states: Vec<RiemannState<T>>,
    /// Middle state of a two-wave solution.
    pub middle: Option<RiemannState<T>>,
    /// First time at which waves collide (three-state problem).
    pub interaction_time: Option<T>,
    /// The solution is served for `0 ≤ t < horizon`.
    pub horizon: T,
    /// Sign changes found by the bracketing sweep of the middle-state residual.
    pub sign_changes: usize,
}

/// Wave curves and Riemann solutions for a given potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolver<T> {
    pub pot: LennardJones<T>,
}

impl<T: Real> RiemannSolver<T> {
    pub fn new(pot: LennardJones<T>) -> Self {
        Self { pot }
    }

    fn require_hyperbolic(&self, f: T) -> Result<()> {
        let r = self.pot.sonic_strain();
        if f > T::zero() && f <= r * (T::one() + T::tol_floor()) {
            Ok(())
        } else if f > r {
            Err(Error::Elliptic {
                strain: f.as_f64(),
                slope: self.pot.sigma_prime(f)?.as_f64(),
            })
        } else {
            Err(Error::Domain { what: "strain", value: f.as_f64() })
        }
    }

    /// `∫_a^b c(F) dF` for `a, b ∈ (0, r]`.
    pub fn speed_integral(&self, a: T, b: T) -> Result<T> {
        self.require_hyperbolic(a)?;
        self.require_hyperbolic(b)?;
        integrate(|f| self.pot.wave_speed_clamped(f), a, b, T::lit(QUAD_TOL))
    }

    /// Squared chord slope `(σ(F) − σ(F_l))/(F − F_l)`, or `σ'(F_l)` when `F = F_l`.
    pub fn chord_slope(&self, fl: T, f: T) -> Result<T> {
        if f == fl {
            return self.pot.sigma_prime(f);
        }
        Ok((self.pot.sigma(f)? - self.pot.sigma(fl)?) / (f - fl))
    }

    /// `|s| = √((σ(F) − σ(F_l))/(F − F_l))`.
    pub fn shock_speed(&self, fl: T, f: T) -> Result<T> {
        if f == fl {
            return Err(Error::InvalidParameter("shock speed needs distinct states".into()));
        }
        let slope = self.chord_slope(fl, f)?;
        // same round-off allowance as `shock_jump`: a stationary shock, not a missing one
        let slack = T::epsilon() * T::lit(64.0) * self.pot.max_stress() / (f - fl).abs();
        if slope < -slack {
            return Err(Error::NoShock { left: fl.as_f64(), right: f.as_f64(), slope: slope.as_f64() });
        }
        Ok(slope.max(T::zero()).sqrt())
    }

    /// Chord criterion for a shock from `F_l` to `F` with speed `s`, on
    /// [`ADMISSIBILITY_POINTS`] interior points.
    pub fn is_admissible(&self, fl: T, f: T, s: T) -> Result<bool> {
        if s == T::zero() || f == fl {
            return Ok(true);
        }
        let target = self.chord_slope(fl, f)?;
        let slack = T::lit(1e-12) * target.abs().max(T::lit(1e-3));
        let n = ADMISSIBILITY_POINTS;
        for i in 1..=n {
            let w = fl + (f - fl) * T::from_count(i) / T::from_count(n + 1);
            let chord = self.chord_slope(fl, w)?;
            let ok = if s < T::zero() { chord <= target + slack } else { chord >= target - slack };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn shock_jump(&self, fl: T, f: T) -> Result<T> {
        let p = (f - fl) * (self.pot.sigma(f)? - self.pot.sigma(fl)?);
        // Round-off at a root of σ(F) = σ(F_l) is not a missing shock.
        let slack = T::epsilon() * T::lit(64.0) * (f - fl).abs() * self.pot.max_stress();
        if p < -slack {
            return Err(Error::NoShock {
                left: fl.as_f64(),
                right: f.as_f64(),
                slope: (p / ((f - fl) * (f - fl))).as_f64(),
            });
        }
        Ok(p.max(T::zero()).sqrt())
    }

    /// Point of the 1-shock curve through `ul` at strain `F ≤ F_l`.
    pub fn s1_curve(&self, ul: RiemannState<T>, f: T) -> Result<RiemannState<T>> {
        if f > ul.strain {
            return Err(Error::OutOfRange(format!("S1 needs F <= F_l, got {} > {}", f, ul.strain)));
        }
        if f == ul.strain {
            return Ok(ul);
        }
        let v = ul.velocity - self.shock_jump(ul.strain, f)?;
        let s = -self.shock_speed(ul.strain, f)?;
        if !self.is_admissible(ul.strain, f, s)? {
            return Err(Error::Inadmissible { left: ul.strain.as_f64(), right: f.as_f64() });
        }
        Ok(RiemannState::new(f, v))
    }

    /// Point of the 2-shock curve through `ul` at `F_l ≤ F ≤ F̄(F_l)`.
    pub fn s2_curve(&self, ul: RiemannState<T>, f: T) -> Result<RiemannState<T>> {
        let fb = self.fbar(ul.strain)?;
        if f < ul.strain || f > fb * (T::one() + T::tol_floor()) {
            return Err(Error::OutOfRange(format!(
                "S2 needs F_l <= F <= fbar(F_l) = {}, got {}",
                fb, f
            )));
        }
        if f == ul.strain {
            return Ok(ul);
        }
        Ok(RiemannState::new(f, ul.velocity - self.shock_jump(ul.strain, f)?))
    }

    /// `dv/dF = −(s² + σ'(F))/(2s)` along S2.
    pub fn s2_slope(&self, ul: RiemannState<T>, f: T) -> Result<T> {
        let s2 = self.chord_slope(ul.strain, f)?;
        let s = s2.max(T::zero()).sqrt();
        Ok(-(s2 + self.pot.sigma_prime(f)?) / (s + s))
    }

    /// `F̄(F_l)`: the root above `r` of `σ(F̄) = σ(F_l)` for `F_l ∈ (1, r]`,
    /// `z_cut` for `F_l ≤ 1`.
    pub fn fbar(&self, fl: T) -> Result<T> {
        let r = self.pot.sonic_strain();
        if !(fl > T::zero()) {
            return Err(Error::Domain { what: "fbar", value: fl.as_f64() });
        }
        if fl > r {
            return Err(Error::Domain { what: "fbar (F_l beyond the sonic strain)", value: fl.as_f64() });
        }
        let zc = self.pot.cutoff_strain();
        if fl <= T::one() {
            return Ok(zc);
        }
        if fl == r {
            return Ok(r);
        }
        let target = self.pot.sigma(fl)?;
        if target <= self.pot.sigma(zc)? {
            return Ok(zc);
        }
        bisect(|f| Ok(self.pot.sigma_unchecked(f) - target), r, zc, T::lit(ROOT_TOL))
    }

    /// Point of the 1-rarefaction curve through `ul` at `F_l ≤ F ≤ r`.
    pub fn r1_curve(&self, ul: RiemannState<T>, f: T) -> Result<RiemannState<T>> {
        if f < ul.strain {
            return Err(Error::OutOfRange(format!("R1 needs F >= F_l, got {} < {}", f, ul.strain)));
        }
        Ok(RiemannState::new(f, ul.velocity + self.speed_integral(ul.strain, f)?))
    }

    /// Point of the 2-rarefaction curve through `ul` at `F ≤ F_l ≤ r`.
    pub fn r2_curve(&self, ul: RiemannState<T>, f: T) -> Result<RiemannState<T>> {
        if f > ul.strain {
            return Err(Error::OutOfRange(format!("R2 needs F <= F_l, got {} > {}", f, ul.strain)));
        }
        Ok(RiemannState::new(f, ul.velocity - self.speed_integral(ul.strain, f)?))
    }

    /// Inverse of `σ'` on `(0, r]`: the strain with `σ'(F) = ξ²`.
    pub fn fan_strain(&self, xi: T) -> Result<T> {
        let target = xi * xi;
        let r = self.pot.sonic_strain();
        if target == T::zero() {
            return Ok(r);
        }
        let mut lo = T::lit(0.5);
        while self.pot.sigma_prime(lo)? < target {
            lo = lo * T::lit(0.5);
            if lo < T::lit(1e-6) {
                return Err(Error::OutOfRange(format!("characteristic speed {} too large", xi)));
            }
        }
        bisect(|f| Ok(self.pot.sigma_prime(f)? - target), lo, r, T::lit(ROOT_TOL))
    }

    /// Upper end of the middle-state bracket: the largest `F̄ ≤ r` that a
    /// 2-wave can connect to `F_m`.
    fn bracket_top(&self, fm: T) -> Result<T> {
        let r = self.pot.sonic_strain();
        if fm <= r {
            return Ok(r);
        }
        let target = self.pot.sigma(fm)?;
        let mut top = bisect(|f| Ok(self.pot.sigma_unchecked(f) - target), T::lit(0.5).min(fm), r, T::lit(ROOT_TOL))?;
        // keep σ(top) ≤ σ(F_m) as evaluated, so the 2-shock from the top exists
        let step = T::epsilon() * top;
        while self.pot.sigma_unchecked(top) > target {
            top -= step;
        }
        Ok(top)
    }

    /// `v` reached at `F_m` by a 1-wave from `ul` to `F̄` followed by a 2-wave,
    /// minus `v_m`. Increasing in `F̄`.
    pub fn middle_residual(&self, ul: RiemannState<T>, um: RiemannState<T>, fb: T) -> Result<T> {
        let bar = if fb < ul.strain { self.s1_curve_unchecked(ul, fb)? } else { self.r1_curve(ul, fb)? };
        let fm = um.strain;
        let v = if fm >= fb {
            bar.velocity - self.shock_jump(fb, fm)?
        } else {
            bar.velocity + self.speed_integral(fm, fb)?
        };
        Ok(v - um.velocity)
    }

    fn s1_curve_unchecked(&self, ul: RiemannState<T>, f: T) -> Result<RiemannState<T>> {
        Ok(RiemannState::new(f, ul.velocity - self.shock_jump(ul.strain, f)?))
    }

    fn one_wave(&self, ul: RiemannState<T>, bar: RiemannState<T>) -> Result<Option<Wave<T>>> {
        if bar.strain == ul.strain {
            return Ok(None);
        }
        if bar.strain < ul.strain {
            let s = -self.shock_speed(ul.strain, bar.strain)?;
            let kind = if s == T::zero() { WaveKind::StationaryShock } else { WaveKind::Shock1 };
            return Ok(Some(Wave { kind, left: ul, right: bar, speed_range: (s, s) }));
        }
        Ok(Some(Wave {
            kind: WaveKind::Rarefaction1,
            left: ul,
            right: bar,
            speed_range: (-self.pot.wave_speed_clamped(ul.strain)?, -self.pot.wave_speed_clamped(bar.strain)?),
        }))
    }

    fn two_wave(&self, bar: RiemannState<T>, um: RiemannState<T>) -> Result<Option<Wave<T>>> {
        if bar.strain == um.strain {
            return Ok(None);
        }
        if um.strain > bar.strain {
            let s = self.shock_speed(bar.strain, um.strain)?;
            let kind = if s == T::zero() { WaveKind::StationaryShock } else { WaveKind::Shock2 };
            return Ok(Some(Wave { kind, left: bar, right: um, speed_range: (s, s) }));
        }
        Ok(Some(Wave {
            kind: WaveKind::Rarefaction2,
            left: bar,
            right: um,
            speed_range: (self.pot.wave_speed_clamped(bar.strain)?, self.pot.wave_speed_clamped(um.strain)?),
        }))
    }

    /// Counts sign changes of the middle residual on `n` equispaced points of
    /// `[lo, hi]`, returning the samples and the first bracket.
    fn sweep(
        &self,
        ul: RiemannState<T>,
        um: RiemannState<T>,
        lo: T,
        hi: T,
        n: usize,
    ) -> Result<(Vec<(T, T)>, usize, Option<(T, T)>)> {
        let mut samples = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let f = lo + (hi - lo) * T::from_count(i) / T::from_count(n);
            samples.push((f, self.middle_residual(ul, um, f)?));
        }
        let mut changes = 0;
        let mut first = None;
        for w in samples.windows(2) {
            let (a, b) = (w[0].1, w[1].1);
            if a == T::zero() || (a < T::zero()) != (b < T::zero()) {
                if a == T::zero() && changes > 0 {
                    continue;
                }
                changes += 1;
                if first.is_none() {
                    first = Some((w[0].0, w[1].0));
                }
            }
        }
        Ok((samples, changes, first))
    }

    /// Two-wave solution joining `ul` (left, hyperbolic) to `um` (right).
    pub fn solve_middle_state(&self, ul: RiemannState<T>, um: RiemannState<T>) -> Result<RiemannSolution<T>> {
        self.require_hyperbolic(ul.strain)?;
        let zc = self.pot.cutoff_strain();
        if !(um.strain > T::zero() && um.strain <= zc) {
            return Err(Error::Domain { what: "right state strain", value: um.strain.as_f64() });
        }
        let (bar, sign_changes) = if ul == um {
            (ul, 0)
        } else {
            let hi = self.bracket_top(um.strain)?;
            let mut lo = ul.strain.min(um.strain).min(hi) * T::lit(0.5);
            while self.middle_residual(ul, um, lo)? >= T::zero() {
                lo = lo * T::lit(0.5);
                if lo < T::lit(1e-3) {
                    break;
                }
            }
            let (samples, changes, first) = self.sweep(ul, um, lo, hi, SWEEP_POINTS)?;
            let structure_error = |message: String| Error::Structure {
                message,
                sweep: samples.iter().map(|&(f, g)| (f.as_f64(), g.as_f64())).collect(),
            };
            let Some((a, b)) = first else {
                return Err(structure_error(format!(
                    "middle-state residual has no sign change on [{}, {}]",
                    lo, hi
                )));
            };
            let fb = bisect(|f| self.middle_residual(ul, um, f), a, b, T::lit(ROOT_TOL))?;
            let bar = if fb < ul.strain { self.s1_curve(ul, fb)? } else { self.r1_curve(ul, fb)? };
            (bar, changes)
        };
        let mut waves = Vec::new();
        if let Some(w) = self.one_wave(ul, bar)? {
            waves.push(w);
        }
        if let Some(w) = self.two_wave(bar, um)? {
            if w.kind.is_shock() && !self.is_admissible(bar.strain, um.strain, w.speed_range.0)? {
                return Err(Error::Inadmissible { left: bar.strain.as_f64(), right: um.strain.as_f64() });
            }
            waves.push(w);
        }
        let mut states = vec![ul];
        states.extend(waves.iter().map(|w| w.right));
        Ok(RiemannSolution {
            pot: self.pot,
            layout: Layout::Single { origin: T::zero() },
            waves,
            states,
            middle: Some(bar),
            interaction_time: None,
            horizon: T::infinity(),
            sign_changes,
        })
    }

    /// Three-state problem: `U_l = (s1, 0)` outside, `U_m = (s2, 0)` on
    /// `[½ − δ, ½ + δ]`. The right half is the mirror image of the left.
    pub fn defect_problem(&self, defect: &DefectSpec<T>) -> Result<RiemannSolution<T>> {
        defect.validate(&self.pot)?;
        let ul = RiemannState::new(defect.s1, T::zero());
        let um = RiemannState::new(defect.s2, T::zero());
        let mut sol = self.solve_middle_state(ul, um)?;
        let half = T::lit(0.5);
        let origin = half - defect.delta;
        sol.layout = Layout::Mirrored { origin };
        let t_int = interaction_time(&sol, defect.delta);
        let outward = sol
            .waves
            .iter()
            .map(|w| -w.speed_range.0)
            .fold(T::zero(), T::max);
        let t_boundary = if outward > T::zero() { origin / outward } else { T::infinity() };
        sol.interaction_time = Some(t_int);
        sol.horizon = t_int.min(t_boundary);
        Ok(sol)
    }

    /// Solution of the end-point problem: the chain `X ≥ 0` in state `ul`,
    /// its left end pulled with velocity `v0`.
    pub fn end_load_fan(&self, v0: T, ul: RiemannState<T>) -> Result<RiemannSolution<T>> {
        self.require_hyperbolic(ul.strain)?;
        let dv = ul.velocity - v0;
        let r = self.pot.sonic_strain();
        let (waves, u0) = if dv == T::zero() {
            (Vec::new(), ul)
        } else if dv > T::zero() {
            // v0 < v_l: 2-rarefaction from U0 = (F0, v0) on the left to ul.
            let available = self.speed_integral(ul.strain, r)?;
            if dv > available {
                return Err(Error::OutOfRange(format!(
                    "end speed difference {} exceeds the largest rarefaction strength {}",
                    dv, available
                )));
            }
            let f0 = bisect(
                |f| Ok(self.speed_integral(ul.strain, f)? - dv),
                ul.strain,
                r,
                T::lit(ROOT_TOL),
            )?;
            let u0 = RiemannState::new(f0, v0);
            let wave = Wave {
                kind: WaveKind::Rarefaction2,
                left: u0,
                right: ul,
                speed_range: (self.pot.wave_speed_clamped(f0)?, self.pot.wave_speed(ul.strain)?),
            };
            (vec![wave], u0)
        } else {
            // v0 > v_l: compressive 2-shock.
            let target = -dv;
            let mut lo = ul.strain * T::lit(0.5);
            while self.shock_jump(lo, ul.strain)? < target {
                lo = lo * T::lit(0.5);
                if lo < T::lit(1e-4) {
                    return Err(Error::OutOfRange(format!("end speed {} too large", v0)));
                }
            }
            let f0 = bisect(
                |f| Ok(self.shock_jump(f, ul.strain)? - target),
                lo,
                ul.strain,
                T::lit(ROOT_TOL),
            )?;
            let s = self.shock_speed(f0, ul.strain)?;
            let u0 = RiemannState::new(f0, v0);
            if !self.is_admissible(f0, ul.strain, s)? {
                return Err(Error::Inadmissible { left: f0.as_f64(), right: ul.strain.as_f64() });
            }
            (vec![Wave { kind: WaveKind::Shock2, left: u0, right: ul, speed_range: (s, s) }], u0)
        };
        let fastest = waves.iter().map(|w| w.speed_range.1).fold(T::zero(), T::max);
        let horizon = if fastest > T::zero() { fastest.recip() } else { T::infinity() };
        let states = if waves.is_empty() { vec![ul] } else { vec![u0, ul] };
        Ok(RiemannSolution {
            pot: self.pot,
            layout: Layout::LeftEnd { v0 },
            waves,
            states,
            middle: None,
            interaction_time: None,
            horizon,
            sign_changes: 0,
        })
    }

    /// Rankine-Hugoniot residuals `(v − v_l + s(F − F_l), σ(F) − σ(F_l) + s(v − v_l))`.
    pub fn rh_residual(&self, wave: &Wave<T>) -> Result<(T, T)> {
        let s = wave.speed_range.0;
        let (l, r) = (wave.left, wave.right);
        Ok((
            r.velocity - l.velocity + s * (r.strain - l.strain),
            self.pot.sigma(r.strain)? - self.pot.sigma(l.strain)? + s * (r.velocity - l.velocity),
        ))
    }
}

/// `δ / (largest inward speed)` for a three-state solution; infinite when no
/// wave moves inward.
pub fn interaction_time<T: Real>(sol: &RiemannSolution<T>, delta: T) -> T {
    let inward = sol.waves.iter().map(|w| w.speed_range.1).fold(T::zero(), T::max);
    if inward > T::zero() {
        delta / inward
    } else {
        T::infinity()
    }
}

impl<T: Real> RiemannSolution<T> {
    /// State of the fan at similarity coordinate `ξ`.
    pub fn sample_fan(&self, xi: T) -> Result<RiemannState<T>> {
        let solver = RiemannSolver::new(self.pot);
        for (i, w) in self.waves.iter().enumerate() {
            let (lo, hi) = w.speed_range;
            if xi < lo {
                return Ok(self.states[i]);
            }
            if xi < hi {
                let f = solver.fan_strain(xi)?;
                return Ok(match w.kind {
                    WaveKind::Rarefaction1 => RiemannState::new(
                        f,
                        w.left.velocity + solver.speed_integral(w.left.strain, f)?,
                    ),
                    _ => RiemannState::new(f, w.left.velocity - solver.speed_integral(w.left.strain, f)?),
                });
            }
        }
        Ok(*self.states.last().expect("a solution has at least one state"))
    }

    fn check_time(&self, t: T) -> Result<()> {
        if !(t >= T::zero()) {
            return Err(Error::Domain { what: "sample time", value: t.as_f64() });
        }
        if t >= self.horizon {
            return Err(Error::Horizon { t: t.as_f64(), horizon: self.horizon.as_f64() });
        }
        Ok(())
    }

    fn sample_single(&self, origin: T, x: T, t: T, closed_right: bool) -> Result<RiemannState<T>> {
        if t == T::zero() {
            let last = *self.states.last().expect("non-empty");
            return Ok(if x > origin || (closed_right && x == origin) { last } else { self.states[0] });
        }
        self.sample_fan((x - origin) / t)
    }

    /// `U(X, t)` for `0 ≤ t < horizon`.
    pub fn sample(&self, x: T, t: T) -> Result<RiemannState<T>> {
        self.check_time(t)?;
        match self.layout {
            Layout::Single { origin } => self.sample_single(origin, x, t, false),
            Layout::Mirrored { origin } => {
                let half = T::lit(0.5);
                if x <= half {
                    self.sample_single(origin, x, t, true)
                } else {
                    Ok(self.sample_single(origin, T::one() - x, t, true)?.mirrored())
                }
            }
            Layout::LeftEnd { .. } => {
                if x < T::zero() {
                    return Err(Error::Domain { what: "position left of the loaded end", value: x.as_f64() });
                }
                self.sample_single(T::zero(), x, t, false)
            }
        }
    }

    /// Positions of shocks and fan edges at time `t`, sorted.
    pub fn breakpoints(&self, t: T) -> Vec<T> {
        let mut pts = Vec::new();
        let mut push = |x: T| {
            if x > T::zero() && x < T::one() {
                pts.push(x);
            }
        };
        match self.layout {
            Layout::Single { origin } => {
                for w in &self.waves {
                    push(origin + w.speed_range.0 * t);
                    push(origin + w.speed_range.1 * t);
                }
            }
            Layout::Mirrored { origin } => {
                push(T::lit(0.5));
                for w in &self.waves {
                    for s in [w.speed_range.0, w.speed_range.1] {
                        push(origin + s * t);
                        push(T::one() - origin - s * t);
                    }
                }
            }
            Layout::LeftEnd { .. } => {
                for w in &self.waves {
                    push(w.speed_range.0 * t);
                    push(w.speed_range.1 * t);
                }
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        pts.dedup();
        pts
    }

    fn left_end_position(&self, t: T) -> T {
        match self.layout {
            Layout::LeftEnd { v0 } => v0 * t,
            _ => T::zero(),
        }
    }

    /// Exact deformation `φ(X, t) = φ(0, t) + ∫₀^X F(Y, t) dY`.
    pub fn position(&self, x: T, t: T) -> Result<T> {
        self.check_time(t)?;
        let mut total = self.left_end_position(t);
        let mut a = T::zero();
        let mut cuts: Vec<T> = self.breakpoints(t).into_iter().filter(|&b| b < x).collect();
        cuts.push(x);
        for b in cuts {
            if b > a {
                total += integrate(|y| Ok(self.sample(y, t)?.strain), a, b, T::lit(1e-12))?;
                a = b;
            }
        }
        Ok(total)
    }

    /// Exact fields on the grid `xs` at time `t`.
    pub fn to_snapshot(&self, xs: &[T], t: T) -> Result<FieldSnapshot<T>> {
        self.check_time(t)?;
        let mut strain = Vec::with_capacity(xs.len());
        let mut velocity = Vec::with_capacity(xs.len());
        let mut position = Vec::with_capacity(xs.len());
        let mut phi = self.left_end_position(t);
        let mut prev = T::zero();
        let bps = self.breakpoints(t);
        for &x in xs {
            let u = self.sample(x, t)?;
            strain.push(u.strain);
            velocity.push(u.velocity);
            let mut a = prev;
            for &b in bps.iter().filter(|&&b| b > prev && b < x) {
                phi += integrate(|y| Ok(self.sample(y, t)?.strain), a, b, T::lit(1e-12))?;
                a = b;
            }
            if x > a {
                phi += integrate(|y| Ok(self.sample(y, t)?.strain), a, x, T::lit(1e-12))?;
            }
            prev = x;
            position.push(phi);
        }
        let dx = if xs.len() > 1 { xs[1] - xs[0] } else { T::one() };
        Ok(FieldSnapshot {
            t,
            dx,
            x: xs.to_vec(),
            strain,
            velocity,
            position,
            provenance: Provenance::Exact,
        })
    }
}
