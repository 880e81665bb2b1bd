//! Dormand-Prince 5(4) integration of second-order systems `q'' = a(t, q, q')`.
//!
//! The state is flattened to `y = [q; q']`. Steps are controlled with a mixed
//! absolute/relative max-norm and sampled through the free fourth-order dense
//! output of the pair.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A second-order system with `dim()` degrees of freedom.
pub trait SecondOrderSystem<T: Real> {
    fn dim(&self) -> usize;

    /// Writes `q''` into `out`.
    fn acceleration(&self, t: T, q: &[T], p: &[T], out: &mut [T]) -> Result<()>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Upper bound on the step size. `None` leaves it to the controller.
    pub max_step: Option<T>,
    /// Output instants, strictly increasing and not before the start time.
    pub sample_times: Vec<T>,
    pub max_steps: usize,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-6),
            abs_tol: T::lit(1e-9),
            max_step: None,
            sample_times: Vec::new(),
            max_steps: 20_000_000,
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn with_tolerances(rel_tol: T, abs_tol: T) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    pub fn with_samples(mut self, times: Vec<T>) -> Self {
        self.sample_times = times;
        self
    }

    pub fn validate(&self, t0: T) -> Result<()> {
        if !(self.rel_tol > T::zero()) || !(self.abs_tol > T::zero()) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if let Some(h) = self.max_step {
            if !(h > T::zero()) {
                return Err(Error::InvalidParameter("max_step must be positive".into()));
            }
        }
        if self.sample_times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("sample times must be strictly increasing".into()));
        }
        if let Some(&first) = self.sample_times.first() {
            if first < t0 || !first.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "first sample time {} precedes the start time {}",
                    first, t0
                )));
            }
        }
        Ok(())
    }
}

/// Step statistics of one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// States at the requested sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    /// Flattened `[q; q']` at each time.
    pub states: Vec<Vec<T>>,
    pub stats: StepStats,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Dense output over one accepted step `[t, t + h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStep<T> {
    pub t: T,
    pub h: T,
    rcont: [Vec<T>; 5],
}

impl<T: Real> DenseStep<T> {
    /// Interpolated state at `t + θh`, `θ ∈ [0, 1]`.
    pub fn eval(&self, s: T, out: &mut [T]) {
        let theta = (s - self.t) / self.h;
        let theta1 = T::one() - theta;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        for i in 0..out.len() {
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
    }
}

/// Result of one Dormand-Prince step.
#[derive(Debug, Clone)]
pub struct StepResult<T> {
    pub y_new: Vec<T>,
    /// Derivative at the new point (first stage of the next step).
    pub f_new: Vec<T>,
    /// Scaled error estimate; the step is acceptable when `≤ 1`.
    pub error: T,
    pub dense: DenseStep<T>,
}

struct Workspace<T> {
    k: [Vec<T>; 7],
    ytmp: Vec<T>,
}

impl<T: Real> Workspace<T> {
    fn new(len: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![T::zero(); len]),
            ytmp: vec![T::zero(); len],
        }
    }
}

fn derivative<T: Real, S: SecondOrderSystem<T> + ?Sized>(
    sys: &S,
    t: T,
    y: &[T],
    out: &mut [T],
) -> Result<()> {
    let n = sys.dim();
    let (q, p) = y.split_at(n);
    let (dq, dp) = out.split_at_mut(n);
    dq.copy_from_slice(p);
    sys.acceleration(t, q, p, dp)
}

fn dp5_step_ws<T: Real, S: SecondOrderSystem<T> + ?Sized>(
    sys: &S,
    t: T,
    y: &[T],
    f0: &[T],
    h: T,
    rel_tol: T,
    abs_tol: T,
    ws: &mut Workspace<T>,
) -> Result<StepResult<T>> {
    let len = y.len();
    ws.k[0].copy_from_slice(f0);
    for s in 1..7 {
        for i in 0..len {
            let mut acc = T::zero();
            for (j, &a) in A[s].iter().enumerate().take(s) {
                if a != 0.0 {
                    acc += T::lit(a) * ws.k[j][i];
                }
            }
            ws.ytmp[i] = y[i] + h * acc;
        }
        let ts = if s >= 5 { t + h } else { t + T::lit(C[s]) * h };
        let (_, tail) = ws.k.split_at_mut(s);
        derivative(sys, ts, &ws.ytmp, &mut tail[0])?;
    }
    // Stage 7 was evaluated at the fifth-order solution, held in ytmp.
    let y_new = ws.ytmp.clone();
    let mut error = T::zero();
    for i in 0..len {
        let mut e = T::zero();
        for (j, &c) in E.iter().enumerate() {
            if c != 0.0 {
                e += T::lit(c) * ws.k[j][i];
            }
        }
        let sc = abs_tol + rel_tol * y[i].abs().max(y_new[i].abs());
        error = error.max((h * e / sc).abs());
    }
    let mut r5 = vec![T::zero(); len];
    let mut r3 = vec![T::zero(); len];
    let mut r4 = vec![T::zero(); len];
    let mut r2 = vec![T::zero(); len];
    for i in 0..len {
        let ydiff = y_new[i] - y[i];
        let bspl = h * ws.k[0][i] - ydiff;
        r2[i] = ydiff;
        r3[i] = bspl;
        r4[i] = ydiff - h * ws.k[6][i] - bspl;
        let mut d = T::zero();
        for (j, &c) in D.iter().enumerate() {
            if c != 0.0 {
                d += T::lit(c) * ws.k[j][i];
            }
        }
        r5[i] = h * d;
    }
    if !error.is_finite() {
        error = T::infinity();
    }
    Ok(StepResult {
        f_new: ws.k[6].clone(),
        y_new,
        error,
        dense: DenseStep { t, h, rcont: [y.to_vec(), r2, r3, r4, r5] },
    })
}

/// One Dormand-Prince step of size `h` from `(t, y)` with `f0 = y'(t)`.
pub fn dp5_step<T: Real, S: SecondOrderSystem<T> + ?Sized>(
    sys: &S,
    t: T,
    y: &[T],
    f0: &[T],
    h: T,
    rel_tol: T,
    abs_tol: T,
) -> Result<StepResult<T>> {
    let mut ws = Workspace::new(y.len());
    dp5_step_ws(sys, t, y, f0, h, rel_tol, abs_tol, &mut ws)
}

fn scaled_norm<T: Real>(v: &[T], y: &[T], rel_tol: T, abs_tol: T) -> T {
    v.iter()
        .zip(y)
        .map(|(&vi, &yi)| (vi / (abs_tol + rel_tol * yi.abs())).abs())
        .fold(T::zero(), T::max)
}

fn initial_step<T: Real, S: SecondOrderSystem<T> + ?Sized>(
    sys: &S,
    t: T,
    y: &[T],
    f0: &[T],
    cfg: &IntegratorConfig<T>,
    span: T,
) -> Result<T> {
    let d0 = scaled_norm(y, y, cfg.rel_tol, cfg.abs_tol);
    let d1 = scaled_norm(f0, y, cfg.rel_tol, cfg.abs_tol);
    let small = T::lit(1e-5);
    let mut h0 = if d0 < small || d1 < small { T::lit(1e-6) } else { T::lit(0.01) * d0 / d1 };
    h0 = h0.min(span);
    let y1: Vec<T> = y.iter().zip(f0).map(|(&yi, &fi)| yi + h0 * fi).collect();
    let mut f1 = vec![T::zero(); y.len()];
    derivative(sys, t + h0, &y1, &mut f1)?;
    let diff: Vec<T> = f1.iter().zip(f0).map(|(&a, &b)| a - b).collect();
    let d2 = scaled_norm(&diff, y, cfg.rel_tol, cfg.abs_tol) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= T::lit(1e-15) {
        (h0 * T::lit(1e-3)).max(T::lit(1e-6))
    } else {
        (T::lit(0.01) / dm).powf(T::lit(0.2))
    };
    let mut h = (h0 * T::lit(100.0)).min(h1).min(span);
    if let Some(hm) = cfg.max_step {
        h = h.min(hm);
    }
    Ok(h)
}

// RHS failures inside trial stages are retried with smaller steps; this many
// failures without 100 clean steps in between abort the integration.
const MAX_STAGE_FAILURES: usize = 8;

/// Adaptive integration from `(t0, y0)` through the last sample time.
///
/// `observe` is called at every sample time, in order. Returning `Ok(false)`
/// stops the integration after that sample.
pub fn integrate_observed<T, S, O>(
    sys: &S,
    t0: T,
    y0: &[T],
    cfg: &IntegratorConfig<T>,
    mut observe: O,
) -> Result<StepStats>
where
    T: Real,
    S: SecondOrderSystem<T> + ?Sized,
    O: FnMut(T, &[T]) -> Result<bool>,
{
    cfg.validate(t0)?;
    let len = 2 * sys.dim();
    if y0.len() != len {
        return Err(Error::InvalidParameter(format!(
            "state has length {}, system expects {}",
            y0.len(),
            len
        )));
    }
    let mut stats = StepStats::default();
    let mut samples = cfg.sample_times.iter().copied().peekable();
    let mut y = y0.to_vec();
    let mut t = t0;
    while let Some(&s) = samples.peek() {
        if s > t0 {
            break;
        }
        samples.next();
        if !observe(s, &y)? {
            return Ok(stats);
        }
    }
    let t_end = match cfg.sample_times.last() {
        Some(&te) if te > t0 => te,
        _ => return Ok(stats),
    };
    let abort = |t: T, y: &[T], e: Error| Error::IntegrationAborted {
        t: t.as_f64(),
        reason: Box::new(e),
        state: y.iter().map(|v| v.as_f64()).collect(),
    };
    let mut f = vec![T::zero(); len];
    derivative(sys, t, &y, &mut f).map_err(|e| abort(t, &y, e))?;
    stats.evaluations += 1;
    let mut h = initial_step(sys, t, &y, &f, cfg, t_end - t0).map_err(|e| abort(t, &y, e))?;
    stats.evaluations += 1;
    let mut ws = Workspace::new(len);
    let mut interp = vec![T::zero(); len];
    let mut last_rejected = false;
    let mut stage_failures = 0;
    let mut clean_steps = 0usize;
    let mut last_stage_error: Option<Error> = None;
    while t < t_end {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(Error::Diagnostic(format!(
                "step budget of {} exhausted at t = {}",
                cfg.max_steps, t
            )));
        }
        if let Some(hm) = cfg.max_step {
            h = h.min(hm);
        }
        let min_step = T::epsilon() * T::lit(16.0) * t.abs().max(T::one());
        if h < min_step {
            if let Some(e) = last_stage_error.take() {
                return Err(abort(t, &y, e));
            }
            return Err(Error::StepUnderflow { t: t.as_f64(), step: h.as_f64() });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let step = match dp5_step_ws(sys, t, &y, &f, h, cfg.rel_tol, cfg.abs_tol, &mut ws) {
            Ok(step) => step,
            Err(e) => {
                stats.evaluations += 6;
                stage_failures += 1;
                clean_steps = 0;
                if stage_failures > MAX_STAGE_FAILURES {
                    return Err(abort(t, &y, e));
                }
                last_stage_error = Some(e);
                stats.rejected += 1;
                h = h * T::lit(0.25);
                last_rejected = true;
                continue;
            }
        };
        stats.evaluations += 6;
        let err = step.error;
        if err <= T::one() {
            stats.accepted += 1;
            clean_steps += 1;
            if clean_steps >= 100 {
                stage_failures = 0;
                last_stage_error = None;
            }
            let t_new = if last { t_end } else { t + h };
            while let Some(&s) = samples.peek() {
                if s > t_new {
                    break;
                }
                samples.next();
                let keep_going = if s == t_new {
                    observe(s, &step.y_new)?
                } else {
                    step.dense.eval(s, &mut interp);
                    observe(s, &interp)?
                };
                if !keep_going {
                    return Ok(stats);
                }
            }
            y = step.y_new;
            f = step.f_new;
            t = t_new;
            let mut fac = if err == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.2)).min(T::lit(5.0))
            };
            if last_rejected {
                fac = fac.min(T::one());
            }
            h = h * fac;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.2));
            h = h * fac.min(T::one());
            last_rejected = true;
        }
    }
    Ok(stats)
}

/// Adaptive integration collecting the states at every sample time.
pub fn integrate<T, S>(sys: &S, t0: T, y0: &[T], cfg: &IntegratorConfig<T>) -> Result<Trajectory<T>>
where
    T: Real,
    S: SecondOrderSystem<T> + ?Sized,
{
    let mut times = Vec::with_capacity(cfg.sample_times.len());
    let mut states = Vec::with_capacity(cfg.sample_times.len());
    let stats = integrate_observed(sys, t0, y0, cfg, |t, y| {
        times.push(t);
        states.push(y.to_vec());
        Ok(true)
    })?;
    Ok(Trajectory { times, states, stats })
}

/// Fixed-step fifth-order integration over `[t0, t_end]` in `steps` steps.
pub fn integrate_fixed<T, S>(sys: &S, t0: T, y0: &[T], t_end: T, steps: usize) -> Result<Vec<T>>
where
    T: Real,
    S: SecondOrderSystem<T> + ?Sized,
{
    if steps == 0 {
        return Err(Error::InvalidParameter("at least one step is required".into()));
    }
    let h = (t_end - t0) / T::from_count(steps);
    let mut ws = Workspace::new(y0.len());
    let mut y = y0.to_vec();
    let mut f = vec![T::zero(); y.len()];
    derivative(sys, t0, &y, &mut f)?;
    for i in 0..steps {
        let t = t0 + h * T::from_count(i);
        let step = dp5_step_ws(sys, t, &y, &f, h, T::one(), T::one(), &mut ws)?;
        y = step.y_new;
        f = step.f_new;
    }
    Ok(y)
}

/// Observed order from the fixed-step scheme at `n`, `2n` and `4n` steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceEstimate<T> {
    /// `log₂(|y_n − y_2n| / |y_2n − y_4n|)`. `None` when both differences vanish.
    pub order: Option<T>,
    /// Max-norm differences between successive refinements.
    pub differences: [T; 2],
}

pub fn convergence_order<T, S>(
    sys: &S,
    t0: T,
    y0: &[T],
    t_end: T,
    steps: usize,
) -> Result<ConvergenceEstimate<T>>
where
    T: Real,
    S: SecondOrderSystem<T> + ?Sized,
{
    let y1 = integrate_fixed(sys, t0, y0, t_end, steps)?;
    let y2 = integrate_fixed(sys, t0, y0, t_end, 2 * steps)?;
    let y4 = integrate_fixed(sys, t0, y0, t_end, 4 * steps)?;
    let diff = |a: &[T], b: &[T]| {
        a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).fold(T::zero(), T::max)
    };
    let d1 = diff(&y1, &y2);
    let d2 = diff(&y2, &y4);
    let order = if d1 > T::zero() && d2 > T::zero() { Some((d1 / d2).log2()) } else { None };
    Ok(ConvergenceEstimate { order, differences: [d1, d2] })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `ρ u'' = −u`.
    struct Harmonic {
        rho: f64,
    }

    impl SecondOrderSystem<f64> for Harmonic {
        fn dim(&self) -> usize {
            1
        }
        fn acceleration(&self, _t: f64, q: &[f64], _p: &[f64], out: &mut [f64]) -> Result<()> {
            out[0] = -q[0] / self.rho;
            Ok(())
        }
    }

    struct Still;

    impl SecondOrderSystem<f64> for Still {
        fn dim(&self) -> usize {
            3
        }
        fn acceleration(&self, _t: f64, _q: &[f64], _p: &[f64], out: &mut [f64]) -> Result<()> {
            out.fill(0.0);
            Ok(())
        }
    }

    struct FailsAfter(f64);

    impl SecondOrderSystem<f64> for FailsAfter {
        fn dim(&self) -> usize {
            1
        }
        fn acceleration(&self, t: f64, _q: &[f64], _p: &[f64], out: &mut [f64]) -> Result<()> {
            if t > self.0 {
                return Err(Error::Crossed { cell: 0 });
            }
            out[0] = 1.0;
            Ok(())
        }
    }

    fn two_pi() -> f64 {
        2.0 * std::f64::consts::PI
    }

    #[test]
    fn harmonic_period() {
        let cfg = IntegratorConfig::default().with_samples(vec![two_pi()]);
        let tr = integrate(&Harmonic { rho: 1.0 }, 0.0, &[1.0, 0.0], &cfg).unwrap();
        assert!((tr.states[0][0] - 1.0).abs() < 1e-5);
        assert!(tr.states[0][1].abs() < 1e-5);
    }

    #[test]
    fn dense_samples_follow_cosine() {
        let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let cfg = IntegratorConfig::with_tolerances(1e-10, 1e-12).with_samples(times.clone());
        let tr = integrate(&Harmonic { rho: 1.0 }, 0.0, &[1.0, 0.0], &cfg).unwrap();
        assert_eq!(tr.times, times);
        for (t, y) in tr.times.iter().zip(&tr.states) {
            assert!((y[0] - t.cos()).abs() < 1e-8, "t = {t}");
            assert!((y[1] + t.sin()).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn zero_rhs_is_a_fixed_point() {
        let y0 = [0.1, 0.5, 0.9, 0.0, 0.0, 0.0];
        let cfg = IntegratorConfig::default().with_samples(vec![0.0, 1.0, 3.0]);
        let tr = integrate(&Still, 0.0, &y0, &cfg).unwrap();
        for y in &tr.states {
            assert_eq!(y.as_slice(), &y0);
        }
    }

    #[test]
    fn dense_output_matches_step_endpoints() {
        let sys = Harmonic { rho: 2.0 };
        let y = [1.0, 0.3];
        let mut f = [0.0; 2];
        derivative(&sys, 0.0, &y, &mut f).unwrap();
        let step = dp5_step(&sys, 0.0, &y, &f, 0.1, 1e-6, 1e-9).unwrap();
        let mut out = [0.0; 2];
        step.dense.eval(0.0, &mut out);
        assert!((out[0] - y[0]).abs() < 1e-12 && (out[1] - y[1]).abs() < 1e-12);
        step.dense.eval(0.1, &mut out);
        assert!((out[0] - step.y_new[0]).abs() < 1e-12);
        assert!((out[1] - step.y_new[1]).abs() < 1e-12);
    }

    #[test]
    fn halving_tolerance_does_not_hurt() {
        let mut last = f64::INFINITY;
        for k in 0..8 {
            let rtol = 1e-4 / 2f64.powi(k);
            let cfg = IntegratorConfig::with_tolerances(rtol, rtol * 1e-3).with_samples(vec![two_pi()]);
            let tr = integrate(&Harmonic { rho: 1.0 }, 0.0, &[1.0, 0.0], &cfg).unwrap();
            let err = (tr.states[0][0] - 1.0).abs();
            assert!(err <= last * 1.0001, "rtol {rtol}: {err} > {last}");
            last = err;
        }
    }

    #[test]
    fn deterministic() {
        let cfg = IntegratorConfig::default().with_samples(vec![0.5, 1.7, 3.0]);
        let a = integrate(&Harmonic { rho: 0.7 }, 0.0, &[1.0, -0.2], &cfg).unwrap();
        let b = integrate(&Harmonic { rho: 0.7 }, 0.0, &[1.0, -0.2], &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fifth_order_on_harmonic() {
        let est = convergence_order(&Harmonic { rho: 1.0 }, 0.0, &[1.0, 0.0], two_pi(), 20).unwrap();
        let order = est.order.unwrap();
        assert!((4.5..=5.5).contains(&order), "order {order}");
    }

    #[test]
    fn zero_rhs_has_no_error() {
        let est = convergence_order(&Still, 0.0, &[1.0, 2.0, 3.0, 0.0, 0.0, 0.0], 1.0, 4).unwrap();
        assert_eq!(est.differences, [0.0, 0.0]);
        assert!(est.order.is_none());
    }

    #[test]
    fn rhs_failure_aborts_with_state() {
        let cfg = IntegratorConfig::default().with_samples(vec![2.0]);
        match integrate(&FailsAfter(1.0), 0.0, &[0.0, 0.0], &cfg) {
            Err(Error::IntegrationAborted { t, reason, state }) => {
                assert!(t <= 1.0 + 1e-9);
                assert_eq!(*reason, Error::Crossed { cell: 0 });
                assert_eq!(state.len(), 2);
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = IntegratorConfig::default().with_samples(vec![1.0, 0.5]);
        assert!(integrate(&Still, 0.0, &[0.0; 6], &cfg).is_err());
        let cfg = IntegratorConfig::with_tolerances(0.0, 1e-9).with_samples(vec![1.0]);
        assert!(integrate(&Still, 0.0, &[0.0; 6], &cfg).is_err());
    }

    #[test]
    fn max_step_is_respected() {
        let mut cfg = IntegratorConfig::default().with_samples(vec![1.0]);
        cfg.max_step = Some(0.01);
        let tr = integrate(&Still, 0.0, &[0.0; 6], &cfg).unwrap();
        assert!(tr.stats.accepted >= 100);
    }
}
