//! Bracketed root finding and adaptive quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_BISECTIONS: usize = 400;

/// Bisection on a bracket `[lo, hi]` where `f` changes sign.
///
/// Stops when the bracket is narrower than `tol * max(1, |mid|)` or when the
/// midpoint can no longer be distinguished from an endpoint.
pub fn bisect<T, F>(mut f: F, lo: T, hi: T, tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSolution(format!(
            "no sign change on [{}, {}] (f = {}, {})",
            a.as_f64(),
            b.as_f64(),
            fa.as_f64(),
            fb.as_f64()
        )));
    }
    let tol = tol.max(T::tol_floor());
    let half = T::lit(0.5);
    for _ in 0..MAX_BISECTIONS {
        let mid = a + (b - a) * half;
        if mid <= a || mid >= b || (b - a) <= tol * mid.abs().max(T::one()) {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(a + (b - a) * half)
}

// Gauss-Kronrod 7/15 nodes on [-1, 1] (positive half, descending, last = 0).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod<T, F>(f: &mut F, a: T, b: T) -> Result<(T, T)>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let center = (a + b) * T::lit(0.5);
    let half = (b - a) * T::lit(0.5);
    let fc = f(center)?;
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * T::lit(x);
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += pair * T::lit(w);
        if i % 2 == 1 {
            gauss += pair * T::lit(WG[i / 2]);
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Intervals are bisected until each one meets its share of the absolute
/// tolerance `tol`. Integrands with integrable kinks or square-root zeros at
/// an endpoint are refined locally.
pub fn integrate<T, F>(mut f: F, a: T, b: T, tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if a == b {
        return Ok(T::zero());
    }
    let (lo, hi, sign) = if a < b { (a, b, T::one()) } else { (b, a, -T::one()) };
    let total = hi - lo;
    let tol = tol.max(T::epsilon() * T::lit(64.0));
    let mut stack = vec![(lo, hi, 0usize)];
    let mut sum = T::zero();
    while let Some((x0, x1, depth)) = stack.pop() {
        let (value, err) = gauss_kronrod(&mut f, x0, x1)?;
        let share = tol * (x1 - x0) / total;
        if err <= share || depth >= 60 || (x1 - x0) <= T::epsilon() * total {
            sum += value;
        } else {
            let mid = (x0 + x1) * T::lit(0.5);
            stack.push((mid, x1, depth + 1));
            stack.push((x0, mid, depth + 1));
        }
    }
    Ok(sign * sum)
}

/// Least-squares slope of `ys` against `xs`.
pub fn linear_fit_slope<T: Real>(xs: &[T], ys: &[T]) -> Option<T> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let nn = T::from_count(n);
    let mx = xs[..n].iter().copied().sum::<T>() / nn;
    let my = ys[..n].iter().copied().sum::<T>() / nn;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == T::zero() {
        None
    } else {
        Some(sxy / sxx)
    }
}
