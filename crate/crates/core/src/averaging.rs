//! Mollifier averaging of sampled fields.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::snapshot::{FieldSnapshot, Provenance};

/// Kernel `g(X) = 1 + cos 2πX` on `[−½, ½]`, scaled as `g_ε(X) = g(X/ε)/ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mollifier<T> {
    pub eps: T,
}

impl<T: Real> Mollifier<T> {
    pub fn new(eps: T) -> Result<Self> {
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!("mollifier scale must be positive, got {}", eps)));
        }
        Ok(Self { eps })
    }

    pub fn base(z: T) -> T {
        if z.abs() <= T::lit(0.5) {
            T::one() + (T::TAU() * z).cos()
        } else {
            T::zero()
        }
    }

    pub fn kernel(&self, x: T) -> T {
        Self::base(x / self.eps) / self.eps
    }

    /// Convolution of `values` on a uniform grid of spacing `dx`, with the
    /// field extended by its end values and the discrete weights normalized
    /// to unit mass.
    pub fn apply(&self, values: &[T], dx: T) -> Vec<T> {
        let n = values.len();
        if n == 0 {
            return Vec::new();
        }
        let reach = (self.eps / (dx + dx)).ceil().to_usize().unwrap_or(0) + 1;
        let weights: Vec<T> = (0..=2 * reach)
            .map(|i| self.kernel((T::from_count(i) - T::from_count(reach)) * dx) * dx)
            .collect();
        let total: T = weights.iter().copied().sum();
        let last = (n - 1) as isize;
        (0..n)
            .map(|j| {
                let mut acc = T::zero();
                for (i, &w) in weights.iter().enumerate() {
                    if w == T::zero() {
                        continue;
                    }
                    let k = (j as isize + i as isize - reach as isize).clamp(0, last) as usize;
                    acc += w * values[k];
                }
                acc / total
            })
            .collect()
    }
}

/// `ε` as a function of the cell count: `min(max(k/M, floor), cap)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsPolicy<T> {
    pub cells_per_eps: T,
    pub floor: T,
    pub cap: T,
}

impl<T: Real> Default for EpsPolicy<T> {
    fn default() -> Self {
        Self { cells_per_eps: T::lit(8.0), floor: T::lit(1.0 / 16.0), cap: T::lit(0.25) }
    }
}

impl<T: Real> EpsPolicy<T> {
    pub fn eps(&self, cells: usize) -> T {
        (self.cells_per_eps / T::from_count(cells)).max(self.floor).min(self.cap)
    }
}

/// Default `ε` for `M` cells: `min(max(8/M, 1/16), 1/4)`.
pub fn choose_eps<T: Real>(cells: usize) -> T {
    EpsPolicy::default().eps(cells)
}

/// Mollified `F` and `v`. Positions are carried over unchanged.
pub fn mollify<T: Real>(field: &FieldSnapshot<T>, eps: T) -> Result<FieldSnapshot<T>> {
    if !(eps > field.dx && eps < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "mollifier scale {} must lie in (dx, 1) = ({}, 1)",
            eps, field.dx
        )));
    }
    let m = Mollifier::new(eps)?;
    Ok(FieldSnapshot {
        t: field.t,
        dx: field.dx,
        x: field.x.clone(),
        strain: m.apply(&field.strain, field.dx),
        velocity: m.apply(&field.velocity, field.dx),
        position: field.position.clone(),
        provenance: Provenance::Mollified { eps, tau: T::zero() },
    })
}

/// Mean of the mollified snapshots with `|t_k − t| ≤ τ`. With `τ = 0` this is
/// the mollified snapshot at `t`.
pub fn space_time_average<T: Real>(
    series: &[FieldSnapshot<T>],
    t: T,
    eps: T,
    tau: T,
) -> Result<FieldSnapshot<T>> {
    if tau < T::zero() {
        return Err(Error::InvalidParameter(format!("time window must be non-negative, got {}", tau)));
    }
    let tol = T::lit(1e-12) * t.abs().max(T::one());
    let chosen: Vec<&FieldSnapshot<T>> =
        series.iter().filter(|s| (s.t - t).abs() <= tau + tol).collect();
    let Some(first) = chosen.first() else {
        return Err(Error::InvalidParameter(format!("no snapshot within {} of t = {}", tau, t)));
    };
    if chosen.iter().any(|s| s.len() != first.len()) {
        return Err(Error::Config("snapshots in the time window use different grids".into()));
    }
    let mut out = mollify(first, eps)?;
    if chosen.len() > 1 {
        for s in &chosen[1..] {
            let m = mollify(s, eps)?;
            for (a, b) in out.strain.iter_mut().zip(&m.strain) {
                *a += *b;
            }
            for (a, b) in out.velocity.iter_mut().zip(&m.velocity) {
                *a += *b;
            }
        }
        let n = T::from_count(chosen.len());
        out.strain.iter_mut().for_each(|a| *a /= n);
        out.velocity.iter_mut().for_each(|a| *a /= n);
    }
    out.t = t;
    out.provenance = Provenance::Mollified { eps, tau };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snapshot(cells: usize, f: impl Fn(f64) -> f64) -> FieldSnapshot<f64> {
        let x = FieldSnapshot::cell_centres(cells);
        let strain: Vec<f64> = x.iter().map(|&x| f(x)).collect();
        FieldSnapshot {
            t: 0.0,
            dx: 1.0 / cells as f64,
            velocity: strain.iter().map(|s| -s).collect(),
            position: vec![0.0; cells],
            x,
            strain,
            provenance: Provenance::Raw,
        }
    }

    #[test]
    fn kernel_has_unit_mass() {
        let m = Mollifier::new(0.1).unwrap();
        let n = 20000;
        let h = 0.2 / n as f64;
        let mass: f64 = (0..n).map(|i| m.kernel(-0.1 + (i as f64 + 0.5) * h) * h).sum();
        assert!((mass - 1.0).abs() < 1e-8);
        assert!(Mollifier::base(0.6f64) == 0.0 && Mollifier::base(0.5f64).abs() < 1e-15);
    }

    #[test]
    fn policy_values() {
        assert_eq!(choose_eps::<f64>(128), 1.0 / 16.0);
        assert_eq!(choose_eps::<f64>(64), 1.0 / 8.0);
        assert_eq!(choose_eps::<f64>(32), 0.25);
        assert_eq!(choose_eps::<f64>(16), 0.25);
    }

    #[test]
    fn constants_are_preserved() {
        let s = snapshot(64, |_| 1.02);
        let m = mollify(&s, 0.125).unwrap();
        assert!(m.strain.iter().all(|&f| (f - 1.02).abs() < 1e-14));
    }

    #[test]
    fn linear_fields_are_preserved_in_the_interior() {
        let s = snapshot(128, |x| 0.7 * x);
        let eps = 1.0 / 16.0;
        let m = mollify(&s, eps).unwrap();
        for (j, &x) in s.x.iter().enumerate() {
            if x > eps && x < 1.0 - eps {
                assert!((m.strain[j] - 0.7 * x).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn grid_scale_oscillations_are_suppressed() {
        let dx = 1.0 / 128.0;
        let s = snapshot(128, |x| (2.0 * std::f64::consts::PI * x / dx).sin());
        let m = mollify(&s, 8.0 * dx).unwrap();
        assert!(m.strain.iter().all(|f| f.abs() < 0.05));
        let s = snapshot(128, |x| if ((x / dx) as usize) % 2 == 0 { 1.0 } else { -1.0 });
        let m = mollify(&s, 8.0 * dx).unwrap();
        // constant extension breaks the alternation within one kernel width of the ends
        assert!(m.strain[5..123].iter().all(|f| f.abs() < 0.05));
    }

    #[test]
    fn rejects_bad_scale() {
        let s = snapshot(16, |x| x);
        assert!(mollify(&s, 0.01).is_err());
        assert!(mollify(&s, 1.5).is_err());
    }

    #[test]
    fn time_window_averages() {
        let mut a = snapshot(32, |_| 1.0);
        let mut b = snapshot(32, |_| 3.0);
        a.t = 0.1;
        b.t = 0.2;
        let avg = space_time_average(&[a.clone(), b], 0.15, 0.25, 0.05).unwrap();
        assert!(avg.strain.iter().all(|&f| (f - 2.0).abs() < 1e-14));
        let only = space_time_average(&[a], 0.1, 0.25, 0.0).unwrap();
        assert!(only.strain.iter().all(|&f| (f - 1.0).abs() < 1e-14));
    }
}
