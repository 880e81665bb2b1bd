//! Equilibria of the chain with fixed ends and their local stability.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::bisect;
use crate::potential::LennardJones;
use crate::scalar::Real;

pub(crate) const ROOT_TOL: f64 = 1e-13;

/// Solutions of `σ(F) = c` on `(0, z_cut]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum StressRoots<T> {
    /// `c < 0`: one compressive root below 1.
    Single(T),
    /// `0 ≤ c < c_max`: `lower < r < upper`. The upper root is capped at `z_cut`.
    Double { lower: T, upper: T },
    /// `c = c_max`: the double root at the sonic strain.
    Tangent(T),
}

impl<T: Real> StressRoots<T> {
    pub fn roots(&self) -> Vec<T> {
        match *self {
            StressRoots::Single(b) | StressRoots::Tangent(b) => vec![b],
            StressRoots::Double { lower, upper } => vec![lower, upper],
        }
    }
}

/// Roots of `σ(F) = c`.
pub fn solve_stress_level<T: Real>(pot: &LennardJones<T>, c: T) -> Result<StressRoots<T>> {
    if !c.is_finite() {
        return Err(Error::NoSolution(format!("stress level {} is not finite", c)));
    }
    let c_max = pot.max_stress();
    let r = pot.sonic_strain();
    let tol = T::lit(ROOT_TOL);
    if (c - c_max).abs() <= T::tol_floor() * c_max {
        return Ok(StressRoots::Tangent(r));
    }
    if c > c_max {
        return Err(Error::NoSolution(format!(
            "stress level {} exceeds c_max = {}",
            c, c_max
        )));
    }
    let f = |x: T| Ok(pot.sigma_unchecked(x) - c);
    if c < T::zero() {
        let mut lo = T::lit(0.5);
        while pot.sigma_unchecked(lo) > c {
            lo = lo * T::lit(0.5);
            if lo <= T::min_positive_value() {
                return Err(Error::NoSolution(format!("stress level {} unattainable", c)));
            }
        }
        return Ok(StressRoots::Single(bisect(f, lo, T::one(), tol)?));
    }
    let lower = bisect(f, T::one(), r, tol)?;
    let zc = pot.cutoff_strain();
    let upper = if c <= pot.sigma_unchecked(zc) { zc } else { bisect(f, r, zc, tol)? };
    Ok(StressRoots::Double { lower, upper })
}

/// Two-phase minimizer: strain `b_minus` on a set of measure `l_minus`,
/// `b_plus` on the rest, both at stress `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPhaseSolution<T> {
    pub c: T,
    pub b_minus: T,
    pub b_plus: T,
    pub l_minus: T,
    pub l_plus: T,
}

impl<T: Real> TwoPhaseSolution<T> {
    /// Strain of the canonical arrangement: `b_minus` on `[0, l_minus)`, then `b_plus`.
    pub fn strain_at(&self, x: T) -> T {
        if x < self.l_minus {
            self.b_minus
        } else {
            self.b_plus
        }
    }

    /// Deformation of the canonical arrangement.
    pub fn position_at(&self, x: T) -> T {
        if x <= self.l_minus {
            self.b_minus * x
        } else {
            self.b_minus * self.l_minus + self.b_plus * (x - self.l_minus)
        }
    }
}

/// Result of the equilibrium problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Equilibrium<T> {
    Uniform { strain: T },
    TwoPhase(TwoPhaseSolution<T>),
}

impl<T: Real> Equilibrium<T> {
    pub fn strain_at(&self, x: T) -> T {
        match self {
            Equilibrium::Uniform { strain } => *strain,
            Equilibrium::TwoPhase(s) => s.strain_at(x),
        }
    }

    pub fn position_at(&self, x: T) -> T {
        match self {
            Equilibrium::Uniform { strain } => *strain * x,
            Equilibrium::TwoPhase(s) => s.position_at(x),
        }
    }

    /// Total stored energy `∫₀¹ Θ(ψ')`.
    pub fn energy(&self, pot: &LennardJones<T>) -> Result<T> {
        match self {
            Equilibrium::Uniform { strain } => pot.theta(*strain),
            Equilibrium::TwoPhase(s) => {
                let mut e = T::zero();
                if s.l_minus > T::zero() {
                    e += s.l_minus * pot.theta(s.b_minus)?;
                }
                if s.l_plus > T::zero() {
                    e += s.l_plus * pot.theta(s.b_plus)?;
                }
                Ok(e)
            }
        }
    }
}

/// Equilibrium with `ψ(0) = 0`, `ψ(1) = a`.
///
/// For `a < 1` the solution is uniform and `c` is ignored. For `a ≥ 1` the
/// stress level defaults to 0 and must lie in `[0, σ(a)]`.
pub fn equilibrium<T: Real>(pot: &LennardJones<T>, a: T, c: Option<T>) -> Result<Equilibrium<T>> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::Domain { what: "end displacement", value: a.as_f64() });
    }
    if a < T::one() {
        return Ok(Equilibrium::Uniform { strain: a });
    }
    let zc = pot.cutoff_strain();
    if a > zc {
        return Err(Error::Constraint(format!(
            "end displacement {} exceeds the cutoff strain {}",
            a, zc
        )));
    }
    let c = c.unwrap_or_else(T::zero);
    let sa = pot.sigma(a)?;
    let slack = T::tol_floor() * pot.max_stress();
    if c < -slack || c > sa + slack {
        return Err(Error::Constraint(format!(
            "stress level {} outside [0, sigma(a)] = [0, {}]",
            c, sa
        )));
    }
    let c = c.max(T::zero()).min(sa);
    let (b_minus, b_plus) = match solve_stress_level(pot, c)? {
        StressRoots::Double { lower, upper } => (lower.min(a), upper.max(a)),
        StressRoots::Tangent(r) => (r, r),
        StressRoots::Single(_) => unreachable!("c is non-negative"),
    };
    let (l_minus, l_plus) = if b_plus > b_minus {
        let lm = ((b_plus - a) / (b_plus - b_minus)).max(T::zero()).min(T::one());
        (lm, T::one() - lm)
    } else {
        (T::one(), T::zero())
    };
    Ok(Equilibrium::TwoPhase(TwoPhaseSolution { c, b_minus, b_plus, l_minus, l_plus }))
}

/// `w(v, u) = Θ(v) − Θ(u) − (v − u)σ(u)`.
pub fn weierstrass_excess<T: Real>(pot: &LennardJones<T>, v: T, u: T) -> Result<T> {
    Ok(pot.theta(v)? - pot.theta(u)? - (v - u) * pot.sigma(u)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    LocallyStable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityVerdict<T> {
    pub classification: Stability,
    /// `(u, v)` with `w(v, u) < 0`, present iff unstable.
    pub witness: Option<(T, T)>,
}

/// Profiles accepted by [`classify_stability`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile<T> {
    Uniform(T),
    TwoPhase(TwoPhaseSolution<T>),
}

impl<T> From<Equilibrium<T>> for Profile<T> {
    fn from(e: Equilibrium<T>) -> Self {
        match e {
            Equilibrium::Uniform { strain } => Profile::Uniform(strain),
            Equilibrium::TwoPhase(s) => Profile::TwoPhase(s),
        }
    }
}

/// Local stability: a strain `u` is stable iff `σ'(u) > 0`, so that the
/// excess function is non-negative for all `v` near `u`.
pub fn classify_stability<T: Real>(
    pot: &LennardJones<T>,
    profile: Profile<T>,
) -> Result<StabilityVerdict<T>> {
    let unstable_strain = match profile {
        Profile::Uniform(f) => {
            if pot.sigma_prime(f)? > T::zero() {
                None
            } else {
                Some(f)
            }
        }
        Profile::TwoPhase(s) => {
            if s.l_plus > T::zero() {
                Some(s.b_plus)
            } else {
                None
            }
        }
    };
    match unstable_strain {
        None => Ok(StabilityVerdict { classification: Stability::LocallyStable, witness: None }),
        Some(u) => Ok(StabilityVerdict {
            classification: Stability::Unstable,
            witness: Some((u, excess_witness(pot, u)?)),
        }),
    }
}

/// The `v` minimizing `w(·, u)` over a grid on `(0, z_cut]` plus points near `u`.
fn excess_witness<T: Real>(pot: &LennardJones<T>, u: T) -> Result<T> {
    let zc = pot.cutoff_strain().max(u);
    let lo = T::lit(0.8).min(u * T::lit(0.9));
    let n = 2000;
    let mut candidates: Vec<T> = (0..=n)
        .map(|i| lo + (zc - lo) * T::from_count(i) / T::from_count(n))
        .collect();
    for rel in [1e-4, 1e-3, 1e-2] {
        candidates.push(u * (T::one() + T::lit(rel)));
        candidates.push(u * (T::one() - T::lit(rel)));
    }
    let mut best = (T::infinity(), u);
    for v in candidates {
        let w = weierstrass_excess(pot, v, u)?;
        if w < best.0 {
            best = (w, v);
        }
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lj() -> LennardJones<f64> {
        LennardJones::default()
    }

    #[test]
    fn stress_level_zero_and_max() {
        let p = lj();
        match solve_stress_level(&p, 0.0).unwrap() {
            StressRoots::Double { lower, upper } => {
                assert!((lower - 1.0).abs() < 1e-12);
                assert_eq!(upper, p.cutoff_strain());
            }
            other => panic!("{:?}", other),
        }
        assert_eq!(
            solve_stress_level(&p, p.max_stress()).unwrap(),
            StressRoots::Tangent(p.sonic_strain())
        );
        assert!(matches!(solve_stress_level(&p, 0.06), Err(Error::NoSolution(_))));
    }

    #[test]
    fn stress_level_two_roots() {
        let p = lj();
        let StressRoots::Double { lower, upper } = solve_stress_level(&p, 0.001).unwrap() else {
            panic!("expected two roots");
        };
        assert!(lower < p.sonic_strain() && p.sonic_strain() < upper);
        assert!((p.sigma(lower).unwrap() - 0.001).abs() < 1e-10);
        assert!((p.sigma(upper).unwrap() - 0.001).abs() < 1e-10);
        assert!((lower - 1.000_671_380_908_049_4).abs() < 1e-11);
        assert!((upper - 2.197_910_833_478_745).abs() < 1e-10);
    }

    #[test]
    fn stress_level_compressive() {
        let p = lj();
        let StressRoots::Single(b) = solve_stress_level(&p, -0.5).unwrap() else {
            panic!("expected one root");
        };
        assert!(b < 1.0);
        assert!((p.sigma(b).unwrap() + 0.5).abs() < 1e-10);
    }

    #[test]
    fn equilibrium_cases() {
        let p = lj();
        assert_eq!(equilibrium(&p, 0.9, Some(7.0)).unwrap(), Equilibrium::Uniform { strain: 0.9 });
        let Equilibrium::TwoPhase(s) = equilibrium(&p, 1.0, None).unwrap() else { panic!() };
        assert_eq!((s.l_minus, s.l_plus), (1.0, 0.0));
        assert!((s.b_minus - 1.0).abs() < 1e-12);
        let Equilibrium::TwoPhase(s) = equilibrium(&p, 1.2, Some(0.0)).unwrap() else { panic!() };
        let zc = p.cutoff_strain();
        assert!((s.l_minus - (zc - 1.2) / (zc - 1.0)).abs() < 1e-12);
        assert!((s.l_minus - 0.855_977_920_031_702_1).abs() < 1e-10);
        assert!((s.l_minus + s.l_plus - 1.0).abs() < 1e-14);
        assert!((s.b_minus * s.l_minus + s.b_plus * s.l_plus - 1.2).abs() < 1e-10);
        assert!(matches!(equilibrium(&p, 1.2, Some(0.05)), Err(Error::Constraint(_))));
        assert!(matches!(equilibrium(&p, 1.2, Some(-0.01)), Err(Error::Constraint(_))));
        assert!(equilibrium(&p, -1.0, None).is_err());
    }

    #[test]
    fn canonical_realization_hits_the_end() {
        let p = lj();
        let e = equilibrium(&p, 1.05, Some(0.02)).unwrap();
        assert!((e.position_at(1.0) - 1.05).abs() < 1e-10);
        assert_eq!(e.position_at(0.0), 0.0);
    }

    #[test]
    fn excess_values() {
        let p = lj();
        assert_eq!(weierstrass_excess(&p, 1.05, 1.05).unwrap(), 0.0);
        assert!(weierstrass_excess(&p, 1.0, 1.05).unwrap() > 0.0);
        let negative = (0..200)
            .map(|i| 0.9 + 1.4 * i as f64 / 200.0)
            .any(|v| weierstrass_excess(&p, v, 1.3).unwrap() < 0.0);
        assert!(negative);
    }

    #[test]
    fn stability_verdicts() {
        let p = lj();
        let v = classify_stability(&p, Profile::Uniform(0.9)).unwrap();
        assert_eq!(v.classification, Stability::LocallyStable);
        assert!(v.witness.is_none());
        let v = classify_stability(&p, Profile::Uniform(1.3)).unwrap();
        assert_eq!(v.classification, Stability::Unstable);
        let (u, w) = v.witness.unwrap();
        assert!(weierstrass_excess(&p, w, u).unwrap() < 0.0);
        let e = equilibrium(&p, 1.0, None).unwrap();
        assert_eq!(classify_stability(&p, e.into()).unwrap().classification, Stability::LocallyStable);
        let e = equilibrium(&p, 1.2, None).unwrap();
        assert_eq!(classify_stability(&p, e.into()).unwrap().classification, Stability::Unstable);
    }

    #[test]
    fn stability_flips_at_sonic_strain() {
        let p = lj();
        let stable = |f: f64| {
            classify_stability(&p, Profile::Uniform(f)).unwrap().classification
                == Stability::LocallyStable
        };
        let (mut lo, mut hi) = (1.0, 1.3);
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if stable(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - p.sonic_strain()).abs() < 1e-8);
    }

    #[test]
    fn witness_at_sonic_strain() {
        let p = lj();
        let r = p.sonic_strain();
        let v = classify_stability(&p, Profile::Uniform(r)).unwrap();
        let (u, w) = v.witness.unwrap();
        assert!(weierstrass_excess(&p, w, u).unwrap() < 0.0);
    }
}
