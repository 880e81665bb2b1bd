//! Lennard-Jones pair interaction and its Cauchy-Born energy density.
//!
//! With `Θ(F) = Φ(F, 1)` the stress is `σ(F) = Θ'(F) = 3A(F⁻⁷ − F⁻¹³)`. The
//! stress rises from `−∞` through `σ(1) = 0` to its maximum `c_max` at the
//! sonic strain `r = (13/7)^{1/6}`, then decays towards zero. The cutoff
//! strain `z_cut` is where the stress has fallen to `eta_cut · c_max`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::bisect;
use crate::scalar::Real;

/// Interaction constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialParams<T> {
    /// Energy scale `A`.
    pub energy_scale: T,
    /// Reference bond length `r0`.
    pub bond_length: T,
    /// Relative stress level that defines the cutoff strain.
    pub eta_cut: T,
}

impl<T: Real> PotentialParams<T> {
    pub fn new(energy_scale: T, bond_length: T, eta_cut: T) -> Result<Self> {
        if !(energy_scale > T::zero()) || !energy_scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "energy scale A must be positive, got {}",
                energy_scale
            )));
        }
        if !(bond_length > T::zero()) || !bond_length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bond length r0 must be positive, got {}",
                bond_length
            )));
        }
        if !(eta_cut > T::zero() && eta_cut < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "eta_cut must lie in (0, 1), got {}",
                eta_cut
            )));
        }
        Ok(Self { energy_scale, bond_length, eta_cut })
    }

    /// Parameters from the stress prefactor `3A`, with `r0 = 1`.
    pub fn from_stress_prefactor(three_a: T, eta_cut: T) -> Result<Self> {
        Self::new(three_a / T::lit(3.0), T::one(), eta_cut)
    }
}

impl<T: Real> Default for PotentialParams<T> {
    /// `3A = 0.25`, `r0 = 1`, `eta_cut = 1e-2`.
    fn default() -> Self {
        Self {
            energy_scale: T::lit(0.25) / T::lit(3.0),
            bond_length: T::one(),
            eta_cut: T::lit(1e-2),
        }
    }
}

/// Derived constants of the stress-strain curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalConstants<T> {
    /// Sonic strain `r`: argmax of σ, root of σ'.
    pub sonic_strain: T,
    /// `c_max = σ(r)`.
    pub max_stress: T,
    /// Cutoff strain: root of `σ(F) = eta_cut · c_max` beyond `r`.
    pub cutoff_strain: T,
    /// `Θ_min = Θ(1) = −A/4`.
    pub min_energy: T,
}

/// Computes the critical constants for `params`.
pub fn critical_constants<T: Real>(params: &PotentialParams<T>) -> Result<CriticalConstants<T>> {
    let three_a = params.energy_scale * T::lit(3.0);
    let stress = |f: T| {
        let inv6 = f.powi(-6);
        three_a * inv6 / f * (T::one() - inv6)
    };
    let sonic = (T::lit(13.0) / T::lit(7.0)).powf(T::one() / T::lit(6.0));
    let max_stress = stress(sonic);
    let target = params.eta_cut * max_stress;
    let mut upper = sonic * T::lit(2.0);
    while stress(upper) > target {
        upper = upper * T::lit(2.0);
        if !upper.is_finite() {
            return Err(Error::NoSolution("cutoff strain bracket diverged".into()));
        }
    }
    let cutoff = bisect(|f| Ok(stress(f) - target), sonic, upper, T::epsilon())?;
    Ok(CriticalConstants {
        sonic_strain: sonic,
        max_stress,
        cutoff_strain: cutoff,
        min_energy: -params.energy_scale / T::lit(4.0),
    })
}

/// Lennard-Jones potential with its derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LennardJones<T> {
    params: PotentialParams<T>,
    constants: CriticalConstants<T>,
}

impl<T: Real> LennardJones<T> {
    pub fn new(params: PotentialParams<T>) -> Result<Self> {
        let params = PotentialParams::new(params.energy_scale, params.bond_length, params.eta_cut)?;
        let constants = critical_constants(&params)?;
        Ok(Self { params, constants })
    }

    pub fn params(&self) -> &PotentialParams<T> {
        &self.params
    }

    pub fn constants(&self) -> &CriticalConstants<T> {
        &self.constants
    }

    pub fn sonic_strain(&self) -> T {
        self.constants.sonic_strain
    }

    pub fn max_stress(&self) -> T {
        self.constants.max_stress
    }

    pub fn cutoff_strain(&self) -> T {
        self.constants.cutoff_strain
    }

    pub fn min_energy(&self) -> T {
        self.constants.min_energy
    }

    fn three_a(&self) -> T {
        self.params.energy_scale * T::lit(3.0)
    }

    fn positive(what: &'static str, x: T) -> Result<()> {
        if x > T::zero() && x.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain { what, value: x.as_f64() })
        }
    }

    /// `Φ(r, r0) = (A/4)[−2(r0/r)⁶ + (r0/r)¹²]`.
    pub fn pair_potential(&self, r: T, r0: T) -> Result<T> {
        Self::positive("pair potential (bond length)", r)?;
        Self::positive("pair potential (reference length)", r0)?;
        let q6 = (r0 / r).powi(6);
        Ok(self.params.energy_scale / T::lit(4.0) * (q6 * q6 - q6 - q6))
    }

    /// `∂Φ/∂r` at bond length `r` with reference length `r0`.
    pub fn pair_force(&self, r: T, r0: T) -> Result<T> {
        Self::positive("pair force (bond length)", r)?;
        Self::positive("pair force (reference length)", r0)?;
        let r0_6 = r0.powi(6);
        Ok(self.three_a() * (r0_6 * r.powi(-7) - r0_6 * r0_6 * r.powi(-13)))
    }

    /// Energy density `Θ(F) = Φ(F, 1)`.
    pub fn theta(&self, strain: T) -> Result<T> {
        Self::positive("theta", strain)?;
        let inv6 = strain.powi(-6);
        Ok(self.params.energy_scale / T::lit(4.0) * (inv6 * inv6 - inv6 - inv6))
    }

    /// Stress `σ(F) = 3A(F⁻⁷ − F⁻¹³)`.
    #[inline]
    pub fn sigma(&self, strain: T) -> Result<T> {
        Self::positive("sigma", strain)?;
        Ok(self.sigma_unchecked(strain))
    }

    /// Stress without the domain check. Callers guarantee `strain > 0`.
    #[inline]
    pub(crate) fn sigma_unchecked(&self, strain: T) -> T {
        let inv = strain.recip();
        let inv2 = inv * inv;
        let inv6 = inv2 * inv2 * inv2;
        self.three_a() * inv6 * inv * (T::one() - inv6)
    }

    /// `σ'(F) = 3A(−7F⁻⁸ + 13F⁻¹⁴)`.
    pub fn sigma_prime(&self, strain: T) -> Result<T> {
        Self::positive("sigma'", strain)?;
        let inv2 = strain.powi(-2);
        let inv6 = inv2 * inv2 * inv2;
        let inv8 = inv6 * inv2;
        Ok(self.three_a() * inv8 * (T::lit(13.0) * inv6 - T::lit(7.0)))
    }

    /// Characteristic speed `c(F) = √σ'(F)`, defined in the hyperbolic region.
    pub fn wave_speed(&self, strain: T) -> Result<T> {
        let slope = self.sigma_prime(strain)?;
        if slope < T::zero() {
            return Err(Error::Elliptic { strain: strain.as_f64(), slope: slope.as_f64() });
        }
        Ok(slope.sqrt())
    }

    /// Speed used inside quadratures: `√max(σ', 0)`. Tolerates round-off just
    /// past the sonic point.
    pub(crate) fn wave_speed_clamped(&self, strain: T) -> Result<T> {
        Ok(self.sigma_prime(strain)?.max(T::zero()).sqrt())
    }

    pub fn is_hyperbolic(&self, strain: T) -> bool {
        strain > T::zero() && strain < self.constants.sonic_strain
    }
}

impl<T: Real> Default for LennardJones<T> {
    fn default() -> Self {
        Self::new(PotentialParams::default()).expect("default parameters are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lj() -> LennardJones<f64> {
        LennardJones::default()
    }

    #[test]
    fn pair_potential_values() {
        let p = lj();
        let a = 1.0 / 12.0;
        assert!((p.pair_potential(1.0, 1.0).unwrap() + a / 4.0).abs() < 1e-16);
        assert!(p.pair_potential(10.0, 1.0).unwrap().abs() < 1e-6);
        // (1/48)(−2·2⁻⁶ + 2⁻¹²), evaluated in closed form
        let expected = (1.0 / 48.0) * (-2.0 / 64.0 + 1.0 / 4096.0);
        assert!((p.pair_potential(2.0, 1.0).unwrap() - expected).abs() < 1e-17);
        assert!((expected + 0.000_645_955_403_645_833_3).abs() < 1e-15);
        assert!(matches!(p.pair_potential(0.0, 1.0), Err(Error::Domain { .. })));
        assert!(p.pair_potential(-1.0, 1.0).is_err());
    }

    #[test]
    fn theta_values() {
        let p = lj();
        assert!((p.theta(1.0).unwrap() + 1.0 / 48.0).abs() < 1e-16);
        let zc = p.cutoff_strain();
        assert!(p.theta(zc).unwrap().abs() < 0.02 * p.min_energy().abs());
        assert!(p.theta(0.5).unwrap() > 10.0 * p.min_energy().abs());
        assert!(p.theta(0.0).is_err());
    }

    #[test]
    fn sigma_values() {
        let p = lj();
        assert_eq!(p.sigma(1.0).unwrap(), 0.0);
        assert!((p.sigma(2.0).unwrap() - 0.001_922_607_421_875).abs() < 1e-17);
        let r = (13.0f64 / 7.0).powf(1.0 / 6.0);
        assert!((p.sigma(r).unwrap() - 0.056_039_602_025_098_32).abs() < 1e-15);
        assert!(p.sigma(-0.1).is_err());
    }

    #[test]
    fn sigma_prime_and_wave_speed() {
        let p = lj();
        assert!((p.sigma_prime(1.0).unwrap() - 1.5).abs() < 1e-15);
        assert!(p.sigma_prime(p.sonic_strain()).unwrap().abs() < 1e-14);
        assert!((p.sigma_prime(1.2).unwrap() + 0.153_862_729_958_800_8).abs() < 1e-14);
        assert!((p.wave_speed(1.0).unwrap() - 1.5f64.sqrt()).abs() < 1e-15);
        assert!(p.wave_speed(p.sonic_strain() * (1.0 - 1e-15)).unwrap() < 1e-6);
        assert!(matches!(p.wave_speed(1.2), Err(Error::Elliptic { .. })));
    }

    #[test]
    fn critical_constants_default() {
        let c = *lj().constants();
        assert!((c.sonic_strain - 1.108_683_417_968_721_6).abs() < 1e-12);
        assert!((c.max_stress - 0.056_039_602_025_098_32).abs() < 1e-15);
        assert!((c.cutoff_strain - 2.388_675_958_880_916).abs() < 1e-12);
        assert_eq!(c.min_energy, -1.0 / 48.0);
        let p = lj();
        assert!((p.sigma(c.cutoff_strain).unwrap() / c.max_stress - 1e-2).abs() < 1e-12);
        assert!(c.sonic_strain < c.cutoff_strain);
    }

    #[test]
    fn sonic_strain_independent_of_energy_scale() {
        for a in [0.01, 1.0, 42.0] {
            let p = LennardJones::new(PotentialParams::new(a, 1.0, 1e-2).unwrap()).unwrap();
            assert!((p.sonic_strain() - (13.0f64 / 7.0).powf(1.0 / 6.0)).abs() < 1e-15);
            assert!((p.sigma(p.cutoff_strain()).unwrap() / p.max_stress() - 1e-2).abs() < 1e-12);
        }
    }

    #[test]
    fn params_validation() {
        assert!(PotentialParams::new(0.0, 1.0, 0.01).is_err());
        assert!(PotentialParams::new(1.0, -1.0, 0.01).is_err());
        assert!(PotentialParams::new(1.0, 1.0, 1.0).is_err());
        assert!(PotentialParams::new(1.0, 1.0, 0.0).is_err());
        assert!(PotentialParams::<f64>::from_stress_prefactor(0.25, 0.01).is_ok());
    }

    #[test]
    fn works_in_single_precision() {
        let p: LennardJones<f32> = LennardJones::default();
        assert!((p.sonic_strain() - 1.108_683_4).abs() < 1e-6);
        assert!((p.max_stress() - 0.056_039_6).abs() < 1e-6);
        assert!((p.cutoff_strain() - 2.388_676).abs() < 1e-4);
    }
}
