use atomchain::potential::LennardJones;
use atomchain::statics::{classify_stability, equilibrium, weierstrass_excess, Equilibrium, Profile, Stability};
use proptest::prelude::*;

fn lj() -> LennardJones<f64> {
    LennardJones::default()
}

proptest! {
    #[test]
    fn two_phase_constraints_hold(a_frac in 0.0f64..1.0, c_frac in 0.0f64..1.0) {
        let p = lj();
        let a = 1.0 + a_frac * (p.cutoff_strain() - 1.0) * 0.999;
        let c = c_frac * p.sigma(a).unwrap();
        let Equilibrium::TwoPhase(s) = equilibrium(&p, a, Some(c)).unwrap() else {
            panic!("expected a two-phase solution for a = {}", a);
        };
        prop_assert!((0.0..=1.0).contains(&s.l_minus) && (0.0..=1.0).contains(&s.l_plus));
        prop_assert!((s.l_minus + s.l_plus - 1.0).abs() < 1e-10);
        prop_assert!((s.l_minus * s.b_minus + s.l_plus * s.b_plus - a).abs() < 1e-10);
        prop_assert!((s.position_at(1.0) - a).abs() < 1e-10);
    }

    /// For `a < 1` a two-phase profile with the same mean strain never has
    /// lower energy than the uniform state.
    #[test]
    fn uniform_state_minimizes_energy_below_unit_strain(
        a in 0.85f64..0.999,
        u_frac in 0.0f64..1.0,
        v_frac in 0.0f64..1.0,
    ) {
        let p = lj();
        let u = 0.8 + u_frac * (a - 0.8);
        let v = a + 1e-6 + v_frac * (p.cutoff_strain() - a - 1e-6);
        let lu = (v - a) / (v - u);
        let mixed = lu * p.theta(u).unwrap() + (1.0 - lu) * p.theta(v).unwrap();
        let uniform = equilibrium(&p, a, None).unwrap().energy(&p).unwrap();
        prop_assert!(uniform <= mixed + 1e-14);
    }
}

#[test]
fn excess_is_nonnegative_below_unit_strain() {
    let p = lj();
    let zc = p.cutoff_strain();
    for i in 1..=100 {
        let u = i as f64 / 100.0;
        for k in 1..=400 {
            let v = zc * k as f64 / 400.0;
            assert!(weierstrass_excess(&p, v, u).unwrap() >= -1e-12, "w({}, {})", v, u);
        }
    }
}

#[test]
fn stability_flips_at_sonic_strain() {
    let p = lj();
    let stable = |f: f64| classify_stability(&p, Profile::Uniform(f)).unwrap().classification == Stability::LocallyStable;
    let (mut lo, mut hi) = (1.0, 1.5);
    assert!(stable(lo) && !stable(hi));
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if stable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((lo - p.sonic_strain()).abs() < 1e-8);
}
