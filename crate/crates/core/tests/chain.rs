use atomchain::chain::{md_rhs, rhs_conservative, BoundaryCondition, ChainState, DefectSpec};
use atomchain::experiment::{run_chain, Loading, RunSpec};
use atomchain::potential::LennardJones;
use proptest::collection::vec;
use proptest::prelude::*;

fn lj() -> LennardJones<f64> {
    LennardJones::default()
}

/// Ordered chain from cell strains in `(0.9, 1.3)`.
fn chain_from(strains: &[f64], velocities: &[f64], rho0: f64) -> ChainState<f64> {
    let m = strains.len();
    let mut pos = vec![0.0];
    for s in strains {
        pos.push(pos.last().unwrap() + s / m as f64);
    }
    let a = pos[m];
    ChainState::new(pos, velocities.to_vec(), rho0, 0.0, BoundaryCondition::Fixed { a }).unwrap()
}

proptest! {
    #[test]
    fn md_and_coarse_grained_accelerations_agree(
        strains in vec(0.9f64..1.3, 8..40),
        rho0 in 0.5f64..2.0,
    ) {
        let p = lj();
        let v = vec![0.0; strains.len() + 1];
        let s = chain_from(&strains, &v, rho0);
        let cg = rhs_conservative(&p, &s).unwrap();
        let md = md_rhs(&p, &s.positions, rho0, s.dx()).unwrap();
        for (a, b) in cg.iter().zip(&md) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn interior_forces_are_translation_invariant(
        strains in vec(0.9f64..1.3, 4..20),
        shift in -10.0f64..10.0,
    ) {
        let p = lj();
        let v = vec![0.0; strains.len() + 1];
        let s = chain_from(&strains, &v, 1.0);
        let shifted: Vec<f64> = s.positions.iter().map(|x| x + shift).collect();
        let a = md_rhs(&p, &s.positions, 1.0, s.dx()).unwrap();
        let b = md_rhs(&p, &shifted, 1.0, s.dx()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }
}

#[test]
fn conservative_run_keeps_energy() {
    let p = lj();
    let tol = 1e-9;
    let spec = RunSpec::new(DefectSpec::new(1.0, 1.1, 0.1), 64, RunSpec::uniform_times(0.01, 5))
        .with_tolerances(tol, 1e-12);
    let out = run_chain(&p, &spec).unwrap();
    let e0 = out.energies[0];
    for e in &out.energies {
        assert!((e - e0).abs() <= 10.0 * tol * e0.abs(), "{} vs {}", e, e0);
    }
}

#[test]
fn viscous_run_dissipates() {
    let p = lj();
    let spec = RunSpec::new(DefectSpec::new(1.0, 1.1, 0.1), 64, RunSpec::uniform_times(0.01, 20))
        .with_viscosity(0.01)
        .with_tolerances(1e-9, 1e-12);
    let out = run_chain(&p, &spec).unwrap();
    for w in out.energies.windows(2) {
        assert!(w[1] <= w[0] + 1e-10);
    }
    assert!(out.energies.last().unwrap() < &out.energies[0]);
}

/// Pulling the left end out with `φ₀ = −f(t)`, `f(t) = 0.05 t`, bounds the
/// energy by `E^d(0) + c_max (f(t) − f(0))`, since `dE^d/dt = −σ(s₁) φ₀'`.
#[test]
fn end_load_energy_bound() {
    let p = lj();
    let v0 = -0.05;
    let spec = RunSpec::new(DefectSpec::new(1.0, 1.1, 0.1), 64, RunSpec::uniform_times(0.1, 20))
        .with_loading(Loading::EndLoad { v0 })
        .with_tolerances(1e-9, 1e-12);
    let out = run_chain(&p, &spec).unwrap();
    assert!(out.abort.is_none());
    for (s, e) in out.states.iter().zip(&out.energies) {
        assert!(*e <= out.energies[0] + p.max_stress() * (-v0) * s.t + 1e-10, "t = {}", s.t);
    }
}
