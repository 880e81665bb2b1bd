use atomchain::averaging::{mollify, Mollifier};
use atomchain::snapshot::{FieldSnapshot, Provenance};
use proptest::collection::vec;
use proptest::prelude::*;

fn snapshot(strain: Vec<f64>) -> FieldSnapshot<f64> {
    let m = strain.len();
    FieldSnapshot {
        t: 0.0,
        dx: 1.0 / m as f64,
        x: FieldSnapshot::cell_centres(m),
        velocity: strain.clone(),
        position: vec![0.0; m],
        strain,
        provenance: Provenance::Raw,
    }
}

fn total_variation(v: &[f64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

proptest! {
    #[test]
    fn mollification_is_linear(
        f in vec(-1.0f64..1.0, 64),
        g in vec(-1.0f64..1.0, 64),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        eps in 0.03f64..0.5,
    ) {
        let combo: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let lhs = mollify(&snapshot(combo), eps).unwrap().strain;
        let mf = mollify(&snapshot(f), eps).unwrap().strain;
        let mg = mollify(&snapshot(g), eps).unwrap().strain;
        for i in 0..64 {
            prop_assert!((lhs[i] - (a * mf[i] + b * mg[i])).abs() <= 1e-13);
        }
    }

    #[test]
    fn mollification_does_not_increase_total_variation(f in vec(0.5f64..1.5, 16..200), eps_cells in 1.5f64..20.0) {
        let m = f.len();
        let eps = (eps_cells / m as f64).min(0.9);
        let out = mollify(&snapshot(f.clone()), eps).unwrap();
        prop_assert!(total_variation(&out.strain) <= total_variation(&f) + 1e-12);
    }

    /// Perturbations supported away from the ends keep their mean.
    #[test]
    fn interior_perturbations_keep_their_mean(bumps in vec(-0.1f64..0.1, 32), base in 0.9f64..1.2) {
        let m = 128;
        let eps = 1.0 / 16.0;
        let mut f = vec![base; m];
        for (k, b) in bumps.iter().enumerate() {
            f[48 + k] += b;
        }
        let out = mollify(&snapshot(f.clone()), eps).unwrap();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        prop_assert!((mean(&out.strain) - mean(&f)).abs() <= 1e-8);
    }

    #[test]
    fn discrete_kernel_is_normalized(m in 16usize..400, eps_cells in 1.5f64..30.0) {
        let dx = 1.0 / m as f64;
        let eps = (eps_cells * dx).min(0.9);
        let out = Mollifier::new(eps).unwrap().apply(&vec![1.0; m], dx);
        prop_assert!(out.iter().all(|v| (v - 1.0).abs() <= 1e-14));
    }
}
