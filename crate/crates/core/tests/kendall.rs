use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultradense::eval::{fisher_z_compare, kendall_tau, pair_counts};
use ultradense::TauVariant;

/// Reference quadratic counter.
fn brute_force(x: &[f64], y: &[f64]) -> (i64, i64, i64, i64) {
    let (mut c, mut d, mut tx, mut ty) = (0, 0, 0, 0);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let (dx, dy) = (x[i] - x[j], y[i] - y[j]);
            if dx == 0.0 && dy == 0.0 {
            } else if dx == 0.0 {
                tx += 1;
            } else if dy == 0.0 {
                ty += 1;
            } else if (dx > 0.0) == (dy > 0.0) {
                c += 1;
            } else {
                d += 1;
            }
        }
    }
    (c, d, tx, ty)
}

#[test]
fn counts_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..200 {
        let n = rng.random_range(2..=200);
        let levels = if i % 2 == 0 { 4 } else { 1_000_000 };
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let p = pair_counts(&x, &y).unwrap();
        let (c, d, tx, ty) = brute_force(&x, &y);
        assert_eq!((p.concordant as i64, p.discordant as i64, p.ties_x as i64, p.ties_y as i64), (c, d, tx, ty));
    }
}

#[test]
fn frozen_values() {
    let t = kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0], TauVariant::TauB).unwrap();
    assert!((t - 1.0 / 3.0).abs() < 1e-15);
    // C = 4, D = 0, one tie in x and one in y; tau_b = 4 / 5, tau_a = 4 / 6
    let (x, y) = ([1.0, 1.0, 2.0, 3.0], [1.0, 2.0, 3.0, 3.0]);
    assert!((kendall_tau(&x, &y, TauVariant::TauB).unwrap() - 0.8).abs() < 1e-15);
    assert!((kendall_tau(&x, &y, TauVariant::TauA).unwrap() - 4.0 / 6.0).abs() < 1e-15);
}

#[test]
fn fisher_examples() {
    assert!(fisher_z_compare(0.654, 985, 0.508, 985, 0.05).unwrap().significant);
    let z = fisher_z_compare(0.60, 10, 0.55, 10, 0.05).unwrap();
    assert!(!z.significant);
    assert!((z.z - 0.13987).abs() < 1e-4, "z = {}", z.z);
}

proptest! {
    #[test]
    fn antisymmetric_without_ties(x in prop::collection::vec(-1e3f64..1e3, 2..60), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = (0..x.len()).map(|i| i as f64 + rng.random::<f64>() * 0.5).collect();
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        if let (Ok(a), Ok(b)) = (kendall_tau(&x, &y, TauVariant::TauB), kendall_tau(&x, &neg, TauVariant::TauB)) {
            prop_assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_transforms_keep_tau(x in prop::collection::vec(-5.0f64..5.0, 2..60), y in prop::collection::vec(-5.0f64..5.0, 60)) {
        let y = &y[..x.len()];
        let fx: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let gy: Vec<f64> = y.iter().map(|v| 3.0 * v + 1.0).collect();
        for variant in [TauVariant::TauA, TauVariant::TauB] {
            let a = kendall_tau(&x, y, variant).ok();
            let b = kendall_tau(&fx, &gy, variant).ok();
            prop_assert_eq!(a, b);
        }
    }
}
