use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use ultradense::lexicon::TableEntry;
use ultradense::linalg::random_orthogonal;
use ultradense::objective::{gradient, loss, sample_batch, PairBatch, PairGroup};
use ultradense::{EmbeddingSet, Matrix, Property, Split, SubspaceSpec, TrainingTable};

fn random_set(rng: &mut ChaCha8Rng, n: usize, d: usize) -> EmbeddingSet {
    let words = (0..n).map(|i| format!("w{i}")).collect();
    let vectors = (0..n).map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect()).collect();
    EmbeddingSet::new(words, vectors, "random").unwrap()
}

fn alternating_table(n: usize) -> TrainingTable {
    TrainingTable::from_entries(
        (0..n)
            .map(|index| TableEntry { index, label: if index % 2 == 0 { 1.0 } else { -1.0 }, split: Split::Train })
            .collect(),
    )
    .unwrap()
}

fn finite_difference(q: &Matrix, f: impl Fn(&Matrix) -> f64, h: f64) -> Vec<f64> {
    let d = q.rows();
    (0..d * d)
        .map(|k| {
            let mut plus = q.as_slice().to_vec();
            let mut minus = plus.clone();
            plus[k] += h;
            minus[k] -= h;
            (f(&Matrix::new(d, d, plus).unwrap()) - f(&Matrix::new(d, d, minus).unwrap())) / (2.0 * h)
        })
        .collect()
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for _ in 0..10 {
        let e = random_set(&mut rng, 6, 5);
        let table = alternating_table(6);
        let spec = SubspaceSpec::new(Property::Sentiment, vec![1, 3], 0.4).unwrap();
        let diff = sample_batch(&table, PairGroup::Different, 10, &mut rng).unwrap();
        let same = sample_batch(&table, PairGroup::Same, 10, &mut rng).unwrap();
        let q = random_orthogonal(5, rng.random()).unwrap();
        let analytic = gradient(&q, &e, &spec, &diff, &same);
        let numeric = finite_difference(&q, |m| loss(m, &e, &spec, &diff, &same), 1e-6);
        let err: f64 = analytic.as_slice().iter().zip(&numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale: f64 = numeric.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(err / scale <= 1e-5, "relative error {}", err / scale);
    }
}

#[test]
fn mixed_alpha_example() {
    let e = EmbeddingSet::new(vec!["a".into(), "b".into()], vec![vec![0.0, 0.0], vec![3.0, 4.0]], "t").unwrap();
    let spec = SubspaceSpec::new(Property::Sentiment, vec![0], 0.4).unwrap();
    let diff = PairBatch { group: PairGroup::Different, pairs: vec![(0, 1)] };
    let same = PairBatch { group: PairGroup::Same, pairs: vec![(0, 1)] };
    let l = loss(&Matrix::identity(2), &e, &spec, &diff, &same);
    assert!((l - 0.6).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn loss_splits_into_its_two_groups(seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_set(&mut rng, 8, 4);
        let table = alternating_table(8);
        let diff = sample_batch(&table, PairGroup::Different, 6, &mut rng).unwrap();
        let same = sample_batch(&table, PairGroup::Same, 6, &mut rng).unwrap();
        let q = random_orthogonal(4, seed).unwrap();
        let spec = |a| SubspaceSpec::new(Property::Sentiment, vec![0, 2], a).unwrap();
        let only_diff = loss(&q, &e, &spec(1.0), &diff, &PairBatch::empty(PairGroup::Same));
        let only_same = loss(&q, &e, &spec(0.0), &PairBatch::empty(PairGroup::Different), &same);
        let both = loss(&q, &e, &spec(alpha), &diff, &same);
        prop_assert!((both - (alpha * only_diff + (1.0 - alpha) * only_same)).abs() < 1e-12);
    }

    #[test]
    fn swapping_pair_order_changes_nothing(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_set(&mut rng, 8, 4);
        let table = alternating_table(8);
        let diff = sample_batch(&table, PairGroup::Different, 6, &mut rng).unwrap();
        let same = sample_batch(&table, PairGroup::Same, 6, &mut rng).unwrap();
        let swap = |b: &PairBatch| PairBatch { group: b.group, pairs: b.pairs.iter().map(|&(v, w)| (w, v)).collect() };
        let q = random_orthogonal(4, seed).unwrap();
        let spec = SubspaceSpec::new(Property::Sentiment, vec![1], 0.4).unwrap();
        let a = loss(&q, &e, &spec, &diff, &same);
        let b = loss(&q, &e, &spec, &swap(&diff), &swap(&same));
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn full_space_loss_ignores_rotation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_set(&mut rng, 8, 4);
        let table = alternating_table(8);
        let diff = sample_batch(&table, PairGroup::Different, 6, &mut rng).unwrap();
        let same = sample_batch(&table, PairGroup::Same, 6, &mut rng).unwrap();
        let spec = SubspaceSpec::new(Property::Sentiment, (0..4).collect(), 0.4).unwrap();
        let a = loss(&Matrix::identity(4), &e, &spec, &diff, &same);
        let b = loss(&random_orthogonal(4, seed).unwrap(), &e, &spec, &diff, &same);
        prop_assert!((a - b).abs() < 1e-10);
    }
}
