use std::collections::BTreeMap;

use proptest::prelude::*;
use ultradense::embeddings::{top_k_filter, transform_embeddings};
use ultradense::eval::{curve_tsv, evaluate, run_pipeline, sweep_resource_size, sweep_subspace_size, Experiment, Method};
use ultradense::linalg::{norm, random_orthogonal};
use ultradense::projection::{orient, project};
use ultradense::synthetic::{PlantedConfig, PlantedData};
use ultradense::trainer::train;
use ultradense::{
    EmbeddingFormat, EmbeddingSet, Orientation, OutputLexicon, Property, SubspaceSpec, TauVariant, TrainConfig,
    TransformMatrix,
};

fn quick_config(dims: Vec<usize>, seed: u64) -> TrainConfig {
    let mut cfg = TrainConfig::new(vec![SubspaceSpec::new(Property::Sentiment, dims, 0.4).unwrap()], seed);
    cfg.iterations = 300;
    cfg.check_every_step = false;
    cfg
}

fn planted(words: usize) -> PlantedData {
    PlantedData::generate(&PlantedConfig { words, ..Default::default() }).unwrap()
}

#[test]
fn planted_direction_tops_the_lexicon() {
    let data = planted(300);
    let table = data.table().split(0.2, 3).unwrap();
    let gold = data.planted_gold(&table);
    let exp = Experiment {
        embeddings: &data.embeddings,
        table: &table,
        gold: &gold,
        train: quick_config(vec![0], 3),
        variant: TauVariant::TauB,
    };
    let out = run_pipeline(&exp).unwrap();
    assert!(out.report.tau > 0.8, "τ = {}", out.report.tau);
    assert_eq!(out.lexicon.len(), 300);
    let best = (0..300)
        .max_by(|&a, &b| data.planted_score(a).total_cmp(&data.planted_score(b)))
        .unwrap();
    let top: Vec<&str> = out.lexicon.entries()[..10].iter().map(|(w, _)| w.as_str()).collect();
    assert!(top.contains(&data.embeddings.word(best)));
    assert_eq!(run_pipeline(&exp).unwrap().lexicon, out.lexicon);
}

#[test]
fn multi_dimensional_subspace_goes_through_a_linear_map() {
    let data = planted(200);
    let table = data.table().split(0.25, 5).unwrap();
    let gold = data.planted_gold(&table);
    let exp = Experiment {
        embeddings: &data.embeddings,
        table: &table,
        gold: &gold,
        train: quick_config(vec![2, 3], 5),
        variant: TauVariant::TauB,
    };
    assert!(run_pipeline(&exp).unwrap().report.tau > 0.6);
    let curve = sweep_subspace_size(&exp, &[1, 2, 4], Method::Ultradense).unwrap();
    assert_eq!(curve.iter().map(|c| c.0).collect::<Vec<_>>(), vec![1, 2, 4]);
    assert_eq!(curve_tsv(&curve).lines().count(), 4);
    let pca = sweep_subspace_size(&exp, &[1, 3], Method::Pca).unwrap();
    assert_eq!(pca.len(), 2);
}

#[test]
fn resource_sweep_is_reproducible() {
    let data = planted(400);
    let table = data.table().split(0.2, 2).unwrap();
    let gold = data.planted_gold(&table);
    let exp = Experiment {
        embeddings: &data.embeddings,
        table: &table,
        gold: &gold,
        train: quick_config(vec![0], 2),
        variant: TauVariant::TauB,
    };
    let a = sweep_resource_size(&exp, &[10, 50, 300], 2).unwrap();
    assert_eq!(a, sweep_resource_size(&exp, &[10, 50, 300], 2).unwrap());
    assert!(a[2].1 >= a[0].1 - 0.05, "{a:?}");
    assert!(sweep_resource_size(&exp, &[1000], 2).is_err());
}

#[test]
fn transformed_embeddings_keep_norms() {
    let data = planted(50);
    let q = random_orthogonal(20, 4).unwrap();
    let t = transform_embeddings(&data.embeddings, &q).unwrap();
    for i in 0..50 {
        assert!((norm(t.vector(i)) - norm(data.embeddings.vector(i))).abs() < 1e-9);
    }
    let tm = TransformMatrix::from_specs(q, &[SubspaceSpec::new(Property::Sentiment, (0..20).collect(), 0.5).unwrap()], "x").unwrap();
    let reps = project(&data.embeddings, &tm, &Property::Sentiment).unwrap();
    assert!((norm(&reps[7]) - norm(data.embeddings.vector(7))).abs() < 1e-9);
}

#[test]
fn trained_transform_survives_the_file_format() {
    let data = planted(120);
    let tables = BTreeMap::from([(Property::Sentiment, data.table())]);
    let r = train(&quick_config(vec![4], 9), &data.embeddings, &tables).unwrap();
    let text = r.transform.to_file_string();
    let back = TransformMatrix::parse(&text, "memory").unwrap();
    assert_eq!(back.q(), r.transform.q());
    assert_eq!(back.subspaces(), r.transform.subspaces());
    assert_eq!(back.to_file_string(), text);
}

#[test]
fn embedding_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let e = planted(30).embeddings;
    let text = dir.path().join("e.txt");
    e.save(&text, EmbeddingFormat::Text).unwrap();
    let t = EmbeddingSet::load(&text, EmbeddingFormat::Text, None).unwrap();
    assert_eq!(t.words(), e.words());
    for i in 0..30 {
        for (a, b) in t.vector(i).iter().zip(e.vector(i)) {
            assert!((a - b).abs() <= 1e-6);
        }
    }
    let bin = dir.path().join("e.bin");
    e.save(&bin, EmbeddingFormat::Binary).unwrap();
    let b = EmbeddingSet::load(&bin, EmbeddingFormat::Binary, Some(10)).unwrap();
    assert_eq!(b.len(), 10);
    for (a, x) in b.vector(3).iter().zip(e.vector(3)) {
        assert_eq!(*a, *x as f32 as f64);
    }
}

#[test]
fn output_lexicon_round_trips() {
    let lex = OutputLexicon::from_scores(
        [("good", 0.75), ("bad", -1.5e-7), ("meh", 0.0)].map(|(w, s)| (w.to_string(), s)),
        Property::Sentiment,
        Orientation::AsIs,
    )
    .unwrap();
    let tsv = lex.to_tsv();
    let back = OutputLexicon::parse_tsv(&tsv, "memory", Property::Sentiment).unwrap();
    assert_eq!(back.to_tsv(), tsv);
    let gold = vec![("good".to_string(), 1.0), ("meh".to_string(), 0.0), ("gone".to_string(), -1.0), ("bad".to_string(), -0.5)];
    let r = evaluate(&lex, &gold, TauVariant::TauB).unwrap();
    assert_eq!(r.coverage, 0.75);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn top_k_composes(a in 0usize..40, b in 0usize..40) {
        let e = planted(30).embeddings;
        prop_assert_eq!(top_k_filter(&top_k_filter(&e, a), b), top_k_filter(&e, a.min(b)));
    }

    #[test]
    fn orientation_ignores_positive_scaling(scale in 1e-3f64..1e3, seed in 0u64..50) {
        let data = planted(40);
        let q = random_orthogonal(20, seed).unwrap();
        let scores: Vec<f64> = (0..40).map(|i| q.mul_vec(data.embeddings.vector(i)).unwrap()[0]).collect();
        let scaled: Vec<f64> = scores.iter().map(|s| s * scale).collect();
        let table = data.table();
        prop_assert_eq!(orient(&scores, &table).unwrap(), orient(&scaled, &table).unwrap());
    }
}
