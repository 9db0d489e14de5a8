//! Seeded synthetic embeddings with a planted label direction.
//!
//! Each word gets a balanced ±1 label `l(w)` and the vector
//! `e_w = l(w)·signal·g + nuisance·z_w·h + noise`, where `g` and `h` are
//! orthonormal random directions, `z_w ~ N(0, 1)` and the noise is
//! isotropic Gaussian. Useful for tests, benchmarks and smoke runs of the
//! CLI.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::embeddings::EmbeddingSet;
use crate::error::{Error, Result};
use crate::lexicon::{LabelKind, LexiconResource, Property, Split, TableEntry, TrainingTable};
use crate::linalg::{dot, norm};

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedConfig {
    pub words: usize,
    pub dim: usize,
    /// Coefficient of the label direction.
    pub signal: f64,
    /// Standard deviation along the nuisance direction (0 disables it).
    pub nuisance: f64,
    /// Variance of the isotropic noise.
    pub noise_variance: f64,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            words: 600,
            dim: 20,
            signal: 0.8,
            nuisance: 0.0,
            noise_variance: 0.5,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedData {
    pub embeddings: EmbeddingSet,
    /// ±1 per word, in vocabulary order.
    pub labels: Vec<f64>,
    /// Unit label direction `g`.
    pub direction: Vec<f64>,
    /// Unit nuisance direction `h`, orthogonal to `g`.
    pub nuisance_direction: Vec<f64>,
}

impl PlantedData {
    pub fn generate(cfg: &PlantedConfig) -> Result<Self> {
        if cfg.dim < 2 || cfg.words < 4 {
            return Err(Error::InvalidDimension("planted data needs dim >= 2 and words >= 4".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(2);
        let gaussian = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..cfg.dim).map(|_| StandardNormal.sample(rng)).collect()
        };
        let mut g = gaussian(&mut rng);
        let gn = norm(&g);
        g.iter_mut().for_each(|x| *x /= gn);
        let mut h = gaussian(&mut rng);
        let proj = dot(&h, &g);
        h.iter_mut().zip(&g).for_each(|(x, gi)| *x -= proj * gi);
        let hn = norm(&h);
        h.iter_mut().for_each(|x| *x /= hn);

        let mut labels: Vec<f64> = (0..cfg.words).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        labels.shuffle(&mut rng);

        let noise = Normal::new(0.0, cfg.noise_variance.sqrt())
            .map_err(|e| Error::Config(format!("noise variance: {e}")))?;
        let vectors: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| {
                let z: f64 = StandardNormal.sample(&mut rng);
                (0..cfg.dim)
                    .map(|k| l * cfg.signal * g[k] + cfg.nuisance * z * h[k] + noise.sample(&mut rng))
                    .collect()
            })
            .collect();
        let width = (cfg.words - 1).to_string().len();
        let words = (0..cfg.words).map(|i| format!("w{i:0width$}")).collect();
        Ok(PlantedData {
            embeddings: EmbeddingSet::new(words, vectors, format!("planted seed={}", cfg.seed))?,
            labels,
            direction: g,
            nuisance_direction: h,
        })
    }

    /// The labels as a binary resource.
    pub fn resource(&self, property: Property) -> LexiconResource {
        LexiconResource::new(
            self.embeddings.words().iter().cloned().zip(self.labels.iter().copied()),
            LabelKind::Binary,
            property,
            "planted labels",
        )
        .expect("labels are ±1 and words unique")
    }

    /// Every word in a training table, all tagged train.
    pub fn table(&self) -> TrainingTable {
        TrainingTable::from_entries(
            self.labels
                .iter()
                .enumerate()
                .map(|(index, &label)| TableEntry { index, label, split: Split::Train })
                .collect(),
        )
        .expect("balanced labels")
    }

    /// Coordinate of a word along the planted direction, `⟨e_w, g⟩`.
    pub fn planted_score(&self, index: usize) -> f64 {
        dot(self.embeddings.vector(index), &self.direction)
    }

    /// Test words of `table` with their planted coordinate as gold value.
    pub fn planted_gold(&self, table: &TrainingTable) -> Vec<(String, f64)> {
        table
            .test()
            .map(|t| (self.embeddings.word(t.index).to_string(), self.planted_score(t.index)))
            .collect()
    }
}
