//! Stochastic gradient descent on the orthogonal transformation.
//!
//! Every iteration draws one different-label and one same-label batch per
//! subspace, takes a plain gradient step `Q' = Q − lr·∇` and retracts onto
//! the orthogonal group with `Q = U·Vᵀ` from the SVD of `Q'`.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embeddings::EmbeddingSet;
use crate::error::{Error, Result};
use crate::lexicon::{Property, TrainingTable};
use crate::linalg::{dot, nearest_orthogonal, random_orthogonal, Matrix};
use crate::objective::{check_disjoint, multi_gradient, multi_loss, sample_batch, PairGroup, SpecBatches, SubspaceSpec};
use crate::projection::orient;
use crate::transform::{TransformMatrix, TRANSFORM_ORTHOGONALITY_TOL};

pub const DEFAULT_BATCH_SIZE: usize = 100;
pub const DEFAULT_LR0: f64 = 5.0;
pub const DEFAULT_LR_DECAY: f64 = 0.99;
pub const DEFAULT_ITERATIONS: usize = 1000;

/// Plateau window and relative threshold for optional early stopping.
pub const PLATEAU_WINDOW: usize = 50;
pub const PLATEAU_REL_CHANGE: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub specs: Vec<SubspaceSpec>,
    pub batch_size: usize,
    pub lr0: f64,
    pub lr_decay: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Fixed summation order. The current implementation is sequential, so
    /// runs are reproducible either way.
    pub deterministic: bool,
    /// Stop once the cost changed by less than [`PLATEAU_REL_CHANGE`]
    /// relative over [`PLATEAU_WINDOW`] iterations.
    pub early_stop: bool,
    /// Verify orthogonality after every step instead of only at the end.
    pub check_every_step: bool,
}

impl TrainConfig {
    pub fn new(specs: Vec<SubspaceSpec>, seed: u64) -> Self {
        TrainConfig {
            specs,
            batch_size: DEFAULT_BATCH_SIZE,
            lr0: DEFAULT_LR0,
            lr_decay: DEFAULT_LR_DECAY,
            iterations: DEFAULT_ITERATIONS,
            seed,
            deterministic: true,
            early_stop: false,
            check_every_step: cfg!(debug_assertions),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lr0 > 0.0 && self.lr0.is_finite()) {
            return Err(Error::Config(format!("lr0 must be positive, got {}", self.lr0)));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(Error::Config(format!("lr_decay must lie in (0, 1], got {}", self.lr_decay)));
        }
        if self.batch_size == 0 || self.iterations == 0 {
            return Err(Error::Config("batch_size and iterations must be at least 1".into()));
        }
        if self.specs.is_empty() {
            return Err(Error::Config("no subspaces to train".into()));
        }
        check_disjoint(&self.specs)
    }
}

/// `lr0 · lr_decay^iter`.
pub fn learning_rate(cfg: &TrainConfig, iter: usize) -> f64 {
    cfg.lr0 * cfg.lr_decay.powf(iter as f64)
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    /// Learned transformation, oriented on the training words.
    pub transform: TransformMatrix,
    /// Sampled loss before each step.
    pub cost_history: Vec<f64>,
    pub wall_time: Duration,
    pub config: TrainConfig,
}

/// State reported to an observer after each step.
#[derive(Debug)]
pub struct StepInfo<'a> {
    pub iteration: usize,
    pub learning_rate: f64,
    pub cost: f64,
    pub q: &'a Matrix,
}

pub fn train(cfg: &TrainConfig, e: &EmbeddingSet, tables: &BTreeMap<Property, TrainingTable>) -> Result<TrainResult> {
    train_observed(cfg, e, tables, |_| {})
}

/// [`train`] with a callback invoked after every reorthogonalization.
pub fn train_observed(
    cfg: &TrainConfig,
    e: &EmbeddingSet,
    tables: &BTreeMap<Property, TrainingTable>,
    mut observer: impl FnMut(&StepInfo<'_>),
) -> Result<TrainResult> {
    cfg.validate()?;
    let d = e.dim();
    for spec in &cfg.specs {
        spec.check_range(d)?;
    }
    let spec_tables: Vec<&TrainingTable> = cfg
        .specs
        .iter()
        .map(|s| {
            tables
                .get(&s.property)
                .ok_or_else(|| Error::Config(format!("no training table for {}", s.property)))
        })
        .collect::<Result<_>>()?;

    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut q = random_orthogonal(d, cfg.seed)?;
    let mut cost_history = Vec::with_capacity(cfg.iterations);
    let mut batches = Vec::with_capacity(cfg.specs.len());

    for iteration in 0..cfg.iterations {
        batches.clear();
        for table in &spec_tables {
            batches.push(SpecBatches {
                diff: sample_batch(table, PairGroup::Different, cfg.batch_size, &mut rng)?,
                same: sample_batch(table, PairGroup::Same, cfg.batch_size, &mut rng)?,
            });
        }
        let cost = multi_loss(&q, e, &cfg.specs, &batches)?;
        let grad = multi_gradient(&q, e, &cfg.specs, &batches)?;
        let lr = learning_rate(cfg, iteration);
        q.sub_scaled_assign(lr, &grad)?;
        q = nearest_orthogonal(&q).map_err(|source| Error::TrainingAborted {
            iteration,
            source: Box::new(source),
        })?;
        if cfg.check_every_step {
            check_orthogonal(&q, iteration)?;
        }
        cost_history.push(cost);
        observer(&StepInfo {
            iteration,
            learning_rate: lr,
            cost,
            q: &q,
        });
        if cfg.early_stop && plateaued(&cost_history) {
            break;
        }
    }
    check_orthogonal(&q, cost_history.len().saturating_sub(1))?;

    let mut transform = TransformMatrix::from_specs(q, &cfg.specs, format!("seed={}", cfg.seed))?;
    for (spec, table) in cfg.specs.iter().zip(&spec_tables) {
        let direction = transform.q().row(spec.dims[0]);
        let scores: Vec<f64> = (0..e.len()).map(|i| dot(direction, e.vector(i))).collect();
        let orientation = orient(&scores, table)?;
        transform.set_orientation(&spec.property, orientation)?;
    }

    Ok(TrainResult {
        transform,
        cost_history,
        wall_time: start.elapsed(),
        config: cfg.clone(),
    })
}

fn check_orthogonal(q: &Matrix, iteration: usize) -> Result<()> {
    let err = q.orthogonality_error();
    if err > TRANSFORM_ORTHOGONALITY_TOL {
        return Err(Error::TrainingAborted {
            iteration,
            source: Box::new(Error::DegenerateMatrix(format!(
                "orthogonality lost (‖QᵀQ − I‖_F = {err:e})"
            ))),
        });
    }
    Ok(())
}

fn plateaued(history: &[f64]) -> bool {
    let n = history.len();
    if n <= PLATEAU_WINDOW {
        return false;
    }
    let (old, new) = (history[n - 1 - PLATEAU_WINDOW], history[n - 1]);
    (new - old).abs() < PLATEAU_REL_CHANGE * old.abs().max(f64::MIN_POSITIVE)
}

/// Training log TSV, `iteration<TAB>learning_rate<TAB>cost` per line.
pub fn training_log_tsv(result: &TrainResult) -> String {
    let mut out = String::from("iteration\tlearning_rate\tcost\n");
    for (i, c) in result.cost_history.iter().enumerate() {
        out.push_str(&format!("{i}\t{}\t{c}\n", learning_rate(&result.config, i)));
    }
    out
}
