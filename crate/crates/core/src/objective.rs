//! Separation / alignment objective over word pairs and its gradient.
//!
//! For a pair `(v, w)` let `y = P·Q·(e_w − e_v)` be the difference vector
//! restricted to the subspace rows. Pairs with different labels contribute
//! `−α·‖y‖`, pairs with the same label `+(1 − α)·‖y‖`. Each batch sum is
//! divided by the batch length so `α` means the same thing at any batch size.

use std::collections::HashSet;

use rand::Rng;

use crate::embeddings::EmbeddingSet;
use crate::error::{Error, Result};
use crate::lexicon::{Property, TrainingTable};
use crate::linalg::Matrix;

/// Projected differences shorter than this contribute no gradient.
pub const KINK_EPSILON: f64 = 1e-12;

/// One property's subspace: its coordinate indices and objective weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSpec {
    pub property: Property,
    pub dims: Vec<usize>,
    pub alpha: f64,
}

impl SubspaceSpec {
    pub fn new(property: Property, dims: Vec<usize>, alpha: f64) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDimension(format!("subspace for {property} is empty")));
        }
        let mut seen = HashSet::new();
        if let Some(&d) = dims.iter().find(|&&d| !seen.insert(d)) {
            return Err(Error::InvalidDimension(format!("dimension {d} repeated in {property}")));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Config(format!("alpha for {property} must lie in [0, 1], got {alpha}")));
        }
        Ok(SubspaceSpec { property, dims, alpha })
    }

    pub fn check_range(&self, d: usize) -> Result<()> {
        match self.dims.iter().find(|&&k| k >= d) {
            Some(k) => Err(Error::InvalidDimension(format!(
                "{} uses dimension {k} but the space has {d}",
                self.property
            ))),
            None => Ok(()),
        }
    }
}

/// Rejects subspaces that share a coordinate.
pub fn check_disjoint(specs: &[SubspaceSpec]) -> Result<()> {
    let mut used = HashSet::new();
    for spec in specs {
        for &d in &spec.dims {
            if !used.insert(d) {
                return Err(Error::OverlappingSubspaces(d));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairGroup {
    Different,
    Same,
}

/// Embedding-index pairs drawn from one group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairBatch {
    pub group: PairGroup,
    pub pairs: Vec<(usize, usize)>,
}

impl PairBatch {
    pub fn empty(group: PairGroup) -> Self {
        PairBatch { group, pairs: Vec::new() }
    }
}

/// Draws `batch_size` pairs uniformly with replacement from the pairs of
/// training words with different (or equal) labels.
pub fn sample_batch<R: Rng + ?Sized>(
    table: &TrainingTable,
    group: PairGroup,
    batch_size: usize,
    rng: &mut R,
) -> Result<PairBatch> {
    let pos: Vec<usize> = table.train().filter(|e| e.label > 0.0).map(|e| e.index).collect();
    let neg: Vec<usize> = table.train().filter(|e| e.label < 0.0).map(|e| e.index).collect();
    let mut pairs = Vec::with_capacity(batch_size);
    match group {
        PairGroup::Different => {
            if pos.is_empty() || neg.is_empty() {
                return Err(Error::MissingClass(format!(
                    "different-label pairs need both classes ({} positive, {} negative)",
                    pos.len(),
                    neg.len()
                )));
            }
            for _ in 0..batch_size {
                let v = pos[rng.random_range(0..pos.len())];
                let w = neg[rng.random_range(0..neg.len())];
                pairs.push((v, w));
            }
        }
        PairGroup::Same => {
            let count = |n: usize| (n * n.saturating_sub(1) / 2) as u64;
            let (cp, cn) = (count(pos.len()), count(neg.len()));
            if cp + cn == 0 {
                return Err(Error::MissingClass(
                    "same-label pairs need a class with at least two words".into(),
                ));
            }
            for _ in 0..batch_size {
                let class = if rng.random_range(0..cp + cn) < cp { &pos } else { &neg };
                let i = rng.random_range(0..class.len());
                let mut j = rng.random_range(0..class.len() - 1);
                if j >= i {
                    j += 1;
                }
                pairs.push((class[i], class[j]));
            }
        }
    }
    Ok(PairBatch { group, pairs })
}

/// The pair of batches one step uses for one subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecBatches {
    pub diff: PairBatch,
    pub same: PairBatch,
}

fn projected_difference(q: &Matrix, e: &EmbeddingSet, dims: &[usize], pair: (usize, usize), diff: &mut [f64], y: &mut Vec<f64>) {
    let (v, w) = pair;
    for ((d, a), b) in diff.iter_mut().zip(e.vector(w)).zip(e.vector(v)) {
        *d = a - b;
    }
    y.clear();
    y.extend(dims.iter().map(|&k| crate::linalg::dot(q.row(k), diff)));
}

fn group_weight(spec: &SubspaceSpec, batch: &PairBatch) -> f64 {
    let sign_alpha = match batch.group {
        PairGroup::Different => -spec.alpha,
        PairGroup::Same => 1.0 - spec.alpha,
    };
    sign_alpha / batch.pairs.len() as f64
}

/// Weighted objective value for one subspace; lower is better.
pub fn loss(q: &Matrix, e: &EmbeddingSet, spec: &SubspaceSpec, diff: &PairBatch, same: &PairBatch) -> f64 {
    let mut buf = vec![0.0; e.dim()];
    let mut y = Vec::with_capacity(spec.dims.len());
    let mut total = 0.0;
    for batch in [diff, same] {
        if batch.pairs.is_empty() {
            continue;
        }
        let weight = group_weight(spec, batch);
        let mut sum = 0.0;
        for &pair in &batch.pairs {
            projected_difference(q, e, &spec.dims, pair, &mut buf, &mut y);
            sum += crate::linalg::norm(&y);
        }
        total += weight * sum;
    }
    total
}

/// Gradient of [`loss`] with respect to `q`. Only the subspace rows are
/// non-zero: each pair adds `weight · (y/‖y‖) · (e_w − e_v)ᵀ` to them.
pub fn gradient(q: &Matrix, e: &EmbeddingSet, spec: &SubspaceSpec, diff: &PairBatch, same: &PairBatch) -> Matrix {
    let mut g = Matrix::zeros(q.rows(), q.cols());
    accumulate_gradient(&mut g, q, e, spec, diff, same);
    g
}

fn accumulate_gradient(g: &mut Matrix, q: &Matrix, e: &EmbeddingSet, spec: &SubspaceSpec, diff: &PairBatch, same: &PairBatch) {
    let mut buf = vec![0.0; e.dim()];
    let mut y = Vec::with_capacity(spec.dims.len());
    for batch in [diff, same] {
        if batch.pairs.is_empty() {
            continue;
        }
        let weight = group_weight(spec, batch);
        for &pair in &batch.pairs {
            projected_difference(q, e, &spec.dims, pair, &mut buf, &mut y);
            let len = crate::linalg::norm(&y);
            if len < KINK_EPSILON {
                continue;
            }
            for (&k, &yk) in spec.dims.iter().zip(&y) {
                let coef = weight * yk / len;
                for (gi, di) in g.row_mut(k).iter_mut().zip(&buf) {
                    *gi += coef * di;
                }
            }
        }
    }
}

fn check_multi(specs: &[SubspaceSpec], batches: &[SpecBatches]) -> Result<()> {
    check_disjoint(specs)?;
    if specs.len() != batches.len() {
        return Err(Error::DimensionMismatch {
            expected: specs.len(),
            found: batches.len(),
        });
    }
    Ok(())
}

/// Unweighted sum of [`loss`] over several disjoint subspaces.
pub fn multi_loss(q: &Matrix, e: &EmbeddingSet, specs: &[SubspaceSpec], batches: &[SpecBatches]) -> Result<f64> {
    check_multi(specs, batches)?;
    Ok(specs
        .iter()
        .zip(batches)
        .map(|(s, b)| loss(q, e, s, &b.diff, &b.same))
        .sum())
}

/// Sum of [`gradient`] over several disjoint subspaces.
pub fn multi_gradient(q: &Matrix, e: &EmbeddingSet, specs: &[SubspaceSpec], batches: &[SpecBatches]) -> Result<Matrix> {
    check_multi(specs, batches)?;
    let mut g = Matrix::zeros(q.rows(), q.cols());
    for (s, b) in specs.iter().zip(batches) {
        accumulate_gradient(&mut g, q, e, s, &b.diff, &b.same);
    }
    Ok(g)
}
