//! The train → lexicon → evaluate pipeline and sweeps over subspace size
//! and training resource size.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::embeddings::EmbeddingSet;
use crate::error::{Error, Result};
use crate::eval::{evaluate, pca_subspace, random_subspace, EvalReport, TauVariant};
use crate::lexicon::{Split, TrainingTable};
use crate::linalg::Matrix;
use crate::objective::SubspaceSpec;
use crate::projection::{emit_lexicon, fit_linear_map_on_train, lexicon_from_reps, orient, project, project_with, OutputLexicon};
use crate::projection::format_g6;
use crate::trainer::{train, TrainConfig, TrainResult};

/// How the subspace of a sweep point is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Train an orthogonal transformation with the subspace at `0..size`.
    Ultradense,
    /// Top principal components.
    Pca,
    /// Leading original coordinates.
    Random,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ultradense => "ultradense",
            Method::Pca => "pca",
            Method::Random => "random",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ultradense" => Ok(Method::Ultradense),
            "pca" => Ok(Method::Pca),
            "random" => Ok(Method::Random),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

/// One single-property experiment: embeddings, a split training table and
/// gold values for the test words.
#[derive(Debug, Clone)]
pub struct Experiment<'a> {
    pub embeddings: &'a EmbeddingSet,
    pub table: &'a TrainingTable,
    pub gold: &'a [(String, f64)],
    /// Trainer settings; `specs[0]` supplies property, dims and alpha.
    pub train: TrainConfig,
    pub variant: TauVariant,
}

impl Experiment<'_> {
    fn spec(&self) -> Result<&SubspaceSpec> {
        match self.train.specs.as_slice() {
            [spec] => Ok(spec),
            specs => Err(Error::Config(format!(
                "an experiment trains exactly one subspace, got {}",
                specs.len()
            ))),
        }
    }
}

/// Test split of `table` with its ±1 labels as gold values.
pub fn gold_from_table(e: &EmbeddingSet, table: &TrainingTable) -> Vec<(String, f64)> {
    table
        .entries()
        .iter()
        .filter(|t| t.split == Split::Test)
        .map(|t| (e.word(t.index).to_string(), t.label))
        .collect()
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub training: TrainResult,
    pub lexicon: OutputLexicon,
    pub report: EvalReport,
}

/// Trains on the experiment's subspace, emits the full lexicon (through a
/// linear map when the subspace has several dimensions) and evaluates it.
pub fn run_pipeline(exp: &Experiment<'_>) -> Result<PipelineOutput> {
    let spec = exp.spec()?.clone();
    let tables = BTreeMap::from([(spec.property.clone(), exp.table.clone())]);
    let training = train(&exp.train, exp.embeddings, &tables)?;
    let lexicon = if spec.dims.len() == 1 {
        emit_lexicon(exp.embeddings, &training.transform, &spec.property, None)?
    } else {
        let reps = project(exp.embeddings, &training.transform, &spec.property)?;
        let map = fit_linear_map_on_train(&reps, exp.table)?;
        emit_lexicon(exp.embeddings, &training.transform, &spec.property, Some(&map))?
    };
    let mut report = evaluate(&lexicon, exp.gold, exp.variant)?;
    report.method = Method::Ultradense.name().into();
    Ok(PipelineOutput {
        training,
        lexicon,
        report,
    })
}

/// τ of the ultradense pipeline with the subspace at `dims`.
pub fn run_ultradense(exp: &Experiment<'_>, dims: Vec<usize>) -> Result<f64> {
    let mut exp = exp.clone();
    let spec = exp.spec()?.clone();
    exp.train.specs = vec![SubspaceSpec::new(spec.property, dims, spec.alpha)?];
    Ok(run_pipeline(&exp)?.report.tau)
}

/// τ of a fixed `k x d` projection: oriented when `k = 1`, mapped to a
/// scalar by a least-squares fit on the train split otherwise.
pub fn run_projection(exp: &Experiment<'_>, p: &Matrix) -> Result<f64> {
    let spec = exp.spec()?;
    let reps = project_with(exp.embeddings, p)?;
    let lexicon = if p.rows() == 1 {
        let scores: Vec<f64> = reps.iter().map(|u| u[0]).collect();
        let orientation = orient(&scores, exp.table)?;
        lexicon_from_reps(exp.embeddings, &reps, &spec.property, orientation, None)?
    } else {
        let map = fit_linear_map_on_train(&reps, exp.table)?;
        lexicon_from_reps(exp.embeddings, &reps, &spec.property, Default::default(), Some(&map))?
    };
    Ok(evaluate(&lexicon, exp.gold, exp.variant)?.tau)
}

/// `(size, τ)` for each subspace size. Every ultradense point retrains with
/// the same seed and the subspace `0..size`.
pub fn sweep_subspace_size(exp: &Experiment<'_>, sizes: &[usize], method: Method) -> Result<Vec<(usize, f64)>> {
    let d = exp.embeddings.dim();
    let pca_full = match method {
        Method::Pca => Some(pca_subspace(exp.embeddings, *sizes.iter().max().unwrap_or(&1))?),
        _ => None,
    };
    sizes
        .iter()
        .map(|&size| {
            if size == 0 || size > d {
                return Err(Error::InvalidDimension(format!("subspace size {size} outside 1..={d}")));
            }
            let tau = match method {
                Method::Ultradense => run_ultradense(exp, (0..size).collect())?,
                Method::Random => run_projection(exp, &random_subspace(d, size)?)?,
                Method::Pca => {
                    let full = pca_full.as_ref().expect("computed above");
                    let p = Matrix::new(size, d, full.as_slice()[..size * d].to_vec())?;
                    run_projection(exp, &p)?
                }
            };
            Ok((size, tau))
        })
        .collect()
}

/// `(size, τ)` for class-balanced training subsamples of each size; the
/// test split stays fixed. A size equal to the whole train split uses it
/// unchanged.
pub fn sweep_resource_size(exp: &Experiment<'_>, train_sizes: &[usize], seed: u64) -> Result<Vec<(usize, f64)>> {
    let spec = exp.spec()?;
    let available = exp.table.train().count();
    train_sizes
        .iter()
        .map(|&size| {
            let table = if size == available {
                exp.table.clone()
            } else {
                exp.table.subsample_train(size, seed)?
            };
            let sub = Experiment {
                table: &table,
                ..exp.clone()
            };
            Ok((size, run_ultradense(&sub, spec.dims.clone())?))
        })
        .collect()
}

/// `size<TAB>tau` lines.
pub fn curve_tsv(curve: &[(usize, f64)]) -> String {
    let mut out = String::from("size\ttau\n");
    for (size, tau) in curve {
        writeln!(out, "{size}\t{}", format_g6(*tau)).unwrap();
    }
    out
}
