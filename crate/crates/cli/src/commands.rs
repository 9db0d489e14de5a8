use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ultradense::eval::{curve_tsv, evaluate, sweep_resource_size, sweep_subspace_size, Experiment, Method};
use ultradense::lexicon::{binarize, frequency_lexicon, intersect, load_lexicon, Split};
use ultradense::projection::{emit_lexicon, fit_linear_map, project};
use ultradense::trainer::{train, training_log_tsv};
use ultradense::{
    EmbeddingFormat, EmbeddingSet, Error, EvalReport, LabelKind, OutputLexicon, Property, TauVariant, TrainingTable,
    TransformMatrix,
};

use crate::config::{ExperimentConfig, ResourceSource};
use crate::StageError;

type Result<T> = std::result::Result<T, StageError>;

fn at(stage: &'static str) -> impl FnOnce(Error) -> StageError {
    move |source| StageError { stage, source }
}

/// Filenames written by `train`.
pub const TRANSFORM_FILE: &str = "transform.txt";
pub const TRAIN_LOG_FILE: &str = "train_log.tsv";
pub const CONFIG_ECHO_FILE: &str = "config.txt";

/// Embeddings, split tables and held-out gold values of a configured experiment.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub embeddings: EmbeddingSet,
    pub tables: BTreeMap<Property, TrainingTable>,
    pub gold: BTreeMap<Property, Vec<(String, f64)>>,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    cfg.validate_files().map_err(at("checking inputs"))?;
    let mut embeddings = EmbeddingSet::load(&cfg.embeddings, cfg.embeddings_format, Some(cfg.top_k))
        .map_err(at("loading embeddings"))?;
    if cfg.normalize {
        embeddings = embeddings.unit_normalized();
    }
    let mut tables = BTreeMap::new();
    let mut gold = BTreeMap::new();
    for p in &cfg.properties {
        let (raw, binary) = match &p.source {
            ResourceSource::Builtin => {
                let (top, lo, hi) = cfg.frequency_ranks;
                let r = frequency_lexicon(&embeddings, top, lo, hi).map_err(at("building frequency resource"))?;
                (r.clone(), r)
            }
            ResourceSource::File { path, kind } => {
                let r = load_lexicon(path, p.property.clone(), *kind).map_err(at("loading resource"))?;
                let b = match kind {
                    LabelKind::Binary => r.clone(),
                    LabelKind::Continuous => binarize(&r, cfg.dead_zone).map_err(at("binarizing resource"))?,
                };
                (r, b)
            }
        };
        let table = intersect(&binary, &embeddings)
            .and_then(|t| t.split(cfg.test_fraction, cfg.seed))
            .map_err(at("building training table"))?;
        let held_out = table
            .entries()
            .iter()
            .filter(|t| t.split == Split::Test)
            .map(|t| {
                let w = embeddings.word(t.index);
                (w.to_string(), raw.get(w).unwrap_or(t.label))
            })
            .collect();
        gold.insert(p.property.clone(), held_out);
        tables.insert(p.property.clone(), table);
    }
    Ok(Prepared { embeddings, tables, gold })
}

fn write(path: &Path, text: &str, stage: &'static str) -> Result<()> {
    fs::write(path, text).map_err(|e| StageError {
        stage,
        source: Error::Io { path: path.to_path_buf(), source: e },
    })
}

fn gold_tsv(gold: &[(String, f64)]) -> String {
    gold.iter().map(|(w, v)| format!("{w}\t{v}\n")).collect()
}

/// Trains the configured subspaces and writes the transform, the training
/// log and the resolved config into `cfg.out_dir`. With `write_splits`,
/// each property's held-out words go to `test_<property>.tsv`.
pub fn run_train(cfg: &ExperimentConfig, write_splits: bool) -> Result<Vec<PathBuf>> {
    let prepared = prepare(cfg)?;
    let tcfg = cfg.train_config().map_err(at("configuring trainer"))?;
    let result = train(&tcfg, &prepared.embeddings, &prepared.tables).map_err(at("training"))?;

    fs::create_dir_all(&cfg.out_dir).map_err(|e| StageError {
        stage: "creating output directory",
        source: Error::Io { path: cfg.out_dir.clone(), source: e },
    })?;
    let transform = cfg.out_dir.join(TRANSFORM_FILE);
    let log = cfg.out_dir.join(TRAIN_LOG_FILE);
    let echo = cfg.out_dir.join(CONFIG_ECHO_FILE);
    result.transform.save(&transform).map_err(at("writing transform"))?;
    write(&log, &training_log_tsv(&result), "writing training log")?;
    write(&echo, &cfg.echo(), "writing config echo")?;
    let mut written = vec![transform, log, echo];
    if write_splits {
        for (property, gold) in &prepared.gold {
            let path = cfg.out_dir.join(format!("test_{property}.tsv"));
            write(&path, &gold_tsv(gold), "writing test split")?;
            written.push(path);
        }
    }
    Ok(written)
}

#[derive(Debug, Clone)]
pub struct LexiconArgs {
    pub transform: PathBuf,
    pub embeddings: PathBuf,
    pub format: EmbeddingFormat,
    pub top_k: Option<usize>,
    pub property: Property,
    /// Resource used to fit a linear map when the subspace is wider than one.
    pub resource: Option<(PathBuf, LabelKind)>,
    pub normalize: bool,
}

pub fn build_lexicon(args: &LexiconArgs) -> Result<OutputLexicon> {
    let t = TransformMatrix::load(&args.transform).map_err(at("loading transform"))?;
    let e = EmbeddingSet::load(&args.embeddings, args.format, args.top_k).map_err(at("loading embeddings"))?;
    let width = t.subspace(&args.property).map_err(at("selecting subspace"))?.dims.len();
    let lexicon = if width == 1 {
        emit_lexicon(&e, &t, &args.property, None).map_err(at("projecting"))?
    } else {
        let (path, kind) = args.resource.as_ref().ok_or_else(|| StageError {
            stage: "projecting",
            source: Error::NeedsLinearMap(args.property.to_string()),
        })?;
        let r = load_lexicon(path, args.property.clone(), *kind).map_err(at("loading resource"))?;
        let reps = project(&e, &t, &args.property).map_err(at("projecting"))?;
        let (xs, ys): (Vec<Vec<f64>>, Vec<f64>) = r
            .iter()
            .filter_map(|(w, l)| e.index_of(w).map(|i| (reps[i].clone(), l)))
            .unzip();
        if xs.is_empty() {
            return Err(StageError { stage: "fitting linear map", source: Error::EmptyIntersection(r.name().into()) });
        }
        let map = fit_linear_map(&xs, &ys).map_err(at("fitting linear map"))?;
        emit_lexicon(&e, &t, &args.property, Some(&map)).map_err(at("projecting"))?
    };
    Ok(if args.normalize { lexicon.min_max_normalized() } else { lexicon })
}

/// Scores a lexicon file against a gold TSV (`word<TAB>value`).
pub fn run_eval(lexicon: &Path, gold: &Path, property: Property, variant: TauVariant) -> Result<EvalReport> {
    let lex = OutputLexicon::load(lexicon, property.clone()).map_err(at("loading lexicon"))?;
    let gold = load_lexicon(gold, property, LabelKind::Continuous).map_err(at("loading gold"))?;
    let gold: Vec<(String, f64)> = gold.iter().map(|(w, v)| (w.to_string(), v)).collect();
    evaluate(&lex, &gold, variant).map_err(at("evaluating"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOver {
    SubspaceSize,
    ResourceSize,
}

/// `size<TAB>tau` curve for one configured property.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    property: &Property,
    over: SweepOver,
    sizes: &[usize],
    method: Method,
    variant: TauVariant,
) -> Result<String> {
    cfg.property(property).map_err(at("selecting property"))?;
    let prepared = prepare(cfg)?;
    let mut train = cfg.train_config().map_err(at("configuring trainer"))?;
    train.specs.retain(|s| &s.property == property);
    let exp = Experiment {
        embeddings: &prepared.embeddings,
        table: &prepared.tables[property],
        gold: &prepared.gold[property],
        train,
        variant,
    };
    let curve = match over {
        SweepOver::SubspaceSize => sweep_subspace_size(&exp, sizes, method),
        SweepOver::ResourceSize => sweep_resource_size(&exp, sizes, cfg.seed),
    }
    .map_err(at("sweeping"))?;
    Ok(curve_tsv(&curve))
}
