//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! embeddings = vectors.bin
//! embeddings_format = binary
//! top_k = 80000
//! resource.sentiment = sentiment.tsv
//! kind.sentiment = continuous
//! alpha.sentiment = 0.4
//! dims.sentiment = 0
//! resource.frequency = builtin
//! iterations = 1000
//! seed = 1
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ultradense::embeddings::DEFAULT_TOP_K;
use ultradense::lexicon::{FREQUENCY_LOW_END, FREQUENCY_LOW_START, FREQUENCY_TOP};
use ultradense::objective::check_disjoint;
use ultradense::trainer::{DEFAULT_BATCH_SIZE, DEFAULT_ITERATIONS, DEFAULT_LR0, DEFAULT_LR_DECAY};
use ultradense::{EmbeddingFormat, Error, LabelKind, Property, Result, SubspaceSpec, TrainConfig};

pub const DEFAULT_ALPHA: f64 = 0.4;
pub const DEFAULT_TEST_FRACTION: f64 = 0.2;
pub const DEFAULT_DEAD_ZONE: f64 = 0.5;

/// Where a property's labels come from.
#[derive(Debug, Clone, PartialEq)]
pub enum ResourceSource {
    File { path: PathBuf, kind: LabelKind },
    /// Synthesized from vocabulary rank order.
    Builtin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyConfig {
    pub property: Property,
    pub source: ResourceSource,
    pub dims: Vec<usize>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub embeddings: PathBuf,
    pub embeddings_format: EmbeddingFormat,
    pub normalize: bool,
    pub top_k: usize,
    pub properties: Vec<PropertyConfig>,
    pub iterations: usize,
    pub batch_size: usize,
    pub lr0: f64,
    pub lr_decay: f64,
    pub seed: u64,
    pub deterministic: bool,
    pub early_stop: bool,
    pub test_fraction: f64,
    pub dead_zone: f64,
    pub frequency_ranks: (usize, usize, usize),
    pub out_dir: PathBuf,
}

/// Default subspace of the three standard properties.
pub fn default_dims(property: &Property) -> Option<Vec<usize>> {
    match property {
        Property::Sentiment => Some(vec![0]),
        Property::Concreteness => Some(vec![10]),
        Property::Frequency => Some(vec![20]),
        Property::Other(_) => None,
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("bad boolean `{value}` for `{key}`"))),
    }
}

fn parse_dims(key: &str, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|d| parse_value(key, d.trim()))
        .collect()
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        ExperimentConfig::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if kv.insert(k.clone(), v).is_some() {
                return Err(Error::Config(format!("line {}: `{k}` set twice", i + 1)));
            }
        }
        let resolve = |p: &str| {
            let p = Path::new(p);
            if p.is_absolute() { p.to_path_buf() } else { base.join(p) }
        };

        let mut cfg = ExperimentConfig {
            embeddings: PathBuf::new(),
            embeddings_format: EmbeddingFormat::Text,
            normalize: false,
            top_k: DEFAULT_TOP_K,
            properties: Vec::new(),
            iterations: DEFAULT_ITERATIONS,
            batch_size: DEFAULT_BATCH_SIZE,
            lr0: DEFAULT_LR0,
            lr_decay: DEFAULT_LR_DECAY,
            seed: 1,
            deterministic: true,
            early_stop: false,
            test_fraction: DEFAULT_TEST_FRACTION,
            dead_zone: DEFAULT_DEAD_ZONE,
            frequency_ranks: (FREQUENCY_TOP, FREQUENCY_LOW_START, FREQUENCY_LOW_END),
            out_dir: base.join("out"),
        };
        let mut per_property: BTreeMap<Property, BTreeMap<&str, String>> = BTreeMap::new();
        let mut embeddings = None;

        for (key, value) in &kv {
            let v = value.as_str();
            match key.as_str() {
                "embeddings" => embeddings = Some(resolve(v)),
                "embeddings_format" => cfg.embeddings_format = v.parse()?,
                "normalize" => cfg.normalize = parse_bool(key, v)?,
                "top_k" => cfg.top_k = parse_value(key, v)?,
                "iterations" => cfg.iterations = parse_value(key, v)?,
                "batch_size" => cfg.batch_size = parse_value(key, v)?,
                "lr0" => cfg.lr0 = parse_value(key, v)?,
                "lr_decay" => cfg.lr_decay = parse_value(key, v)?,
                "seed" => cfg.seed = parse_value(key, v)?,
                "deterministic" => cfg.deterministic = parse_bool(key, v)?,
                "early_stop" => cfg.early_stop = parse_bool(key, v)?,
                "test_fraction" => cfg.test_fraction = parse_value(key, v)?,
                "dead_zone" => cfg.dead_zone = parse_value(key, v)?,
                "frequency_top" => cfg.frequency_ranks.0 = parse_value(key, v)?,
                "frequency_low_start" => cfg.frequency_ranks.1 = parse_value(key, v)?,
                "frequency_low_end" => cfg.frequency_ranks.2 = parse_value(key, v)?,
                "out_dir" => cfg.out_dir = resolve(v),
                other => {
                    let (field, name) = other
                        .split_once('.')
                        .ok_or_else(|| Error::Config(format!("unknown key `{other}`")))?;
                    let field = match field {
                        "resource" => "resource",
                        "kind" => "kind",
                        "dims" => "dims",
                        "alpha" => "alpha",
                        _ => return Err(Error::Config(format!("unknown key `{other}`"))),
                    };
                    per_property.entry(name.parse()?).or_default().insert(field, value.clone());
                }
            }
        }
        cfg.embeddings = embeddings.ok_or_else(|| Error::Config("`embeddings` is required".into()))?;

        for (property, fields) in per_property {
            let resource = fields
                .get("resource")
                .ok_or_else(|| Error::Config(format!("`resource.{property}` is required")))?;
            let source = if resource == "builtin" {
                if property != Property::Frequency {
                    return Err(Error::Config(format!(
                        "only the frequency resource can be builtin, not {property}"
                    )));
                }
                ResourceSource::Builtin
            } else {
                let kind = match fields.get("kind") {
                    Some(k) => k.parse()?,
                    None => LabelKind::Binary,
                };
                ResourceSource::File { path: resolve(resource), kind }
            };
            let dims = match fields.get("dims") {
                Some(d) => parse_dims(&format!("dims.{property}"), d)?,
                None => default_dims(&property)
                    .ok_or_else(|| Error::Config(format!("`dims.{property}` is required")))?,
            };
            let alpha = match fields.get("alpha") {
                Some(a) => parse_value(&format!("alpha.{property}"), a)?,
                None => DEFAULT_ALPHA,
            };
            cfg.properties.push(PropertyConfig { property, source, dims, alpha });
        }
        cfg.validate_values()?;
        Ok(cfg)
    }

    /// Checks value ranges and subspace layout (not file existence).
    pub fn validate_values(&self) -> Result<()> {
        if self.properties.is_empty() {
            return Err(Error::Config("no `resource.<property>` entries".into()));
        }
        if self.top_k == 0 {
            return Err(Error::Config("top_k must be at least 1".into()));
        }
        self.train_config()?.validate()?;
        check_disjoint(&self.specs()?)
    }

    /// Every referenced input file must exist.
    pub fn validate_files(&self) -> Result<()> {
        let mut paths = vec![&self.embeddings];
        for p in &self.properties {
            if let ResourceSource::File { path, .. } = &p.source {
                paths.push(path);
            }
        }
        for path in paths {
            if !path.is_file() {
                return Err(Error::Io {
                    path: path.clone(),
                    source: std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found"),
                });
            }
        }
        Ok(())
    }

    pub fn specs(&self) -> Result<Vec<SubspaceSpec>> {
        self.properties
            .iter()
            .map(|p| SubspaceSpec::new(p.property.clone(), p.dims.clone(), p.alpha))
            .collect()
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        let mut t = TrainConfig::new(self.specs()?, self.seed);
        t.iterations = self.iterations;
        t.batch_size = self.batch_size;
        t.lr0 = self.lr0;
        t.lr_decay = self.lr_decay;
        t.deterministic = self.deterministic;
        t.early_stop = self.early_stop;
        t.check_every_step = false;
        Ok(t)
    }

    pub fn property(&self, property: &Property) -> Result<&PropertyConfig> {
        self.properties
            .iter()
            .find(|p| &p.property == property)
            .ok_or_else(|| Error::UnknownProperty(property.to_string()))
    }

    pub fn set_alpha(&mut self, property: &Property, alpha: f64) -> Result<()> {
        let p = self
            .properties
            .iter_mut()
            .find(|p| &p.property == property)
            .ok_or_else(|| Error::UnknownProperty(property.to_string()))?;
        p.alpha = alpha;
        Ok(())
    }

    /// Resolved configuration in `key = value` form, keys in fixed order.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let fmt = match self.embeddings_format {
            EmbeddingFormat::Text => "text",
            EmbeddingFormat::Binary => "binary",
        };
        writeln!(out, "embeddings = {}", self.embeddings.display()).unwrap();
        writeln!(out, "embeddings_format = {fmt}").unwrap();
        writeln!(out, "normalize = {}", self.normalize).unwrap();
        writeln!(out, "top_k = {}", self.top_k).unwrap();
        for p in &self.properties {
            let name = &p.property;
            match &p.source {
                ResourceSource::Builtin => writeln!(out, "resource.{name} = builtin").unwrap(),
                ResourceSource::File { path, kind } => {
                    writeln!(out, "resource.{name} = {}", path.display()).unwrap();
                    let kind = match kind {
                        LabelKind::Binary => "binary",
                        LabelKind::Continuous => "continuous",
                    };
                    writeln!(out, "kind.{name} = {kind}").unwrap();
                }
            }
            let dims: Vec<String> = p.dims.iter().map(usize::to_string).collect();
            writeln!(out, "dims.{name} = {}", dims.join(",")).unwrap();
            writeln!(out, "alpha.{name} = {}", p.alpha).unwrap();
        }
        writeln!(out, "iterations = {}", self.iterations).unwrap();
        writeln!(out, "batch_size = {}", self.batch_size).unwrap();
        writeln!(out, "lr0 = {}", self.lr0).unwrap();
        writeln!(out, "lr_decay = {}", self.lr_decay).unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        writeln!(out, "deterministic = {}", self.deterministic).unwrap();
        writeln!(out, "early_stop = {}", self.early_stop).unwrap();
        writeln!(out, "test_fraction = {}", self.test_fraction).unwrap();
        writeln!(out, "dead_zone = {}", self.dead_zone).unwrap();
        let (top, lo, hi) = self.frequency_ranks;
        writeln!(out, "frequency_top = {top}").unwrap();
        writeln!(out, "frequency_low_start = {lo}").unwrap();
        writeln!(out, "frequency_low_end = {hi}").unwrap();
        writeln!(out, "out_dir = {}", self.out_dir.display()).unwrap();
        out
    }
}
