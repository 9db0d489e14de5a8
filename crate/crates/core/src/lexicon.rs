//! Lexicon resources and the training tables derived from them.
//!
//! Resources are exchanged as UTF-8 TSV, one `token<TAB>label` per line,
//! no header, `#` starting a comment line.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embeddings::EmbeddingSet;
use crate::error::{Error, Result};

/// The lexical property a resource or subspace describes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Sentiment,
    Concreteness,
    Frequency,
    Other(String),
}

impl Property {
    pub fn name(&self) -> &str {
        match self {
            Property::Sentiment => "sentiment",
            Property::Concreteness => "concreteness",
            Property::Frequency => "frequency",
            Property::Other(s) => s,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let valid = !s.is_empty()
            && s
                .chars()
                .all(|c| c.is_alphanumeric() || c == '_' || c == '-');
        if !valid {
            return Err(Error::Config(format!("invalid property name `{s}`")));
        }
        Ok(match s {
            "sentiment" => Property::Sentiment,
            "concreteness" => Property::Concreteness,
            "frequency" => Property::Frequency,
            other => Property::Other(other.to_string()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    /// Every label is -1 or +1.
    Binary,
    Continuous,
}

impl FromStr for LabelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(LabelKind::Binary),
            "continuous" => Ok(LabelKind::Continuous),
            other => Err(Error::Config(format!("unknown label kind `{other}`"))),
        }
    }
}

/// Word → label table with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconResource {
    entries: IndexMap<String, f64>,
    kind: LabelKind,
    property: Property,
    name: String,
}

impl LexiconResource {
    pub fn new(
        entries: impl IntoIterator<Item = (String, f64)>,
        kind: LabelKind,
        property: Property,
        name: impl Into<String>,
    ) -> Result<Self> {
        let mut map = IndexMap::new();
        for (word, label) in entries {
            if !label.is_finite() {
                return Err(Error::InvalidValue { word, value: label });
            }
            if kind == LabelKind::Binary && label != 1.0 && label != -1.0 {
                return Err(Error::LabelDomain { word, label });
            }
            if map.contains_key(&word) {
                return Err(Error::DuplicateWord(word));
            }
            map.insert(word, label);
        }
        Ok(LexiconResource {
            entries: map,
            kind,
            property,
            name: name.into(),
        })
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    pub fn property(&self) -> &Property {
        &self.property
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<f64> {
        self.entries.get(word).copied()
    }

    /// Entries in file order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.entries.iter().map(|(w, &l)| (w.as_str(), l))
    }
}

pub fn load_lexicon(path: impl AsRef<Path>, property: Property, kind: LabelKind) -> Result<LexiconResource> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    parse_lexicon(&text, &source, property, kind)
}

/// Parses resource TSV already held in memory; `source` names it in errors.
pub fn parse_lexicon(text: &str, source: &str, property: Property, kind: LabelKind) -> Result<LexiconResource> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let location = || format!("{source}:{}", i + 1);
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let (word, label) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(location(), "expected token<TAB>label"))?;
        let label: f64 = label
            .trim()
            .parse()
            .map_err(|_| Error::parse(location(), format!("unparsable label `{label}`")))?;
        rows.push((word.to_string(), label));
    }
    LexiconResource::new(rows, kind, property, source)
}

/// Drops entries with `|label| <= dead_zone` and maps the rest to their sign.
pub fn binarize(r: &LexiconResource, dead_zone: f64) -> Result<LexiconResource> {
    let kept: Vec<(String, f64)> = r
        .iter()
        .filter(|(_, l)| l.abs() > dead_zone)
        .map(|(w, l)| (w.to_string(), l.signum()))
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyResource(r.name.clone()));
    }
    LexiconResource::new(kept, LabelKind::Binary, r.property.clone(), format!("{} (binarized)", r.name))
}

/// Default rank boundaries for the synthesized frequency resource.
pub const FREQUENCY_TOP: usize = 2000;
pub const FREQUENCY_LOW_START: usize = 20_000;
pub const FREQUENCY_LOW_END: usize = 22_000;

/// Frequency resource read off the vocabulary order: +1 for the `top` most
/// frequent words, -1 for ranks `[low_start, low_end)`.
pub fn frequency_lexicon(
    e: &EmbeddingSet,
    top: usize,
    low_start: usize,
    low_end: usize,
) -> Result<LexiconResource> {
    if top > low_start || low_start >= low_end {
        return Err(Error::Config(format!(
            "frequency ranks must satisfy top <= low_start < low_end, got {top}, {low_start}, {low_end}"
        )));
    }
    if e.len() < low_end {
        return Err(Error::InsufficientVocabulary {
            have: e.len(),
            need: low_end,
        });
    }
    let words = e.words();
    let pos = words[..top].iter().map(|w| (w.clone(), 1.0));
    let neg = words[low_start..low_end].iter().map(|w| (w.clone(), -1.0));
    LexiconResource::new(pos.chain(neg), LabelKind::Binary, Property::Frequency, "vocabulary rank")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableEntry {
    /// Index into the embedding set the table was built against.
    pub index: usize,
    /// -1.0 or +1.0.
    pub label: f64,
    pub split: Split,
}

/// A binary resource resolved against an embedding vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTable {
    entries: Vec<TableEntry>,
    /// Resource words absent from the vocabulary.
    pub dropped: usize,
}

impl TrainingTable {
    pub fn from_entries(entries: Vec<TableEntry>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if e.label != 1.0 && e.label != -1.0 {
                return Err(Error::LabelDomain {
                    word: format!("#{}", e.index),
                    label: e.label,
                });
            }
            if !seen.insert(e.index) {
                return Err(Error::DuplicateWord(format!("#{}", e.index)));
            }
        }
        let table = TrainingTable { entries, dropped: 0 };
        table.require_both_classes(Split::Train)?;
        Ok(table)
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn train(&self) -> impl Iterator<Item = &TableEntry> + '_ {
        self.entries.iter().filter(|e| e.split == Split::Train)
    }

    pub fn test(&self) -> impl Iterator<Item = &TableEntry> + '_ {
        self.entries.iter().filter(|e| e.split == Split::Test)
    }

    /// `(positive, negative)` counts in one split.
    pub fn class_counts(&self, split: Split) -> (usize, usize) {
        self.entries
            .iter()
            .filter(|e| e.split == split)
            .fold((0, 0), |(p, n), e| if e.label > 0.0 { (p + 1, n) } else { (p, n + 1) })
    }

    fn require_both_classes(&self, split: Split) -> Result<()> {
        let (p, n) = self.class_counts(split);
        if p == 0 || n == 0 {
            return Err(Error::MissingClass(format!(
                "{split:?} split has {p} positive and {n} negative entries"
            )));
        }
        Ok(())
    }

    /// Deterministically tags `ceil(test_fraction · n)` entries as test.
    pub fn split(&self, test_fraction: f64, seed: u64) -> Result<TrainingTable> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test fraction must lie in (0, 1), got {test_fraction}"
            )));
        }
        let n = self.entries.len();
        let n_test = ((test_fraction * n as f64).ceil() as usize).min(n);
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(3);
        order.shuffle(&mut rng);
        let mut entries = self.entries.clone();
        for e in entries.iter_mut() {
            e.split = Split::Train;
        }
        for &i in &order[..n_test] {
            entries[i].split = Split::Test;
        }
        let out = TrainingTable {
            entries,
            dropped: self.dropped,
        };
        out.require_both_classes(Split::Train)?;
        Ok(out)
    }

    /// Keeps the test split and a seeded, class-balanced subsample of `size`
    /// train entries (`ceil(size/2)` positive, `floor(size/2)` negative).
    pub fn subsample_train(&self, size: usize, seed: u64) -> Result<TrainingTable> {
        let n_pos = size.div_ceil(2);
        let n_neg = size / 2;
        if n_neg < 2 {
            return Err(Error::MissingClass(format!(
                "a training subsample of {size} leaves fewer than 2 words per class"
            )));
        }
        let (have_pos, have_neg) = self.class_counts(Split::Train);
        if n_pos > have_pos || n_neg > have_neg {
            return Err(Error::MissingClass(format!(
                "subsample of {n_pos}+{n_neg} exceeds the {have_pos}+{have_neg} available training words"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(4);
        let mut pick = |label: f64, k: usize| {
            let mut pool: Vec<TableEntry> =
                self.train().filter(|e| e.label == label).copied().collect();
            pool.shuffle(&mut rng);
            pool.truncate(k);
            pool
        };
        let mut entries = pick(1.0, n_pos);
        entries.extend(pick(-1.0, n_neg));
        entries.extend(self.test().copied());
        Ok(TrainingTable {
            entries,
            dropped: self.dropped,
        })
    }
}

/// Resolves the words of a binary resource against `e`, in resource order.
/// Words missing from the vocabulary are counted in `dropped`.
pub fn intersect(r: &LexiconResource, e: &EmbeddingSet) -> Result<TrainingTable> {
    if r.kind != LabelKind::Binary {
        return Err(Error::Config(format!(
            "resource `{}` must be binarized before intersecting",
            r.name
        )));
    }
    let mut entries = Vec::new();
    let mut dropped = 0;
    for (word, label) in r.iter() {
        match e.index_of(word) {
            Some(index) => entries.push(TableEntry {
                index,
                label,
                split: Split::Train,
            }),
            None => dropped += 1,
        }
    }
    if entries.is_empty() {
        return Err(Error::EmptyIntersection(r.name.clone()));
    }
    let table = TrainingTable { entries, dropped };
    table.require_both_classes(Split::Train)?;
    Ok(table)
}
