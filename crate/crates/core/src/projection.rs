//! Projection onto learned subspaces and output lexicon generation.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::embeddings::EmbeddingSet;
use crate::error::{Error, Result};
use crate::lexicon::{Property, TrainingTable};
use crate::linalg::{dot, lstsq, Matrix};
use crate::transform::{Orientation, TransformMatrix};

/// `P·Q·e_w` for every word, in vocabulary order.
pub fn project(e: &EmbeddingSet, t: &TransformMatrix, property: &Property) -> Result<Vec<Vec<f64>>> {
    let sub = t.subspace(property)?;
    if t.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: e.dim(),
        });
    }
    let q = t.q();
    Ok((0..e.len())
        .map(|i| {
            let v = e.vector(i);
            sub.dims.iter().map(|&k| dot(q.row(k), v)).collect()
        })
        .collect())
}

/// Applies an arbitrary `k x d` projection to every word.
pub fn project_with(e: &EmbeddingSet, p: &Matrix) -> Result<Vec<Vec<f64>>> {
    (0..e.len()).map(|i| p.mul_vec(e.vector(i))).collect()
}

/// Chooses the sign making the mean score of positive training words at
/// least that of negative ones. `scores` is indexed like the embedding set
/// the table refers to. Ties keep the scores as they are.
pub fn orient(scores: &[f64], table: &TrainingTable) -> Result<Orientation> {
    let (mut pos, mut neg) = ((0.0, 0usize), (0.0, 0usize));
    for e in table.train() {
        let acc = if e.label > 0.0 { &mut pos } else { &mut neg };
        acc.0 += scores[e.index];
        acc.1 += 1;
    }
    if pos.1 == 0 || neg.1 == 0 {
        return Err(Error::MissingClass("orientation needs both classes in the train split".into()));
    }
    if pos.0 / (pos.1 as f64) < neg.0 / (neg.1 as f64) {
        Ok(Orientation::Flipped)
    } else {
        Ok(Orientation::AsIs)
    }
}

/// Affine map from a subspace representation to a scalar score.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// The design was rank deficient and the minimum-norm solution was used.
    pub rank_deficient: bool,
}

impl LinearMap {
    pub fn apply(&self, u: &[f64]) -> f64 {
        dot(&self.weights, u) + self.bias
    }
}

/// Least-squares fit of `w·u + b ≈ label`.
///
/// The fit runs on mean-centred representations, so a degenerate design
/// yields the minimum-norm weights and `b = mean(labels)`.
pub fn fit_linear_map(reps: &[Vec<f64>], labels: &[f64]) -> Result<LinearMap> {
    let k = reps.first().map_or(0, Vec::len);
    if k == 0 {
        return Err(Error::InvalidDimension("representations are empty".into()));
    }
    if reps.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: reps.len(),
            found: labels.len(),
        });
    }
    if reps.len() < k + 1 {
        return Err(Error::InvalidDimension(format!(
            "{} points cannot determine a map from {k} dimensions",
            reps.len()
        )));
    }
    let n = reps.len() as f64;
    let mut mean = vec![0.0; k];
    for r in reps {
        if r.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: r.len() });
        }
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x / n;
        }
    }
    let label_mean = labels.iter().sum::<f64>() / n;
    let centred: Vec<f64> = reps
        .iter()
        .flat_map(|r| r.iter().zip(&mean).map(|(x, m)| x - m))
        .collect();
    let design = Matrix::new(reps.len(), k, centred)?;
    let target: Vec<f64> = labels.iter().map(|l| l - label_mean).collect();
    let (weights, rank_deficient) = lstsq(&design, &target)?;
    let bias = label_mean - dot(&weights, &mean);
    Ok(LinearMap {
        weights,
        bias,
        rank_deficient,
    })
}

/// Fits a linear map on the train split of `table`; `reps` is indexed like
/// the embedding set.
pub fn fit_linear_map_on_train(reps: &[Vec<f64>], table: &TrainingTable) -> Result<LinearMap> {
    let (xs, ys): (Vec<Vec<f64>>, Vec<f64>) = table
        .train()
        .map(|e| (reps[e.index].clone(), e.label))
        .unzip();
    fit_linear_map(&xs, &ys)
}

/// Scored word list sorted by descending score; ties by token bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputLexicon {
    entries: Vec<(String, f64)>,
    index: HashMap<String, usize>,
    pub property: Property,
    pub orientation: Orientation,
}

impl OutputLexicon {
    pub fn from_scores(
        entries: impl IntoIterator<Item = (String, f64)>,
        property: Property,
        orientation: Orientation,
    ) -> Result<Self> {
        let mut entries: Vec<(String, f64)> = entries.into_iter().collect();
        if let Some((word, value)) = entries.iter().find(|(_, s)| !s.is_finite()) {
            return Err(Error::InvalidValue {
                word: word.clone(),
                value: *value,
            });
        }
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.as_bytes().cmp(b.0.as_bytes())));
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (w, _)) in entries.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::DuplicateWord(w.clone()));
            }
        }
        Ok(OutputLexicon {
            entries,
            index,
            property,
            orientation,
        })
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.index.get(token).map(|&i| self.entries[i].1)
    }

    /// Stored score, or the neutral 0.0 for unknown tokens.
    pub fn score_word(&self, token: &str) -> f64 {
        self.get(token).unwrap_or(0.0)
    }

    /// Rescales scores linearly onto [-1, 1]; constant scores map to 0.
    pub fn min_max_normalized(&self) -> OutputLexicon {
        let max = self.entries.first().map_or(0.0, |e| e.1);
        let min = self.entries.last().map_or(0.0, |e| e.1);
        let span = max - min;
        let entries = self.entries.iter().map(|(w, s)| {
            let v = if span > 0.0 { 2.0 * (s - min) / span - 1.0 } else { 0.0 };
            (w.clone(), v)
        });
        OutputLexicon::from_scores(entries, self.property.clone(), self.orientation)
            .expect("rescaling keeps scores finite")
    }

    /// `token<TAB>score` lines, scores with 6 significant digits.
    pub fn to_tsv(&self) -> String {
        let mut out = String::with_capacity(self.entries.len() * 16);
        for (w, s) in &self.entries {
            writeln!(out, "{w}\t{}", format_g6(*s)).unwrap();
        }
        out
    }

    pub fn parse_tsv(text: &str, source: &str, property: Property) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (w, s) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(format!("{source}:{}", i + 1), "expected token<TAB>score"))?;
            let s: f64 = s
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("{source}:{}", i + 1), format!("bad score `{s}`")))?;
            rows.push((w.to_string(), s));
        }
        OutputLexicon::from_scores(rows, property, Orientation::AsIs)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>, property: Property) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        OutputLexicon::parse_tsv(&text, &path.display().to_string(), property)
    }
}

/// Builds a lexicon over all of `e` from per-word representations: a
/// single coordinate is oriented, anything wider goes through `map`.
pub fn lexicon_from_reps(
    e: &EmbeddingSet,
    reps: &[Vec<f64>],
    property: &Property,
    orientation: Orientation,
    map: Option<&LinearMap>,
) -> Result<OutputLexicon> {
    let width = reps.first().map_or(1, Vec::len);
    let score = |u: &[f64]| -> Result<f64> {
        match map {
            Some(m) => Ok(m.apply(u)),
            None if width == 1 => Ok(orientation.sign() * u[0]),
            None => Err(Error::NeedsLinearMap(property.to_string())),
        }
    };
    let entries = e
        .words()
        .iter()
        .zip(reps)
        .map(|(w, u)| Ok((w.clone(), score(u)?)))
        .collect::<Result<Vec<_>>>()?;
    let orientation = if map.is_some() { Orientation::AsIs } else { orientation };
    OutputLexicon::from_scores(entries, property.clone(), orientation)
}

/// Output lexicon over the whole vocabulary of `e`, using the orientation
/// stored in `t`.
pub fn emit_lexicon(
    e: &EmbeddingSet,
    t: &TransformMatrix,
    property: &Property,
    map: Option<&LinearMap>,
) -> Result<OutputLexicon> {
    let orientation = t.subspace(property)?.orientation;
    let reps = project(e, t, property)?;
    lexicon_from_reps(e, &reps, property, orientation, map)
}

/// Formats like C's `%g`: 6 significant digits, trailing zeros removed,
/// exponent notation outside `[1e-4, 1e6)`.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{Split, TableEntry};
    use crate::transform::Subspace;

    fn single() -> EmbeddingSet {
        EmbeddingSet::new(vec!["w".into()], vec![vec![7.0, -2.0, 5.0]], "mem").unwrap()
    }

    fn identity_transform(dims: Vec<usize>) -> TransformMatrix {
        TransformMatrix::new(
            Matrix::identity(3),
            vec![Subspace { property: Property::Sentiment, dims, orientation: Orientation::AsIs }],
            "t",
        )
        .unwrap()
    }

    #[test]
    fn projection_selects_rows() {
        let e = single();
        assert_eq!(project(&e, &identity_transform(vec![0]), &Property::Sentiment).unwrap(), vec![vec![7.0]]);
        assert_eq!(
            project(&e, &identity_transform(vec![1, 2]), &Property::Sentiment).unwrap(),
            vec![vec![-2.0, 5.0]]
        );
        assert!(matches!(
            project(&e, &identity_transform(vec![0]), &Property::Frequency),
            Err(Error::UnknownProperty(_))
        ));
    }

    fn table4() -> TrainingTable {
        TrainingTable::from_entries(
            [(0, 1.0), (1, 1.0), (2, -1.0), (3, -1.0)]
                .into_iter()
                .map(|(index, label)| TableEntry { index, label, split: Split::Train })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn orientation_rule() {
        let t = table4();
        assert_eq!(orient(&[2.0, 3.0, -1.0, 0.0], &t).unwrap(), Orientation::AsIs);
        assert_eq!(orient(&[-2.0, -3.0, 1.0, 0.0], &t).unwrap(), Orientation::Flipped);
        assert_eq!(orient(&[1.0, 0.0, 0.5, 0.5], &t).unwrap(), Orientation::AsIs);
    }

    #[test]
    fn linear_map_cases() {
        let reps = vec![vec![-1.0], vec![1.0], vec![-1.0], vec![1.0]];
        let m = fit_linear_map(&reps, &[-1.0, 1.0, -1.0, 1.0]).unwrap();
        assert!((m.weights[0] - 1.0).abs() < 1e-12 && m.bias.abs() < 1e-12);
        assert!(!m.rank_deficient);

        let reps = vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]];
        let m = fit_linear_map(&reps, &[1.0, 1.0, -1.0, -1.0]).unwrap();
        assert!(m.weights[1].abs() <= 1e-8);
        assert!((m.weights[0] - 1.0).abs() < 1e-12);

        let constant = vec![vec![2.5]; 4];
        let m = fit_linear_map(&constant, &[1.0, 1.0, 1.0, -1.0]).unwrap();
        assert!(m.rank_deficient);
        assert_eq!(m.weights, vec![0.0]);
        assert!((m.bias - 0.5).abs() < 1e-15);

        assert!(fit_linear_map(&[vec![1.0, 2.0], vec![0.0, 1.0]], &[1.0, -1.0]).is_err());
    }

    #[test]
    fn emitted_lexicon_is_sorted_and_complete() {
        let e = EmbeddingSet::new(
            ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect(),
            vec![vec![0.5, 0.0, 0.0], vec![-1.0, 0.0, 0.0], vec![2.0, 1.0, 0.0], vec![0.5, 3.0, 0.0]],
            "mem",
        )
        .unwrap();
        let mut t = identity_transform(vec![0]);
        let lex = emit_lexicon(&e, &t, &Property::Sentiment, None).unwrap();
        let words: Vec<&str> = lex.entries().iter().map(|(w, _)| w.as_str()).collect();
        assert_eq!(words, vec!["c", "a", "d", "b"]);
        assert_eq!(lex.to_tsv(), "c\t2\na\t0.5\nd\t0.5\nb\t-1\n");

        t.set_orientation(&Property::Sentiment, Orientation::Flipped).unwrap();
        let flipped = emit_lexicon(&e, &t, &Property::Sentiment, None).unwrap();
        assert_eq!(flipped.entries()[0], ("b".to_string(), 1.0));

        let wide = identity_transform(vec![0, 1]);
        assert!(matches!(
            emit_lexicon(&e, &wide, &Property::Sentiment, None),
            Err(Error::NeedsLinearMap(_))
        ));
    }

    #[test]
    fn oov_is_neutral() {
        let lex = OutputLexicon::from_scores(vec![("good".into(), 1.5)], Property::Sentiment, Orientation::AsIs).unwrap();
        assert_eq!(lex.score_word("good"), 1.5);
        assert_eq!(lex.score_word("zorp"), 0.0);
        let empty = OutputLexicon::from_scores(vec![], Property::Sentiment, Orientation::AsIs).unwrap();
        assert_eq!(empty.score_word("good"), 0.0);
    }

    #[test]
    fn min_max() {
        let lex = OutputLexicon::from_scores(
            vec![("a".into(), 4.0), ("b".into(), 2.0), ("c".into(), 0.0)],
            Property::Sentiment,
            Orientation::AsIs,
        )
        .unwrap();
        let n = lex.min_max_normalized();
        assert_eq!(n.entries().iter().map(|e| e.1).collect::<Vec<_>>(), vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn tsv_round_trip() {
        let lex = OutputLexicon::from_scores(
            vec![("a".into(), 0.123456789), ("b".into(), -2.5e-7)],
            Property::Sentiment,
            Orientation::AsIs,
        )
        .unwrap();
        let text = lex.to_tsv();
        assert_eq!(text, "a\t0.123457\nb\t-2.5e-07\n");
        let back = OutputLexicon::parse_tsv(&text, "mem", Property::Sentiment).unwrap();
        assert_eq!(back.to_tsv(), text);
    }

    #[test]
    fn g6_formatting() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-3.0, "-3"),
            (123456.0, "123456"),
            (1234567.0, "1.23457e+06"),
            (999999.5, "1e+06"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (1.23456789, "1.23457"),
            (-0.5, "-0.5"),
            (100.0, "100"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g6(x), want, "{x}");
        }
    }
}
