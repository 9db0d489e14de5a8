//! Embedding sets and the word2vec text and binary formats.
//!
//! Both formats start with an ASCII header line `"<vocab_count> <dim>"`.
//! The text format then has one line per word, `token v1 ... vd`. The
//! binary format stores per word the token bytes, a single space and `dim`
//! little-endian `f32` values. Words keep the order of the file, which for
//! word2vec output is descending corpus frequency.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Default vocabulary cutoff used when intersecting with lexicon resources.
pub const DEFAULT_TOP_K: usize = 80_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingFormat {
    Text,
    Binary,
}

impl FromStr for EmbeddingFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "txt" => Ok(EmbeddingFormat::Text),
            "binary" | "bin" => Ok(EmbeddingFormat::Binary),
            other => Err(Error::Config(format!("unknown embedding format `{other}`"))),
        }
    }
}

/// An ordered vocabulary with one `dim`-dimensional vector per word.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f64>,
    source: String,
}

impl EmbeddingSet {
    pub fn new(
        words: Vec<String>,
        vectors: Vec<Vec<f64>>,
        source: impl Into<String>,
    ) -> Result<Self> {
        let dim = vectors.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::InvalidDimension("embeddings need dim >= 1".into()));
        }
        if words.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: words.len(),
                found: vectors.len(),
            });
        }
        let mut set = EmbeddingSet {
            dim,
            words: Vec::with_capacity(words.len()),
            index: HashMap::with_capacity(words.len()),
            vectors: Vec::with_capacity(words.len() * dim),
            source: source.into(),
        };
        for (word, vector) in words.into_iter().zip(vectors) {
            set.push(word, &vector)?;
        }
        Ok(set)
    }

    fn empty(dim: usize, capacity: usize, source: String) -> Self {
        EmbeddingSet {
            dim,
            words: Vec::with_capacity(capacity),
            index: HashMap::with_capacity(capacity),
            vectors: Vec::with_capacity(capacity * dim),
            source,
        }
    }

    fn push(&mut self, word: String, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: vector.len(),
            });
        }
        if let Some(&value) = vector.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidValue { word, value });
        }
        if self.index.contains_key(&word) {
            return Err(Error::DuplicateWord(word));
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.vectors.extend_from_slice(vector);
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, idx: usize) -> &str {
        &self.words[idx]
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    #[inline]
    pub fn vector(&self, idx: usize) -> &[f64] {
        &self.vectors[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> + '_ {
        self.words
            .iter()
            .zip(self.vectors.chunks_exact(self.dim))
            .map(|(w, v)| (w.as_str(), v))
    }

    /// The first `min(k, len)` words, order preserved.
    pub fn top_k(&self, k: usize) -> EmbeddingSet {
        let n = k.min(self.len());
        let words = self.words[..n].to_vec();
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        EmbeddingSet {
            dim: self.dim,
            words,
            index,
            vectors: self.vectors[..n * self.dim].to_vec(),
            source: self.source.clone(),
        }
    }

    /// Replaces every vector `e_w` by `q·e_w`.
    pub fn transform(&self, q: &Matrix) -> Result<EmbeddingSet> {
        if q.rows() != self.dim || q.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: q.cols(),
            });
        }
        let mut vectors = Vec::with_capacity(self.vectors.len());
        for v in self.vectors.chunks_exact(self.dim) {
            vectors.extend(q.mul_vec(v)?);
        }
        Ok(EmbeddingSet {
            vectors,
            ..self.clone()
        })
    }

    /// Scales every non-zero vector to unit length.
    pub fn unit_normalized(&self) -> EmbeddingSet {
        let mut out = self.clone();
        for v in out.vectors.chunks_exact_mut(self.dim) {
            let n = crate::linalg::norm(v);
            if n > 0.0 {
                v.iter_mut().for_each(|x| *x /= n);
            }
        }
        out
    }

    /// The embedding vectors as an `len x dim` matrix.
    pub fn to_matrix(&self) -> Result<Matrix> {
        Matrix::new(self.len(), self.dim, self.vectors.clone())
    }

    pub fn load(path: impl AsRef<Path>, format: EmbeddingFormat, max_vocab: Option<usize>) -> Result<Self> {
        load_embeddings(path, format, max_vocab)
    }

    pub fn save(&self, path: impl AsRef<Path>, format: EmbeddingFormat) -> Result<()> {
        save_embeddings(self, path, format)
    }
}

pub fn top_k_filter(e: &EmbeddingSet, k: usize) -> EmbeddingSet {
    e.top_k(k)
}

pub fn transform_embeddings(e: &EmbeddingSet, q: &Matrix) -> Result<EmbeddingSet> {
    e.transform(q)
}

pub fn load_embeddings(
    path: impl AsRef<Path>,
    format: EmbeddingFormat,
    max_vocab: Option<usize>,
) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let source = path.display().to_string();
    match format {
        EmbeddingFormat::Text => read_text(&mut reader, &source, max_vocab),
        EmbeddingFormat::Binary => read_binary(&mut reader, &source, max_vocab),
    }
}

pub fn save_embeddings(e: &EmbeddingSet, path: impl AsRef<Path>, format: EmbeddingFormat) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|err| Error::io(path, err))?;
    let mut w = BufWriter::new(file);
    let res = match format {
        EmbeddingFormat::Text => write_text(e, &mut w),
        EmbeddingFormat::Binary => write_binary(e, &mut w),
    };
    res.and_then(|_| w.flush()).map_err(|err| Error::io(path, err))
}

fn parse_header(line: &str, source: &str) -> Result<(usize, usize)> {
    let bad = |msg: &str| Error::parse(format!("{source}:1"), msg.to_string());
    let mut parts = line.split_ascii_whitespace();
    let count = parts
        .next()
        .ok_or_else(|| bad("missing header"))?
        .parse::<usize>()
        .map_err(|_| bad("vocabulary count is not an integer"))?;
    let dim = parts
        .next()
        .ok_or_else(|| bad("header lacks a dimension"))?
        .parse::<usize>()
        .map_err(|_| bad("dimension is not an integer"))?;
    if parts.next().is_some() {
        return Err(bad("trailing fields in header"));
    }
    if dim == 0 {
        return Err(bad("dimension must be positive"));
    }
    Ok((count, dim))
}

fn read_text<R: BufRead>(reader: &mut R, source: &str, max_vocab: Option<usize>) -> Result<EmbeddingSet> {
    let io_err = |e| Error::io(source, e);
    let mut header = String::new();
    reader.read_line(&mut header).map_err(io_err)?;
    let (count, dim) = parse_header(&header, source)?;
    let limit = max_vocab.map_or(count, |m| m.min(count));
    let mut set = EmbeddingSet::empty(dim, limit, source.to_string());

    let mut line = String::new();
    let mut vector = Vec::with_capacity(dim);
    let mut line_no = 1;
    while set.len() < limit {
        line.clear();
        line_no += 1;
        if reader.read_line(&mut line).map_err(io_err)? == 0 {
            return Err(Error::parse(
                format!("{source}:{line_no}"),
                format!("expected {count} words, file ended after {}", set.len()),
            ));
        }
        let location = || format!("{source}:{line_no}");
        let mut fields = line.split_ascii_whitespace();
        let token = fields
            .next()
            .ok_or_else(|| Error::parse(location(), "empty line"))?
            .to_string();
        vector.clear();
        for field in fields {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::parse(location(), format!("bad value `{field}`")))?;
            vector.push(v);
        }
        if vector.len() != dim {
            return Err(Error::parse(
                location(),
                format!("expected {dim} values, found {}", vector.len()),
            ));
        }
        set.push(token, &vector)?;
    }
    Ok(set)
}

fn read_binary<R: BufRead>(reader: &mut R, source: &str, max_vocab: Option<usize>) -> Result<EmbeddingSet> {
    let io_err = |e| Error::io(source, e);
    let mut header = String::new();
    reader.read_line(&mut header).map_err(io_err)?;
    let (count, dim) = parse_header(&header, source)?;
    let limit = max_vocab.map_or(count, |m| m.min(count));
    let mut set = EmbeddingSet::empty(dim, limit, source.to_string());

    let mut offset = header.len();
    let mut token = Vec::new();
    let mut raw = vec![0u8; 4 * dim];
    let mut vector = vec![0.0; dim];
    while set.len() < limit {
        token.clear();
        let start = offset;
        let n = reader.read_until(b' ', &mut token).map_err(io_err)?;
        offset += n;
        if token.last() != Some(&b' ') {
            return Err(Error::parse(
                format!("{source}: byte {start}"),
                format!("expected {count} words, file ended after {}", set.len()),
            ));
        }
        token.pop();
        // Some writers put a newline after every vector.
        let skip = token.iter().take_while(|b| b.is_ascii_whitespace()).count();
        let word = std::str::from_utf8(&token[skip..])
            .map_err(|_| Error::parse(format!("{source}: byte {start}"), "token is not UTF-8"))?
            .to_string();
        if word.is_empty() {
            return Err(Error::parse(format!("{source}: byte {start}"), "empty token"));
        }
        reader.read_exact(&mut raw).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::parse(format!("{source}: byte {offset}"), format!("truncated vector for `{word}`"))
            } else {
                io_err(e)
            }
        })?;
        offset += raw.len();
        for (v, b) in vector.iter_mut().zip(raw.chunks_exact(4)) {
            *v = f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64;
        }
        set.push(word, &vector)?;
    }
    Ok(set)
}

fn write_text<W: Write>(e: &EmbeddingSet, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{} {}", e.len(), e.dim())?;
    for (word, v) in e.iter() {
        w.write_all(word.as_bytes())?;
        for x in v {
            write!(w, " {x}")?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn write_binary<W: Write>(e: &EmbeddingSet, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{} {}", e.len(), e.dim())?;
    for (word, v) in e.iter() {
        w.write_all(word.as_bytes())?;
        w.write_all(b" ")?;
        for &x in v {
            w.write_all(&(x as f32).to_le_bytes())?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "4 3\nthe 0.5 -1.25 2\nof 1 0 0\ngood 0.25 0.75 -0.5\nbad -0.25 -0.75 0.5\n";

    fn fixture_file(content: &[u8]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content).unwrap();
        f
    }

    #[test]
    fn loads_text_fixture_in_file_order() {
        let f = fixture_file(FIXTURE.as_bytes());
        let e = load_embeddings(f.path(), EmbeddingFormat::Text, None).unwrap();
        assert_eq!(e.dim(), 3);
        assert_eq!(e.words(), &["the", "of", "good", "bad"]);
        assert_eq!(e.vector(0), &[0.5, -1.25, 2.0]);
        assert_eq!(e.index_of("good"), Some(2));

        let e2 = load_embeddings(f.path(), EmbeddingFormat::Text, Some(2)).unwrap();
        assert_eq!(e2.words(), &["the", "of"]);
    }

    #[test]
    fn text_errors() {
        let dup = fixture_file(b"2 2\na 1 2\na 3 4\n");
        assert!(matches!(
            load_embeddings(dup.path(), EmbeddingFormat::Text, None),
            Err(Error::DuplicateWord(w)) if w == "a"
        ));
        let short = fixture_file(b"2 2\na 1 2\nb 3\n");
        match load_embeddings(short.path(), EmbeddingFormat::Text, None) {
            Err(Error::Parse { location, .. }) => assert!(location.ends_with(":3"), "{location}"),
            other => panic!("{other:?}"),
        }
        let header = fixture_file(b"two 2\na 1 2\n");
        assert!(matches!(
            load_embeddings(header.path(), EmbeddingFormat::Text, None),
            Err(Error::Parse { .. })
        ));
        let nan = fixture_file(b"1 2\na NaN 2\n");
        assert!(matches!(
            load_embeddings(nan.path(), EmbeddingFormat::Text, None),
            Err(Error::InvalidValue { .. })
        ));
        let missing = load_embeddings("/nonexistent/vectors.txt", EmbeddingFormat::Text, None);
        assert!(matches!(missing, Err(Error::Io { .. })));
    }

    #[test]
    fn binary_reader_tolerates_newline_separators() {
        let mut bytes = b"2 2\n".to_vec();
        for (w, v) in [("a", [1.0f32, 2.0]), ("b", [-3.0, 0.5])] {
            bytes.extend_from_slice(w.as_bytes());
            bytes.push(b' ');
            for x in v {
                bytes.extend_from_slice(&x.to_le_bytes());
            }
            bytes.push(b'\n');
        }
        let f = fixture_file(&bytes);
        let e = load_embeddings(f.path(), EmbeddingFormat::Binary, None).unwrap();
        assert_eq!(e.words(), &["a", "b"]);
        assert_eq!(e.vector(1), &[-3.0, 0.5]);
    }

    #[test]
    fn truncated_binary_is_a_parse_error() {
        let mut bytes = b"1 2\na ".to_vec();
        bytes.extend_from_slice(&1.0f32.to_le_bytes());
        let f = fixture_file(&bytes);
        assert!(matches!(
            load_embeddings(f.path(), EmbeddingFormat::Binary, None),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn save_to_missing_directory_fails_with_path() {
        let e = EmbeddingSet::new(vec!["a".into()], vec![vec![1.0]], "mem").unwrap();
        match e.save("/nonexistent-dir/out.txt", EmbeddingFormat::Text) {
            Err(Error::Io { path, .. }) => assert!(path.ends_with("out.txt")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn top_k_and_transform() {
        let words: Vec<String> = (1..=5).map(|i| format!("w{i}")).collect();
        let vectors = (0..5).map(|i| vec![i as f64, 1.0]).collect();
        let e = EmbeddingSet::new(words, vectors, "mem").unwrap();
        assert_eq!(e.top_k(3).words(), &["w1", "w2", "w3"]);
        assert_eq!(e.top_k(10).len(), 5);
        assert_eq!(e.top_k(1).words(), &["w1"]);
        assert_eq!(e.top_k(1).index_of("w2"), None);

        let id = e.transform(&Matrix::identity(2)).unwrap();
        assert_eq!(id, e);

        let rot = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let single = EmbeddingSet::new(vec!["x".into()], vec![vec![1.0, 0.0]], "mem").unwrap();
        assert_eq!(single.transform(&rot).unwrap().vector(0), &[0.0, 1.0]);
        assert!(matches!(
            e.transform(&Matrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
