//! The learned transformation together with its subspace assignment, and
//! its on-disk format.
//!
//! ```text
//! ULTRADENSE 1
//! <d>
//! sentiment:0;frequency:20,21
//! sentiment:as-is;frequency:flipped
//! <d lines of d space-separated values, row-major, 17 significant digits>
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lexicon::Property;
use crate::linalg::Matrix;
use crate::objective::{check_disjoint, SubspaceSpec};

const MAGIC: &str = "ULTRADENSE 1";

/// Orthogonality tolerance a stored transformation must satisfy.
pub const TRANSFORM_ORTHOGONALITY_TOL: f64 = 1e-8;

/// Sign convention applied to a subspace coordinate so that the positive
/// class scores higher.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    AsIs,
    Flipped,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::AsIs => 1.0,
            Orientation::Flipped => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::AsIs => "as-is",
            Orientation::Flipped => "flipped",
        }
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-is" => Ok(Orientation::AsIs),
            "flipped" => Ok(Orientation::Flipped),
            other => Err(Error::parse("orientation", format!("unknown orientation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    pub property: Property,
    pub dims: Vec<usize>,
    pub orientation: Orientation,
}

/// An orthogonal `d x d` matrix with named, disjoint subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    q: Matrix,
    subspaces: Vec<Subspace>,
    pub provenance: String,
}

impl TransformMatrix {
    pub fn new(q: Matrix, subspaces: Vec<Subspace>, provenance: impl Into<String>) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::InvalidMatrix("transformation must be square".into()));
        }
        let err = q.orthogonality_error();
        if err > TRANSFORM_ORTHOGONALITY_TOL {
            return Err(Error::InvalidMatrix(format!(
                "transformation is not orthogonal (‖QᵀQ − I‖_F = {err:e})"
            )));
        }
        let specs: Vec<SubspaceSpec> = subspaces
            .iter()
            .map(|s| SubspaceSpec::new(s.property.clone(), s.dims.clone(), 0.5))
            .collect::<Result<_>>()?;
        for s in &specs {
            s.check_range(q.rows())?;
        }
        check_disjoint(&specs)?;
        for (i, s) in subspaces.iter().enumerate() {
            if subspaces[..i].iter().any(|o| o.property == s.property) {
                return Err(Error::Config(format!("property {} assigned twice", s.property)));
            }
        }
        Ok(TransformMatrix {
            q,
            subspaces,
            provenance: provenance.into(),
        })
    }

    /// Wraps `q` with subspaces taken from training specs, all as-is.
    pub fn from_specs(q: Matrix, specs: &[SubspaceSpec], provenance: impl Into<String>) -> Result<Self> {
        let subspaces = specs
            .iter()
            .map(|s| Subspace {
                property: s.property.clone(),
                dims: s.dims.clone(),
                orientation: Orientation::AsIs,
            })
            .collect();
        TransformMatrix::new(q, subspaces, provenance)
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn subspace(&self, property: &Property) -> Result<&Subspace> {
        self.subspaces
            .iter()
            .find(|s| &s.property == property)
            .ok_or_else(|| Error::UnknownProperty(property.to_string()))
    }

    pub fn set_orientation(&mut self, property: &Property, orientation: Orientation) -> Result<()> {
        let s = self
            .subspaces
            .iter_mut()
            .find(|s| &s.property == property)
            .ok_or_else(|| Error::UnknownProperty(property.to_string()))?;
        s.orientation = orientation;
        Ok(())
    }

    /// Row `dims[0]` of `Q` with the property's orientation applied.
    pub fn oriented_direction(&self, property: &Property) -> Result<Vec<f64>> {
        let s = self.subspace(property)?;
        let sign = s.orientation.sign();
        Ok(self.q.row(s.dims[0]).iter().map(|x| sign * x).collect())
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        let d = self.dim();
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "{d}").unwrap();
        let dims: Vec<String> = self
            .subspaces
            .iter()
            .map(|s| {
                let idx: Vec<String> = s.dims.iter().map(usize::to_string).collect();
                format!("{}:{}", s.property, idx.join(","))
            })
            .collect();
        writeln!(out, "{}", dims.join(";")).unwrap();
        let orient: Vec<String> = self
            .subspaces
            .iter()
            .map(|s| format!("{}:{}", s.property, s.orientation.as_str()))
            .collect();
        writeln!(out, "{}", orient.join(";")).unwrap();
        for r in 0..d {
            let row: Vec<String> = self.q.row(r).iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(source.to_string(), format!("missing {what}")))
        };
        let at = |i: usize| format!("{source}:{}", i + 1);

        let (i, magic) = next("header")?;
        if magic != MAGIC {
            return Err(Error::parse(at(i), format!("expected `{MAGIC}`")));
        }
        let (i, dline) = next("dimension")?;
        let d: usize = dline
            .trim()
            .parse()
            .map_err(|_| Error::parse(at(i), "dimension is not an integer"))?;
        if d == 0 {
            return Err(Error::parse(at(i), "dimension must be positive"));
        }

        let (i, dims_line) = next("subspace line")?;
        let mut subspaces = Vec::new();
        for item in dims_line.split(';').filter(|s| !s.is_empty()) {
            let (name, idx) = item
                .split_once(':')
                .ok_or_else(|| Error::parse(at(i), format!("bad subspace `{item}`")))?;
            let dims = idx
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::parse(at(i), format!("bad indices in `{item}`")))?;
            subspaces.push(Subspace {
                property: name.parse()?,
                dims,
                orientation: Orientation::AsIs,
            });
        }

        let (i, orient_line) = next("orientation line")?;
        for item in orient_line.split(';').filter(|s| !s.is_empty()) {
            let (name, o) = item
                .split_once(':')
                .ok_or_else(|| Error::parse(at(i), format!("bad orientation `{item}`")))?;
            let property: Property = name.parse()?;
            let s = subspaces
                .iter_mut()
                .find(|s| s.property == property)
                .ok_or_else(|| Error::parse(at(i), format!("orientation for unassigned `{name}`")))?;
            s.orientation = o.parse().map_err(|_| Error::parse(at(i), format!("bad orientation `{o}`")))?;
        }

        let mut data = Vec::with_capacity(d * d);
        for _ in 0..d {
            let (i, row) = next("matrix row")?;
            let before = data.len();
            for field in row.split_ascii_whitespace() {
                data.push(
                    field
                        .parse::<f64>()
                        .map_err(|_| Error::parse(at(i), format!("bad value `{field}`")))?,
                );
            }
            if data.len() - before != d {
                return Err(Error::parse(at(i), format!("expected {d} values")));
            }
        }
        TransformMatrix::new(Matrix::new(d, d, data)?, subspaces, source)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_file_string()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TransformMatrix::parse(&text, &path.display().to_string())
    }
}
