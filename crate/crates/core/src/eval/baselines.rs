//! Comparison subspaces: principal components and leading coordinates.

use crate::embeddings::EmbeddingSet;
use crate::error::{Error, Result};
use crate::linalg::{jacobi_svd, HouseholderQr, Matrix};

fn check_sub(d: usize, d_sub: usize) -> Result<()> {
    if d_sub == 0 || d_sub > d {
        return Err(Error::InvalidDimension(format!(
            "subspace size {d_sub} outside 1..={d}"
        )));
    }
    Ok(())
}

/// Principal directions with the variance each explains, in descending order.
#[derive(Debug, Clone)]
pub struct Pca {
    /// `d x d`, one direction per row.
    pub components: Matrix,
    pub variances: Vec<f64>,
}

/// PCA of the mean-centred embedding matrix through its SVD (computed as
/// QR followed by the SVD of the triangular factor).
pub fn pca(e: &EmbeddingSet) -> Result<Pca> {
    let (n, d) = (e.len(), e.dim());
    if n <= d {
        return Err(Error::InvalidDimension(format!(
            "PCA needs more words than dimensions ({n} <= {d})"
        )));
    }
    let mut mean = vec![0.0; d];
    for (_, v) in e.iter() {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centred: Vec<f64> = e
        .iter()
        .flat_map(|(_, v)| v.iter().zip(&mean).map(|(x, m)| x - m).collect::<Vec<_>>())
        .collect();
    let x = Matrix::new(n, d, centred)?;
    let qr = HouseholderQr::new(&x)?;
    let svd = jacobi_svd(qr.r());
    Ok(Pca {
        components: svd.v.transpose(),
        variances: svd.s.iter().map(|s| s * s / (n - 1) as f64).collect(),
    })
}

/// The top `d_sub` principal directions as a `d_sub x d` projection.
pub fn pca_subspace(e: &EmbeddingSet, d_sub: usize) -> Result<Matrix> {
    check_sub(e.dim(), d_sub)?;
    let p = pca(e)?;
    let data = p.components.as_slice()[..d_sub * e.dim()].to_vec();
    Matrix::new(d_sub, e.dim(), data)
}

/// Selector of the first `d_sub` original coordinates.
pub fn random_subspace(d: usize, d_sub: usize) -> Result<Matrix> {
    check_sub(d, d_sub)?;
    let mut m = Matrix::zeros(d_sub, d);
    for i in 0..d_sub {
        m[(i, i)] = 1.0;
    }
    Ok(m)
}
