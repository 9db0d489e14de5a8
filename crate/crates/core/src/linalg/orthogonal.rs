use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;
use crate::linalg::svd::svd;

/// Smallest singular value (relative to `max(1, σ_max)`) accepted by
/// [`nearest_orthogonal`].
pub const RANK_TOLERANCE: f64 = 1e-12;

/// The orthogonal matrix closest to `m` in Frobenius and spectral norm,
/// `U·Vᵀ` from the SVD `m = U·S·Vᵀ`.
///
/// A (numerically) singular input has no unique answer and is reported as
/// [`Error::DegenerateMatrix`].
pub fn nearest_orthogonal(m: &Matrix) -> Result<Matrix> {
    let f = svd(m)?;
    let smallest = *f.s.last().expect("non-empty");
    if smallest <= RANK_TOLERANCE * f.s[0].max(1.0) {
        return Err(Error::DegenerateMatrix(format!(
            "smallest singular value {smallest:e} of a {0}x{0} matrix",
            m.rows()
        )));
    }
    f.u.matmul(&f.v.transpose())
}

/// Seeded random orthogonal matrix: the orthogonal polar factor of a matrix
/// with independent standard normal entries.
pub fn random_orthogonal(d: usize, seed: u64) -> Result<Matrix> {
    if d == 0 {
        return Err(Error::InvalidDimension("dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // retry in the measure-zero event of a singular draw
    loop {
        let data: Vec<f64> = (0..d * d).map(|_| StandardNormal.sample(&mut rng)).collect();
        match nearest_orthogonal(&Matrix::new(d, d, data)?) {
            Err(Error::DegenerateMatrix(_)) => continue,
            other => return other,
        }
    }
}

/// `‖mᵀm − I‖_F ≤ tol` for a square `m`; non-square input is never orthogonal.
pub fn is_orthogonal(m: &Matrix, tol: f64) -> bool {
    m.is_square() && m.orthogonality_error() <= tol
}
