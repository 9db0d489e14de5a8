use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, Matrix};
use crate::linalg::svd::jacobi_svd;

/// Householder QR of a tall matrix, keeping the reflectors so `Qᵀ` can be
/// applied to right-hand sides later.
pub(crate) struct HouseholderQr {
    r: Matrix,
    reflectors: Vec<Vec<f64>>,
}

impl HouseholderQr {
    pub fn new(a: &Matrix) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if m < n {
            return Err(Error::InvalidMatrix(format!(
                "QR needs rows >= cols, got {m}x{n}"
            )));
        }
        let mut work = a.clone();
        let mut reflectors = Vec::with_capacity(n);
        for k in 0..n {
            let mut x: Vec<f64> = (k..m).map(|r| work[(r, k)]).collect();
            let alpha = dot(&x, &x).sqrt();
            if alpha == 0.0 {
                reflectors.push(vec![0.0; m - k]);
                continue;
            }
            x[0] += if x[0] >= 0.0 { alpha } else { -alpha };
            let vn = dot(&x, &x).sqrt();
            x.iter_mut().for_each(|xi| *xi /= vn);
            for c in k..n {
                let proj: f64 = (k..m).map(|r| x[r - k] * work[(r, c)]).sum();
                for r in k..m {
                    work[(r, c)] -= 2.0 * x[r - k] * proj;
                }
            }
            reflectors.push(x);
        }
        let mut r = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                r[(i, j)] = work[(i, j)];
            }
        }
        Ok(HouseholderQr { r, reflectors })
    }

    /// The upper-triangular `n x n` factor.
    pub fn r(&self) -> &Matrix {
        &self.r
    }

    /// First `n` entries of `Qᵀ b`.
    pub fn apply_qt(&self, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        for (k, v) in self.reflectors.iter().enumerate() {
            let proj: f64 = v.iter().zip(&y[k..]).map(|(a, b)| a * b).sum();
            for (yi, vi) in y[k..].iter_mut().zip(v) {
                *yi -= 2.0 * vi * proj;
            }
        }
        y.truncate(self.r.cols());
        y
    }
}

/// Minimum-norm least-squares solution of `a x ≈ b` for tall `a`.
///
/// Returns the solution and whether `a` was numerically rank deficient.
pub fn lstsq(a: &Matrix, b: &[f64]) -> Result<(Vec<f64>, bool)> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    let qr = HouseholderQr::new(a)?;
    let qtb = qr.apply_qt(b);
    let svd = jacobi_svd(qr.r());
    let n = a.cols();
    let cutoff = svd.s[0] * 1e-10;
    let mut x = vec![0.0; n];
    let mut deficient = false;
    for k in 0..n {
        if svd.s[k] <= cutoff || svd.s[k] == 0.0 {
            deficient = true;
            continue;
        }
        let coef = (0..n).map(|r| svd.u[(r, k)] * qtb[r]).sum::<f64>() / svd.s[k];
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += coef * svd.v[(i, k)];
        }
    }
    Ok((x, deficient))
}
