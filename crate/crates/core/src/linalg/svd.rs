//! One-sided (Hestenes) Jacobi singular value decomposition.
//!
//! Column pairs of a working copy of the input are rotated until they are
//! mutually orthogonal; the accumulated rotations form `V`, the column
//! norms are the singular values and the normalized columns form `U`.
//! Accuracy is close to machine precision for the small dense matrices
//! this crate works with (a few hundred rows at most).

use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, Matrix};

const MAX_SWEEPS: usize = 80;

/// `m = u · diag(s) · vᵀ` with `s` sorted in descending order.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

impl SvdResult {
    /// `u · diag(s) · vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for r in 0..us.rows() {
            for (c, s) in self.s.iter().enumerate() {
                us[(r, c)] *= s;
            }
        }
        us.matmul(&self.v.transpose()).expect("conformable factors")
    }
}

/// Singular value decomposition of a square matrix.
pub fn svd(m: &Matrix) -> Result<SvdResult> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "svd expects a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::InvalidMatrix("non-finite entry".into()));
    }
    Ok(jacobi_svd(m))
}

/// Thin SVD of a matrix with `rows >= cols`; `u` is `rows x cols`.
pub(crate) fn jacobi_svd(a: &Matrix) -> SvdResult {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);

    // column-major working storage
    let mut w: Vec<Vec<f64>> = (0..n).map(|c| a.column(c)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|c| {
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            e
        })
        .collect();

    let tol = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = w.iter().map(|col| dot(col, col).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let s_max = norms[order[0]];
    let cutoff = s_max * f64::EPSILON * (m.max(n) as f64);

    let mut u_cols: Vec<Option<Vec<f64>>> = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut v_out = Matrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        s.push(norms[j]);
        for r in 0..n {
            v_out[(r, k)] = v[j][r];
        }
        if norms[j] > cutoff && norms[j] > 0.0 {
            u_cols.push(Some(w[j].iter().map(|x| x / norms[j]).collect()));
        } else {
            u_cols.push(None);
        }
    }
    let u_cols = complete_basis(u_cols, m);

    let mut u = Matrix::zeros(m, n);
    for (c, col) in u_cols.iter().enumerate() {
        for r in 0..m {
            u[(r, c)] = col[r];
        }
    }
    SvdResult { u, s, v: v_out }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Fills missing columns (numerically zero singular values) with unit
/// vectors orthogonal to every other column, via Gram-Schmidt applied twice
/// to standard basis candidates.
fn complete_basis(cols: Vec<Option<Vec<f64>>>, m: usize) -> Vec<Vec<f64>> {
    if cols.iter().all(Option::is_some) {
        return cols.into_iter().map(Option::unwrap).collect();
    }
    let mut basis: Vec<Vec<f64>> = cols.iter().flatten().cloned().collect();
    let mut candidates = 0..m;
    let mut out = Vec::with_capacity(cols.len());
    for col in cols {
        match col {
            Some(c) => out.push(c),
            None => loop {
                let e = candidates.next().expect("basis completion exhausted");
                let mut x = vec![0.0; m];
                x[e] = 1.0;
                for _ in 0..2 {
                    for b in &basis {
                        let proj = dot(&x, b);
                        for (xi, bi) in x.iter_mut().zip(b) {
                            *xi -= proj * bi;
                        }
                    }
                }
                let nrm = dot(&x, &x).sqrt();
                if nrm > 1e-8 {
                    x.iter_mut().for_each(|xi| *xi /= nrm);
                    basis.push(x.clone());
                    out.push(x);
                    break;
                }
            },
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(m: &Matrix) -> SvdResult {
        let r = svd(m).unwrap();
        let err = m.sub(&r.reconstruct()).unwrap().frobenius_norm();
        assert!(err <= 1e-10 * m.frobenius_norm().max(1.0), "reconstruction {err}");
        assert!(r.u.orthogonality_error() <= 1e-10);
        assert!(r.v.orthogonality_error() <= 1e-10);
        assert!(r.s.windows(2).all(|p| p[0] >= p[1]));
        assert!(r.s.iter().all(|&x| x >= 0.0));
        r
    }

    #[test]
    fn identity() {
        let r = check(&Matrix::identity(3));
        assert_eq!(r.s, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal() {
        let m = Matrix::from_diagonal(&[2.0, 3.0]);
        let r = check(&m);
        assert_eq!(r.s, vec![3.0, 2.0]);
        for f in [&r.u, &r.v] {
            assert_eq!(f[(0, 0)], 0.0);
            assert_eq!(f[(1, 1)], 0.0);
            assert_eq!(f[(0, 1)].abs(), 1.0);
        }
    }

    #[test]
    fn seeded_random_5x5() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<f64> = (0..25).map(|_| rng.random_range(-1.0..1.0)).collect();
        check(&Matrix::new(5, 5, data).unwrap());
    }

    #[test]
    fn rank_deficient_still_factors() {
        let m = Matrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let r = check(&m);
        assert!(r.s[1] < 1e-12 && r.s[2] < 1e-12);
        check(&Matrix::zeros(4, 4));
    }

    #[test]
    fn rejects_non_square() {
        let m = Matrix::zeros(2, 3);
        assert!(matches!(svd(&m), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn tall_thin() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = Matrix::new(10, 4, data).unwrap();
        let r = jacobi_svd(&m);
        assert_eq!((r.u.rows(), r.u.cols()), (10, 4));
        assert!(m.sub(&r.reconstruct()).unwrap().frobenius_norm() < 1e-12);
        assert!(r.u.orthogonality_error() < 1e-12);
    }
}
