//! Dense linear algebra: matrices, SVD, least squares and orthogonality.

mod matrix;
mod orthogonal;
mod qr;
mod svd;

pub use matrix::{dot, norm, Matrix};
pub use orthogonal::{is_orthogonal, nearest_orthogonal, random_orthogonal, RANK_TOLERANCE};
pub use qr::lstsq;
pub use svd::{svd, SvdResult};

pub(crate) use qr::HouseholderQr;
pub(crate) use svd::jacobi_svd;
