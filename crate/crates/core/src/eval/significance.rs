//! Comparing two correlation coefficients through the Fisher z-transform.

use crate::error::{Error, Result};

pub const DEFAULT_SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZTest {
    pub z: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub significant: bool,
}

/// Two-sided z-test on `atanh(τ1) − atanh(τ2)`, each side with variance
/// `1/(n − 3)`. This treats τ like Pearson's r; the result is an
/// approximation for rank correlations.
pub fn fisher_z_compare(tau1: f64, n1: usize, tau2: f64, n2: usize, alpha: f64) -> Result<ZTest> {
    if n1 < 4 || n2 < 4 {
        return Err(Error::DegenerateInput(format!(
            "sample sizes must be at least 4, got {n1} and {n2}"
        )));
    }
    for t in [tau1, tau2] {
        if t.is_nan() || t.abs() >= 1.0 {
            return Err(Error::DegenerateInput(format!(
                "correlation {t} has no finite z-transform"
            )));
        }
    }
    let se = (1.0 / (n1 - 3) as f64 + 1.0 / (n2 - 3) as f64).sqrt();
    let z = (tau1.atanh() - tau2.atanh()) / se;
    // 2·(1 − Φ(|z|)) = erfc(|z|/√2)
    let p_value = libm::erfc(z.abs() / std::f64::consts::SQRT_2);
    Ok(ZTest {
        z,
        p_value,
        significant: p_value < alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples() {
        let t = fisher_z_compare(0.6, 100, 0.6, 100, 0.05).unwrap();
        assert_eq!(t.z, 0.0);
        assert_eq!(t.p_value, 1.0);
        assert!(!t.significant);
    }

    #[test]
    fn large_gap_on_large_samples() {
        let t = fisher_z_compare(0.654, 985, 0.508, 985, 0.05).unwrap();
        assert!(t.significant);
        assert!(t.z > 4.0);
    }

    #[test]
    fn small_samples() {
        let t = fisher_z_compare(0.60, 10, 0.55, 10, 0.05).unwrap();
        let expect = (0.5 * (1.6f64 / 0.4).ln() - 0.5 * (1.55f64 / 0.45).ln()) / (2.0f64 / 7.0).sqrt();
        assert!((t.z - expect).abs() < 1e-12);
        assert!(!t.significant);
    }

    #[test]
    fn degenerate() {
        assert!(matches!(fisher_z_compare(1.0, 10, 0.5, 10, 0.05), Err(Error::DegenerateInput(_))));
        assert!(matches!(fisher_z_compare(0.5, 3, 0.5, 10, 0.05), Err(Error::DegenerateInput(_))));
    }
}
