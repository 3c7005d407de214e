//! Residual scaling and accuracy metrics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::eigen::RunHistory;
use crate::error::{Error, Result};
use crate::linalg::SparseSymMatrix;

/// Randomized estimate `sqrt((A y)^T (A y) / n)` of the root mean square
/// eigenvalue, `y` standard normal. Falls back to 1 for the zero matrix.
pub fn scale_factor(a: &SparseSymMatrix, seed: u64) -> f64 {
    let n = a.n();
    if n == 0 {
        return 1.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let ay = a.spmv(&y).expect("probe has length n");
    let rho = (ay.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rho == 0.0 || !rho.is_finite() {
        log::warn!("scale factor is {rho}; using 1");
        return 1.0;
    }
    rho
}

/// Minimum over the non-sentinel entries; `-1` when every entry is `-1`.
pub fn tau_r(err_hist: &[f64]) -> f64 {
    err_hist
        .iter()
        .copied()
        .filter(|&e| e != -1.0)
        .reduce(f64::min)
        .unwrap_or(-1.0)
}

/// Maximum relative error over the first `min(len(computed), len(reference))`
/// entries, both lists decreasing and paired by position.
///
/// A zero reference value yields [`Error::DivisionByZeroRef`] carrying the
/// maximum absolute error instead.
pub fn tau_lambda(computed: &[f64], reference: &[f64]) -> Result<f64> {
    let leng = computed.len().min(reference.len());
    let mut rel = 0.0f64;
    let mut abs = 0.0f64;
    let mut zero_at = None;
    for i in 0..leng {
        let d = (computed[i] - reference[i]).abs();
        abs = abs.max(d);
        if reference[i] == 0.0 {
            zero_at.get_or_insert(i);
        } else {
            rel = rel.max(d / reference[i].abs());
        }
    }
    match zero_at {
        Some(index) => Err(Error::DivisionByZeroRef {
            index,
            abs_error: abs,
        }),
        None => Ok(rel),
    }
}

/// Summary figures of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tau_r: f64,
    /// Present only when a reference spectrum was supplied.
    pub tau_lambda: Option<f64>,
    /// Set when `tau_lambda` holds an absolute error because the reference
    /// contained zero.
    #[serde(default)]
    pub tau_lambda_absolute: bool,
    pub iter_max_inner: usize,
    pub num_ay_total: usize,
    pub eig_out: usize,
}

impl Metrics {
    pub fn from_run(hist: &RunHistory, computed: &[f64], reference: Option<&[f64]>) -> Self {
        let (tau_lambda, tau_lambda_absolute) = match reference {
            None => (None, false),
            Some(r) => match tau_lambda(computed, r) {
                Ok(v) => (Some(v), false),
                Err(Error::DivisionByZeroRef { abs_error, .. }) => (Some(abs_error), true),
                Err(_) => (None, false),
            },
        };
        Metrics {
            tau_r: tau_r(&hist.err_hist),
            tau_lambda,
            tau_lambda_absolute,
            iter_max_inner: hist.inner.max_iterations,
            num_ay_total: hist.num_ay_hist.iter().sum(),
            eig_out: computed.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_r_cases() {
        assert_eq!(tau_r(&[1e-3, 1e-7, 1e-5]), 1e-7);
        assert_eq!(tau_r(&[-1.0, -1.0]), -1.0);
        assert_eq!(tau_r(&[-1.0, 0.5, -1.0]), 0.5);
    }

    #[test]
    fn tau_lambda_cases() {
        assert_eq!(tau_lambda(&[3.0, 2.0], &[3.0, 2.0]).unwrap(), 0.0);
        let t = tau_lambda(&[2.002], &[2.0]).unwrap();
        assert!((t - 1e-3).abs() < 1e-15);
        // only the common prefix is compared
        assert_eq!(tau_lambda(&[5.0], &[5.0, 1.0]).unwrap(), 0.0);
        match tau_lambda(&[1.0, 0.1], &[1.0, 0.0]) {
            Err(Error::DivisionByZeroRef { index, abs_error }) => {
                assert_eq!(index, 1);
                assert!((abs_error - 0.1).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scale_factor_of_multiple_of_identity() {
        let n = 40;
        let a = SparseSymMatrix::from_diagonal(&vec![3.0; n]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rho = scale_factor(&a, 11);
        assert!((rho - 3.0 * ynorm / (n as f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn scale_factor_zero_matrix_falls_back() {
        let a = SparseSymMatrix::from_diagonal(&[0.0; 5]);
        assert_eq!(scale_factor(&a, 1), 1.0);
    }
}
