//! Subspace-iteration drivers: FEAST, two-circle FEAST, plain and
//! interval-restricted power subspace iteration, the combined F2P method and
//! the sliding-window sweep over an interval.

mod f2p;
mod feast;
mod psi;
mod sweep;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::FilterStats;
use crate::linalg::{dense_sym_eig, norm2, Block, SparseSymMatrix};

pub use f2p::{f2p, f2p_single_circle};
pub use feast::{feast, feast2, IterOptions};
pub use psi::{psi_restricted, psi_simple, PsiOutcome, PsiParams};
pub use sweep::{sweep_interval, SweepOutcome};

/// Computed eigenpairs, eigenvalues in decreasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct EigResult {
    pub values: Vec<f64>,
    pub vectors: Block,
    /// Relative residuals `||A x - lambda x|| / (rho ||x||)`.
    pub residuals: Vec<f64>,
}

impl EigResult {
    pub fn empty(n: usize) -> Self {
        EigResult {
            values: Vec::new(),
            vectors: Block::zeros(n, 0),
            residuals: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_residual(&self) -> Option<f64> {
        self.residuals.iter().copied().reduce(f64::max)
    }

    /// Keeps the first `k` pairs.
    pub fn truncate(&mut self, k: usize) {
        if k >= self.len() {
            return;
        }
        let idx: Vec<usize> = (0..k).collect();
        self.values.truncate(k);
        self.residuals.truncate(k);
        self.vectors = self.vectors.select_columns(&idx);
    }

    /// Sorts pairs by decreasing eigenvalue; equal values keep their order.
    pub(crate) fn sort_decreasing(&mut self) {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&i, &j| self.values[j].total_cmp(&self.values[i]));
        self.values = idx.iter().map(|&i| self.values[i]).collect();
        self.residuals = idx.iter().map(|&i| self.residuals[i]).collect();
        self.vectors = self.vectors.select_columns(&idx);
    }

    /// Unit 2-norm columns with the largest-magnitude entry positive.
    pub(crate) fn normalize_vectors(&mut self) {
        for j in 0..self.vectors.ncols() {
            let col = self.vectors.col_mut(j);
            let nrm = norm2(col);
            if nrm == 0.0 {
                continue;
            }
            let mut imax = 0;
            for (i, v) in col.iter().enumerate() {
                if v.abs() > col[imax].abs() {
                    imax = i;
                }
            }
            let s = if col[imax] < 0.0 { -1.0 / nrm } else { 1.0 / nrm };
            col.iter_mut().for_each(|v| *v *= s);
        }
    }
}

/// Per-outer-iteration bookkeeping of a driver run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunHistory {
    /// Maximum residual of the reported pairs per iteration; `-1` when no
    /// pair qualified.
    pub err_hist: Vec<f64>,
    /// Number of `(A - sigma I) Y` products per iteration.
    pub num_ay_hist: Vec<usize>,
    /// Sliding window of recent m-th largest in-interval Ritz values.
    pub eigm_hist: Vec<f64>,
    /// Ritz values (ascending) of the first Rayleigh-Ritz step of each
    /// iteration.
    pub ritz_hist: Vec<Vec<f64>>,
    pub inner: FilterStats,
    pub converged: bool,
    /// Scale factor used for residuals.
    pub rho: f64,
}

impl RunHistory {
    pub fn iterations(&self) -> usize {
        self.err_hist.len()
    }
}

/// Inputs of the F2P driver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct F2PConfig {
    /// Block width.
    pub m: usize,
    /// Largest in-interval pairs examined per power-iteration sweep.
    pub num_cmp: usize,
    /// Pairs returned.
    pub num_out: usize,
    /// Length of the shift-estimate window.
    pub num_eigm: usize,
    /// Lower estimate of the spectrum; `-inf` means "use the interval's left
    /// end".
    pub min_eig: f64,
    pub max_it: usize,
    pub sub_max_it: usize,
    pub sub_tol: f64,
    /// Quadrature order of each circle.
    pub q: usize,
    pub seed: u64,
}

impl Default for F2PConfig {
    fn default() -> Self {
        F2PConfig {
            m: 20,
            num_cmp: 10,
            num_out: 10,
            num_eigm: 5,
            min_eig: f64::NEG_INFINITY,
            max_it: 50,
            sub_max_it: 100,
            sub_tol: 1e-1,
            q: 8,
            seed: 0,
        }
    }
}

impl F2PConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.num_out < 1 || self.num_out > self.num_cmp || self.num_cmp > self.m {
            return bad(format!(
                "need 1 <= num_out ({}) <= num_cmp ({}) <= m ({})",
                self.num_out, self.num_cmp, self.m
            ));
        }
        if self.max_it < 1 || self.sub_max_it < 1 {
            return bad("max_it and sub_max_it must be at least 1".into());
        }
        if self.num_eigm < 1 {
            return bad("num_eigm must be at least 1".into());
        }
        if !(self.sub_tol > 0.0) {
            return bad(format!("sub_tol must be positive, got {}", self.sub_tol));
        }
        if !(1..=crate::linalg::MAX_ORDER).contains(&self.q) {
            return Err(Error::InvalidOrder(self.q));
        }
        if self.min_eig.is_nan() {
            return bad("min_eig is NaN".into());
        }
        Ok(())
    }
}

/// Seed of the scale-factor probe vector, derived so it never coincides with
/// the block seed.
pub(crate) fn rho_seed(seed: u64) -> u64 {
    seed ^ 0xD1B5_4A32_D192_ED03
}

/// `n x m` block of iid standard normal entries from a ChaCha8 stream.
pub fn random_block(n: usize, m: usize, seed: u64) -> Result<Block> {
    if m > n {
        return Err(Error::DimMismatch { expected: n, got: m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n * m).map(|_| StandardNormal.sample(&mut rng)).collect();
    Block::from_col_major(n, m, data)
}

/// Rayleigh-Ritz data for an orthonormal basis `Y`.
pub(crate) struct Ritz {
    /// Ascending Ritz values.
    pub values: Vec<f64>,
    /// Eigenvectors of the projected matrix.
    pub small: Block,
    pub y: Block,
    pub ay: Block,
}

impl Ritz {
    pub fn new(a: &SparseSymMatrix, y: Block) -> Result<Self> {
        let ay = a.apply_block(&y)?;
        let mut ahat = y.t_matmul(&ay);
        ahat.symmetrize();
        let eig = dense_sym_eig(&ahat)?;
        Ok(Ritz {
            values: eig.values,
            small: eig.vectors,
            y,
            ay,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    fn combine(basis: &Block, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; basis.nrows()];
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                crate::linalg::axpy(c, basis.col(k), &mut out);
            }
        }
        out
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        Self::combine(&self.y, self.small.col(i))
    }

    /// Ritz vector and `||A x - lambda x|| / ||x||`.
    pub fn pair(&self, i: usize) -> (Vec<f64>, f64) {
        let x = self.vector(i);
        let mut r = Self::combine(&self.ay, self.small.col(i));
        let lam = self.values[i];
        for (ri, xi) in r.iter_mut().zip(&x) {
            *ri -= lam * xi;
        }
        let xn = norm2(&x);
        (x, norm2(&r) / xn.max(f64::MIN_POSITIVE))
    }

    /// All Ritz vectors as a block.
    pub fn vectors(&self) -> Block {
        self.y.matmul(&self.small)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_block_is_deterministic() {
        let a = random_block(50, 3, 7).unwrap();
        let b = random_block(50, 3, 7).unwrap();
        assert_eq!(a, b);
        let c = random_block(50, 3, 8).unwrap();
        assert_ne!(a[(0, 0)], c[(0, 0)]);
        assert!(matches!(random_block(2, 3, 0), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn config_validation() {
        let ok = F2PConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            F2PConfig { num_out: 0, ..ok.clone() },
            F2PConfig { num_out: 11, ..ok.clone() },
            F2PConfig { num_cmp: 21, ..ok.clone() },
            F2PConfig { max_it: 0, ..ok.clone() },
            F2PConfig { sub_max_it: 0, ..ok.clone() },
            F2PConfig { q: 0, ..ok.clone() },
            F2PConfig { sub_tol: 0.0, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn normalization_fixes_sign_and_norm() {
        let mut r = EigResult {
            values: vec![1.0],
            vectors: Block::from_columns(2, &[vec![1.0, -3.0]]).unwrap(),
            residuals: vec![0.0],
        };
        r.normalize_vectors();
        let c = r.vectors.col(0);
        assert!((norm2(c) - 1.0).abs() < 1e-15);
        assert!(c[1] > 0.0 && c[0] < 0.0);
    }
}
