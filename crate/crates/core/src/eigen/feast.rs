use serde::{Deserialize, Serialize};

use super::{rho_seed, EigResult, Ritz, RunHistory};
use crate::diagnostics::scale_factor;
use crate::error::{Error, Result};
use crate::filter::{apply_filter, apply_filter_pair, make_pair_contours, make_single_contour, IntervalSpec};
use crate::linalg::{dense_gen_sym_eig, gauss_legendre, qr_orthonormalize, Block, SparseSymMatrix};
use crate::solver::SolverConfig;

/// Outer-loop settings of the FEAST-type drivers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterOptions {
    pub max_it: usize,
    /// Stop once every in-interval pair has scaled residual below this.
    pub tol: f64,
    pub q: usize,
    /// Seed for the scale-factor probe.
    pub seed: u64,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions {
            max_it: 50,
            tol: 1e-10,
            q: 8,
            seed: 0,
        }
    }
}

/// In-interval pairs of one Rayleigh-Ritz step with their scaled residuals.
struct Extracted {
    result: EigResult,
    tau: f64,
}

fn extract_in_interval(
    ritz_values: &[f64],
    vectors: &Block,
    residual_of: impl Fn(usize) -> f64,
    a_lo: f64,
    b_hi: f64,
) -> Extracted {
    let idx: Vec<usize> = (0..ritz_values.len())
        .filter(|&i| ritz_values[i] > a_lo && ritz_values[i] < b_hi)
        .collect();
    let residuals: Vec<f64> = idx.iter().map(|&i| residual_of(i)).collect();
    let tau = residuals.iter().copied().fold(-1.0, f64::max);
    let mut result = EigResult {
        values: idx.iter().map(|&i| ritz_values[i]).collect(),
        vectors: vectors.select_columns(&idx),
        residuals,
    };
    result.sort_decreasing();
    Extracted { result, tau }
}

fn column_residual(a: &SparseSymMatrix, x: &[f64], lam: f64, rho: f64) -> f64 {
    let mut r = a.spmv(x).expect("dimension checked by caller");
    for (ri, xi) in r.iter_mut().zip(x) {
        *ri -= lam * xi;
    }
    crate::linalg::norm2(&r) / (rho * crate::linalg::norm2(x).max(f64::MIN_POSITIVE))
}

/// Classical FEAST with a single circle over `(a_lo, b_hi)` and the
/// generalized Rayleigh-Ritz step on `(Z^T A Z, Z^T Z)`.
///
/// The block width must be at least the number of eigenvalues in the
/// interval for the iteration to converge; this is not checked. When the
/// Gram matrix is not numerically SPD, `Z` is re-orthonormalized and the
/// step is retried once as a standard problem.
pub fn feast(
    a: &SparseSymMatrix,
    y: &Block,
    a_lo: f64,
    b_hi: f64,
    opts: &IterOptions,
    solver: &SolverConfig,
) -> Result<(EigResult, RunHistory)> {
    let n = a.n();
    if y.nrows() != n {
        return Err(Error::DimMismatch { expected: n, got: y.nrows() });
    }
    let contour = make_single_contour(a_lo, b_hi, gauss_legendre(opts.q)?)?;
    let rho = scale_factor(a, rho_seed(opts.seed));
    let mut hist = RunHistory {
        rho,
        ..RunHistory::default()
    };
    let mut y = y.clone();
    let mut best = EigResult::empty(n);
    let mut best_tau = f64::INFINITY;

    for iter in 1..=opts.max_it {
        let (z, st) = apply_filter(a, &y, &contour, solver)?;
        hist.inner.merge(&st);

        let az = a.apply_block(&z)?;
        let mut ahat = z.t_matmul(&az);
        let mut bhat = z.t_matmul(&z);
        ahat.symmetrize();
        bhat.symmetrize();
        let (values, x) = match dense_gen_sym_eig(&ahat, &bhat) {
            Ok(eig) => (eig.values, z.matmul(&eig.vectors)),
            Err(Error::IllConditionedGram) => {
                log::warn!("iteration {iter}: Gram matrix not SPD, re-orthonormalizing");
                let q = qr_orthonormalize(&z).map_err(|_| Error::GramFailure)?;
                let ritz = Ritz::new(a, q).map_err(|_| Error::GramFailure)?;
                (ritz.values.clone(), ritz.vectors())
            }
            Err(e) => return Err(e),
        };

        let ex = extract_in_interval(
            &values,
            &x,
            |i| column_residual(a, x.col(i), values[i], rho),
            a_lo,
            b_hi,
        );
        hist.err_hist.push(ex.tau);
        hist.num_ay_hist.push(0);
        hist.ritz_hist.push(values);
        y = x;

        if ex.tau >= 0.0 && ex.tau < best_tau {
            best_tau = ex.tau;
            best = ex.result.clone();
        }
        if ex.tau < opts.tol {
            // also covers the empty case, tau = -1
            hist.converged = true;
            best = ex.result;
            break;
        }
    }
    best.normalize_vectors();
    Ok((best, hist))
}

/// FEAST with the two-circle projector and QR re-orthonormalization.
pub fn feast2(
    a: &SparseSymMatrix,
    y: &Block,
    spec: &IntervalSpec,
    opts: &IterOptions,
    solver: &SolverConfig,
) -> Result<(EigResult, RunHistory)> {
    let n = a.n();
    if y.nrows() != n {
        return Err(Error::DimMismatch { expected: n, got: y.nrows() });
    }
    let (left, right) = make_pair_contours(spec, gauss_legendre(opts.q)?)?;
    let rho = scale_factor(a, rho_seed(opts.seed));
    let mut hist = RunHistory {
        rho,
        ..RunHistory::default()
    };
    let mut y = y.clone();
    let mut best = EigResult::empty(n);
    let mut best_tau = f64::INFINITY;

    for iter in 1..=opts.max_it {
        let (z, st) = apply_filter_pair(a, &y, &left, &right, solver)?;
        hist.inner.merge(&st);
        let q = qr_orthonormalize(&z).inspect_err(|e| {
            log::error!("feast2 iteration {iter}: {e}");
        })?;
        y = q.clone();
        let ritz = Ritz::new(a, q)?;
        let x = ritz.vectors();
        let ex = extract_in_interval(
            &ritz.values,
            &x,
            |i| ritz.pair(i).1 / rho,
            spec.a,
            spec.b,
        );
        hist.err_hist.push(ex.tau);
        hist.num_ay_hist.push(0);
        hist.ritz_hist.push(ritz.values.clone());

        if ex.tau >= 0.0 && ex.tau < best_tau {
            best_tau = ex.tau;
            best = ex.result.clone();
        }
        if ex.tau < opts.tol {
            hist.converged = true;
            best = ex.result;
            break;
        }
    }
    best.normalize_vectors();
    Ok((best, hist))
}
