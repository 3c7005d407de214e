use serde::{Deserialize, Serialize};

use super::{EigResult, Ritz, RunHistory};
use crate::error::{Error, Result};
use crate::linalg::{qr_orthonormalize, Block, SparseSymMatrix};

/// Textbook subspace iteration for the `m` eigenvalues of largest magnitude.
///
/// Residuals are `||A x - lambda x|| / ||x||` (unscaled). The returned pairs
/// are sorted by decreasing value; the history records the Ritz values of
/// every iteration.
pub fn psi_simple(
    a: &SparseSymMatrix,
    y: &Block,
    max_it: usize,
    tol: f64,
) -> Result<(EigResult, RunHistory)> {
    let n = a.n();
    if y.nrows() != n {
        return Err(Error::DimMismatch { expected: n, got: y.nrows() });
    }
    let mut hist = RunHistory {
        rho: 1.0,
        ..RunHistory::default()
    };
    let mut y = qr_orthonormalize(y)?;
    let mut out = EigResult::empty(n);
    for _ in 1..=max_it {
        let ritz = Ritz::new(a, y)?;
        let mut vecs = Vec::with_capacity(ritz.len());
        let mut res = Vec::with_capacity(ritz.len());
        for i in 0..ritz.len() {
            let (x, r) = ritz.pair(i);
            vecs.push(x);
            res.push(r);
        }
        let tau = res.iter().copied().fold(0.0, f64::max);
        out = EigResult {
            values: ritz.values.clone(),
            vectors: Block::from_columns(n, &vecs)?,
            residuals: res,
        };
        hist.err_hist.push(tau);
        hist.num_ay_hist.push(1);
        hist.ritz_hist.push(ritz.values.clone());
        if tau < tol {
            hist.converged = true;
            *hist.num_ay_hist.last_mut().expect("pushed above") = 0;
            break;
        }
        y = qr_orthonormalize(&ritz.ay)?;
    }
    out.sort_decreasing();
    out.normalize_vectors();
    Ok((out, hist))
}

/// Parameters of the interval-restricted power subspace iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiParams {
    pub num_cmp: usize,
    pub num_eigm: usize,
    pub min_eig: f64,
    pub a: f64,
    pub b: f64,
    /// Residual scale factor.
    pub rho: f64,
    pub max_it: usize,
    /// Acceptance threshold on scaled residuals.
    pub tol: f64,
}

/// Result of one call to [`psi_restricted`].
#[derive(Clone, Debug)]
pub struct PsiOutcome {
    /// Accepted pairs, decreasing; residuals are scaled by `rho`.
    pub result: EigResult,
    /// Iteration block to hand back to the projector.
    pub y: Block,
    /// Iteration count as reported by the algorithm (one less after a
    /// rollback); `iter - 1` shifted products were kept.
    pub iter: usize,
    pub eigm_hist: Vec<f64>,
    /// Ritz values (ascending) of the first Rayleigh-Ritz step.
    pub first_ritz: Vec<f64>,
    /// Every shift used, in order.
    pub shifts: Vec<f64>,
}

struct Snapshot {
    result: EigResult,
    eigm_hist: Vec<f64>,
    y: Block,
    err: f64,
    count: i64,
}

/// Shifted power subspace iteration that extracts the largest eigenvalues
/// inside `(a, b)`, with rollback when the iterate drifts out of the target
/// eigenspace.
///
/// Each sweep greedily walks the Ritz values from the largest down, counting
/// in-interval hits and accepting those among the first `num_cmp` hits whose
/// scaled residual is below `tol`. The loop stops when
/// * the accepted count equals the previous one and is zero,
/// * the accepted count equals the previous one but the worst residual grew
///   (roll back to the previous iterate),
/// * the accepted count dropped (roll back),
/// * no Ritz value lies in `(a, b)`, or `max_it == 1`.
///
/// Otherwise the shift is `(eigm + a1) / 2` with `eigm` the mean of the last
/// `num_eigm` estimates of the smallest in-interval Ritz value and
/// `a1 = min(max(a, min_eig), b)`, and `Y <- qr((A - sigma I) Y)`.
pub fn psi_restricted(
    a: &SparseSymMatrix,
    y: &Block,
    p: &PsiParams,
    eigm_hist: Vec<f64>,
) -> Result<PsiOutcome> {
    let n = a.n();
    if y.nrows() != n {
        return Err(Error::DimMismatch { expected: n, got: y.nrows() });
    }
    if !(p.rho > 0.0) {
        return Err(Error::Config(format!("scale factor must be positive, got {}", p.rho)));
    }
    if p.max_it < 1 || p.num_eigm < 1 || p.num_cmp < 1 {
        return Err(Error::Config("max_it, num_eigm and num_cmp must be at least 1".into()));
    }
    let mut eigm_hist = eigm_hist;
    let mut count0: i64 = -1;
    let a1 = p.a.max(p.min_eig).min(p.b);
    let mut y = qr_orthonormalize(y)?;
    let mut snapshot: Option<Snapshot> = None;
    let mut first_ritz = Vec::new();
    let mut shifts = Vec::new();
    let mut result = EigResult::empty(n);
    let mut iter_out = 0;

    for iter in 1..=p.max_it {
        iter_out = iter;
        let ritz = Ritz::new(a, y.clone())?;
        if iter == 1 {
            first_ritz = ritz.values.clone();
        }
        let m = ritz.len();
        let mut lam = ritz.values.clone();
        let mut values = Vec::new();
        let mut vectors = Vec::new();
        let mut residuals = Vec::new();
        let mut err = -1.0f64;
        let mut count: i64 = 0;
        let mut count1 = 0usize;
        let mut eigm = f64::INFINITY;

        for _ in 0..m {
            // first maximal entry wins ties
            let mut i0 = 0;
            for (i, &v) in lam.iter().enumerate().skip(1) {
                if v > lam[i0] {
                    i0 = i;
                }
            }
            let li = lam[i0];
            if li > p.a && li < p.b {
                count1 += 1;
                if count1 <= p.num_cmp {
                    let (x, r) = ritz.pair(i0);
                    let erri = r / p.rho;
                    if erri < p.tol {
                        count += 1;
                        values.push(li);
                        vectors.push(x);
                        residuals.push(erri);
                        err = err.max(erri);
                    }
                }
                eigm = eigm.min(li);
            }
            lam[i0] = p.a - 1.0;
        }
        let current = EigResult {
            values,
            vectors: Block::from_columns(n, &vectors)?,
            residuals,
        };

        if count == count0 {
            if count == 0 {
                result = current;
                break;
            }
            let snap = snapshot.as_ref().expect("count0 >= 0 implies a snapshot");
            if err > snap.err {
                let snap = snapshot.take().expect("checked");
                result = snap.result;
                eigm_hist = snap.eigm_hist;
                y = snap.y;
                iter_out = iter - 1;
                break;
            }
        }
        if count < count0 {
            let snap = snapshot.take().expect("count0 >= 0 implies a snapshot");
            result = snap.result;
            eigm_hist = snap.eigm_hist;
            y = snap.y;
            iter_out = iter - 1;
            break;
        }
        if count1 == 0 || p.max_it == 1 {
            result = current;
            break;
        }

        snapshot = Some(Snapshot {
            result: current.clone(),
            eigm_hist: eigm_hist.clone(),
            y: y.clone(),
            err,
            count,
        });
        count0 = count;
        result = current;

        eigm_hist.push(eigm);
        if eigm_hist.len() > p.num_eigm {
            eigm_hist.remove(0);
        }
        let eigm_avg = eigm_hist.iter().sum::<f64>() / eigm_hist.len() as f64;
        let sigma = 0.5 * (eigm_avg + a1);
        shifts.push(sigma);

        let mut next = ritz.ay;
        for j in 0..next.ncols() {
            let yc = ritz.y.col(j);
            for (v, yv) in next.col_mut(j).iter_mut().zip(yc) {
                *v -= sigma * yv;
            }
        }
        y = qr_orthonormalize(&next)?;
    }
    debug_assert!(snapshot.as_ref().map_or(true, |s| s.count == count0));

    Ok(PsiOutcome {
        result,
        y,
        iter: iter_out,
        eigm_hist,
        first_ritz,
        shifts,
    })
}
