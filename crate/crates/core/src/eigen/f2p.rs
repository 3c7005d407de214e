use super::psi::{psi_restricted, PsiParams};
use super::{random_block, rho_seed, EigResult, F2PConfig, RunHistory};
use crate::diagnostics::scale_factor;
use crate::error::Result;
use crate::filter::{
    apply_filter, make_pair_contours, make_single_contour, pair_contrast, Contour, FilterStats,
    IntervalSpec,
};
use crate::linalg::{gauss_legendre, Block, SparseSymMatrix};
use crate::solver::SolverConfig;

/// FEAST-power subspace iteration for the `num_out` largest eigenvalues in
/// `(spec.a, spec.b)`.
///
/// Every outer iteration corrects the block with the two-circle projector and
/// then runs [`psi_restricted`] on it. The pairs with the smallest worst-case
/// residual over all outer iterations are returned; the result is empty if no
/// iteration accepted a pair.
pub fn f2p(
    a: &SparseSymMatrix,
    cfg: &F2PConfig,
    spec: &IntervalSpec,
    solver: &SolverConfig,
) -> Result<(EigResult, RunHistory)> {
    cfg.validate()?;
    let (left, right) = make_pair_contours(spec, gauss_legendre(cfg.q)?)?;
    log::debug!(
        "two-circle contrast for ({}, {}) r={}: {:.3e}",
        spec.a,
        spec.b,
        spec.radius,
        pair_contrast(spec, &left, &right)
    );
    f2p_with_contours(a, cfg, spec.a, spec.b, &[left, right], solver)
}

/// [`f2p`] on a single circle through `a_lo` and `b_hi`. With
/// `sub_max_it = 1` this is the classical FEAST iteration with the
/// standard Rayleigh-Ritz step.
pub fn f2p_single_circle(
    a: &SparseSymMatrix,
    cfg: &F2PConfig,
    a_lo: f64,
    b_hi: f64,
    solver: &SolverConfig,
) -> Result<(EigResult, RunHistory)> {
    cfg.validate()?;
    let c = make_single_contour(a_lo, b_hi, gauss_legendre(cfg.q)?)?;
    f2p_with_contours(a, cfg, a_lo, b_hi, &[c], solver)
}

fn filter_chain(
    a: &SparseSymMatrix,
    y: &Block,
    contours: &[Contour],
    solver: &SolverConfig,
) -> Result<(Block, FilterStats)> {
    let mut stats = FilterStats::default();
    let mut z = y.clone();
    for c in contours {
        let (next, st) = apply_filter(a, &z, c, solver)?;
        stats.merge(&st);
        z = next;
    }
    Ok((z, stats))
}

fn f2p_with_contours(
    a: &SparseSymMatrix,
    cfg: &F2PConfig,
    a_lo: f64,
    b_hi: f64,
    contours: &[Contour],
    solver: &SolverConfig,
) -> Result<(EigResult, RunHistory)> {
    let n = a.n();
    let rho = scale_factor(a, rho_seed(cfg.seed));
    let params = PsiParams {
        num_cmp: cfg.num_cmp,
        num_eigm: cfg.num_eigm,
        min_eig: cfg.min_eig,
        a: a_lo,
        b: b_hi,
        rho,
        max_it: cfg.sub_max_it,
        tol: cfg.sub_tol,
    };

    let mut y = random_block(n, cfg.m, cfg.seed)?;
    let mut hist = RunHistory {
        rho,
        ..RunHistory::default()
    };
    let mut eigm_hist = Vec::new();
    let mut best = EigResult::empty(n);
    let mut err0 = f64::INFINITY;

    for iter in 1..=cfg.max_it {
        let (z, st) = filter_chain(a, &y, contours, solver)?;
        hist.inner.merge(&st);
        let out = psi_restricted(a, &z, &params, eigm_hist)?;
        y = out.y;
        eigm_hist = out.eigm_hist;
        hist.num_ay_hist.push(out.iter.saturating_sub(1));
        hist.ritz_hist.push(out.first_ritz);

        let mut found = out.result;
        let leng = cfg.num_out.min(found.len());
        let err = if leng > 0 {
            found.residuals[..leng].iter().copied().fold(f64::MIN, f64::max)
        } else {
            -1.0
        };
        hist.err_hist.push(err);
        log::debug!("f2p iteration {iter}: err {err:.3e}, {} shifted products", out.iter.saturating_sub(1));

        if err != -1.0 && err < err0 {
            found.truncate(leng);
            best = found;
            err0 = err;
        }
    }
    hist.eigm_hist = eigm_hist;
    hist.converged = !best.is_empty();
    best.normalize_vectors();
    Ok((best, hist))
}
