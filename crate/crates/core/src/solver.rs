//! BiCG for the complex shifted systems `(z I - A) x = b` with real
//! symmetric `A`.
//!
//! With the default shadow start `conj(b)` the shadow recurrence is the
//! entrywise conjugate of the primal one, because
//! `(conj(z) I - A) conj(v) = conj((z I - A) v)`. The solver exploits that
//! and performs a single operator application per iteration; an explicit
//! shadow vector (used after a breakdown) runs the general two-product
//! recurrence.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseSymMatrix;

/// Magnitude below which a BiCG inner product counts as a breakdown.
pub const BREAKDOWN_TOL: f64 = 1e-300;

/// Number of times a converged recurrence residual may fail the explicit
/// residual check before the solve is reported as not converged.
const MAX_RESIDUAL_REPLACEMENTS: usize = 3;

/// A complex shift `z = re + i im`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shift {
    pub re: f64,
    pub im: f64,
}

impl Shift {
    pub fn new(re: f64, im: f64) -> Self {
        Shift { re, im }
    }

    /// Quadrature pole `c + r e^{i pi t}` on the upper semicircle.
    pub fn on_circle(center: f64, radius: f64, t: f64) -> Self {
        let (s, c) = (PI * t).sin_cos();
        Shift {
            re: center + radius * c,
            im: radius * s,
        }
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn conj(self) -> Self {
        Shift {
            re: self.re,
            im: -self.im,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub final_relres: f64,
    pub converged: bool,
}

/// Inner solver settings shared by the filters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Relative residual target `||r|| / ||b||`.
    pub tol: f64,
    /// Iteration cap; `None` means `5 n`.
    pub max_iter: Option<usize>,
    /// Jacobi preconditioning with `diag(z - a_ii)`.
    pub diag_precond: bool,
    /// Dispatch the independent shifted systems of a filter on the rayon
    /// pool. Ignored without the `parallel` feature.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-10,
            max_iter: None,
            diag_precond: false,
            parallel: false,
        }
    }
}

impl SolverConfig {
    pub fn max_iter_for(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(5 * n.max(1))
    }
}

/// Plain BiCG from a zero initial guess with shadow start `conj(b)`.
pub fn bicg_shifted(
    a: &SparseSymMatrix,
    z: Shift,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<Complex64>, SolveStats)> {
    bicg_core(a, z, b, tol, max_iter, None, None)
}

/// Solves with the configured options; on breakdown, retries once with a
/// seeded perturbation of the shadow vector before surfacing the error.
pub fn solve_shifted(
    a: &SparseSymMatrix,
    z: Shift,
    b: &[Complex64],
    cfg: &SolverConfig,
    retry_seed: u64,
) -> Result<(Vec<Complex64>, SolveStats)> {
    let n = a.n();
    let max_iter = cfg.max_iter_for(n);
    let precond = cfg.diag_precond.then(|| {
        let zc = z.as_complex();
        a.diagonal()
            .into_iter()
            .map(|d| {
                let m = zc - d;
                if m.norm() > 0.0 {
                    m.inv()
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .collect::<Vec<_>>()
    });
    match bicg_core(a, z, b, cfg.tol, max_iter, precond.as_deref(), None) {
        Err(Error::Breakdown { iteration }) => {
            log::warn!("BiCG breakdown at iteration {iteration} (z = {z:?}); retrying with perturbed shadow");
            let mut rng = ChaCha8Rng::seed_from_u64(retry_seed);
            let bnorm = cnorm(b).max(f64::MIN_POSITIVE);
            let eps = 1e-3 * bnorm / (n.max(1) as f64).sqrt();
            let shadow: Vec<Complex64> = b
                .iter()
                .map(|v| {
                    let pr: f64 = StandardNormal.sample(&mut rng);
                    let pi: f64 = StandardNormal.sample(&mut rng);
                    v.conj() + Complex64::new(pr, pi) * eps
                })
                .collect();
            bicg_core(
                a,
                z,
                b,
                cfg.tol,
                max_iter,
                precond.as_deref(),
                Some(&shadow),
            )
        }
        other => other,
    }
}

#[inline]
fn cnorm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// `sum conj(x_i) y_i`
#[inline]
fn cdot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// `sum x_i y_i`, the conjugated-shadow form of [`cdot`].
#[inline]
fn bilinear(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn apply_precond(minv: Option<&[Complex64]>, r: &[Complex64], out: &mut [Complex64], conj: bool) {
    match minv {
        Some(d) if conj => {
            for ((o, ri), di) in out.iter_mut().zip(r).zip(d) {
                *o = di.conj() * ri;
            }
        }
        Some(d) => {
            for ((o, ri), di) in out.iter_mut().zip(r).zip(d) {
                *o = di * ri;
            }
        }
        None => out.copy_from_slice(r),
    }
}

fn true_residual(a: &SparseSymMatrix, z: Complex64, x: &[Complex64], b: &[Complex64], r: &mut [Complex64]) {
    a.shifted_apply_into(z, x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

struct Shadow {
    r: Vec<Complex64>,
    z: Vec<Complex64>,
    p: Vec<Complex64>,
    q: Vec<Complex64>,
}

fn bicg_core(
    a: &SparseSymMatrix,
    shift: Shift,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
    minv: Option<&[Complex64]>,
    shadow0: Option<&[Complex64]>,
) -> Result<(Vec<Complex64>, SolveStats)> {
    let n = a.n();
    if b.len() != n {
        return Err(Error::DimMismatch {
            expected: n,
            got: b.len(),
        });
    }
    if let Some(s) = shadow0 {
        if s.len() != n {
            return Err(Error::DimMismatch {
                expected: n,
                got: s.len(),
            });
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut x = vec![zero; n];
    let bnorm = cnorm(b);
    if bnorm == 0.0 {
        return Ok((
            x,
            SolveStats {
                iterations: 0,
                final_relres: 0.0,
                converged: true,
            },
        ));
    }
    let zc = shift.as_complex();
    let zbar = zc.conj();

    let mut r = b.to_vec();
    let mut zr = vec![zero; n];
    apply_precond(minv, &r, &mut zr, false);
    let mut p = zr.clone();
    let mut q = vec![zero; n];

    let mut shadow = shadow0.map(|s| {
        let mut zs = vec![zero; n];
        apply_precond(minv, s, &mut zs, true);
        Shadow {
            r: s.to_vec(),
            p: zs.clone(),
            z: zs,
            q: vec![zero; n],
        }
    });
    let rho_of = |shadow: &Option<Shadow>, r: &[Complex64], zr: &[Complex64]| match shadow {
        Some(s) => cdot(&s.r, zr),
        None => bilinear(r, zr),
    };
    let mut rho = rho_of(&shadow, &r, &zr);

    let mut best_x = x.clone();
    let mut best_res = 1.0;
    let mut replacements = 0;
    let mut scratch = vec![zero; n];

    for it in 1..=max_iter {
        if rho.norm() < BREAKDOWN_TOL {
            return Err(Error::Breakdown { iteration: it });
        }
        a.shifted_apply_into(zc, &p, &mut q);
        let sigma = match &mut shadow {
            Some(s) => {
                a.shifted_apply_into(zbar, &s.p, &mut s.q);
                cdot(&s.p, &q)
            }
            None => bilinear(&p, &q),
        };
        if sigma.norm() < BREAKDOWN_TOL {
            return Err(Error::Breakdown { iteration: it });
        }
        let alpha = rho / sigma;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        if let Some(s) = &mut shadow {
            let ac = alpha.conj();
            for i in 0..n {
                s.r[i] -= ac * s.q[i];
            }
        }
        let relres = cnorm(&r) / bnorm;
        if !relres.is_finite() {
            return Err(Error::NonFinite("BiCG residual"));
        }
        if relres < best_res {
            best_res = relres;
            best_x.copy_from_slice(&x);
        }
        if relres < tol {
            true_residual(a, zc, &x, b, &mut scratch);
            let verified = cnorm(&scratch) / bnorm;
            if verified < tol {
                return Ok((
                    x,
                    SolveStats {
                        iterations: it,
                        final_relres: verified,
                        converged: true,
                    },
                ));
            }
            replacements += 1;
            if replacements > MAX_RESIDUAL_REPLACEMENTS {
                return Ok((
                    x,
                    SolveStats {
                        iterations: it,
                        final_relres: verified,
                        converged: false,
                    },
                ));
            }
            // restart the recurrence from the current iterate
            r.copy_from_slice(&scratch);
            apply_precond(minv, &r, &mut zr, false);
            p.copy_from_slice(&zr);
            if let Some(s) = &mut shadow {
                for (sr, ri) in s.r.iter_mut().zip(&r) {
                    *sr = ri.conj();
                }
                apply_precond(minv, &s.r, &mut s.z, true);
                s.p.copy_from_slice(&s.z);
            }
            rho = rho_of(&shadow, &r, &zr);
            best_res = verified;
            continue;
        }
        apply_precond(minv, &r, &mut zr, false);
        if let Some(s) = &mut shadow {
            apply_precond(minv, &s.r, &mut s.z, true);
        }
        let rho_new = rho_of(&shadow, &r, &zr);
        if rho_new.norm() < BREAKDOWN_TOL {
            return Err(Error::Breakdown { iteration: it });
        }
        let beta = rho_new / rho;
        for i in 0..n {
            p[i] = zr[i] + beta * p[i];
        }
        if let Some(s) = &mut shadow {
            let bc = beta.conj();
            for i in 0..n {
                s.p[i] = s.z[i] + bc * s.p[i];
            }
        }
        rho = rho_new;
    }

    true_residual(a, zc, &best_x, b, &mut scratch);
    let final_relres = cnorm(&scratch) / bnorm;
    Ok((
        best_x,
        SolveStats {
            iterations: max_iter,
            final_relres,
            converged: final_relres < tol,
        },
    ))
}

/// Upper bound `1 + 2 delta / (r sin(pi t))` on the 2-norm condition number of
/// `z I - A` for a pole `z = c + r e^{i pi t}` and a spectrum of half-width
/// `delta`.
pub fn condition_bound(delta: f64, radius: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidNode(t));
    }
    if !(radius > 0.0) || !(delta >= 0.0) {
        return Err(Error::Config(format!(
            "condition_bound needs delta >= 0 and r > 0, got delta={delta}, r={radius}"
        )));
    }
    Ok(1.0 + 2.0 * delta / (radius * (PI * t).sin()))
}
