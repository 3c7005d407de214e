//! Dispatch of a [`RunConfig`] to the drivers.

use std::time::Instant;

use super::config::{load_matrix, Algorithm, RunConfig};
use super::report::{read_reference, CompareHistory, RunReport};
use crate::diagnostics::Metrics;
use crate::eigen::{
    f2p, f2p_single_circle, feast, feast2, psi_simple, random_block, sweep_interval, EigResult,
    F2PConfig, IterOptions, RunHistory,
};
use crate::error::{Error, Result};
use crate::filter::{scalar_filter, Contour};
use crate::linalg::{dense_sym_eig, gauss_legendre, SparseSymMatrix};

/// Largest order accepted by [`oracle_spectrum`].
pub const ORACLE_MAX_N: usize = 2000;

/// Full spectrum in decreasing order by dense symmetric eigensolution.
pub fn oracle_spectrum(a: &SparseSymMatrix) -> Result<Vec<f64>> {
    if a.n() > ORACLE_MAX_N {
        return Err(Error::Config(format!(
            "dense oracle limited to n <= {ORACLE_MAX_N}, got {}",
            a.n()
        )));
    }
    let mut v = dense_sym_eig(&a.to_dense())?.values;
    v.reverse();
    Ok(v)
}

/// Samples the scalar filter of one circle at `points` equispaced values.
pub fn filter_scan(
    center: f64,
    radius: f64,
    q: usize,
    lambda_min: f64,
    lambda_max: f64,
    points: usize,
) -> Result<Vec<[f64; 2]>> {
    let c = Contour::new(center, radius, gauss_legendre(q)?)?;
    let step = (lambda_max - lambda_min) / (points.max(2) - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let l = if i + 1 == points { lambda_max } else { lambda_min + i as f64 * step };
            [l, scalar_filter(l, &c)]
        })
        .collect())
}

/// Runs `cfg`, failing with the first error.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    let (report, status) = run_partial(cfg);
    status.map(|()| report)
}

/// Runs `cfg` and always returns a report; on failure it holds what was
/// computed before the error plus the error message.
pub fn run_partial(cfg: &RunConfig) -> (RunReport, Result<()>) {
    let mut report = RunReport::new(cfg.clone());
    let status = execute(cfg, &mut report);
    if let Err(e) = &status {
        report.error = Some(e.to_string());
    }
    (report, status)
}

fn timed<T>(report: &mut RunReport, phase: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t0 = Instant::now();
    let out = f();
    report
        .timings
        .insert(phase.to_string(), t0.elapsed().as_secs_f64());
    out
}

fn fill(report: &mut RunReport, res: &EigResult, hist: &RunHistory) {
    report.eigenvalues = res.values.clone();
    report.residuals = res.residuals.clone();
    report.err_hist = hist.err_hist.clone();
    report.num_ay_hist = hist.num_ay_hist.clone();
    report.inner = hist.inner;
    report.converged = hist.converged;
}

fn execute(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    cfg.validate()?;

    if cfg.algorithm == Algorithm::FilterScan {
        let center = cfg.center.unwrap_or(0.5 * (cfg.a + cfg.b));
        let radius = cfg.radius.unwrap_or(0.5 * (cfg.b - cfg.a));
        report.scan = timed(report, "solve", || {
            filter_scan(center, radius, cfg.q, cfg.lambda_min, cfg.lambda_max, cfg.points)
        })?;
        report.converged = true;
        return Ok(());
    }

    let a = timed(report, "load", || load_matrix(&cfg.matrix))?;
    report.n = a.n();
    let reference = match &cfg.reference {
        Some(p) => Some(timed(report, "reference", || read_reference(p))?),
        None => None,
    };
    if cfg.m > a.n() {
        return Err(Error::Config(format!("m = {} exceeds n = {}", cfg.m, a.n())));
    }

    let solver = cfg.solver_config();
    let fcfg = cfg.f2p_config();
    let opts = IterOptions {
        max_it: cfg.max_it,
        tol: cfg.tol,
        q: cfg.q,
        seed: cfg.seed,
    };

    let (res, hist) = match cfg.algorithm {
        Algorithm::Feast => timed(report, "solve", || {
            let y = random_block(a.n(), cfg.m, cfg.seed)?;
            feast(&a, &y, cfg.a, cfg.b, &opts, &solver)
        })?,
        Algorithm::Feast2 => timed(report, "solve", || {
            let y = random_block(a.n(), cfg.m, cfg.seed)?;
            feast2(&a, &y, &cfg.interval_spec()?, &opts, &solver)
        })?,
        Algorithm::Psi => timed(report, "solve", || {
            let y = random_block(a.n(), cfg.m, cfg.seed)?;
            psi_simple(&a, &y, cfg.max_it, cfg.tol)
        })?,
        Algorithm::F2p => timed(report, "solve", || {
            f2p(&a, &fcfg, &cfg.interval_spec()?, &solver)
        })?,
        Algorithm::Compare => {
            let one = F2PConfig {
                sub_max_it: 1,
                ..fcfg.clone()
            };
            let spec = cfg.interval_spec()?;
            let (_, h1) = timed(report, "feast", || {
                f2p_single_circle(&a, &one, cfg.a, cfg.b, &solver)
            })?;
            let (_, h2) = timed(report, "feast2", || f2p(&a, &one, &spec, &solver))?;
            let (res, h3) = timed(report, "f2p", || f2p(&a, &fcfg, &spec, &solver))?;
            report.compare = Some(CompareHistory {
                feast: h1.err_hist,
                feast2: h2.err_hist,
                f2p: h3.err_hist.clone(),
            });
            (res, h3)
        }
        Algorithm::Sweep => {
            let sw = timed(report, "solve", || {
                sweep_interval(&a, cfg.a, cfg.b, &fcfg, cfg.radius_or_default(), &solver)
            })?;
            report.windows = sw.windows.iter().map(|&(l, h)| [l, h]).collect();
            let mut hist = RunHistory {
                converged: true,
                ..RunHistory::default()
            };
            for h in &sw.histories {
                hist.err_hist.extend_from_slice(&h.err_hist);
                hist.num_ay_hist.extend_from_slice(&h.num_ay_hist);
                hist.inner.merge(&h.inner);
                hist.converged &= h.converged || h.err_hist.iter().all(|&e| e == -1.0);
            }
            (sw.union, hist)
        }
        Algorithm::FilterScan => unreachable!("handled above"),
    };

    fill(report, &res, &hist);
    report.metrics = Metrics::from_run(&hist, &res.values, reference.as_deref());
    if matches!(cfg.algorithm, Algorithm::Psi | Algorithm::Feast | Algorithm::Feast2) {
        report.metrics.tau_r = res.max_residual().unwrap_or(-1.0);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::parse_kv(text).unwrap()
    }

    #[test]
    fn f2p_on_bundled_diagonal() {
        let c = cfg("matrix = diag:100\na = 89.5\nb = 100.5\nradius = 10\nm = 20\nnum_cmp = 10\nnum_out = 5\nmax_it = 10");
        let r = run(&c).unwrap();
        assert_eq!(r.eigenvalues.len(), 5);
        for (k, v) in r.eigenvalues.iter().enumerate() {
            assert!((v - (100 - k) as f64).abs() < 1e-8, "{v}");
        }
        assert!(r.metrics.tau_r <= 1e-8);
        assert_eq!(r.metrics.eig_out, 5);
    }

    #[test]
    fn empty_interval_succeeds_with_empty_report() {
        let c = cfg("matrix = diag:50\na = 10.2\nb = 10.8\nradius = 5\nm = 10\nnum_cmp = 5\nmax_it = 3");
        let r = run(&c).unwrap();
        assert_eq!(r.metrics.eig_out, 0);
        assert!(r.eigenvalues.is_empty());
        assert!(r.err_hist.iter().all(|&e| e == -1.0));
    }

    #[test]
    fn failure_keeps_partial_report() {
        let c = cfg("matrix = /nonexistent.mtx\na = 0\nb = 1");
        let (r, status) = run_partial(&c);
        assert!(matches!(status, Err(Error::Io { .. })));
        assert!(r.error.is_some());
        assert!(r.timings.contains_key("load"));
    }

    #[test]
    fn scan_matches_scalar_filter() {
        let s = filter_scan(0.0, 1.0, 8, -5.0, 5.0, 201).unwrap();
        assert_eq!(s.len(), 201);
        assert_eq!(s[0][0], -5.0);
        assert_eq!(s[200][0], 5.0);
        assert!((s[100][1] - 1.0).abs() < 1e-3);
        assert!(s[0][1].abs() <= 0.05 && s[200][1].abs() <= 0.05);
    }

    #[test]
    fn oracle_is_decreasing() {
        let a = SparseSymMatrix::laplacian_1d(6);
        let v = oracle_spectrum(&a).unwrap();
        assert!(v.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(v.len(), 6);
    }
}
