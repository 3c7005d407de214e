mod common;

use f2p::solver::solve_shifted;
use f2p::{bicg_shifted, condition_bound, Error, Shift, SolverConfig, SparseSymMatrix};
use nalgebra::{Complex, DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::rotated_diagonal;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `||(zI - A)x - b|| / ||b||` evaluated densely.
fn dense_relres(a: &SparseSymMatrix, z: Complex64, x: &[Complex64], b: &[Complex64]) -> f64 {
    let n = a.n();
    let d = a.to_dense();
    let mut num = 0.0;
    for i in 0..n {
        let mut acc = z * x[i];
        for j in 0..n {
            acc -= d[(i, j)] * x[j];
        }
        num += (acc - b[i]).norm_sqr();
    }
    let den: f64 = b.iter().map(|v| v.norm_sqr()).sum();
    (num / den).sqrt()
}

#[test]
fn identity_resolvent() {
    let a = SparseSymMatrix::identity(6);
    let b: Vec<Complex64> = (0..6).map(|i| c(i as f64, 1.0 - i as f64)).collect();
    let (x, st) = bicg_shifted(&a, Shift::new(2.0, 1.0), &b, 1e-10, 30).unwrap();
    assert!(st.converged && (1..=2).contains(&st.iterations));
    for (xi, bi) in x.iter().zip(&b) {
        assert!((xi - bi / c(1.0, 1.0)).norm() < 1e-14);
    }
}

#[test]
fn zero_rhs() {
    let a = SparseSymMatrix::laplacian_1d(5);
    let (x, st) = bicg_shifted(&a, Shift::new(1.0, 1.0), &[c(0.0, 0.0); 5], 1e-10, 10).unwrap();
    assert!(x.iter().all(|v| *v == c(0.0, 0.0)));
    assert!(st.converged);
    assert_eq!(st.iterations, 0);
}

#[test]
fn diagonal_closed_form() {
    let d: Vec<f64> = (1..=10).map(f64::from).collect();
    let a = SparseSymMatrix::from_diagonal(&d);
    let z = c(5.5, 2.0);
    let b = vec![c(1.0, 0.0); 10];
    let (x, st) = bicg_shifted(&a, Shift::new(5.5, 2.0), &b, 1e-10, 50).unwrap();
    assert!(st.converged);
    for (j, xj) in x.iter().enumerate() {
        let exact = (z - d[j]).inv();
        assert!((xj - exact).norm() <= 1e-10);
    }
}

#[test]
fn conjugate_shift_gives_conjugate_solution() {
    let d: Vec<f64> = (0..12).map(|i| -2.0 + 0.4 * i as f64).collect();
    let a = SparseSymMatrix::from_diagonal(&d);
    let b: Vec<Complex64> = (0..12).map(|i| c((i as f64).cos(), 0.0)).collect();
    let z = Shift::new(0.3, 0.7);
    let (x, _) = bicg_shifted(&a, z, &b, 1e-12, 100).unwrap();
    let (xc, _) = bicg_shifted(&a, z.conj(), &b, 1e-12, 100).unwrap();
    for (p, q) in x.iter().zip(&xc) {
        assert!((p.conj() - q).norm() < 1e-12);
    }
}

#[test]
fn converged_solutions_pass_independent_residual_check() {
    let ev: Vec<f64> = (0..120).map(|i| -3.0 + 0.05 * i as f64).collect();
    let a = rotated_diagonal(&ev, 17);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let b: Vec<Complex64> = (0..a.n()).map(|_| c(rng.gen_range(-1.0..1.0), 0.0)).collect();
    let cfg = SolverConfig::default();
    for t in [0.02, 0.2, 0.5, 0.9] {
        let z = Shift::on_circle(0.0, 1.5, t);
        let (x, st) = solve_shifted(&a, z, &b, &cfg, 0).unwrap();
        assert!(st.converged, "t={t}: {st:?}");
        let rr = dense_relres(&a, z.as_complex(), &x, &b);
        assert!(rr <= 2.0 * cfg.tol, "t={t}: {rr:e}");
        assert!(st.final_relres < cfg.tol);
    }
}

#[test]
fn preconditioned_solve_agrees() {
    let ev: Vec<f64> = (0..60).map(|i| 0.1 * i as f64).collect();
    let a = rotated_diagonal(&ev, 2);
    let b: Vec<Complex64> = (0..60).map(|i| c(1.0 / (1.0 + i as f64), 0.0)).collect();
    let z = Shift::new(2.0, 0.5);
    let plain = solve_shifted(&a, z, &b, &SolverConfig::default(), 0).unwrap().0;
    let cfg = SolverConfig {
        diag_precond: true,
        ..SolverConfig::default()
    };
    let (pre, st) = solve_shifted(&a, z, &b, &cfg, 0).unwrap();
    assert!(st.converged);
    for (p, q) in plain.iter().zip(&pre) {
        assert!((p - q).norm() < 1e-8);
    }
}

#[test]
fn iteration_cap_reports_best_iterate() {
    let a = SparseSymMatrix::laplacian_1d(200);
    let b = vec![c(1.0, 0.0); 200];
    let (x, st) = bicg_shifted(&a, Shift::new(2.0, 1e-3), &b, 1e-14, 3).unwrap();
    assert!(!st.converged);
    assert!(st.iterations <= 3);
    let rr = dense_relres(&a, c(2.0, 1e-3), &x, &b);
    assert!((rr - st.final_relres).abs() <= 1e-8 * rr.max(1.0));
}

#[test]
fn wrong_rhs_length() {
    let a = SparseSymMatrix::identity(3);
    assert!(matches!(
        bicg_shifted(&a, Shift::new(1.0, 1.0), &[c(1.0, 0.0)], 1e-10, 5),
        Err(Error::DimMismatch { .. })
    ));
}

#[test]
fn condition_bound_examples() {
    assert_eq!(condition_bound(0.0, 2.0, 0.3).unwrap(), 1.0);
    assert!((condition_bound(1.0, 1.0, 0.5).unwrap() - 3.0).abs() < 1e-15);
    assert!(matches!(condition_bound(1.0, 1.0, 0.0), Err(Error::InvalidNode(_))));
    assert!(matches!(condition_bound(1.0, 1.0, 1.0), Err(Error::InvalidNode(_))));
    assert!(condition_bound(-1.0, 1.0, 0.5).is_err());
    assert!(condition_bound(1.0, 0.0, 0.5).is_err());
}

#[test]
fn condition_bound_monotone_on_grid() {
    let grid = [0.05, 0.2, 0.5, 1.0, 3.0, 10.0];
    for &d in &grid {
        for &r in &grid {
            for t in [0.05, 0.1, 0.25, 0.4, 0.5] {
                let k = condition_bound(d, r, t).unwrap();
                assert!(condition_bound(d, r * 1.5, t).unwrap() < k);
                assert!(condition_bound(d * 1.5, r, t).unwrap() > k);
                // sin(pi t) grows on (0, 1/2]
                assert!(condition_bound(d, r, (t + 0.05).min(0.5)).unwrap() <= k);
            }
        }
    }
}

#[test]
fn condition_bound_holds_for_rotated_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..20 {
        let n = rng.gen_range(4..20);
        let delta: f64 = rng.gen_range(0.1..5.0);
        let ev: Vec<f64> = (0..n).map(|_| rng.gen_range(-delta..delta)).collect();
        let a = rotated_diagonal(&ev, rng.gen());
        let (r, t): (f64, f64) = (rng.gen_range(0.1..5.0), rng.gen_range(0.01..0.99));
        let z = Shift::on_circle(rng.gen_range(-delta..delta), r, t).as_complex();
        let d = a.to_dense();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let v = if i == j { z - d[(i, j)] } else { -c(d[(i, j)], 0.0) };
            Complex::new(v.re, v.im)
        });
        let sv: DVector<f64> = m.singular_values();
        let kappa = sv.max() / sv.min();
        assert!(kappa <= condition_bound(delta, r, t).unwrap() * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugate_symmetry_random_diagonal(seed in 0u64..10_000, re in -2.0f64..2.0, im in 0.05f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..15);
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let a = SparseSymMatrix::from_diagonal(&d);
        let b: Vec<Complex64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), 0.0)).collect();
        let z = Shift::new(re, im);
        let (x, _) = bicg_shifted(&a, z, &b, 1e-13, 200).unwrap();
        let (xc, _) = bicg_shifted(&a, z.conj(), &b, 1e-13, 200).unwrap();
        for (p, q) in x.iter().zip(&xc) {
            prop_assert!((p.conj() - q).norm() <= 1e-12 * p.norm().max(1.0));
        }
    }
}
