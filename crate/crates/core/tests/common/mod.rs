//! Test matrices and independent reference computations.
#![allow(dead_code)]

use f2p::SparseSymMatrix;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Eigenvalues of a dense copy of `a` by nalgebra, decreasing.
pub fn nalgebra_spectrum(a: &SparseSymMatrix) -> Vec<f64> {
    let n = a.n();
    let d = a.to_dense();
    let m = DMatrix::from_fn(n, n, |i, j| d[(i, j)]);
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// `(G + G^T) / sqrt(2n)` with standard normal `G`, stored densely as sparse.
pub fn random_dense_symmetric(n: usize, rng: &mut ChaCha8Rng) -> SparseSymMatrix {
    let g: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(rng)).collect();
    let scale = 1.0 / (2.0 * n as f64).sqrt();
    let mut trip = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            trip.push((i, j, (g[i * n + j] + g[j * n + i]) * scale));
        }
    }
    SparseSymMatrix::from_triplets(n, &trip).unwrap()
}

/// Matrix with prescribed eigenvalues: a random permutation of `ev` placed
/// on the diagonal and mixed by disjoint 2x2 rotations.
pub fn rotated_diagonal(ev: &[f64], seed: u64) -> SparseSymMatrix {
    let n = ev.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ev = ev.to_vec();
    ev.shuffle(&mut rng);
    let mut trip = Vec::new();
    for p in 0..n / 2 {
        let (i, j) = (2 * p, 2 * p + 1);
        let th: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let (c, s) = (th.cos(), th.sin());
        let (d1, d2) = (ev[i], ev[j]);
        let off = c * s * (d1 - d2);
        trip.push((i, i, c * c * d1 + s * s * d2));
        trip.push((j, j, s * s * d1 + c * c * d2));
        trip.push((i, j, off));
        trip.push((j, i, off));
    }
    if n % 2 == 1 {
        trip.push((n - 1, n - 1, ev[n - 1]));
    }
    SparseSymMatrix::from_triplets(n, &trip).unwrap()
}

/// `s` eigenvalues evenly spread over (11.8, 12), the other `n - s` spread
/// over [-0.16, 25.67] outside (11.7, 12.1). Returns the matrix and its
/// spectrum, decreasing.
pub fn clustered(n: usize, s: usize, seed: u64) -> (SparseSymMatrix, Vec<f64>) {
    let (lo, hi) = (-0.16, 25.67);
    let mut ev: Vec<f64> = (0..s)
        .map(|k| 11.8 + 0.2 * (k as f64 + 0.5) / s as f64)
        .collect();
    let outside = (hi - lo) - 0.4;
    let rest = n - s;
    for k in 0..rest {
        let x = lo + outside * (k as f64 + 0.5) / rest as f64;
        ev.push(if x > 11.7 { x + 0.4 } else { x });
    }
    let a = rotated_diagonal(&ev, seed);
    ev.sort_by(|x, y| y.total_cmp(x));
    (a, ev)
}

/// Gauss-Legendre rule on [0, 1] by the Golub-Welsch eigenvalue method.
pub fn golub_welsch(q: usize) -> (Vec<f64>, Vec<f64>) {
    let j = DMatrix::from_fn(q, q, |i, k| {
        if i + 1 == k || k + 1 == i {
            let b = i.max(k) as f64;
            b / (4.0 * b * b - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let e = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..q)
        .map(|i| {
            let v0 = e.eigenvectors[(0, i)];
            ((e.eigenvalues[i] + 1.0) / 2.0, v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

/// Filter of the circle `(c, r)` discretized with `q` Golub-Welsch nodes.
pub fn oracle_filter(lambda: f64, c: f64, r: f64, q: usize) -> f64 {
    use num_complex::Complex64;
    let (t, w) = golub_welsch(q);
    let mut h = 0.0;
    for k in 0..q {
        let e = Complex64::from_polar(1.0, std::f64::consts::PI * t[k]);
        let z = c + r * e;
        h += w[k] * (e / (z - lambda)).re;
    }
    r * h
}
