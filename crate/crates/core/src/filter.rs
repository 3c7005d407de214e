//! Rational filters obtained by Gauss-Legendre discretization of the
//! resolvent contour integral over a circle.
//!
//! Only the upper semicircle is integrated; the lower half contributes the
//! complex conjugate, so for a real block `Y` the filtered block is
//!
//! ```text
//! Z = r * sum_k w_k Re{ e^{i pi t_k} X_k },   (z_k I - A) X_k = Y,
//! z_k = c + r e^{i pi t_k}
//! ```
//!
//! and is real.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Block, QuadratureRule, SparseSymMatrix};
use crate::solver::{solve_shifted, Shift, SolveStats, SolverConfig};

/// Circle in the complex plane plus the quadrature rule that discretizes it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub center: f64,
    pub radius: f64,
    pub rule: QuadratureRule,
}

impl Contour {
    pub fn new(center: f64, radius: f64, rule: QuadratureRule) -> Result<Self> {
        if !(radius > 0.0) || !center.is_finite() || !radius.is_finite() {
            return Err(Error::Config(format!(
                "contour needs finite center and radius > 0, got c={center}, r={radius}"
            )));
        }
        Ok(Contour {
            center,
            radius,
            rule,
        })
    }

    /// Real-axis footprint `(c - r, c + r)`.
    pub fn footprint(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }

    pub fn poles(&self) -> impl Iterator<Item = Shift> + '_ {
        self.rule
            .nodes()
            .iter()
            .map(move |&t| Shift::on_circle(self.center, self.radius, t))
    }
}

/// Open search interval `(a, b)` plus the shared radius of the two circles
/// whose real-axis overlap is exactly `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub a: f64,
    pub b: f64,
    pub radius: f64,
}

impl IntervalSpec {
    pub fn new(a: f64, b: f64, radius: f64) -> Result<Self> {
        let s = IntervalSpec { a, b, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a < self.b) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::EmptyInterval {
                a: self.a,
                b: self.b,
            });
        }
        if !(self.radius >= 0.5 * (self.b - self.a)) || !self.radius.is_finite() {
            return Err(Error::CirclesDoNotCover {
                a: self.a,
                b: self.b,
                r: self.radius,
            });
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.a && x < self.b
    }
}

/// Aggregated inner-solve statistics for one or more filter applications.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterStats {
    pub systems: usize,
    pub max_iterations: usize,
    pub total_iterations: usize,
    pub not_converged: usize,
}

impl FilterStats {
    fn record(&mut self, s: &SolveStats) {
        self.systems += 1;
        self.max_iterations = self.max_iterations.max(s.iterations);
        self.total_iterations += s.iterations;
        if !s.converged {
            self.not_converged += 1;
        }
    }

    pub fn merge(&mut self, other: &FilterStats) {
        self.systems += other.systems;
        self.max_iterations = self.max_iterations.max(other.max_iterations);
        self.total_iterations += other.total_iterations;
        self.not_converged += other.not_converged;
    }
}

/// Single circle centered at `(a+b)/2` with radius `(b-a)/2`.
pub fn make_single_contour(a: f64, b: f64, rule: QuadratureRule) -> Result<Contour> {
    if !(a < b) {
        return Err(Error::EmptyInterval { a, b });
    }
    Contour::new(0.5 * (a + b), 0.5 * (b - a), rule)
}

/// Left circle centered at `b - r` and right circle centered at `a + r`.
pub fn make_pair_contours(spec: &IntervalSpec, rule: QuadratureRule) -> Result<(Contour, Contour)> {
    spec.validate()?;
    let left = Contour::new(spec.b - spec.radius, spec.radius, rule.clone())?;
    let right = Contour::new(spec.a + spec.radius, spec.radius, rule)?;
    Ok((left, right))
}

/// Scalar response `h(lambda)` of the discretized filter.
pub fn scalar_filter(lambda: f64, contour: &Contour) -> f64 {
    let r = contour.radius;
    let mut acc = 0.0;
    for (t, w) in contour.rule.iter() {
        let phase = Complex64::from_polar(1.0, PI * t);
        let z = Shift::on_circle(contour.center, r, t).as_complex();
        acc += w * (phase / (z - lambda)).re;
    }
    r * acc
}

/// Composed response `h_R(lambda) h_L(lambda)`.
pub fn scalar_filter_pair(lambda: f64, left: &Contour, right: &Contour) -> f64 {
    scalar_filter(lambda, right) * scalar_filter(lambda, left)
}

fn retry_seed(k: usize, j: usize) -> u64 {
    0x5EED_0000_0000_0000 ^ ((k as u64) << 32) ^ j as u64
}

/// `Re{ e^{i pi t} x }` for one shifted solve.
fn solve_contribution(
    a: &SparseSymMatrix,
    y: &Block,
    contour: &Contour,
    k: usize,
    j: usize,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveStats)> {
    let t = contour.rule.nodes()[k];
    let z = Shift::on_circle(contour.center, contour.radius, t);
    let rhs: Vec<Complex64> = y.col(j).iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let (x, stats) = solve_shifted(a, z, &rhs, cfg, retry_seed(k, j))?;
    if !stats.converged {
        log::warn!(
            "shifted solve (node {k}, column {j}) stopped at relres {:.3e} after {} iterations",
            stats.final_relres,
            stats.iterations
        );
    }
    let phase = Complex64::from_polar(1.0, PI * t);
    Ok((x.iter().map(|xi| (phase * xi).re).collect(), stats))
}

#[cfg(feature = "parallel")]
fn solve_all(
    a: &SparseSymMatrix,
    y: &Block,
    contour: &Contour,
    cfg: &SolverConfig,
    jobs: &[(usize, usize)],
) -> Vec<Result<(Vec<f64>, SolveStats)>> {
    use rayon::prelude::*;
    if cfg.parallel {
        jobs.par_iter()
            .map(|&(j, k)| solve_contribution(a, y, contour, k, j, cfg))
            .collect()
    } else {
        jobs.iter()
            .map(|&(j, k)| solve_contribution(a, y, contour, k, j, cfg))
            .collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn solve_all(
    a: &SparseSymMatrix,
    y: &Block,
    contour: &Contour,
    cfg: &SolverConfig,
    jobs: &[(usize, usize)],
) -> Vec<Result<(Vec<f64>, SolveStats)>> {
    jobs.iter()
        .map(|&(j, k)| solve_contribution(a, y, contour, k, j, cfg))
        .collect()
}

/// Applies the quadrature-approximated spectral projector of `contour` to
/// every column of `y`.
///
/// The `m q` shifted systems are independent; with `cfg.parallel` they run on
/// the rayon pool. The quadrature sum is always reduced node by node in
/// ascending order per column, so the result does not depend on scheduling.
pub fn apply_filter(
    a: &SparseSymMatrix,
    y: &Block,
    contour: &Contour,
    cfg: &SolverConfig,
) -> Result<(Block, FilterStats)> {
    let n = a.n();
    if y.nrows() != n {
        return Err(Error::DimMismatch {
            expected: n,
            got: y.nrows(),
        });
    }
    let q = contour.rule.order();
    let m = y.ncols();
    let jobs: Vec<(usize, usize)> = (0..m).flat_map(|j| (0..q).map(move |k| (j, k))).collect();
    let results = solve_all(a, y, contour, cfg, &jobs);

    let mut z = Block::zeros(n, m);
    let mut stats = FilterStats::default();
    let weights = contour.rule.weights();
    let mut it = results.into_iter();
    for j in 0..m {
        let col = z.col_mut(j);
        for &w in weights {
            let (contrib, st) = it.next().expect("one result per job")?;
            stats.record(&st);
            for (zi, ci) in col.iter_mut().zip(&contrib) {
                *zi += w * ci;
            }
        }
        for zi in col.iter_mut() {
            *zi *= contour.radius;
        }
    }
    if !z.is_finite() {
        return Err(Error::NonFinite("apply_filter output"));
    }
    Ok((z, stats))
}

/// Two-circle corrector: filter with `left`, then with `right`.
pub fn apply_filter_pair(
    a: &SparseSymMatrix,
    y: &Block,
    left: &Contour,
    right: &Contour,
    cfg: &SolverConfig,
) -> Result<(Block, FilterStats)> {
    let (z1, mut stats) = apply_filter(a, y, left, cfg)?;
    let (z, s2) = apply_filter(a, &z1, right, cfg)?;
    stats.merge(&s2);
    Ok((z, stats))
}

/// Ratio of the composed response at the interval midpoint to the response
/// half an interval width outside either end. Large values mean good
/// separation; used only for logging.
pub fn pair_contrast(spec: &IntervalSpec, left: &Contour, right: &Contour) -> f64 {
    let mid = 0.5 * (spec.a + spec.b);
    let w = spec.width();
    let inside = scalar_filter_pair(mid, left, right).abs();
    let outside = scalar_filter_pair(spec.a - 0.5 * w, left, right)
        .abs()
        .max(scalar_filter_pair(spec.b + 0.5 * w, left, right).abs());
    inside / outside.max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gauss_legendre;

    #[test]
    fn single_contour_geometry() {
        let rule = gauss_legendre(8).unwrap();
        let c = make_single_contour(11.8, 12.0, rule.clone()).unwrap();
        assert!((c.center - 11.9).abs() < 1e-12);
        assert!((c.radius - 0.1).abs() < 1e-12);
        let c = make_single_contour(-1.0, 1.0, rule.clone()).unwrap();
        assert_eq!((c.center, c.radius), (0.0, 1.0));
        assert!(matches!(
            make_single_contour(0.0, 0.0, rule),
            Err(Error::EmptyInterval { .. })
        ));
    }

    #[test]
    fn pair_geometry() {
        let rule = gauss_legendre(8).unwrap();
        let spec = IntervalSpec { a: 11.8, b: 12.0, radius: 5.0 };
        let (l, r) = make_pair_contours(&spec, rule.clone()).unwrap();
        assert!((l.center - 7.0).abs() < 1e-12);
        assert!((r.center - 16.8).abs() < 1e-12);
        assert_eq!(l.radius, 5.0);
        assert_eq!(r.radius, 5.0);

        let spec = IntervalSpec { a: -1.0, b: 1.0, radius: 1.0 };
        let (l, r) = make_pair_contours(&spec, rule.clone()).unwrap();
        assert_eq!(l.center, 0.0);
        assert_eq!(r.center, 0.0);

        let spec = IntervalSpec { a: 0.0, b: 4.0, radius: 1.0 };
        assert!(matches!(
            make_pair_contours(&spec, rule),
            Err(Error::CirclesDoNotCover { .. })
        ));
    }

    #[test]
    fn zero_block_filters_to_zero() {
        let a = SparseSymMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let c = make_single_contour(1.5, 2.5, gauss_legendre(8).unwrap()).unwrap();
        let (z, st) = apply_filter(&a, &Block::zeros(3, 2), &c, &SolverConfig::default()).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        assert_eq!(st.systems, 16);
        assert_eq!(st.total_iterations, 0);
    }

    #[test]
    fn row_count_checked() {
        let a = SparseSymMatrix::identity(3);
        let c = make_single_contour(0.5, 1.5, gauss_legendre(4).unwrap()).unwrap();
        assert!(apply_filter(&a, &Block::zeros(2, 1), &c, &SolverConfig::default()).is_err());
    }

    #[test]
    fn center_response_is_near_one() {
        let c = Contour::new(3.0, 0.7, gauss_legendre(8).unwrap()).unwrap();
        let h = scalar_filter(3.0, &c);
        assert!((0.998..=1.002).contains(&h), "{h}");
    }
}
