//! Interior eigenvalue solvers for real symmetric matrices built on
//! contour-integral spectral projection.
//!
//! The crate provides the classical FEAST iteration, a two-circle variant
//! that decouples the contour radius from the width of the search interval,
//! and the FEAST-power subspace iteration (F2P) that combines the two-circle
//! projector with shifted power subspace iteration so the block width may be
//! smaller than the number of eigenvalues in the interval.
//!
//! ```
//! use f2p::{f2p, F2PConfig, IntervalSpec, SolverConfig, SparseSymMatrix};
//!
//! let diag: Vec<f64> = (1..=40).map(f64::from).collect();
//! let a = SparseSymMatrix::from_diagonal(&diag);
//! let spec = IntervalSpec::new(35.5, 40.5, 6.0).unwrap();
//! let cfg = F2PConfig { m: 8, num_cmp: 4, num_out: 3, max_it: 3, ..F2PConfig::default() };
//! let (res, _hist) = f2p(&a, &cfg, &spec, &SolverConfig::default()).unwrap();
//! assert_eq!(res.values.len(), 3);
//! assert!((res.values[0] - 40.0).abs() < 1e-8);
//! ```

pub mod diagnostics;
pub mod eigen;
pub mod error;
pub mod filter;
pub mod io;
pub mod linalg;
pub mod solver;

pub use diagnostics::{scale_factor, tau_lambda, tau_r, Metrics};
pub use eigen::{
    f2p, f2p_single_circle, feast, feast2, psi_restricted, psi_simple, random_block, sweep_interval, EigResult,
    F2PConfig, PsiOutcome, PsiParams, RunHistory,
};
pub use error::{Error, Result};
pub use filter::{
    apply_filter, apply_filter_pair, make_pair_contours, make_single_contour, scalar_filter,
    Contour, FilterStats, IntervalSpec,
};
pub use linalg::{
    dense_gen_sym_eig, dense_sym_eig, gauss_legendre, qr_orthonormalize, Block, DenseEig,
    QuadratureRule, SparseSymMatrix,
};
pub use solver::{bicg_shifted, condition_bound, Shift, SolveStats, SolverConfig};
