//! Dense and sparse kernels shared by the solvers.

mod dense;
mod eig;
mod qr;
mod quadrature;
mod sparse;

pub use dense::{axpy, dot, norm2, Block};
pub use eig::{dense_gen_sym_eig, dense_sym_eig, DenseEig};
pub use qr::{qr_orthonormalize, RANK_TOL};
pub use quadrature::{gauss_legendre, QuadratureRule, MAX_ORDER};
pub use sparse::SparseSymMatrix;
