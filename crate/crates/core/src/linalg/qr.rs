use super::dense::{dot, norm2, Block};
use crate::error::{Error, Result};

/// Relative tolerance on the diagonal of `R` below which a column counts as
/// linearly dependent on its predecessors.
pub const RANK_TOL: f64 = 1e-12;

/// Thin Householder QR; returns the `n x m` orthonormal factor `Q`.
///
/// Fails with [`Error::RankDeficient`] when some `|R_jj| <= RANK_TOL * max |R_kk|`.
pub fn qr_orthonormalize(y: &Block) -> Result<Block> {
    let n = y.nrows();
    let m = y.ncols();
    if n < m {
        return Err(Error::DimMismatch { expected: n, got: m });
    }
    if !y.is_finite() {
        return Err(Error::NonFinite("qr input"));
    }
    let mut r = y.clone();
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut betas = Vec::with_capacity(m);
    let mut rdiag = Vec::with_capacity(m);

    for k in 0..m {
        let col = &r.col(k)[k..];
        let alpha = norm2(col);
        let x0 = col[0];
        let mut v = col.to_vec();
        let diag = if x0 >= 0.0 { -alpha } else { alpha };
        v[0] -= diag;
        let vnorm2 = dot(&v, &v);
        let beta = if vnorm2 > 0.0 { 2.0 / vnorm2 } else { 0.0 };
        rdiag.push(diag);
        // apply H = I - beta v v^T to trailing columns
        for j in k..m {
            let cj = &mut r.col_mut(j)[k..];
            let s = beta * dot(&v, cj);
            if s != 0.0 {
                for (c, vi) in cj.iter_mut().zip(&v) {
                    *c -= s * vi;
                }
            }
        }
        vs.push(v);
        betas.push(beta);
    }

    let rmax = rdiag.iter().fold(0.0f64, |a, d| a.max(d.abs()));
    if let Some(col) = rdiag.iter().position(|d| d.abs() <= RANK_TOL * rmax) {
        return Err(Error::RankDeficient { column: col });
    }

    // accumulate Q = H_0 H_1 ... H_{m-1} [I_m; 0]
    let mut q = Block::zeros(n, m);
    for j in 0..m {
        q[(j, j)] = 1.0;
    }
    for k in (0..m).rev() {
        let v = &vs[k];
        let beta = betas[k];
        for j in k..m {
            let cj = &mut q.col_mut(j)[k..];
            let s = beta * dot(v, cj);
            if s != 0.0 {
                for (c, vi) in cj.iter_mut().zip(v) {
                    *c -= s * vi;
                }
            }
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthogonality_error(q: &Block) -> f64 {
        let g = q.t_matmul(q);
        g.sub(&Block::identity(q.ncols())).max_abs()
    }

    #[test]
    fn orthonormal_input_is_kept_up_to_sign() {
        let s = 1.0 / 2f64.sqrt();
        let y = Block::from_rows(&[vec![s, 0.0], vec![s, 0.0], vec![0.0, 1.0]]).unwrap();
        let q = qr_orthonormalize(&y).unwrap();
        for j in 0..2 {
            let sign = if q[(0, j)] * y[(0, j)] + q[(2, j)] * y[(2, j)] < 0.0 { -1.0 } else { 1.0 };
            for i in 0..3 {
                assert!((q[(i, j)] - sign * y[(i, j)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn duplicate_columns_are_rank_deficient() {
        let y = Block::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]]).unwrap();
        assert!(matches!(
            qr_orthonormalize(&y),
            Err(Error::RankDeficient { column: 1 })
        ));
    }

    #[test]
    fn wide_block_rejected() {
        let y = Block::zeros(2, 3);
        assert!(matches!(qr_orthonormalize(&y), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn square_orthonormal() {
        let y = Block::from_rows(&[
            vec![4.0, 1.0, 2.0],
            vec![1.0, 3.0, 0.5],
            vec![2.0, 0.5, 5.0],
        ])
        .unwrap();
        let q = qr_orthonormalize(&y).unwrap();
        assert!(orthogonality_error(&q) < 1e-14);
    }
}
