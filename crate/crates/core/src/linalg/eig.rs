//! Small dense symmetric eigensolvers for the projected Rayleigh-Ritz
//! problems: Householder tridiagonalization followed by implicit-shift QL,
//! and Cholesky reduction for the generalized pencil.

use super::dense::Block;
use crate::error::{Error, Result};

/// Spectral decomposition with ascending eigenvalues and orthonormal
/// eigenvector columns.
#[derive(Clone, Debug)]
pub struct DenseEig {
    pub values: Vec<f64>,
    pub vectors: Block,
}

pub const SYMMETRY_TOL: f64 = 1e-12;

fn check_square(s: &Block) -> Result<usize> {
    if s.nrows() != s.ncols() {
        return Err(Error::DimMismatch {
            expected: s.nrows(),
            got: s.ncols(),
        });
    }
    Ok(s.nrows())
}

fn check_symmetric(s: &Block) -> Result<()> {
    let n = s.nrows();
    let scale = s.max_abs();
    for j in 0..n {
        for i in 0..j {
            if (s[(i, j)] - s[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Full eigendecomposition of a dense symmetric matrix.
pub fn dense_sym_eig(s: &Block) -> Result<DenseEig> {
    let n = check_square(s)?;
    check_symmetric(s)?;
    if !s.is_finite() {
        return Err(Error::NonFinite("dense_sym_eig input"));
    }
    if n == 0 {
        return Ok(DenseEig {
            values: Vec::new(),
            vectors: Block::zeros(0, 0),
        });
    }
    let mut v = s.clone();
    v.symmetrize();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    Ok(DenseEig { values: d, vectors: v })
}

/// Householder reduction to tridiagonal form. On exit `v` holds the
/// accumulated orthogonal transform, `d` the diagonal and `e[1..]` the
/// subdiagonal.
fn tred2(v: &mut Block, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let t = v[(k, j)] - (f * e[k] + g * d[k]);
                    v[(k, j)] = t;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    let t = v[(k, j)] - g * d[k];
                    v[(k, j)] = t;
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL on the tridiagonal produced by [`tred2`]; sorts the
/// eigenpairs ascending.
fn tql2(v: &mut Block, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 * n.max(1) {
                    return Err(Error::NonFinite("tql2 did not converge"));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[(k, i + 1)];
                        let vki = v[(k, i)];
                        v[(k, i + 1)] = s * vki + c * h;
                        v[(k, i)] = c * vki - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // selection sort keeps columns paired with values; ties keep lower index
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for row in 0..n {
                let t = v[(row, i)];
                v[(row, i)] = v[(row, k)];
                v[(row, k)] = t;
            }
        }
    }
    Ok(())
}

/// Lower Cholesky factor of an SPD matrix.
fn cholesky(b: &Block) -> Result<Block> {
    let n = b.nrows();
    let mut l = Block::zeros(n, n);
    let scale = (0..n).fold(0.0f64, |m, i| m.max(b[(i, i)].abs()));
    for j in 0..n {
        let mut s = b[(j, j)];
        for k in 0..j {
            s -= l[(j, k)] * l[(j, k)];
        }
        if !(s > f64::EPSILON * scale * n as f64) {
            return Err(Error::IllConditionedGram);
        }
        let ljj = s.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `L X = B` in place (forward substitution, columnwise).
fn forward_solve(l: &Block, x: &mut Block) {
    let n = l.nrows();
    for c in 0..x.ncols() {
        let col = x.col_mut(c);
        for i in 0..n {
            let mut s = col[i];
            for k in 0..i {
                s -= l[(i, k)] * col[k];
            }
            col[i] = s / l[(i, i)];
        }
    }
}

/// Solves `L^T X = B` in place.
fn backward_solve_t(l: &Block, x: &mut Block) {
    let n = l.nrows();
    for c in 0..x.ncols() {
        let col = x.col_mut(c);
        for i in (0..n).rev() {
            let mut s = col[i];
            for k in (i + 1)..n {
                s -= l[(k, i)] * col[k];
            }
            col[i] = s / l[(i, i)];
        }
    }
}

/// Eigenpairs of the pencil `(ahat, bhat)` with `bhat` SPD, via
/// `bhat = L L^T` and the standard problem for `L^{-1} ahat L^{-T}`.
///
/// Eigenvectors are `bhat`-orthonormal.
pub fn dense_gen_sym_eig(ahat: &Block, bhat: &Block) -> Result<DenseEig> {
    let n = check_square(ahat)?;
    if check_square(bhat)? != n {
        return Err(Error::DimMismatch {
            expected: n,
            got: bhat.nrows(),
        });
    }
    check_symmetric(ahat)?;
    check_symmetric(bhat)?;
    let l = cholesky(bhat)?;
    // C = L^{-1} A L^{-T}
    let mut w = ahat.clone();
    forward_solve(&l, &mut w);
    let mut c = w.transpose();
    forward_solve(&l, &mut c);
    c.symmetrize();
    let eig = dense_sym_eig(&c)?;
    let mut x = eig.vectors;
    backward_solve_t(&l, &mut x);
    Ok(DenseEig {
        values: eig.values,
        vectors: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input() {
        let s = Block::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        let e = dense_sym_eig(&s).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.vectors.col(0)[1].abs(), 1.0);
        assert_eq!(e.vectors.col(1)[2].abs(), 1.0);
        assert_eq!(e.vectors.col(2)[0].abs(), 1.0);
    }

    #[test]
    fn two_by_two_swap() {
        let s = Block::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = dense_sym_eig(&s).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        let h = 1.0 / 2f64.sqrt();
        let v0 = e.vectors.col(0);
        assert!((v0[0].abs() - h).abs() < 1e-15);
        assert!((v0[0] + v0[1]).abs() < 1e-15);
        let v1 = e.vectors.col(1);
        assert!((v1[0] - v1[1]).abs() < 1e-15);
    }

    #[test]
    fn one_by_one() {
        let s = Block::from_rows(&[vec![-4.5]]).unwrap();
        let e = dense_sym_eig(&s).unwrap();
        assert_eq!(e.values, vec![-4.5]);
        assert_eq!(e.vectors[(0, 0)], 1.0);
    }

    #[test]
    fn asymmetric_rejected() {
        let s = Block::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(dense_sym_eig(&s), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn pencil_with_identity_matches_standard() {
        let a = Block::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 4.0],
        ])
        .unwrap();
        let g = dense_gen_sym_eig(&a, &Block::identity(3)).unwrap();
        let s = dense_sym_eig(&a).unwrap();
        for (x, y) in g.values.iter().zip(&s.values) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn proportional_pencil() {
        let b = Block::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let mut a = b.clone();
        a.scale(2.0);
        let g = dense_gen_sym_eig(&a, &b).unwrap();
        for v in g.values {
            assert!((v - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn indefinite_gram_fails() {
        let a = Block::identity(2);
        let b = Block::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            dense_gen_sym_eig(&a, &b),
            Err(Error::IllConditionedGram)
        ));
    }
}
