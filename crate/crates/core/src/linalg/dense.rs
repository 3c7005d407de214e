use std::fmt;

use crate::error::{Error, Result};

/// Dense real matrix stored column-major.
///
/// Used both for tall iteration blocks (`n x m`, `n >= m`) and for the small
/// square projected matrices of the Rayleigh-Ritz step.
#[derive(Clone, PartialEq)]
pub struct Block {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Block {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Block {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut b = Block::zeros(n, n);
        for i in 0..n {
            b[(i, i)] = 1.0;
        }
        b
    }

    /// Wraps column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Block { rows, cols, data })
    }

    /// Builds from row-major nested slices; convenient in tests.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        let mut b = Block::zeros(nr, nc);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != nc {
                return Err(Error::DimMismatch {
                    expected: nc,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                b[(i, j)] = v;
            }
        }
        Ok(b)
    }

    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimMismatch {
                    expected: rows,
                    got: c.len(),
                });
            }
            data.extend_from_slice(c);
        }
        Ok(Block {
            rows,
            cols: columns.len(),
            data,
        })
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on a zero chunk size
        self.data.chunks_exact(self.rows.max(1)).take(self.cols)
    }

    /// Copies the listed columns, in order, into a new block.
    pub fn select_columns(&self, idx: &[usize]) -> Block {
        let mut out = Block::zeros(self.rows, idx.len());
        for (k, &j) in idx.iter().enumerate() {
            out.col_mut(k).copy_from_slice(self.col(j));
        }
        out
    }

    pub fn transpose(&self) -> Block {
        let mut t = Block::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Block) -> Block {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Block::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let oc = other.col(j);
            let dst = out.col_mut(j);
            for (k, &w) in oc.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                axpy(w, self.col(k), dst);
            }
        }
        out
    }

    /// `self^T * other`.
    pub fn t_matmul(&self, other: &Block) -> Block {
        assert_eq!(self.rows, other.rows, "t_matmul shape mismatch");
        let mut out = Block::zeros(self.cols, other.cols);
        for j in 0..other.cols {
            let oc = other.col(j);
            for i in 0..self.cols {
                out[(i, j)] = dot(self.col(i), oc);
            }
        }
        out
    }

    /// Replaces the matrix by `(M + M^T)/2`; only meaningful for square blocks.
    pub fn symmetrize(&mut self) {
        assert_eq!(self.rows, self.cols);
        for j in 0..self.cols {
            for i in 0..j {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    /// `self - other`, elementwise.
    pub fn sub(&self, other: &Block) -> Block {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Block {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

impl std::ops::Index<(usize, usize)> for Block {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.rows + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Block {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.rows + i]
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Block {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(12) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                write!(f, "{:>12.5e} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * s.sqrt()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_matches_hand_product() {
        let a = Block::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let b = Block::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 1.0, -1.0]]).unwrap();
        let c = a.matmul(&b);
        assert_eq!(c[(0, 2)], 0.0);
        assert_eq!(c[(2, 0)], 5.0);
        assert_eq!(c[(1, 2)], 2.0);
        let g = a.t_matmul(&a);
        assert_eq!(g[(0, 0)], 35.0);
        assert_eq!(g[(0, 1)], 44.0);
        assert_eq!(g[(1, 1)], 56.0);
    }

    #[test]
    fn norm2_avoids_overflow() {
        let v = [3e200, 4e200];
        assert!((norm2(&v) / 5e200 - 1.0).abs() < 1e-15);
        assert_eq!(norm2(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn shape_errors_are_reported() {
        assert!(Block::from_col_major(2, 2, vec![1.0; 3]).is_err());
        assert!(Block::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }
}
