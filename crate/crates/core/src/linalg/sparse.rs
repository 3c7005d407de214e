use num_complex::Complex64;

use super::dense::Block;
use crate::error::{Error, Result};

/// Real symmetric matrix in CSR form with both triangles stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds from a full (both-triangle) list of triplets.
    ///
    /// Duplicate entries are summed. The resulting pattern and values must be
    /// exactly symmetric.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::DimMismatch {
                    expected: n,
                    got: i.max(j) + 1,
                });
            }
            entries.push((i, j, v));
        }
        let m = Self::compress(n, entries);
        m.check_symmetric()?;
        Ok(m)
    }

    /// Builds from one triangle; off-diagonal entries are mirrored.
    /// Entries may come from either triangle but a pair (i,j),(j,i) is
    /// treated as two contributions to the same symmetric entry.
    pub fn from_lower_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut entries = Vec::with_capacity(2 * triplets.len());
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::DimMismatch {
                    expected: n,
                    got: i.max(j) + 1,
                });
            }
            entries.push((i, j, v));
            if i != j {
                entries.push((j, i, v));
            }
        }
        Ok(Self::compress(n, entries))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        SparseSymMatrix {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: d.to_vec(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    /// Dense square block to CSR, dropping exact zeros.
    pub fn from_dense(a: &Block) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        let n = a.nrows();
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = a[(i, j)];
                if v != 0.0 {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, &t)
    }

    /// Tridiagonal `[-1, 2, -1]` Laplacian of order `n`.
    pub fn laplacian_1d(n: usize) -> Self {
        let mut t = Vec::with_capacity(2 * n);
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
        }
        Self::from_lower_triplets(n, &t).expect("indices in range")
    }

    fn compress(n: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in entries {
            if last == Some((i, j)) {
                *values.last_mut().expect("nonempty") += v;
                continue;
            }
            last = Some((i, j));
            row_ptr[i + 1] += 1;
            col_idx.push(j);
            values.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSymMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    fn check_symmetric(&self) -> Result<()> {
        for i in 0..self.n {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[p];
                if self.get(j, i) != Some(self.values[p]) {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .binary_search(&j)
            .ok()
            .map(|k| self.values[lo + k])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i).unwrap_or(0.0)).collect()
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let mut d = 0.0;
            let mut off = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.col_idx[p] == i {
                    d += self.values[p];
                } else {
                    off += self.values[p].abs();
                }
            }
            lo = lo.min(d - off);
            hi = hi.max(d + off);
        }
        if self.n == 0 {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    pub fn to_dense(&self) -> Block {
        let mut b = Block::zeros(self.n, self.n);
        for i in 0..self.n {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                b[(i, self.col_idx[p])] = self.values[p];
            }
        }
        b
    }

    /// `y = A x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.n];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// Unchecked-length kernel; slices must have length `n`.
    #[inline]
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut acc = 0.0;
            for p in lo..hi {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *yi = acc;
        }
    }

    /// `y = (z I - A) x` for complex `x`.
    #[inline]
    pub fn shifted_apply_into(&self, z: Complex64, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut re = 0.0;
            let mut im = 0.0;
            for p in lo..hi {
                let v = self.values[p];
                let xj = x[self.col_idx[p]];
                re += v * xj.re;
                im += v * xj.im;
            }
            *yi = z * x[i] - Complex64::new(re, im);
        }
    }

    /// `A Y` column by column.
    pub fn apply_block(&self, y: &Block) -> Result<Block> {
        if y.nrows() != self.n {
            return Err(Error::DimMismatch {
                expected: self.n,
                got: y.nrows(),
            });
        }
        let mut out = Block::zeros(self.n, y.ncols());
        for j in 0..y.ncols() {
            self.spmv_into(y.col(j), out.col_mut(j));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_diagonal_products() {
        let i3 = SparseSymMatrix::identity(3);
        assert_eq!(i3.spmv(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let d = SparseSymMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(d.spmv(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn spmv_rejects_wrong_length() {
        let d = SparseSymMatrix::identity(3);
        assert!(matches!(
            d.spmv(&[1.0, 2.0]),
            Err(Error::DimMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn lower_triplets_are_mirrored_and_summed() {
        let m = SparseSymMatrix::from_lower_triplets(
            3,
            &[(0, 0, 2.0), (1, 0, 1.0), (2, 2, 5.0), (2, 2, 1.0)],
        )
        .unwrap();
        assert_eq!(m.nnz(), 4);
        assert_eq!(m.get(0, 1), Some(1.0));
        assert_eq!(m.get(2, 2), Some(6.0));
        assert_eq!(m.row_ptr(), &[0, 2, 3, 4]);
    }

    #[test]
    fn asymmetric_triplets_rejected() {
        let r = SparseSymMatrix::from_triplets(2, &[(0, 1, 1.0), (1, 0, 2.0)]);
        assert!(matches!(r, Err(Error::NotSymmetric { .. })));
        let r = SparseSymMatrix::from_triplets(2, &[(0, 1, 1.0)]);
        assert!(matches!(r, Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn laplacian_gershgorin() {
        let l = SparseSymMatrix::laplacian_1d(5);
        assert_eq!(l.nnz(), 13);
        assert_eq!(l.gershgorin_bounds(), (0.0, 4.0));
    }

    #[test]
    fn shifted_apply_matches_definition() {
        let d = SparseSymMatrix::from_diagonal(&[1.0, 2.0]);
        let z = Complex64::new(3.0, 1.0);
        let x = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let mut y = [Complex64::default(); 2];
        d.shifted_apply_into(z, &x, &mut y);
        assert_eq!(y[0], Complex64::new(2.0, 1.0));
        assert_eq!(y[1], Complex64::new(-1.0, 1.0));
    }
}
