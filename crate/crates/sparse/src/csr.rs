use crate::{Scalar, SparseError};

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row. Explicitly stored
/// zeros are allowed and are kept by every structural operation.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    pub fn try_new(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self, SparseError> {
        if row_offsets.len() != nrows + 1 {
            return Err(SparseError::InvalidStructure(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                nrows + 1
            )));
        }
        if row_offsets[0] != 0 {
            return Err(SparseError::InvalidStructure("row_offsets[0] != 0".into()));
        }
        if row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(SparseError::InvalidStructure("row_offsets decreasing".into()));
        }
        let nnz = row_offsets[nrows];
        if col_indices.len() != nnz || values.len() != nnz {
            return Err(SparseError::InvalidStructure(format!(
                "expected {nnz} entries, got {} indices and {} values",
                col_indices.len(),
                values.len()
            )));
        }
        for i in 0..nrows {
            let cols = &col_indices[row_offsets[i]..row_offsets[i + 1]];
            if cols.iter().any(|&c| c >= ncols) {
                return Err(SparseError::InvalidStructure(format!(
                    "column index out of bounds in row {i}"
                )));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(SparseError::InvalidStructure(format!(
                    "columns not strictly increasing in row {i}"
                )));
            }
        }
        Ok(Self { nrows, ncols, row_offsets, col_indices, values })
    }

    pub(crate) fn from_parts_unchecked(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<T>,
    ) -> Self {
        debug_assert_eq!(row_offsets.len(), nrows + 1);
        Self { nrows, ncols, row_offsets, col_indices, values }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_parts_unchecked(nrows, ncols, vec![0; nrows + 1], Vec::new(), Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); n])
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_parts_unchecked(n, n, (0..=n).collect(), (0..n).collect(), diag.to_vec())
    }

    /// Builds from a row-major dense array, dropping exact zeros.
    pub fn from_dense(nrows: usize, ncols: usize, data: &[T]) -> Self {
        assert_eq!(data.len(), nrows * ncols);
        let mut b = TripletBuilder::new(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                let v = data[i * ncols + j];
                if v != T::zero() {
                    b.push(i, j, v);
                }
            }
        }
        b.build()
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }
    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }
    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }
    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[s..e], &self.values[s..e])
    }

    /// Entry `(i, j)`, zero if not stored.
    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => T::zero(),
        }
    }

    /// `y = A x` with a fixed per-row accumulation order.
    pub fn spmv(&self, x: &[T], y: &mut [T]) -> Result<(), SparseError> {
        if x.len() != self.ncols {
            return Err(SparseError::DimensionMismatch { expected: self.ncols, got: x.len() });
        }
        if y.len() != self.nrows {
            return Err(SparseError::DimensionMismatch { expected: self.nrows, got: y.len() });
        }
        self.spmv_unchecked(x, y);
        Ok(())
    }

    /// Panics (in debug builds) on dimension mismatch.
    #[inline]
    pub fn spmv_unchecked(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut acc = T::zero();
            for p in s..e {
                acc += self.values[p] * x[self.col_indices[p]];
            }
            *yi = acc;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>, SparseError> {
        let mut y = vec![T::zero(); self.nrows];
        self.spmv(x, &mut y)?;
        Ok(y)
    }

    /// `y = A^T x` (plain transpose, no conjugation).
    pub fn spmv_transpose(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        y.iter_mut().for_each(|v| *v = T::zero());
        for (i, &xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                y[c] += v * xi;
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let offsets = counts.clone();
        let mut next = counts;
        let mut cols = vec![0; self.nnz()];
        let mut vals = vec![T::zero(); self.nnz()];
        for i in 0..self.nrows {
            let (ci, vi) = self.row(i);
            for (&c, &v) in ci.iter().zip(vi) {
                let p = next[c];
                cols[p] = i;
                vals[p] = v;
                next[c] += 1;
            }
        }
        Self::from_parts_unchecked(self.ncols, self.nrows, offsets, cols, vals)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> CsrMatrix<U> {
        CsrMatrix::from_parts_unchecked(
            self.nrows,
            self.ncols,
            self.row_offsets.clone(),
            self.col_indices.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn scaled(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// `alpha * A + beta * B` on the union pattern.
    pub fn add(&self, other: &Self, alpha: T, beta: T) -> Result<Self, SparseError> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(SparseError::DimensionMismatch {
                expected: self.nrows * self.ncols,
                got: other.nrows * other.ncols,
            });
        }
        let mut offsets = Vec::with_capacity(self.nrows + 1);
        offsets.push(0);
        let mut cols = Vec::with_capacity(self.nnz() + other.nnz());
        let mut vals = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.nrows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let take_a = q >= cb.len() || (p < ca.len() && ca[p] <= cb[q]);
                let take_b = p >= ca.len() || (q < cb.len() && cb[q] <= ca[p]);
                if take_a && take_b {
                    cols.push(ca[p]);
                    vals.push(alpha * va[p] + beta * vb[q]);
                    p += 1;
                    q += 1;
                } else if take_a {
                    cols.push(ca[p]);
                    vals.push(alpha * va[p]);
                    p += 1;
                } else {
                    cols.push(cb[q]);
                    vals.push(beta * vb[q]);
                    q += 1;
                }
            }
            offsets.push(cols.len());
        }
        Ok(Self::from_parts_unchecked(self.nrows, self.ncols, offsets, cols, vals))
    }

    /// Sparse product `A * B`.
    pub fn matmul(&self, other: &Self) -> Result<Self, SparseError> {
        if self.ncols != other.nrows {
            return Err(SparseError::DimensionMismatch { expected: self.ncols, got: other.nrows });
        }
        let mut offsets = Vec::with_capacity(self.nrows + 1);
        offsets.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut acc = vec![T::zero(); other.ncols];
        let mut mark = vec![usize::MAX; other.ncols];
        let mut touched = Vec::new();
        for i in 0..self.nrows {
            touched.clear();
            let (ca, va) = self.row(i);
            for (&k, &a) in ca.iter().zip(va) {
                let (cb, vb) = other.row(k);
                for (&j, &b) in cb.iter().zip(vb) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = T::zero();
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                cols.push(j);
                vals.push(acc[j]);
            }
            offsets.push(cols.len());
        }
        Ok(Self::from_parts_unchecked(self.nrows, other.ncols, offsets, cols, vals))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// Extracts `A[rows, cols]`; both index lists give new-to-old maps.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let mut out_cols = Vec::new();
        let mut out_vals = Vec::new();
        let mut row_buf: Vec<(usize, T)> = Vec::new();
        for &r in rows {
            row_buf.clear();
            let (ci, vi) = self.row(r);
            for (&c, &v) in ci.iter().zip(vi) {
                let nc = col_map[c];
                if nc != usize::MAX {
                    row_buf.push((nc, v));
                }
            }
            row_buf.sort_unstable_by_key(|e| e.0);
            for &(c, v) in &row_buf {
                out_cols.push(c);
                out_vals.push(v);
            }
            offsets.push(out_cols.len());
        }
        Self::from_parts_unchecked(rows.len(), cols.len(), offsets, out_cols, out_vals)
    }

    /// `B[i, j] = A[perm[i], perm[j]]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        assert_eq!(self.nrows, self.ncols);
        assert_eq!(perm.len(), self.nrows);
        self.submatrix(perm, perm)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.nrows * self.ncols];
        for i in 0..self.nrows {
            let (ci, vi) = self.row(i);
            for (&c, &v) in ci.iter().zip(vi) {
                d[i * self.ncols + c] = v;
            }
        }
        d
    }

    /// Bitwise symmetry check `A == A^T` (values compared exactly).
    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && *self == self.transpose()
    }

    /// Largest `|A_ij - B_ij|` over the union pattern.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        match self.add(other, T::one(), -T::one()) {
            Ok(d) => d.values.iter().map(|v| v.abs()).fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs_sqr()).sum::<f64>().sqrt()
    }

    /// Symmetrized adjacency lists of the structural graph, self loops removed.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        assert_eq!(self.nrows, self.ncols);
        let mut adj = vec![Vec::new(); self.nrows];
        for i in 0..self.nrows {
            for &j in self.row(i).0 {
                if i != j {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }
}

/// Coordinate-format accumulator. Duplicate entries are summed in insertion
/// order, so symmetric contributions pushed in the same sequence produce
/// bitwise-identical `(i, j)` and `(j, i)` values.
#[derive(Debug, Clone)]
pub struct TripletBuilder<T> {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> TripletBuilder<T> {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self { nrows, ncols, entries: Vec::with_capacity(cap) }
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.entries.push((i, j, v));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(self) -> CsrMatrix<T> {
        let mut counts = vec![0usize; self.nrows + 1];
        for e in &self.entries {
            counts[e.0 + 1] += 1;
        }
        for i in 0..self.nrows {
            counts[i + 1] += counts[i];
        }
        // stable bucket by row
        let mut bucket: Vec<(usize, T)> = vec![(0, T::zero()); self.entries.len()];
        let mut next = counts.clone();
        for &(i, j, v) in &self.entries {
            bucket[next[i]] = (j, v);
            next[i] += 1;
        }
        let mut offsets = Vec::with_capacity(self.nrows + 1);
        offsets.push(0);
        let mut cols = Vec::with_capacity(self.entries.len());
        let mut vals = Vec::with_capacity(self.entries.len());
        for i in 0..self.nrows {
            let row = &mut bucket[counts[i]..counts[i + 1]];
            row.sort_by_key(|e| e.0);
            let mut p = 0;
            while p < row.len() {
                let c = row[p].0;
                let mut acc = row[p].1;
                p += 1;
                while p < row.len() && row[p].0 == c {
                    acc += row[p].1;
                    p += 1;
                }
                cols.push(c);
                vals.push(acc);
            }
            offsets.push(cols.len());
        }
        CsrMatrix::from_parts_unchecked(self.nrows, self.ncols, offsets, cols, vals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spmv_identity() {
        let a = CsrMatrix::<f64>::identity(3);
        assert_eq!(a.mul_vec(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn spmv_zero_matrix() {
        let a = CsrMatrix::<f64>::zeros(3, 3);
        assert_eq!(a.mul_vec(&[4.0, -1.0, 2.5]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn spmv_hand_arithmetic() {
        let a = CsrMatrix::from_dense(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(a.mul_vec(&[1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let a = CsrMatrix::<f64>::identity(3);
        assert!(matches!(
            a.mul_vec(&[1.0, 2.0]),
            Err(SparseError::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn try_new_rejects_unsorted_columns() {
        let r = CsrMatrix::try_new(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]);
        assert!(r.is_err());
        let r = CsrMatrix::try_new(1, 3, vec![0, 1], vec![3], vec![1.0]);
        assert!(r.is_err());
    }

    #[test]
    fn triplets_sum_duplicates() {
        let mut b = TripletBuilder::new(2, 2);
        b.push(0, 1, 1.0);
        b.push(1, 0, 2.0);
        b.push(0, 1, 0.5);
        let a = b.build();
        assert_eq!(a.get(0, 1), 1.5);
        assert_eq!(a.get(1, 0), 2.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn transpose_and_matmul() {
        let a = CsrMatrix::from_dense(2, 3, &[1.0, 0.0, 2.0, 0.0, 3.0, 0.0]);
        let at = a.transpose();
        assert_eq!(at.nrows(), 3);
        assert_eq!(at.get(2, 0), 2.0);
        let aat = a.matmul(&at).unwrap();
        assert_eq!(aat.to_dense(), vec![5.0, 0.0, 0.0, 9.0]);
    }

    #[test]
    fn add_union_pattern() {
        let a = CsrMatrix::from_dense(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let b = CsrMatrix::from_dense(2, 2, &[0.0, 2.0, 0.0, 1.0]);
        let c = a.add(&b, 1.0, -1.0).unwrap();
        assert_eq!(c.to_dense(), vec![1.0, -2.0, 0.0, 0.0]);
        assert_eq!(c.nnz(), 3);
    }
}
