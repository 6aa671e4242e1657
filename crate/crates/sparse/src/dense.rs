use crate::Scalar;

/// Dense matrix block stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseBlock<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseBlock<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![T::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut b = Self::zeros(n, n);
        for i in 0..n {
            b.set(i, i, T::one());
        }
        b
    }

    pub fn from_col_major(nrows: usize, ncols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), nrows * ncols);
        Self { nrows, ncols, data }
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, data }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }
    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn data(&self) -> &[T] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.nrows + i]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.nrows + i] = v;
    }
    #[inline]
    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }
    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == T::zero())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut c = Self::zeros(self.nrows, other.ncols);
        c.gemm_acc(T::one(), self, other);
        c
    }

    /// `self += alpha * a * b`
    pub fn gemm_acc(&mut self, alpha: T, a: &Self, b: &Self) {
        assert_eq!(a.ncols, b.nrows);
        assert_eq!(self.nrows, a.nrows);
        assert_eq!(self.ncols, b.ncols);
        let m = self.nrows;
        for j in 0..b.ncols {
            let cj = &mut self.data[j * m..(j + 1) * m];
            for p in 0..a.ncols {
                let bpj = b.data[j * b.nrows + p];
                if bpj == T::zero() {
                    continue;
                }
                let s = alpha * bpj;
                let ap = &a.data[p * m..(p + 1) * m];
                for (c, &av) in cj.iter_mut().zip(ap) {
                    *c += av * s;
                }
            }
        }
    }

    /// `self -= a * b`
    pub fn gemm_sub(&mut self, a: &Self, b: &Self) {
        self.gemm_acc(-T::one(), a, b);
    }

    /// `y += alpha * A x`
    pub fn matvec_acc(&self, alpha: T, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (j, &xj) in x.iter().enumerate() {
            if xj == T::zero() {
                continue;
            }
            let s = alpha * xj;
            for (yi, &a) in y.iter_mut().zip(self.col(j)) {
                *yi += a * s;
            }
        }
    }

    /// In-place LU with partial pivoting confined to this block.
    ///
    /// On success the strict lower triangle holds `L` (unit diagonal implied),
    /// the upper triangle holds `U`, and the returned vector lists the row
    /// exchanged with row `k` at step `k`. A pivot whose magnitude is at most
    /// `1e-14` times the largest entry of the block is reported as the failing
    /// column.
    pub fn lu_in_place(&mut self) -> Result<Vec<usize>, usize> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let scale = self.max_abs();
        let mut piv = Vec::with_capacity(n);
        for k in 0..n {
            let col = self.col(k);
            let mut p = k;
            let mut best = col[k].abs();
            for (i, v) in col.iter().enumerate().skip(k + 1) {
                let t = v.abs();
                if t > best {
                    best = t;
                    p = i;
                }
            }
            if best == 0.0 || best <= 1e-14 * scale {
                return Err(k);
            }
            piv.push(p);
            if p != k {
                for j in 0..n {
                    self.data.swap(j * n + k, j * n + p);
                }
            }
            let inv = T::one() / self.data[k * n + k];
            for i in k + 1..n {
                self.data[k * n + i] *= inv;
            }
            for j in k + 1..n {
                let ukj = self.data[j * n + k];
                if ukj == T::zero() {
                    continue;
                }
                let (left, right) = self.data.split_at_mut(j * n);
                let lk = &left[k * n + k + 1..k * n + n];
                let cj = &mut right[k + 1..n];
                for (c, &l) in cj.iter_mut().zip(lk) {
                    *c -= l * ukj;
                }
            }
        }
        Ok(piv)
    }

    /// Applies recorded row exchanges to the rows of `self`.
    pub fn apply_row_swaps(&mut self, piv: &[usize]) {
        let m = self.nrows;
        for (k, &p) in piv.iter().enumerate() {
            if p != k {
                for j in 0..self.ncols {
                    self.data.swap(j * m + k, j * m + p);
                }
            }
        }
    }

    /// Solves `L X = B` in place, `L` the unit lower triangle of `self`.
    pub fn solve_unit_lower(&self, b: &mut Self) {
        let n = self.nrows;
        assert_eq!(b.nrows, n);
        for j in 0..b.ncols {
            let bj = &mut b.data[j * n..(j + 1) * n];
            for k in 0..n {
                let x = bj[k];
                if x == T::zero() {
                    continue;
                }
                let lk = &self.data[k * n..(k + 1) * n];
                for i in k + 1..n {
                    bj[i] -= lk[i] * x;
                }
            }
        }
    }

    /// Solves `X U = B` in place, `U` the upper triangle of `self`.
    pub fn solve_upper_right(&self, b: &mut Self) {
        let n = self.nrows;
        assert_eq!(b.ncols, n);
        let m = b.nrows;
        for j in 0..n {
            for k in 0..j {
                let ukj = self.data[j * n + k];
                if ukj == T::zero() {
                    continue;
                }
                let (left, right) = b.data.split_at_mut(j * m);
                let bk = &left[k * m..(k + 1) * m];
                for (c, &v) in right[..m].iter_mut().zip(bk) {
                    *c -= v * ukj;
                }
            }
            let inv = T::one() / self.data[j * n + j];
            for c in &mut b.data[j * m..(j + 1) * m] {
                *c *= inv;
            }
        }
    }

    /// Solves `L y = b` in place for a vector, `L` unit lower.
    pub fn solve_unit_lower_vec(&self, b: &mut [T]) {
        let n = self.nrows;
        for k in 0..n {
            let x = b[k];
            if x == T::zero() {
                continue;
            }
            let lk = &self.data[k * n..(k + 1) * n];
            for i in k + 1..n {
                b[i] -= lk[i] * x;
            }
        }
    }

    /// Solves `U x = b` in place for a vector.
    pub fn solve_upper_vec(&self, b: &mut [T]) {
        let n = self.nrows;
        for k in (0..n).rev() {
            let x = b[k] / self.data[k * n + k];
            b[k] = x;
            if x == T::zero() {
                continue;
            }
            let uk = &self.data[k * n..k * n + k];
            for (bi, &u) in b[..k].iter_mut().zip(uk) {
                *bi -= u * x;
            }
        }
    }
}
