use crate::ordering::FillOrdering;
use crate::{CsrMatrix, Scalar, SparseError};

/// Pivots smaller than this fraction of their row's largest entry are treated
/// as zero.
const PIVOT_RTOL: f64 = 1e-14;

/// Sparse LU factorization `P_r (Q A Q^T) = L U` with a symmetric fill-reducing
/// pre-ordering `Q` and row partial pivoting `P_r`.
///
/// Left-looking (Gilbert-Peierls): each column is obtained from a sparse
/// triangular solve whose nonzero pattern is found by depth-first search in
/// the graph of `L`. Pivoting uses threshold 1.0, ties broken on the lowest
/// row index.
#[derive(Debug, Clone)]
pub struct LuFactor<T> {
    n: usize,
    perm: Vec<usize>,
    pinv: Vec<usize>,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<T>,
    u_ptr: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<T>,
}

const NONE: usize = usize::MAX;

impl<T: Scalar> LuFactor<T> {
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self, SparseError> {
        Self::factor_with_ordering(a, FillOrdering::default())
    }

    pub fn factor_with_ordering(
        a: &CsrMatrix<T>,
        ordering: FillOrdering,
    ) -> Result<Self, SparseError> {
        if a.nrows() != a.ncols() {
            return Err(SparseError::NotSquare { nrows: a.nrows(), ncols: a.ncols() });
        }
        let n = a.nrows();
        let perm = ordering.permutation(a);
        let ap = a.permute_symmetric(&perm);
        let row_max: Vec<f64> = (0..n)
            .map(|i| ap.row(i).1.iter().map(|v| v.abs()).fold(0.0, f64::max))
            .collect();
        // column k of ap is row k of its transpose
        let cols = ap.transpose();

        let mut pinv = vec![NONE; n];
        let mut l_ptr = vec![0usize; n + 1];
        let mut u_ptr = vec![0usize; n + 1];
        let mut l_idx = Vec::with_capacity(4 * ap.nnz());
        let mut l_val = Vec::with_capacity(4 * ap.nnz());
        let mut u_idx = Vec::with_capacity(4 * ap.nnz());
        let mut u_val = Vec::with_capacity(4 * ap.nnz());

        let mut x = vec![T::zero(); n];
        let mut xi = vec![0usize; n];
        let mut stack = vec![0usize; n];
        let mut pstack = vec![0usize; n];
        let mut mark = vec![NONE; n];

        for k in 0..n {
            l_ptr[k] = l_idx.len();
            u_ptr[k] = u_idx.len();

            // reach: topological order of the nonzeros of L \ A(:, k)
            let (bi, bv) = cols.row(k);
            let mut top = n;
            for &r in bi {
                if mark[r] != k {
                    top = dfs(
                        r, k, top, &l_ptr, &l_idx, &pinv, &mut mark, &mut xi, &mut stack,
                        &mut pstack,
                    );
                }
            }
            for &i in &xi[top..] {
                x[i] = T::zero();
            }
            for (&r, &v) in bi.iter().zip(bv) {
                x[r] = v;
            }
            for p in top..n {
                let j = xi[p];
                let jj = pinv[j];
                if jj == NONE {
                    continue;
                }
                let xj = x[j];
                if xj == T::zero() {
                    continue;
                }
                for q in l_ptr[jj] + 1..l_ptr[jj + 1] {
                    let r = l_idx[q];
                    x[r] -= l_val[q] * xj;
                }
            }

            // pivot search over non-pivotal rows
            let mut ipiv = NONE;
            let mut best = -1.0;
            for &i in &xi[top..] {
                if pinv[i] == NONE {
                    let t = x[i].abs();
                    if t > best || (t == best && i < ipiv) {
                        best = t;
                        ipiv = i;
                    }
                } else {
                    u_idx.push(pinv[i]);
                    u_val.push(x[i]);
                }
            }
            if ipiv == NONE {
                return Err(SparseError::Singular { row: perm[k] });
            }
            if best == 0.0 || best < PIVOT_RTOL * row_max[ipiv] {
                return Err(SparseError::Singular { row: perm[ipiv] });
            }
            let pivot = x[ipiv];
            u_idx.push(k);
            u_val.push(pivot);
            pinv[ipiv] = k;
            l_idx.push(ipiv);
            l_val.push(T::one());
            for &i in &xi[top..] {
                if pinv[i] == NONE {
                    l_idx.push(i);
                    l_val.push(x[i] / pivot);
                }
                x[i] = T::zero();
            }
        }
        l_ptr[n] = l_idx.len();
        u_ptr[n] = u_idx.len();
        for r in &mut l_idx {
            *r = pinv[*r];
        }
        Ok(Self { n, perm, pinv, l_ptr, l_idx, l_val, u_ptr, u_idx, u_val })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of `L` plus `U` (unit diagonal of `L` included).
    pub fn nnz(&self) -> usize {
        self.l_val.len() + self.u_val.len()
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, SparseError> {
        if b.len() != self.n {
            return Err(SparseError::DimensionMismatch { expected: self.n, got: b.len() });
        }
        let mut x = b.to_vec();
        let mut work = vec![T::zero(); self.n];
        self.solve_in_place(&mut x, &mut work);
        Ok(x)
    }

    /// Overwrites `b` with `A^{-1} b`; `work` must have length `dim()`.
    pub fn solve_in_place(&self, b: &mut [T], work: &mut [T]) {
        let n = self.n;
        for i in 0..n {
            work[self.pinv[i]] = b[self.perm[i]];
        }
        for j in 0..n {
            let cj = work[j];
            if cj == T::zero() {
                continue;
            }
            for q in self.l_ptr[j] + 1..self.l_ptr[j + 1] {
                work[self.l_idx[q]] -= self.l_val[q] * cj;
            }
        }
        for j in (0..n).rev() {
            let last = self.u_ptr[j + 1] - 1;
            let cj = work[j] / self.u_val[last];
            work[j] = cj;
            if cj == T::zero() {
                continue;
            }
            for q in self.u_ptr[j]..last {
                work[self.u_idx[q]] -= self.u_val[q] * cj;
            }
        }
        for i in 0..n {
            b[self.perm[i]] = work[i];
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    root: usize,
    stamp: usize,
    mut top: usize,
    l_ptr: &[usize],
    l_idx: &[usize],
    pinv: &[usize],
    mark: &mut [usize],
    xi: &mut [usize],
    stack: &mut [usize],
    pstack: &mut [usize],
) -> usize {
    let mut head = 0usize;
    stack[0] = root;
    loop {
        let j = stack[head];
        let jj = pinv[j];
        if mark[j] != stamp {
            mark[j] = stamp;
            pstack[head] = if jj == NONE { 0 } else { l_ptr[jj] };
        }
        let end = if jj == NONE { 0 } else { l_ptr[jj + 1] };
        let mut descended = false;
        let mut p = pstack[head];
        while p < end {
            let i = l_idx[p];
            p += 1;
            if mark[i] != stamp {
                pstack[head] = p;
                head += 1;
                stack[head] = i;
                descended = true;
                break;
            }
        }
        if !descended {
            top -= 1;
            xi[top] = j;
            if head == 0 {
                return top;
            }
            head -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;

    #[test]
    fn diagonal_solve() {
        let a = CsrMatrix::from_diagonal(&[2.0, 4.0]);
        let f = LuFactor::factor(&a).unwrap();
        assert_eq!(f.solve(&[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn one_by_one_zero_is_singular() {
        let a = CsrMatrix::try_new(1, 1, vec![0, 1], vec![0], vec![0.0]).unwrap();
        assert!(matches!(LuFactor::factor(&a), Err(SparseError::Singular { row: 0 })));
    }

    #[test]
    fn structurally_empty_column_is_singular() {
        let a = CsrMatrix::from_dense(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        assert!(matches!(LuFactor::factor(&a), Err(SparseError::Singular { .. })));
    }

    #[test]
    fn needs_pivoting() {
        // zero on the diagonal, solvable only with row exchanges
        let a = CsrMatrix::from_dense(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 3.0, 1.0]);
        let f = LuFactor::factor_with_ordering(&a, FillOrdering::Natural).unwrap();
        let x_true = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&x_true).unwrap();
        let x = f.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn complex_small() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let a = CsrMatrix::from_dense(2, 2, &[one, i, i, one * 2.0]);
        let f = LuFactor::factor(&a).unwrap();
        let b = [one, i];
        let x = f.solve(&b).unwrap();
        let r = a.mul_vec(&x).unwrap();
        assert!((r[0] - b[0]).norm() < 1e-15 && (r[1] - b[1]).norm() < 1e-15);
    }
}
