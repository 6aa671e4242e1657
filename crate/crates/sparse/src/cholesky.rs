use crate::ordering::{self, FillOrdering};
use crate::{CsrMatrix, SparseError};

/// Envelope (profile) Cholesky factorization `Q A Q^T = L L^T` of a real
/// symmetric positive definite matrix.
///
/// Only the lower triangle of `A` is read. Row `i` of `L` is stored densely
/// from its first structural nonzero to the diagonal, which after a
/// reverse Cuthill-McKee ordering keeps the profile tight.
#[derive(Debug, Clone)]
pub struct CholFactor {
    n: usize,
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    vals: Vec<f64>,
}

/// A pivot must exceed this fraction of its original diagonal entry.
const SPD_RTOL: f64 = 1e-14;

impl CholFactor {
    pub fn factor(a: &CsrMatrix<f64>) -> Result<Self, SparseError> {
        Self::factor_with_ordering(a, FillOrdering::default())
    }

    pub fn factor_with_ordering(
        a: &CsrMatrix<f64>,
        ordering: FillOrdering,
    ) -> Result<Self, SparseError> {
        if a.nrows() != a.ncols() {
            return Err(SparseError::NotSquare { nrows: a.nrows(), ncols: a.ncols() });
        }
        let n = a.nrows();
        let perm = ordering.permutation(a);
        let inv = ordering::invert(&perm);

        // envelope from the symmetrized pattern so either triangle may be stored
        let mut first: Vec<usize> = (0..n).collect();
        for i in 0..n {
            let pi = inv[i];
            for &j in a.row(i).0 {
                let pj = inv[j];
                let (hi, lo) = if pi >= pj { (pi, pj) } else { (pj, pi) };
                first[hi] = first[hi].min(lo);
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + i - first[i] + 1);
        }
        let mut vals = vec![0.0; start[n]];
        for i in 0..n {
            let pi = inv[i];
            let (cols, v) = a.row(i);
            for (&j, &aij) in cols.iter().zip(v) {
                let pj = inv[j];
                if pj <= pi {
                    vals[start[pi] + pj - first[pi]] = aij;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let si = start[i];
            for j in fi..i {
                let fj = first[j];
                let sj = start[j];
                let k0 = fi.max(fj);
                let (ri, rj) = (&vals[si + k0 - fi..si + j - fi], &vals[sj + k0 - fj..sj + j - fj]);
                let s: f64 = ri.iter().zip(rj).map(|(a, b)| a * b).sum();
                let ljj = vals[sj + j - fj];
                vals[si + j - fi] = (vals[si + j - fi] - s) / ljj;
            }
            let row = &vals[si..si + i - fi];
            let s: f64 = row.iter().map(|v| v * v).sum();
            let diag = vals[si + i - fi];
            let d = diag - s;
            if !(d > SPD_RTOL * diag.abs()) || !d.is_finite() {
                return Err(SparseError::NotSpd { row: perm[i], pivot: d });
            }
            vals[si + i - fi] = d.sqrt();
        }
        Ok(Self { n, perm, first, start, vals })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of the envelope.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SparseError> {
        if b.len() != self.n {
            return Err(SparseError::DimensionMismatch { expected: self.n, got: b.len() });
        }
        let mut x = b.to_vec();
        let mut work = vec![0.0; self.n];
        self.solve_in_place(&mut x, &mut work);
        Ok(x)
    }

    pub fn solve_in_place(&self, b: &mut [f64], work: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            work[i] = b[self.perm[i]];
        }
        for i in 0..n {
            let (fi, si) = (self.first[i], self.start[i]);
            let row = &self.vals[si..si + i - fi];
            let s: f64 = row.iter().zip(&work[fi..i]).map(|(l, y)| l * y).sum();
            work[i] = (work[i] - s) / self.vals[si + i - fi];
        }
        for i in (0..n).rev() {
            let (fi, si) = (self.first[i], self.start[i]);
            let xi = work[i] / self.vals[si + i - fi];
            work[i] = xi;
            for (y, l) in work[fi..i].iter_mut().zip(&self.vals[si..si + i - fi]) {
                *y -= l * xi;
            }
        }
        for i in 0..n {
            b[self.perm[i]] = work[i];
        }
    }
}
