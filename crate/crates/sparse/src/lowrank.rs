use crate::{DenseBlock, Scalar};

/// Factored block `left * right` with `left` of size `m x rank` and `right`
/// of size `rank x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankBlock<T> {
    left: DenseBlock<T>,
    right: DenseBlock<T>,
}

impl<T: Scalar> LowRankBlock<T> {
    pub fn new(left: DenseBlock<T>, right: DenseBlock<T>) -> Self {
        assert_eq!(left.ncols(), right.nrows());
        Self { left, right }
    }

    pub fn zero(nrows: usize, ncols: usize) -> Self {
        Self::new(DenseBlock::zeros(nrows, 0), DenseBlock::zeros(0, ncols))
    }

    pub fn rank(&self) -> usize {
        self.left.ncols()
    }
    pub fn nrows(&self) -> usize {
        self.left.nrows()
    }
    pub fn ncols(&self) -> usize {
        self.right.ncols()
    }
    pub fn left(&self) -> &DenseBlock<T> {
        &self.left
    }
    pub fn right(&self) -> &DenseBlock<T> {
        &self.right
    }
    pub fn left_mut(&mut self) -> &mut DenseBlock<T> {
        &mut self.left
    }

    /// Entries needed to store both factors.
    pub fn stored_entries(&self) -> usize {
        self.rank() * (self.nrows() + self.ncols())
    }

    pub fn to_dense(&self) -> DenseBlock<T> {
        self.left.matmul(&self.right)
    }

    /// `y += alpha * (left * right) x`
    pub fn matvec_acc(&self, alpha: T, x: &[T], y: &mut [T]) {
        if self.rank() == 0 {
            return;
        }
        let mut t = vec![T::zero(); self.rank()];
        self.right.matvec_acc(T::one(), x, &mut t);
        self.left.matvec_acc(alpha, &t, y);
    }
}

/// Truncated SVD of `block` at relative 2-norm accuracy `tol`.
///
/// Singular values `sigma_i <= tol * sigma_max` are dropped, so the result
/// has the minimal rank `r` with `||B - L R||_2 = sigma_{r+1} <= tol * ||B||_2`.
/// The singular values are folded into the left factor.
pub fn truncated_svd<T: Scalar>(block: &DenseBlock<T>, tol: f64) -> LowRankBlock<T> {
    assert!(tol >= 0.0, "tolerance must be nonnegative");
    let (m, n) = (block.nrows(), block.ncols());
    if m == 0 || n == 0 || block.is_zero() {
        return LowRankBlock::zero(m, n);
    }
    let (u, s, v_t) = T::thin_svd(m, n, block.data());
    let p = s.len();

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let smax = s[order[0]];
    let cutoff = tol * smax;
    let keep: Vec<usize> = order.into_iter().take_while(|&i| s[i] > cutoff).collect();
    let r = keep.len();

    let left = DenseBlock::from_fn(m, r, |i, k| u[keep[k] * m + i].scale(s[keep[k]]));
    let right = DenseBlock::from_fn(r, n, |k, j| v_t[j * p + keep[k]]);
    LowRankBlock::new(left, right)
}

/// Largest singular value.
pub fn spectral_norm<T: Scalar>(block: &DenseBlock<T>) -> f64 {
    if block.is_zero() {
        return 0.0;
    }
    let (_, s, _) = T::thin_svd(block.nrows(), block.ncols(), block.data());
    s.into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_outer_product() {
        let u = [1.0, -2.0, 0.5];
        let v = [3.0, 1.0, 0.0, 2.0];
        let b = DenseBlock::from_fn(3, 4, |i, j| u[i] * v[j]);
        let lr = truncated_svd(&b, 1e-12);
        assert_eq!(lr.rank(), 1);
        let diff = lr.to_dense().data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-13);
    }

    #[test]
    fn zero_block_rank_zero() {
        let b = DenseBlock::<f64>::zeros(5, 3);
        assert_eq!(truncated_svd(&b, 0.0).rank(), 0);
        assert_eq!(truncated_svd(&b, 0.5).rank(), 0);
    }

    #[test]
    fn diagonal_gap() {
        let b = DenseBlock::from_col_major(2, 2, vec![1.0, 0.0, 0.0, 1e-4]);
        assert_eq!(truncated_svd(&b, 1e-2).rank(), 1);
        assert_eq!(truncated_svd(&b, 1e-6).rank(), 2);
        assert_eq!(truncated_svd(&b, 1.0).rank(), 0);
    }
}
