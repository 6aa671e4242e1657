//! Block low-rank LU. Off-diagonal factor blocks are compressed by truncated
//! SVD at relative accuracy `epsilon` once they are final; diagonal blocks
//! stay dense and are pivoted within the block.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::Instant;

use maxlab_sparse::ordering::FillOrdering;
use maxlab_sparse::{truncated_svd, CsrMatrix, DenseBlock, LowRankBlock, Scalar};

use super::SetupReport;
use crate::error::{Error, Result};
use crate::krylov::{fgmres, KrylovConfig, Preconditioner, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlrConfig {
    pub epsilon: f64,
    pub block_size: usize,
    pub ordering: FillOrdering,
}

impl Default for BlrConfig {
    fn default() -> Self {
        Self { epsilon: 0.0, block_size: 64, ordering: FillOrdering::ReverseCuthillMcKee }
    }
}

impl BlrConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self { epsilon, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FactorBlock<T> {
    Dense(DenseBlock<T>),
    LowRank(LowRankBlock<T>),
}

impl<T: Scalar> FactorBlock<T> {
    pub fn stored_entries(&self) -> usize {
        match self {
            FactorBlock::Dense(d) => d.nrows() * d.ncols(),
            FactorBlock::LowRank(l) => l.stored_entries(),
        }
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            FactorBlock::Dense(_) => None,
            FactorBlock::LowRank(l) => Some(l.rank()),
        }
    }

    fn matvec_acc(&self, alpha: T, x: &[T], y: &mut [T]) {
        match self {
            FactorBlock::Dense(d) => d.matvec_acc(alpha, x, y),
            FactorBlock::LowRank(l) => l.matvec_acc(alpha, x, y),
        }
    }

    fn swap_rows(&mut self, piv: &[usize]) {
        match self {
            FactorBlock::Dense(d) => d.apply_row_swaps(piv),
            FactorBlock::LowRank(l) => l.left_mut().apply_row_swaps(piv),
        }
    }

    /// Compressed form when it stores fewer entries than the dense block.
    fn compress(block: DenseBlock<T>, epsilon: f64) -> Self {
        if epsilon == 0.0 {
            return FactorBlock::Dense(block);
        }
        let lr = truncated_svd(&block, epsilon);
        if lr.stored_entries() < block.nrows() * block.ncols() {
            FactorBlock::LowRank(lr)
        } else {
            FactorBlock::Dense(block)
        }
    }
}

/// `t -= a * b` for any combination of dense and low-rank operands.
fn sub_product<T: Scalar>(t: &mut DenseBlock<T>, a: &FactorBlock<T>, b: &FactorBlock<T>) {
    use FactorBlock::{Dense, LowRank};
    match (a, b) {
        (Dense(a), Dense(b)) => t.gemm_sub(a, b),
        (LowRank(a), Dense(b)) => {
            if a.rank() > 0 {
                t.gemm_sub(a.left(), &a.right().matmul(b));
            }
        }
        (Dense(a), LowRank(b)) => {
            if b.rank() > 0 {
                t.gemm_sub(&a.matmul(b.left()), b.right());
            }
        }
        (LowRank(a), LowRank(b)) => {
            if a.rank() == 0 || b.rank() == 0 {
                return;
            }
            let core = a.right().matmul(b.left());
            if a.rank() <= b.rank() {
                t.gemm_sub(a.left(), &core.matmul(b.right()));
            } else {
                t.gemm_sub(&a.left().matmul(&core), b.right());
            }
        }
    }
}

pub struct BlrFactor<T: Scalar> {
    n: usize,
    /// New-to-old symmetric permutation.
    perm: Vec<usize>,
    /// Block boundaries; block `K` covers `starts[K]..starts[K + 1]`.
    starts: Vec<usize>,
    /// Dense LU of each diagonal block and its row exchanges.
    diag: Vec<(DenseBlock<T>, Vec<usize>)>,
    /// `lower[I]` holds `(J, L_IJ)` for `J < I`, ascending.
    lower: Vec<Vec<(usize, FactorBlock<T>)>>,
    /// `upper[J]` holds `(K, U_KJ)` for `K < J`, ascending.
    upper: Vec<Vec<(usize, FactorBlock<T>)>>,
    pub epsilon: f64,
    pub stored_entries_blr: usize,
    pub stored_entries_fr: usize,
    pub report: SetupReport,
}

fn block_structure(pattern: &[BTreeSet<usize>]) -> Vec<BTreeSet<usize>> {
    let mut s = pattern.to_vec();
    for k in 0..s.len() {
        let nbrs: Vec<usize> = s[k].range(k + 1..).copied().collect();
        for (x, &i) in nbrs.iter().enumerate() {
            for &j in &nbrs[x + 1..] {
                s[i].insert(j);
                s[j].insert(i);
            }
        }
    }
    s
}

pub fn blr_factor<T: Scalar>(a: &CsrMatrix<T>, cfg: &BlrConfig) -> Result<BlrFactor<T>> {
    if a.nrows() != a.ncols() {
        return Err(maxlab_sparse::SparseError::NotSquare { nrows: a.nrows(), ncols: a.ncols() }.into());
    }
    if cfg.block_size < 1 || !(cfg.epsilon >= 0.0) {
        return Err(Error::Config(format!("invalid BLR settings {cfg:?}")));
    }
    let start = Instant::now();
    let n = a.nrows();
    let perm = cfg.ordering.permutation(a);
    let ap = a.permute_symmetric(&perm);
    let apt = ap.transpose();
    let bs = cfg.block_size;
    let nb = n.div_ceil(bs);
    let starts: Vec<usize> = (0..=nb).map(|k| (k * bs).min(n)).collect();
    let block_of = |i: usize| i / bs;
    let size = |k: usize| starts[k + 1] - starts[k];

    let mut pattern = vec![BTreeSet::new(); nb];
    for i in 0..n {
        for &j in ap.row(i).0 {
            let (bi, bj) = (block_of(i), block_of(j));
            if bi != bj {
                pattern[bi].insert(bj);
                pattern[bj].insert(bi);
            }
        }
    }
    let structure = block_structure(&pattern);

    let mut diag = Vec::with_capacity(nb);
    let mut lower: Vec<Vec<(usize, FactorBlock<T>)>> = (0..nb).map(|_| Vec::new()).collect();
    let mut upper: Vec<Vec<(usize, FactorBlock<T>)>> = (0..nb).map(|_| Vec::new()).collect();
    let mut stored_blr = 0;
    let mut stored_fr = 0;

    for k in 0..nb {
        let later: Vec<usize> = structure[k].range(k + 1..).copied().collect();
        // column panel T(I, K), I >= K, from the columns of block K
        let mut col: BTreeMap<usize, DenseBlock<T>> = BTreeMap::new();
        col.insert(k, DenseBlock::zeros(size(k), size(k)));
        for &i in &later {
            col.insert(i, DenseBlock::zeros(size(i), size(k)));
        }
        for j in starts[k]..starts[k + 1] {
            let (rows, vals) = apt.row(j);
            for (&i, &v) in rows.iter().zip(vals) {
                let bi = block_of(i);
                if bi >= k {
                    let blk = col.get_mut(&bi).expect("entry inside block structure");
                    blk.set(i - starts[bi], j - starts[k], v);
                }
            }
        }
        // row panel T(K, J), J > K
        let mut row: BTreeMap<usize, DenseBlock<T>> = BTreeMap::new();
        for &j in &later {
            row.insert(j, DenseBlock::zeros(size(k), size(j)));
        }
        for i in starts[k]..starts[k + 1] {
            let (cols, vals) = ap.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let bj = block_of(j);
                if bj > k {
                    let blk = row.get_mut(&bj).expect("entry inside block structure");
                    blk.set(i - starts[k], j - starts[bj], v);
                }
            }
        }
        // left-looking updates with the finished factor blocks
        for (&i, t) in col.iter_mut() {
            merge_update(t, &lower[i], &upper[k]);
        }
        for (&j, t) in row.iter_mut() {
            merge_update(t, &lower[k], &upper[j]);
        }

        let mut dkk = col.remove(&k).expect("diagonal block present");
        let piv = dkk.lu_in_place().map_err(|_| Error::SingularBlock { block: k })?;
        for (_, l) in lower[k].iter_mut() {
            l.swap_rows(&piv);
        }
        for (j, mut t) in row {
            t.apply_row_swaps(&piv);
            dkk.solve_unit_lower(&mut t);
            stored_fr += t.nrows() * t.ncols();
            let f = FactorBlock::compress(t, cfg.epsilon);
            stored_blr += f.stored_entries();
            upper[j].push((k, f));
        }
        for (i, mut t) in col {
            dkk.solve_upper_right(&mut t);
            stored_fr += t.nrows() * t.ncols();
            let f = FactorBlock::compress(t, cfg.epsilon);
            stored_blr += f.stored_entries();
            lower[i].push((k, f));
        }
        stored_fr += size(k) * size(k);
        stored_blr += size(k) * size(k);
        diag.push((dkk, piv));
    }

    let mut report = SetupReport::default();
    report.push("blocks", nb);
    report.push("stored_entries_fr", stored_fr);
    report.push("stored_entries_blr", stored_blr);
    report.push("compression", format!("{:.3}", stored_fr as f64 / stored_blr as f64));
    report.setup_time = start.elapsed().as_secs_f64();
    Ok(BlrFactor {
        n,
        perm,
        starts,
        diag,
        lower,
        upper,
        epsilon: cfg.epsilon,
        stored_entries_blr: stored_blr,
        stored_entries_fr: stored_fr,
        report,
    })
}

/// `t -= sum_J L(I,J) U(J,K)` over the blocks `J` present in both lists.
fn merge_update<T: Scalar>(t: &mut DenseBlock<T>, lrow: &[(usize, FactorBlock<T>)], ucol: &[(usize, FactorBlock<T>)]) {
    let (mut p, mut q) = (0, 0);
    while p < lrow.len() && q < ucol.len() {
        match lrow[p].0.cmp(&ucol[q].0) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                sub_product(t, &lrow[p].1, &ucol[q].1);
                p += 1;
                q += 1;
            }
        }
    }
}

impl<T: Scalar> BlrFactor<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Full-rank factor size over compressed factor size.
    pub fn compression_ratio(&self) -> f64 {
        self.stored_entries_fr as f64 / self.stored_entries_blr as f64
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        if b.len() != self.n {
            return Err(maxlab_sparse::SparseError::DimensionMismatch { expected: self.n, got: b.len() }.into());
        }
        let mut x = vec![T::zero(); self.n];
        self.solve_into(b, &mut x);
        Ok(x)
    }

    fn solve_into(&self, b: &[T], out: &mut [T]) {
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        let nb = self.diag.len();
        let range = |k: usize| self.starts[k]..self.starts[k + 1];
        for k in 0..nb {
            let (lu, piv) = &self.diag[k];
            let r = range(k);
            for (i, &p) in piv.iter().enumerate() {
                y.swap(r.start + i, r.start + p);
            }
            let mut yk = y[r.clone()].to_vec();
            for (j, l) in &self.lower[k] {
                l.matvec_acc(-T::one(), &y[range(*j)], &mut yk);
            }
            lu.solve_unit_lower_vec(&mut yk);
            y[r].copy_from_slice(&yk);
        }
        for k in (0..nb).rev() {
            let r = range(k);
            let mut xk = y[r.clone()].to_vec();
            self.diag[k].0.solve_upper_vec(&mut xk);
            for (i, u) in &self.upper[k] {
                u.matvec_acc(-T::one(), &xk, &mut y[range(*i)]);
            }
            y[r].copy_from_slice(&xk);
        }
        for (i, &p) in self.perm.iter().enumerate() {
            out[p] = y[i];
        }
    }

    /// Histogram of off-diagonal ranks; dense blocks are counted under
    /// `None`.
    pub fn rank_histogram(&self) -> BTreeMap<Option<usize>, usize> {
        let mut h = BTreeMap::new();
        for (_, f) in self.lower.iter().chain(&self.upper).flatten() {
            *h.entry(f.rank()).or_insert(0) += 1;
        }
        h
    }

    /// One line per off-diagonal factor block, then a summary line.
    pub fn write_stats_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "factor,block_row,block_col,rows,cols,rank,stored_entries")?;
        let dims = |k: usize| self.starts[k + 1] - self.starts[k];
        let mut line = |name: &str, i: usize, j: usize, f: &FactorBlock<T>| {
            let rank = f.rank().map_or("full".to_string(), |r| r.to_string());
            writeln!(out, "{name},{i},{j},{},{},{rank},{}", dims(i), dims(j), f.stored_entries())
        };
        for (i, row) in self.lower.iter().enumerate() {
            for (j, f) in row {
                line("L", i, *j, f)?;
            }
        }
        for (j, col) in self.upper.iter().enumerate() {
            for (i, f) in col {
                line("U", *i, j, f)?;
            }
        }
        writeln!(
            out,
            "total,,,{},{},,{}",
            self.n, self.n, self.stored_entries_blr
        )
    }
}

impl<T: Scalar> Preconditioner<T> for BlrFactor<T> {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, r: &[T], z: &mut [T]) {
        self.solve_into(r, z);
    }
}

/// FGMRES with the BLR factor as right preconditioner. Returns the
/// solution, the solve report and the compression ratio.
pub fn blr_preconditioned_solve<T: Scalar>(
    a: &CsrMatrix<T>,
    b: &[T],
    cfg: &BlrConfig,
    krylov: &KrylovConfig,
) -> Result<(Vec<T>, SolveReport, f64)> {
    let f = blr_factor(a, cfg)?;
    let (x, mut rep) = fgmres(a, b, &f, krylov)?;
    rep.setup_time = f.report.setup_time;
    Ok((x, rep, f.compression_ratio()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use maxlab_sparse::{Complex64, LuFactor};

    fn test_matrix(n: usize) -> CsrMatrix<Complex64> {
        let mut tb = maxlab_sparse::TripletBuilder::new(n, n);
        for i in 0..n {
            tb.push(i, i, Complex64::new(4.0, 0.5));
            for d in [1, 7, 19] {
                if i + d < n {
                    let v = Complex64::new(-1.0 / d as f64, 0.1 * d as f64);
                    tb.push(i, i + d, v);
                    tb.push(i + d, i, v);
                }
            }
        }
        tb.build()
    }

    fn rhs(n: usize) -> Vec<Complex64> {
        (0..n).map(|i| Complex64::new((i % 5) as f64 - 2.0, (i % 3) as f64)).collect()
    }

    #[test]
    fn full_rank_matches_sparse_lu() {
        let a = test_matrix(100);
        let b = rhs(100);
        for ordering in [FillOrdering::Natural, FillOrdering::ReverseCuthillMcKee] {
            let f = blr_factor(&a, &BlrConfig { epsilon: 0.0, block_size: 8, ordering }).unwrap();
            let x = f.solve(&b).unwrap();
            let y = LuFactor::factor(&a).unwrap().solve(&b).unwrap();
            let diff: f64 = x.iter().zip(&y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            let scale = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(diff <= 1e-12 * scale);
            assert_eq!(f.compression_ratio(), 1.0);
        }
    }

    #[test]
    fn zero_rhs_zero_solution() {
        let a = test_matrix(40);
        let f = blr_factor(&a, &BlrConfig { epsilon: 1e-3, block_size: 8, ..Default::default() }).unwrap();
        assert!(f.solve(&vec![Complex64::default(); 40]).unwrap().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn block_diagonal_has_no_off_diagonal_blocks() {
        let d: Vec<f64> = (0..32).map(|i| 1.0 + i as f64).collect();
        let a = CsrMatrix::from_diagonal(&d);
        let f = blr_factor(&a, &BlrConfig { epsilon: 1e-6, block_size: 8, ordering: FillOrdering::Natural }).unwrap();
        assert!(f.rank_histogram().is_empty());
        assert_eq!(f.stored_entries_blr, 4 * 64);
    }

    #[test]
    fn explicit_zero_couplings_compress_to_rank_zero() {
        // structurally coupled blocks whose values vanish
        let n = 16;
        let mut tb = maxlab_sparse::TripletBuilder::new(n, n);
        for i in 0..n {
            tb.push(i, i, 2.0);
        }
        tb.push(0, 12, 0.0);
        tb.push(12, 0, 0.0);
        let a = tb.build();
        let f = blr_factor(&a, &BlrConfig { epsilon: 1e-8, block_size: 8, ordering: FillOrdering::Natural }).unwrap();
        assert_eq!(f.rank_histogram().get(&Some(0)), Some(&2));
        assert_eq!(f.stored_entries_blr, 2 * 64);
        assert_eq!(f.compression_ratio(), 2.0);
    }

    #[test]
    fn singular_block_reported() {
        let a = CsrMatrix::from_diagonal(&[1.0, 0.0, 2.0, 3.0]);
        let cfg = BlrConfig { epsilon: 0.0, block_size: 2, ordering: FillOrdering::Natural };
        assert!(matches!(blr_factor(&a, &cfg), Err(Error::SingularBlock { block: 0 })));
    }

    #[test]
    fn exact_factor_one_fgmres_iteration() {
        let a = test_matrix(60);
        let b = rhs(60);
        let cfg = BlrConfig { epsilon: 0.0, block_size: 8, ..Default::default() };
        let (_, rep, ratio) = blr_preconditioned_solve(&a, &b, &cfg, &KrylovConfig::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        assert_eq!(ratio, 1.0);
    }

    #[test]
    fn stats_csv_has_summary() {
        let a = test_matrix(30);
        let f = blr_factor(&a, &BlrConfig { epsilon: 1e-2, block_size: 8, ..Default::default() }).unwrap();
        let mut out = Vec::new();
        f.write_stats_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("factor,block_row"));
        assert!(text.lines().last().unwrap().starts_with("total,"));
    }
}
