//! Sparse approximate inverse `H ~ A^{-1}` minimizing `||I - AH||_F` column
//! by column over a thresholded power pattern of `A`.

use std::time::Instant;

use maxlab_sparse::CsrMatrix;
use nalgebra::{DMatrix, DVector};

use super::SetupReport;
use crate::error::{Error, Result};
use crate::krylov::Preconditioner;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaiConfig {
    pub thresh: f64,
    pub filter: f64,
    pub m: usize,
}

impl Default for SpaiConfig {
    fn default() -> Self {
        Self { thresh: 0.01, filter: 0.05, m: 3 }
    }
}

/// Row-wise boolean sparsity pattern with sorted columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub rows: Vec<Vec<usize>>,
}

impl Pattern {
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn of<T: maxlab_sparse::Scalar>(a: &CsrMatrix<T>) -> Self {
        Self { rows: (0..a.nrows()).map(|i| a.row(i).0.to_vec()).collect() }
    }
}

/// Entries of `D^{-1/2} A D^{-1/2}` with magnitude at least `thresh`, plus
/// the diagonal.
pub fn sparsify_pattern(a: &CsrMatrix<f64>, thresh: f64) -> Pattern {
    let d: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|v| if *v == 0.0 { 1.0 } else { 1.0 / v.abs().sqrt() })
        .collect();
    let rows = (0..a.nrows())
        .map(|i| {
            let (cols, vals) = a.row(i);
            let mut row: Vec<usize> = cols
                .iter()
                .zip(vals)
                .filter(|(&j, &v)| j == i || (v * d[i] * d[j]).abs() >= thresh)
                .map(|(&j, _)| j)
                .collect();
            if row.binary_search(&i).is_err() {
                let pos = row.partition_point(|&j| j < i);
                row.insert(pos, i);
            }
            row
        })
        .collect();
    Pattern { rows }
}

/// Pattern of the boolean power `P^m`, diagonal included.
pub fn pattern_power(p: &Pattern, m: usize) -> Pattern {
    let n = p.rows.len();
    let mut cur: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut r = p.rows[i].clone();
            if let Err(pos) = r.binary_search(&i) {
                r.insert(pos, i);
            }
            r
        })
        .collect();
    let mut mark = vec![usize::MAX; n];
    for _ in 1..m {
        let next: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut row = Vec::new();
                for &k in &cur[i] {
                    for &j in &p.rows[k] {
                        if mark[j] != i {
                            mark[j] = i;
                            row.push(j);
                        }
                    }
                }
                for &k in &cur[i] {
                    if mark[k] != i {
                        mark[k] = i;
                        row.push(k);
                    }
                }
                row.sort_unstable();
                row
            })
            .collect();
        mark.iter_mut().for_each(|v| *v = usize::MAX);
        cur = next;
    }
    Pattern { rows: cur }
}

/// Solves `min ||e_j - A h_j||` for every column `j`, with `h_j` supported
/// on column `j` of `pattern`.
pub fn frobenius_fit(a: &CsrMatrix<f64>, pattern: &Pattern) -> Result<CsrMatrix<f64>> {
    let n = a.nrows();
    if pattern.rows.len() != n || a.ncols() != n {
        return Err(Error::Config("pattern and matrix dimensions differ".into()));
    }
    // column j of H has support = column j of the pattern = row j of its
    // transpose; columns of A are rows of A^T
    let support = transpose_pattern(pattern);
    let at = a.transpose();
    let mut local_row = vec![usize::MAX; n];
    let mut cols: Vec<(Vec<usize>, Vec<f64>)> = Vec::with_capacity(n);
    for j in 0..n {
        let jset = &support[j];
        let mut iset: Vec<usize> = Vec::new();
        for &c in jset {
            for &r in at.row(c).0 {
                if local_row[r] == usize::MAX {
                    local_row[r] = 0;
                    iset.push(r);
                }
            }
        }
        iset.sort_unstable();
        for (p, &r) in iset.iter().enumerate() {
            local_row[r] = p;
        }
        let mut local = DMatrix::<f64>::zeros(iset.len(), jset.len());
        for (q, &c) in jset.iter().enumerate() {
            let (rows, vals) = at.row(c);
            for (&r, &v) in rows.iter().zip(vals) {
                local[(local_row[r], q)] = v;
            }
        }
        let mut rhs = DVector::<f64>::zeros(iset.len());
        if local_row[j] != usize::MAX {
            rhs[local_row[j]] = 1.0;
        }
        for &r in &iset {
            local_row[r] = usize::MAX;
        }
        let h = least_squares(local, rhs);
        cols.push((jset.clone(), h.iter().copied().collect()));
    }
    Ok(columns_to_csr(n, &cols))
}

fn transpose_pattern(p: &Pattern) -> Vec<Vec<usize>> {
    let mut t = vec![Vec::new(); p.rows.len()];
    for (i, row) in p.rows.iter().enumerate() {
        for &j in row {
            t[j].push(i);
        }
    }
    t
}

/// Householder QR least squares; minimum-norm SVD solution when the
/// triangular factor is numerically rank deficient.
fn least_squares(a: DMatrix<f64>, rhs: DVector<f64>) -> DVector<f64> {
    let ncols = a.ncols();
    if ncols == 0 {
        return DVector::zeros(0);
    }
    if a.nrows() >= ncols {
        let qr = a.clone().qr();
        let r = qr.r();
        let rmax = (0..ncols).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
        if (0..ncols).all(|i| r[(i, i)].abs() > 1e-12 * rmax) {
            let mut qtb = rhs.clone();
            qr.q_tr_mul(&mut qtb);
            if let Some(x) = r.solve_upper_triangular(&qtb.rows(0, ncols).into_owned()) {
                return x;
            }
        }
    }
    let svd = a.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max();
    svd.solve(&rhs, eps).unwrap_or_else(|_| DVector::zeros(ncols))
}

fn columns_to_csr(n: usize, cols: &[(Vec<usize>, Vec<f64>)]) -> CsrMatrix<f64> {
    let mut tb = maxlab_sparse::TripletBuilder::with_capacity(n, n, cols.iter().map(|c| c.0.len()).sum());
    for (j, (rows, vals)) in cols.iter().enumerate() {
        for (&i, &v) in rows.iter().zip(vals) {
            tb.push(i, j, v);
        }
    }
    tb.build()
}

/// Drops `|h_ij| < filter * max_i |h_ij|` column by column; the diagonal
/// always survives.
pub fn post_filter(h: &CsrMatrix<f64>, filter: f64) -> CsrMatrix<f64> {
    let n = h.ncols();
    let mut colmax = vec![0.0f64; n];
    for i in 0..h.nrows() {
        let (c, v) = h.row(i);
        for (&j, &x) in c.iter().zip(v) {
            colmax[j] = colmax[j].max(x.abs());
        }
    }
    let mut tb = maxlab_sparse::TripletBuilder::with_capacity(h.nrows(), n, h.nnz());
    for i in 0..h.nrows() {
        let (c, v) = h.row(i);
        for (&j, &x) in c.iter().zip(v) {
            if i == j || x.abs() >= filter * colmax[j] {
                tb.push(i, j, x);
            }
        }
    }
    tb.build()
}

pub struct SpaiPreconditioner {
    pub h: CsrMatrix<f64>,
    pub report: SetupReport,
}

pub fn build_spai(a: &CsrMatrix<f64>, cfg: &SpaiConfig) -> Result<SpaiPreconditioner> {
    if cfg.m == 0 || !(cfg.thresh >= 0.0) || !(cfg.filter >= 0.0) {
        return Err(Error::Config(format!("invalid SPAI settings {cfg:?}")));
    }
    let start = Instant::now();
    let pattern = pattern_power(&sparsify_pattern(a, cfg.thresh), cfg.m);
    let h = post_filter(&frobenius_fit(a, &pattern)?, cfg.filter);
    let mut report = SetupReport::default();
    report.push("pattern_nnz", pattern.nnz());
    report.push("nnz", h.nnz());
    report.setup_time = start.elapsed().as_secs_f64();
    Ok(SpaiPreconditioner { h, report })
}

impl Preconditioner<f64> for SpaiPreconditioner {
    fn dim(&self) -> usize {
        self.h.nrows()
    }
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        self.h.spmv_unchecked(r, z);
    }
}
