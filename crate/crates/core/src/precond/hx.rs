//! Hiptmair-Xu auxiliary space operator
//! `S^{-1} + P (L + k^2 M)^{-1} P^T + k^{-2} G Lap^{-1} G^T`
//! and the block-diagonal wrapper used on the split system.
//!
//! Both auxiliary problems are solved exactly by sparse Cholesky.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use maxlab_sparse::{CholFactor, CsrMatrix, TripletBuilder};

use super::SetupReport;
use crate::error::{Error, Result};
use crate::fem::AssembledProblem;
use crate::krylov::{pcg, Preconditioner};

/// Switches for the three additive terms; all on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HxTerms {
    pub smoother: bool,
    pub vector: bool,
    pub scalar: bool,
}

impl Default for HxTerms {
    fn default() -> Self {
        Self { smoother: true, vector: true, scalar: true }
    }
}

pub struct HxOperator {
    /// `C + M + B`, the matrix the smoother acts on.
    pub a: CsrMatrix<f64>,
    diag: Vec<f64>,
    g: CsrMatrix<f64>,
    p: CsrMatrix<f64>,
    chol_vec: CholFactor,
    chol_scalar: CholFactor,
    k2: f64,
    /// Vertex grounded to make the scalar Laplacian definite when no vertex
    /// was eliminated.
    pinned: Option<usize>,
    pub sweeps: usize,
    pub terms: HxTerms,
    pub report: SetupReport,
}

pub fn build_hx(ap: &AssembledProblem) -> Result<HxOperator> {
    if !(ap.k > 0.0) {
        return Err(Error::Config(format!("auxiliary space operator needs k > 0, got {}", ap.k)));
    }
    let start = Instant::now();
    let k2 = ap.k * ap.k;
    let a = ap.c.add(&ap.m, 1.0, 1.0)?.add(&ap.b, 1.0, 1.0)?;
    let diag = a.diagonal();
    if let Some(i) = diag.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::Config(format!("C + M + B has non-positive diagonal at row {i}")));
    }
    let beta = ap.l_vec.add(&ap.m_vec, 1.0, k2)?;
    let chol_vec = CholFactor::factor(&beta).map_err(|e| Error::setup("factorizing L_vec + k^2 M_vec", e))?;
    let pinned = (!ap.has_dirichlet && ap.lap_scalar.nrows() > 0).then_some(0);
    let lap = match pinned {
        Some(v) => ground(&ap.lap_scalar, v),
        None => ap.lap_scalar.clone(),
    };
    let chol_scalar = CholFactor::factor(&lap).map_err(|e| Error::setup("factorizing scalar Laplacian", e))?;
    let mut report = SetupReport::default();
    report.push("vector_factor_nnz", chol_vec.nnz());
    report.push("scalar_factor_nnz", chol_scalar.nnz());
    report.setup_time = start.elapsed().as_secs_f64();
    Ok(HxOperator {
        a,
        diag,
        g: ap.g.clone(),
        p: ap.p_curl.clone(),
        chol_vec,
        chol_scalar,
        k2,
        pinned,
        sweeps: 1,
        terms: HxTerms::default(),
        report,
    })
}

/// Replaces row and column `v` by the identity row.
fn ground(a: &CsrMatrix<f64>, v: usize) -> CsrMatrix<f64> {
    let mut tb = TripletBuilder::with_capacity(a.nrows(), a.ncols(), a.nnz());
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (&j, &x) in cols.iter().zip(vals) {
            if i != v && j != v {
                tb.push(i, j, x);
            }
        }
        if i == v {
            tb.push(v, v, 1.0);
        }
    }
    tb.build()
}

impl HxOperator {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Symmetric Gauss–Seidel sweeps on `C + M + B` from a zero guess.
    pub fn smooth(&self, r: &[f64], x: &mut [f64]) {
        x.iter_mut().for_each(|v| *v = 0.0);
        let n = self.dim();
        let relax = |i: usize, x: &mut [f64]| {
            let (cols, vals) = self.a.row(i);
            let ax: f64 = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
            x[i] += (r[i] - ax) / self.diag[i];
        };
        for _ in 0..self.sweeps {
            for i in 0..n {
                relax(i, x);
            }
            for i in (0..n).rev() {
                relax(i, x);
            }
        }
    }

    /// The vector nodal term `P (L + k^2 M)^{-1} P^T r`.
    pub fn vector_term(&self, r: &[f64]) -> Vec<f64> {
        let mut t = vec![0.0; self.p.ncols()];
        self.p.spmv_transpose(r, &mut t);
        let mut work = vec![0.0; t.len()];
        self.chol_vec.solve_in_place(&mut t, &mut work);
        let mut out = vec![0.0; self.dim()];
        self.p.spmv_unchecked(&t, &mut out);
        out
    }

    /// The scalar potential term `k^{-2} G Lap^{-1} G^T r`.
    pub fn scalar_term(&self, r: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; self.g.ncols()];
        self.g.spmv_transpose(r, &mut s);
        if let Some(v) = self.pinned {
            s[v] = 0.0;
        }
        let mut work = vec![0.0; s.len()];
        self.chol_scalar.solve_in_place(&mut s, &mut work);
        if let Some(v) = self.pinned {
            s[v] = 0.0;
        }
        let mut out = vec![0.0; self.dim()];
        self.g.spmv_unchecked(&s, &mut out);
        out.iter_mut().for_each(|v| *v /= self.k2);
        out
    }

    pub fn apply_hx(&self, r: &[f64], z: &mut [f64]) {
        if self.terms.smoother {
            self.smooth(r, z);
        } else {
            z.iter_mut().for_each(|v| *v = 0.0);
        }
        if self.terms.vector {
            for (zi, v) in z.iter_mut().zip(self.vector_term(r)) {
                *zi += v;
            }
        }
        if self.terms.scalar {
            for (zi, v) in z.iter_mut().zip(self.scalar_term(r)) {
                *zi += v;
            }
        }
    }
}

impl Preconditioner<f64> for HxOperator {
    fn dim(&self) -> usize {
        HxOperator::dim(self)
    }
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        self.apply_hx(r, z);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HxMode {
    /// Each block is solved by PCG preconditioned with the HX operator.
    Precond,
    /// Each block is replaced by a single HX application.
    Solver,
}

/// `diag(C+M+B, C+M+B)^{-1}` on the split system, approximated blockwise.
pub struct HxBlockPreconditioner {
    pub hx: HxOperator,
    pub mode: HxMode,
    pub inner_rtol: f64,
    pub inner_max_iter: usize,
    inner_iterations: [AtomicUsize; 2],
    inner_failures: AtomicUsize,
}

impl HxBlockPreconditioner {
    pub fn new(hx: HxOperator, mode: HxMode) -> Self {
        Self {
            hx,
            mode,
            inner_rtol: 1e-2,
            inner_max_iter: 20,
            inner_iterations: [AtomicUsize::new(0), AtomicUsize::new(0)],
            inner_failures: AtomicUsize::new(0),
        }
    }

    /// Total inner CG iterations spent on the real and imaginary blocks.
    pub fn inner_iterations(&self) -> (usize, usize) {
        (
            self.inner_iterations[0].load(Ordering::Relaxed),
            self.inner_iterations[1].load(Ordering::Relaxed),
        )
    }

    /// Inner solves that hit non-positive curvature and fell back to a
    /// single HX application.
    pub fn inner_failures(&self) -> usize {
        self.inner_failures.load(Ordering::Relaxed)
    }

    fn solve_block(&self, half: usize, r: &[f64], z: &mut [f64]) {
        match self.mode {
            HxMode::Solver => self.hx.apply_hx(r, z),
            HxMode::Precond => match pcg(&self.hx.a, r, &self.hx, self.inner_rtol, self.inner_max_iter) {
                Ok((x, rep)) => {
                    self.inner_iterations[half].fetch_add(rep.iterations, Ordering::Relaxed);
                    z.copy_from_slice(&x);
                }
                Err(_) => {
                    self.inner_failures.fetch_add(1, Ordering::Relaxed);
                    self.hx.apply_hx(r, z);
                }
            },
        }
    }
}

impl Preconditioner<f64> for HxBlockPreconditioner {
    fn dim(&self) -> usize {
        2 * self.hx.dim()
    }
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = self.hx.dim();
        let (r0, r1) = r.split_at(n);
        let (z0, z1) = z.split_at_mut(n);
        self.solve_block(0, r0, z0);
        self.solve_block(1, r1, z1);
    }
}
