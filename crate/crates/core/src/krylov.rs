//! GMRES (left preconditioned), flexible GMRES (right preconditioned) and
//! preconditioned conjugate gradients.

use std::io::Write;
use std::time::Instant;

use maxlab_sparse::{axpy, dot, norm2, CsrMatrix, Scalar};

use crate::error::{Error, Result};

pub trait LinearOperator<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[T], y: &mut [T]);
}

impl<T: Scalar> LinearOperator<T> for CsrMatrix<T> {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        self.spmv_unchecked(x, y);
    }
}

/// Approximate inverse applied as `z = P^{-1} r`.
pub trait Preconditioner<T: Scalar>: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, r: &[T], z: &mut [T]);
}

pub struct Identity(pub usize);

impl<T: Scalar> Preconditioner<T> for Identity {
    fn dim(&self) -> usize {
        self.0
    }
    fn apply(&self, r: &[T], z: &mut [T]) {
        z.copy_from_slice(r);
    }
}

impl<T: Scalar> Preconditioner<T> for maxlab_sparse::LuFactor<T> {
    fn dim(&self) -> usize {
        maxlab_sparse::LuFactor::dim(self)
    }
    fn apply(&self, r: &[T], z: &mut [T]) {
        z.copy_from_slice(r);
        let mut work = vec![T::zero(); r.len()];
        self.solve_in_place(z, &mut work);
    }
}

impl Preconditioner<f64> for maxlab_sparse::CholFactor {
    fn dim(&self) -> usize {
        maxlab_sparse::CholFactor::dim(self)
    }
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
        let mut work = vec![0.0; r.len()];
        self.solve_in_place(z, &mut work);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovConfig {
    pub rtol: f64,
    pub max_iter: usize,
    pub restart: Option<usize>,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self { rtol: 1e-8, max_iter: 1000, restart: None }
    }
}

impl KrylovConfig {
    pub fn new(rtol: f64, max_iter: usize) -> Self {
        Self { rtol, max_iter, restart: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0) || self.max_iter == 0 || self.restart == Some(0) {
            return Err(Error::Config(format!("invalid Krylov settings {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Monitored relative residual, starting with the initial value.
    pub residual_history: Vec<f64>,
    pub final_true_residual: f64,
    pub setup_time: f64,
    pub solve_time: f64,
}

impl SolveReport {
    pub fn write_history_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iteration,residual")?;
        for (i, r) in self.residual_history.iter().enumerate() {
            writeln!(out, "{i},{r:e}")?;
        }
        Ok(())
    }
}

const BREAKDOWN_TOL: f64 = 1e-14;
const REORTH_TOL: f64 = 1e-8;

fn check_dims<T: Scalar>(a: &dyn LinearOperator<T>, b: &[T], p: Option<&dyn Preconditioner<T>>) -> Result<()> {
    let n = a.dim();
    let bad = |got| Err(Error::Sparse(maxlab_sparse::SparseError::DimensionMismatch { expected: n, got }));
    if b.len() != n {
        return bad(b.len());
    }
    if let Some(p) = p {
        if p.dim() != n {
            return bad(p.dim());
        }
    }
    Ok(())
}

fn true_residual<T: Scalar>(a: &dyn LinearOperator<T>, b: &[T], x: &[T], bnorm: f64) -> f64 {
    let mut r = vec![T::zero(); b.len()];
    a.apply(x, &mut r);
    for (ri, &bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    norm2(&r) / bnorm
}

/// Complex Givens rotation `[c s; -conj(s) c]` with real `c`, zeroing `b`.
fn givens<T: Scalar>(a: T, b: T) -> (f64, T, T) {
    let nb = b.abs();
    if nb == 0.0 {
        return (1.0, T::zero(), a);
    }
    let na = a.abs();
    if na == 0.0 {
        return (0.0, b.conj().scale(1.0 / nb), T::from_f64(nb));
    }
    let nu = na.hypot(nb);
    let phase = a.scale(1.0 / na);
    (na / nu, phase * b.conj().scale(1.0 / nu), phase.scale(nu))
}

/// Orthogonalizes `w` against `basis` with modified Gram–Schmidt and one
/// conditional second pass; returns the Hessenberg column (without the
/// subdiagonal) and the norm of `w` before orthogonalization.
fn arnoldi_step<T: Scalar>(basis: &[Vec<T>], w: &mut [T]) -> Vec<T> {
    let mut h = Vec::with_capacity(basis.len() + 1);
    for v in basis {
        let hij = dot(v, w);
        axpy(-hij, v, w);
        h.push(hij);
    }
    let wn = norm2(w);
    let second: Vec<T> = basis.iter().map(|v| dot(v, w)).collect();
    if second.iter().any(|c| c.abs() > REORTH_TOL * wn) {
        for ((v, c), hij) in basis.iter().zip(&second).zip(h.iter_mut()) {
            axpy(-*c, v, w);
            *hij += *c;
        }
    }
    h
}

struct Arnoldi<T> {
    /// Columns of the upper triangular factor after rotations.
    r: Vec<Vec<T>>,
    rotations: Vec<(f64, T)>,
    g: Vec<T>,
}

impl<T: Scalar> Arnoldi<T> {
    fn new(beta: f64) -> Self {
        Self { r: Vec::new(), rotations: Vec::new(), g: vec![T::from_f64(beta)] }
    }

    /// Adds Hessenberg column `h` with subdiagonal `hsub`, returns the new
    /// least-squares residual norm.
    fn push(&mut self, mut h: Vec<T>, hsub: f64) -> f64 {
        for (i, &(c, s)) in self.rotations.iter().enumerate() {
            let (a, b) = (h[i], h[i + 1]);
            h[i] = a.scale(c) + s * b;
            h[i + 1] = b.scale(c) - s.conj() * a;
        }
        let j = h.len() - 1;
        let (c, s, rjj) = givens(h[j], T::from_f64(hsub));
        h[j] = rjj;
        self.rotations.push((c, s));
        let gj = self.g[j];
        self.g[j] = gj.scale(c);
        self.g.push(-(s.conj() * gj));
        self.r.push(h);
        self.g[j + 1].abs()
    }

    fn solve(&self) -> Vec<T> {
        let m = self.r.len();
        let mut y = self.g[..m].to_vec();
        for i in (0..m).rev() {
            for j in i + 1..m {
                let rij = self.r[j][i];
                let yj = y[j];
                y[i] -= rij * yj;
            }
            y[i] = if self.r[i][i] == T::zero() { T::zero() } else { y[i] / self.r[i][i] };
        }
        y
    }
}

enum Side<'a, T: Scalar> {
    Left(Option<&'a dyn Preconditioner<T>>),
    Right(&'a dyn Preconditioner<T>),
}

/// Left-preconditioned GMRES from a zero initial guess.
///
/// The monitored quantity is `||P^{-1}(b - Ax)|| / ||P^{-1} b||`. Once it
/// drops below `rtol` the true residual is checked as well and iteration
/// continues until both are satisfied or `max_iter` is reached.
pub fn gmres<T: Scalar>(
    a: &dyn LinearOperator<T>,
    b: &[T],
    precond: Option<&dyn Preconditioner<T>>,
    cfg: &KrylovConfig,
) -> Result<(Vec<T>, SolveReport)> {
    check_dims(a, b, precond)?;
    run(a, b, Side::Left(precond), cfg)
}

/// Flexible GMRES: right preconditioning with one stored preconditioned
/// direction per iteration, so the preconditioner may change between steps.
pub fn fgmres<T: Scalar>(
    a: &dyn LinearOperator<T>,
    b: &[T],
    precond: &dyn Preconditioner<T>,
    cfg: &KrylovConfig,
) -> Result<(Vec<T>, SolveReport)> {
    check_dims(a, b, Some(precond))?;
    run(a, b, Side::Right(precond), cfg)
}

fn run<T: Scalar>(
    a: &dyn LinearOperator<T>,
    b: &[T],
    side: Side<'_, T>,
    cfg: &KrylovConfig,
) -> Result<(Vec<T>, SolveReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let n = b.len();
    let left = |v: &[T], out: &mut [T]| match side {
        Side::Left(Some(p)) => p.apply(v, out),
        _ => out.copy_from_slice(v),
    };
    let mut x = vec![T::zero(); n];
    let bnorm = norm2(b);
    let mut report = SolveReport::default();
    if bnorm == 0.0 {
        report.converged = true;
        report.residual_history.push(0.0);
        report.solve_time = start.elapsed().as_secs_f64();
        return Ok((x, report));
    }

    let mut r = vec![T::zero(); n];
    left(b, &mut r);
    let ref_norm = norm2(&r);
    if ref_norm == 0.0 {
        return Err(Error::Config("preconditioner maps the right-hand side to zero".into()));
    }
    report.residual_history.push(1.0);
    let restart = cfg.restart.unwrap_or(cfg.max_iter);
    let mut tmp = vec![T::zero(); n];
    let mut iters = 0;
    let mut true_res = 1.0;

    'outer: loop {
        // residual of the current iterate in the monitored norm
        if iters > 0 {
            a.apply(&x, &mut tmp);
            for (ti, &bi) in tmp.iter_mut().zip(b) {
                *ti = bi - *ti;
            }
            left(&tmp, &mut r);
        }
        let beta = norm2(&r);
        let mut basis: Vec<Vec<T>> = vec![r.iter().map(|v| v.scale(1.0 / beta)).collect()];
        let mut zdirs: Vec<Vec<T>> = Vec::new();
        let mut arn = Arnoldi::new(beta);
        let mut w = vec![T::zero(); n];

        for _ in 0..restart {
            let vj = basis.last().expect("basis nonempty");
            match side {
                Side::Left(_) => {
                    a.apply(vj, &mut tmp);
                    left(&tmp, &mut w);
                }
                Side::Right(p) => {
                    let mut z = vec![T::zero(); n];
                    p.apply(vj, &mut z);
                    a.apply(&z, &mut w);
                    zdirs.push(z);
                }
            }
            let wn0 = norm2(&w);
            let h = arnoldi_step(&basis, &mut w);
            let hsub = norm2(&w);
            let res = arn.push(h, hsub) / ref_norm;
            iters += 1;
            // rounding can make the rotated residual tick up by an ulp
            let last = *report.residual_history.last().expect("history nonempty");
            report.residual_history.push(res.min(last));
            let breakdown = hsub <= BREAKDOWN_TOL * wn0.max(f64::MIN_POSITIVE);
            let done = iters >= cfg.max_iter;

            if res <= cfg.rtol || breakdown || done || basis.len() == restart {
                let y = arn.solve();
                let mut xc = x.clone();
                let dirs = match side {
                    Side::Left(_) => &basis,
                    Side::Right(_) => &zdirs,
                };
                for (d, &yi) in dirs.iter().zip(&y) {
                    axpy(yi, d, &mut xc);
                }
                true_res = true_residual(a, b, &xc, bnorm);
                if true_res <= cfg.rtol || breakdown || done {
                    x = xc;
                    report.converged = true_res <= cfg.rtol;
                    break 'outer;
                }
                if basis.len() == restart {
                    x = xc;
                    continue 'outer;
                }
            }
            basis.push(w.iter().map(|v| v.scale(1.0 / hsub)).collect());
        }
        if iters >= cfg.max_iter {
            break;
        }
    }
    report.iterations = iters;
    report.final_true_residual = true_res;
    report.solve_time = start.elapsed().as_secs_f64();
    Ok((x, report))
}

/// Preconditioned conjugate gradients from a zero initial guess, monitoring
/// `sqrt(r.z) / sqrt(r0.z0)`. Returns the iterate with the smallest
/// monitored residual.
pub fn pcg<T: Scalar>(
    a: &dyn LinearOperator<T>,
    b: &[T],
    precond: &dyn Preconditioner<T>,
    rtol: f64,
    max_iter: usize,
) -> Result<(Vec<T>, SolveReport)> {
    check_dims(a, b, Some(precond))?;
    KrylovConfig::new(rtol, max_iter).validate()?;
    let start = Instant::now();
    let n = b.len();
    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    let mut z = vec![T::zero(); n];
    precond.apply(&r, &mut z);
    let mut rz = dot(&r, &z).re();
    let mut report = SolveReport::default();
    if rz == 0.0 {
        report.converged = true;
        report.residual_history.push(0.0);
        report.final_true_residual = 0.0;
        return Ok((x, report));
    }
    let norm0 = rz.abs().sqrt();
    report.residual_history.push(1.0);
    let mut p = z.clone();
    let mut q = vec![T::zero(); n];
    let mut best = (1.0, x.clone());
    for it in 1..=max_iter {
        a.apply(&p, &mut q);
        let pq = dot(&p, &q).re();
        if !(pq > 0.0) {
            return Err(Error::Indefinite { iteration: it, curvature: pq });
        }
        let alpha = T::from_f64(rz / pq);
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z).re();
        let res = rz_new.abs().sqrt() / norm0;
        report.residual_history.push(res);
        report.iterations = it;
        if res < best.0 {
            best = (res, x.clone());
        }
        if res <= rtol {
            report.converged = true;
            break;
        }
        let beta = T::from_f64(rz_new / rz);
        for (pi, &zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
        rz = rz_new;
    }
    let x = best.1;
    let bnorm = norm2(b);
    report.final_true_residual = true_residual(a, b, &x, bnorm);
    report.solve_time = start.elapsed().as_secs_f64();
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use maxlab_sparse::{Complex64, LuFactor};

    fn diag(d: &[f64]) -> CsrMatrix<f64> {
        CsrMatrix::from_diagonal(d)
    }

    #[test]
    fn identity_one_iteration() {
        let a = diag(&[1.0, 1.0, 1.0]);
        let (x, rep) = gmres(&a, &[1.0, 2.0, 3.0], None, &KrylovConfig::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
        let (_, rep) = pcg(&a, &[1.0, 2.0, 3.0], &Identity(3), 1e-10, 20).unwrap();
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn two_eigenvalues_two_iterations() {
        let a = diag(&[1.0, 2.0]);
        let (x, rep) = gmres(&a, &[1.0, 1.0], None, &KrylovConfig::default()).unwrap();
        assert!(rep.iterations <= 2 && rep.converged);
        assert!((x[1] - 0.5).abs() < 1e-12);
        let a = diag(&[1.0, 4.0]);
        let (_, rep) = pcg(&a, &[1.0, 1.0], &Identity(2), 1e-10, 20).unwrap();
        assert!(rep.iterations <= 2 && rep.converged);
    }

    #[test]
    fn exact_preconditioner() {
        let a = CsrMatrix::from_dense(3, 3, &[4.0, 1.0, 0.0, 2.0, 5.0, 1.0, 0.0, 3.0, 6.0]);
        let lu = LuFactor::factor(&a).unwrap();
        let b = [1.0, -1.0, 2.0];
        let (_, rep) = gmres(&a, &b, Some(&lu), &KrylovConfig::default()).unwrap();
        assert!(rep.iterations <= 2 && rep.converged);
        let (_, rep) = fgmres(&a, &b, &lu, &KrylovConfig::default()).unwrap();
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn complex_system() {
        let a = CsrMatrix::from_dense(
            2,
            2,
            &[Complex64::new(1.0, 1.0), Complex64::new(0.5, 0.0), Complex64::new(0.0, 2.0), Complex64::new(3.0, -1.0)],
        );
        let b = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let (x, rep) = gmres(&a, &b, None, &KrylovConfig::default()).unwrap();
        assert!(rep.converged && rep.iterations <= 2);
        let ax = a.mul_vec(&x).unwrap();
        assert!((ax[0] - b[0]).norm() < 1e-12 && (ax[1] - b[1]).norm() < 1e-12);
    }

    #[test]
    fn max_iter_reports_nonconvergence() {
        let d: Vec<f64> = (1..=50).map(|i| i as f64).collect();
        let a = diag(&d);
        let b = vec![1.0; 50];
        let cfg = KrylovConfig::new(1e-12, 5);
        let (_, rep) = gmres(&a, &b, None, &cfg).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 5);
        assert_eq!(rep.residual_history.len(), 6);
        assert!(rep.final_true_residual > 1e-12);
    }

    #[test]
    fn zero_rhs() {
        let a = diag(&[1.0, 2.0]);
        let (x, rep) = gmres(&a, &[0.0, 0.0], None, &KrylovConfig::default()).unwrap();
        assert!(rep.converged);
        assert_eq!(x, vec![0.0, 0.0]);
    }

    #[test]
    fn pcg_rejects_indefinite() {
        let a = diag(&[1.0, -1.0]);
        assert!(matches!(
            pcg(&a, &[1.0, 1.0], &Identity(2), 1e-10, 20),
            Err(Error::Indefinite { .. })
        ));
    }

    #[test]
    fn restarted_gmres_converges() {
        let n = 40;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            d[i * n + i] = 4.0;
            if i + 1 < n {
                d[i * n + i + 1] = -1.0;
                d[(i + 1) * n + i] = -1.5;
            }
        }
        let a = CsrMatrix::from_dense(n, n, &d);
        let cfg = KrylovConfig { restart: Some(5), ..KrylovConfig::default() };
        let (_, rep) = gmres(&a, &vec![1.0; n], None, &cfg).unwrap();
        assert!(rep.converged && rep.final_true_residual <= 1e-8);
    }

    #[test]
    fn history_csv() {
        let rep = SolveReport { residual_history: vec![1.0, 0.5], ..Default::default() };
        let mut out = Vec::new();
        rep.write_history_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "iteration,residual\n0,1e0\n1,5e-1\n");
    }
}
