//! Complex system `A = C - M - iB` and its real block form
//! `[[C - M, B], [B, -(C - M)]]` with right-hand side `[s_R; -s_I]`.

use maxlab_sparse::{norm2, CsrMatrix, Scalar, TripletBuilder};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::AssembledProblem;

#[derive(Debug, Clone)]
pub struct ComplexSystem {
    pub a: CsrMatrix<Complex64>,
    pub b: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct SplitSystem {
    pub a_hat: CsrMatrix<f64>,
    pub rhs: Vec<f64>,
    /// Complex dimension; the split system has size `2n`.
    pub n: usize,
}

impl ComplexSystem {
    pub fn from_parts(
        c: &CsrMatrix<f64>,
        m: &CsrMatrix<f64>,
        b: &CsrMatrix<f64>,
        s_r: &[f64],
        s_i: &[f64],
    ) -> Result<Self> {
        let k = c.add(m, 1.0, -1.0)?;
        let kc = k.map(|v| Complex64::new(v, 0.0));
        let bc = b.map(|v| Complex64::new(0.0, v));
        let a = kc.add(&bc, Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0))?;
        check_len(s_r.len(), a.nrows())?;
        check_len(s_i.len(), a.nrows())?;
        let rhs = s_r.iter().zip(s_i).map(|(&r, &i)| Complex64::new(r, i)).collect();
        Ok(Self { a, b: rhs })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }
}

impl SplitSystem {
    pub fn from_parts(
        c: &CsrMatrix<f64>,
        m: &CsrMatrix<f64>,
        b: &CsrMatrix<f64>,
        s_r: &[f64],
        s_i: &[f64],
    ) -> Result<Self> {
        let k = c.add(m, 1.0, -1.0)?;
        let n = k.nrows();
        check_len(b.nrows(), n)?;
        check_len(s_r.len(), n)?;
        check_len(s_i.len(), n)?;
        let mut tb = TripletBuilder::with_capacity(2 * n, 2 * n, 2 * (k.nnz() + b.nnz()));
        for i in 0..n {
            let (kc, kv) = k.row(i);
            let (bc, bv) = b.row(i);
            for (&j, &v) in kc.iter().zip(kv) {
                tb.push(i, j, v);
                tb.push(n + i, n + j, -v);
            }
            for (&j, &v) in bc.iter().zip(bv) {
                tb.push(i, n + j, v);
                tb.push(n + i, j, v);
            }
        }
        let mut rhs = s_r.to_vec();
        rhs.extend(s_i.iter().map(|v| -v));
        Ok(Self { a_hat: tb.build(), rhs, n })
    }
}

fn check_len(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::Sparse(maxlab_sparse::SparseError::DimensionMismatch { expected, got }));
    }
    Ok(())
}

pub fn build_complex(ap: &AssembledProblem) -> Result<ComplexSystem> {
    ComplexSystem::from_parts(&ap.c, &ap.m, &ap.b, &ap.s_r, &ap.s_i)
}

pub fn build_split(ap: &AssembledProblem) -> Result<SplitSystem> {
    SplitSystem::from_parts(&ap.c, &ap.m, &ap.b, &ap.s_r, &ap.s_i)
}

/// `[x_R; x_I]` to `x_R + i x_I`.
pub fn split_to_complex(x: &[f64]) -> Vec<Complex64> {
    let n = x.len() / 2;
    (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect()
}

pub fn complex_to_split(x: &[Complex64]) -> Vec<f64> {
    x.iter().map(|v| v.re).chain(x.iter().map(|v| v.im)).collect()
}

/// Residual norm, relative to `||b||` unless `b` vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub relative: bool,
}

pub fn residual<T: Scalar>(a: &CsrMatrix<T>, b: &[T], x: &[T]) -> Result<Residual> {
    let mut ax = vec![T::zero(); a.nrows()];
    a.spmv(x, &mut ax)?;
    check_len(b.len(), a.nrows())?;
    let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
    let nb = norm2(b);
    let nr = norm2(&r);
    Ok(if nb == 0.0 {
        Residual { value: nr, relative: false }
    } else {
        Residual { value: nr / nb, relative: true }
    })
}

pub fn complex_residual(sys: &ComplexSystem, x: &[Complex64]) -> Result<Residual> {
    residual(&sys.a, &sys.b, x)
}

pub fn split_residual(sys: &SplitSystem, x: &[f64]) -> Result<Residual> {
    residual(&sys.a_hat, &sys.rhs, x)
}
