//! Sparse and dense linear-algebra kernels shared by the Maxwell solver lab.
//!
//! Everything here is generic over [`Scalar`], which is implemented for `f64`
//! and `Complex64`. The real split system and the auxiliary nodal problems use
//! `f64`; the complex scattering system uses `Complex64`.

mod cholesky;
mod csr;
mod dense;
mod error;
mod lowrank;
mod lu;
pub mod mm;
pub mod ordering;
mod scalar;

pub use cholesky::CholFactor;
pub use csr::{CsrMatrix, TripletBuilder};
pub use dense::DenseBlock;
pub use error::SparseError;
pub use lowrank::{spectral_norm, truncated_svd, LowRankBlock};
pub use lu::LuFactor;
pub use num_complex::Complex64;
pub use scalar::{Scalar, ThinSvd};

/// Euclidean norm of a vector.
pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|v| v.abs_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product `sum(conj(x_i) * y_i)`.
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter()
        .zip(y)
        .fold(T::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

/// `y += alpha * x`
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
