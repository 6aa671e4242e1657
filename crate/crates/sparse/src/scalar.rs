use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Thin SVD of a column-major `m x n` array: `(U, sigma, V^H)` with `U` of
/// size `m x p`, `V^H` of size `p x n` (both column-major), `p = min(m, n)`.
pub type ThinSvd<T> = (Vec<T>, Vec<f64>, Vec<T>);

/// Real or complex double-precision scalar.
pub trait Scalar:
    Copy
    + Default
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + Sum
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + 'static
{
    /// Matrix Market field keyword (`real` or `complex`).
    const FIELD: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(r: f64) -> Self;
    fn conj(self) -> Self;
    fn abs(self) -> f64;
    fn abs_sqr(self) -> f64;
    fn re(self) -> f64;
    fn scale(self, s: f64) -> Self;

    /// Whitespace-separated value tokens for a Matrix Market entry line.
    fn mm_format(self) -> String;
    fn mm_parse(tokens: &[&str]) -> Option<Self>;
    /// Number of value tokens per Matrix Market entry.
    fn mm_tokens() -> usize;

    fn thin_svd(m: usize, n: usize, data: &[Self]) -> ThinSvd<Self>;
}

macro_rules! nalgebra_svd {
    ($t:ty) => {
        fn thin_svd(m: usize, n: usize, data: &[Self]) -> ThinSvd<Self> {
            let svd = nalgebra::DMatrix::<$t>::from_column_slice(m, n, data).svd(true, true);
            let u = svd.u.expect("left singular vectors requested");
            let v_t = svd.v_t.expect("right singular vectors requested");
            (
                u.as_slice().to_vec(),
                svd.singular_values.as_slice().to_vec(),
                v_t.as_slice().to_vec(),
            )
        }
    };
}

impl Scalar for f64 {
    const FIELD: &'static str = "real";

    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn one() -> Self {
        1.0
    }
    #[inline]
    fn from_f64(r: f64) -> Self {
        r
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn abs_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn mm_format(self) -> String {
        let s = format!("{self:?}");
        match s.strip_suffix(".0") {
            Some(t) => t.to_string(),
            None => s,
        }
    }
    fn mm_parse(tokens: &[&str]) -> Option<Self> {
        tokens.first()?.parse().ok()
    }
    fn mm_tokens() -> usize {
        1
    }
    nalgebra_svd!(f64);
}

impl Scalar for Complex64 {
    const FIELD: &'static str = "complex";

    #[inline]
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline]
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    #[inline]
    fn from_f64(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::new(self.re, -self.im)
    }
    #[inline]
    fn abs(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn abs_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        Complex64::new(self.re * s, self.im * s)
    }
    fn mm_format(self) -> String {
        format!("{} {}", self.re.mm_format(), self.im.mm_format())
    }
    fn mm_parse(tokens: &[&str]) -> Option<Self> {
        if tokens.len() < 2 {
            return None;
        }
        Some(Complex64::new(tokens[0].parse().ok()?, tokens[1].parse().ok()?))
    }
    fn mm_tokens() -> usize {
        2
    }
    nalgebra_svd!(Complex64);
}
