//! Pluggable real arithmetic.
//!
//! Every numerical kernel in this crate is generic over [`Real`], with two
//! instantiations: hardware `f64` and [`Ext`], a 256-bit multiple-precision
//! binary float (roughly 77 significant decimal digits, correctly rounded).
//! The alternating sums behind the F families cancel catastrophically as
//! n + k grows, so deep tables and reconstruction depths K > 20 have to run
//! in the extended mode.

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use rug::ops::Pow;

/// Mantissa bits of the extended mode.
pub const EXT_PREC: u32 = 256;

/// The extended-precision scalar.
pub type Ext = rug::Float;

/// A real scalar type the numerical kernels can be written against.
///
/// Beyond ordinary field arithmetic (by value and with `&Self` right-hand
/// sides) an implementation supplies the elementary functions, conversions,
/// and the precision-dependent defaults: the relative tolerance used in
/// cancellation-aware sign verdicts and the digit count for serialization.
pub trait Real:
    Sized
    + Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    /// Mode name as it appears in reports: `"f64"` or `"extended"`.
    const NAME: &'static str;

    fn from_f64(v: f64) -> Self;
    fn from_usize(v: usize) -> Self;
    fn to_f64(&self) -> f64;
    fn zero() -> Self;
    fn one() -> Self;
    fn abs(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn powf(&self, e: &Self) -> Self;
    fn is_finite(&self) -> bool;

    /// Default relative tolerance for sign verdicts, multiplied by the
    /// cancellation scale of the quantity under test.
    fn rel_tol() -> Self;

    /// `rel_tol` as an `f64`, for report headers.
    fn rel_tol_f64() -> f64;

    /// Scientific-notation rendering with the full round-trip digit count.
    fn fmt_sci(&self) -> String;

    fn max_val(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_val(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    const NAME: &'static str = "f64";

    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_usize(v: usize) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn powf(&self, e: &Self) -> Self {
        f64::powf(*self, *e)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn rel_tol() -> Self {
        1e-8
    }
    fn rel_tol_f64() -> f64 {
        1e-8
    }
    fn fmt_sci(&self) -> String {
        format!("{:.16e}", self)
    }
}

impl Real for Ext {
    const NAME: &'static str = "extended";

    fn from_f64(v: f64) -> Self {
        Ext::with_val(EXT_PREC, v)
    }
    fn from_usize(v: usize) -> Self {
        Ext::with_val(EXT_PREC, v as u64)
    }
    fn to_f64(&self) -> f64 {
        rug::Float::to_f64(self)
    }
    fn zero() -> Self {
        Ext::with_val(EXT_PREC, 0)
    }
    fn one() -> Self {
        Ext::with_val(EXT_PREC, 1)
    }
    fn abs(&self) -> Self {
        self.clone().abs()
    }
    fn exp(&self) -> Self {
        self.clone().exp()
    }
    fn ln(&self) -> Self {
        self.clone().ln()
    }
    fn sqrt(&self) -> Self {
        self.clone().sqrt()
    }
    fn powi(&self, n: i32) -> Self {
        self.clone().pow(n)
    }
    fn powf(&self, e: &Self) -> Self {
        self.clone().pow(e)
    }
    fn is_finite(&self) -> bool {
        rug::Float::is_finite(self)
    }
    fn rel_tol() -> Self {
        Ext::with_val(EXT_PREC, 10).pow(-30)
    }
    fn rel_tol_f64() -> f64 {
        1e-30
    }
    fn fmt_sci(&self) -> String {
        format!("{:.77e}", self)
    }
}

/// Binomial coefficient C(n, j) by the multiplicative recurrence, carried out
/// in the active precision (exact whenever the intermediate products fit the
/// mantissa).
pub fn binomial<R: Real>(n: usize, j: usize) -> R {
    if j > n {
        return R::zero();
    }
    let j = j.min(n - j);
    let mut acc = R::one();
    for i in 0..j {
        acc = acc * R::from_usize(n - i) / R::from_usize(i + 1);
    }
    acc
}

/// n! in the active precision.
pub fn factorial<R: Real>(n: usize) -> R {
    let mut acc = R::one();
    for i in 2..=n {
        acc = acc * R::from_usize(i);
    }
    acc
}

/// Rising product base·(base+1)···(base+count−1); the empty product is 1.
///
/// This is Γ(base+count)/Γ(base), kept in product form so it stays exact for
/// integer-valued inputs and never overflows through the Gamma function.
pub fn rising<R: Real>(base: &R, count: usize) -> R {
    let mut acc = R::one();
    for i in 0..count {
        acc = acc * (base.clone() + R::from_usize(i));
    }
    acc
}
