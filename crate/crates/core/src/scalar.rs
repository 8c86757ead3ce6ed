//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the spectral engine is generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must be representable")
    }

    /// Converts an integer count into the scalar type.
    #[inline]
    fn from_count(n: i64) -> Self {
        Self::from_i64(n).expect("integer must be representable")
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }

    /// `x^p` with the conventions `0^0 = 1` and `0^p = 0` for `p > 0`.
    #[inline]
    fn pow_nonneg(self, p: Self) -> Self {
        if self == Self::zero() {
            if p == Self::zero() {
                Self::one()
            } else {
                Self::zero()
            }
        } else if p == Self::zero() {
            Self::one()
        } else {
            (p * self.ln()).exp()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
