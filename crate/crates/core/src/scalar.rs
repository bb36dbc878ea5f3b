//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumAssign};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Everything that touches field samples, special functions or quadrature is
/// generic over this trait. Constants are written as `f64` literals and lifted
/// with [`Real::of`].
pub trait Real:
    rustfft::FftNum + Float + FloatConst + NumAssign + Sum + Default + Display + LowerExp + Debug
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Converts a count or index.
    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable in scalar type")
    }

    /// Lossless-enough widening used for error messages and file output.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
