//! Numeric traits the engine is generic over.
//!
//! [`Field`] is the minimal arithmetic needed by the interpolation formulas and
//! is satisfied by exact rationals as well as floats. [`Scalar`] adds the
//! transcendental functions needed by UCB and the confidence intervals.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, Num};

/// Ordered field arithmetic: enough for `beta` and the GRAVE value.
pub trait Field: Num + Copy + PartialOrd + FromPrimitive + Debug {}

impl<T> Field for T where T: Num + Copy + PartialOrd + FromPrimitive + Debug {}

/// Floating point scalar used for node statistics and selection values.
pub trait Scalar: Field + Float + FloatConst + Send + Sync + Default + 'static {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts a count into the scalar type.
#[inline]
pub(crate) fn count<T: Field>(n: u32) -> T {
    T::from_u32(n).expect("count representable in scalar type")
}

/// Converts an f64 constant into the scalar type.
#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}
