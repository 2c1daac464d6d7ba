//! Scalar abstraction: every algorithm in this crate is generic over the
//! working floating-point type.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
///
/// The library defaults (integrator tolerances, unitarity guards) target
/// `f64`; `f32` runs work but cannot reach those tolerances.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + core::fmt::Debug
    + core::fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Convert an `f64` literal into the working scalar type.
#[inline]
pub(crate) fn fp<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal converts to scalar type")
}

/// Lossy view of a scalar as `f64`, for diagnostics.
#[inline]
pub(crate) fn as_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
