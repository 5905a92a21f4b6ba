use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Scalar type for all numerical routines in this crate.
///
/// Implemented for `f32` and `f64` through the blanket impl below.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Send + Sync + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant not representable in scalar type")
}

#[inline]
pub fn as_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar not representable as f64")
}
