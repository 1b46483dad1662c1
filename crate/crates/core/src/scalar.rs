//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the toolkit is generic over. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable as float")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle<T: Real>(angle: T) -> T {
    let tau = T::two_pi();
    let mut a = angle % tau;
    if a < T::zero() {
        a = a + tau;
    }
    // `a + tau` can round up to exactly tau for tiny negative inputs.
    if a >= tau {
        a = T::zero();
    }
    a
}

/// Distance between two angles in the circle metric, in `[0, π]`.
pub fn circle_distance<T: Real>(a: T, b: T) -> T {
    let d = normalize_angle(a - b);
    d.min(T::two_pi() - d)
}
