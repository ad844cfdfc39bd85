//! Scalar abstraction for the closed-form kernels.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the kinematics and closed-form correlators are generic over.
///
/// Implemented for `f32` and `f64`. Monte Carlo, scans and the protocol
/// simulation are `f64` only.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
