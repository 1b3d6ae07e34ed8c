use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar used by the geometry kernel: `f32` or `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Penetration depth below which two solids count as merely touching.
    fn contact_tolerance() -> Self;

    /// Converts an `f64` literal; panics only for values the type cannot hold at all.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Scalar for f32 {
    fn contact_tolerance() -> Self {
        1e-6
    }
}

impl Scalar for f64 {
    fn contact_tolerance() -> Self {
        1e-9
    }
}
