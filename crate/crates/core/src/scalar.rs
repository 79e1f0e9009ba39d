//! Floating-point scalar abstraction for the numeric kernel.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type usable by the state-vector and matrix kernel.
pub trait Real:
    Float + FloatConst + FromPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into this type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits every supported scalar")
    }

    /// Default tolerance for equality checks at this precision.
    fn tolerance() -> Self;
}

impl Real for f64 {
    fn tolerance() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn tolerance() -> Self {
        1e-4
    }
}
