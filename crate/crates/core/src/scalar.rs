use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::distributions::uniform::SampleUniform;

/// Real scalar used throughout the crate: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + SampleUniform + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Parse a decimal literal directly in the target precision.
    fn parse_decimal(text: &str) -> Option<Self> {
        <Self as num_traits::Num>::from_str_radix(text, 10).ok()
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + SampleUniform + Debug + Display + Send + Sync + 'static
{
}
