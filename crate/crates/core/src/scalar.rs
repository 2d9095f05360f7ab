//! Scalar abstraction for the model's magnitudes.

use std::fmt;

/// Floating-point scalar the models are generic over: `f32` or `f64`.
///
/// All published constants are `f64` literals; `of` narrows them into the
/// working scalar type on construction.
pub trait Scalar:
    num_traits::Float + num_traits::FromPrimitive + fmt::Debug + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("constant representable as scalar")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
