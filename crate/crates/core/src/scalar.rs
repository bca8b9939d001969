use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the logistic map is iterated in: `f32` or `f64`.
pub trait ChaosFloat:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts a literal, panicking only if the type cannot hold it at all.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in target float type")
    }
}

impl ChaosFloat for f32 {}
impl ChaosFloat for f64 {}
