//! Scalar abstraction: the whole planning core is generic over the floating
//! point type. `f64` is the working precision of the CLI and the shipped
//! scenarios; `f32` is available for memory-bound embedding.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar usable throughout the planner.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + core::fmt::Debug + core::fmt::Display + 'static
{
    /// Lossy conversion from `f64`, for constants and configuration defaults.
    #[inline]
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant must convert")
    }

    /// Lossy conversion from `usize`, for step counts and weights.
    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize must convert to scalar")
    }

    #[inline]
    fn half() -> Self {
        Self::from_f64_lossy(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::from_f64_lossy(2.0)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + core::fmt::Debug
        + core::fmt::Display
        + 'static
{
}
