//! Scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Floating-point scalar usable throughout the crate: `f32` or `f64`.
pub trait Real:
    FftNum + Float + FloatConst + Default + Display + Debug + FromStr + Send + Sync
{
    /// Lossless-enough conversion from `f64` literals and measured values.
    fn of(v: f64) -> Self;

    fn to_f64_lossy(self) -> f64;

    /// Converts a count; exact for the sizes used here.
    fn of_usize(v: usize) -> Self {
        Self::of(v as f64)
    }
}

impl Real for f32 {
    fn of(v: f64) -> Self {
        v as f32
    }
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn of(v: f64) -> Self {
        v
    }
    fn to_f64_lossy(self) -> f64 {
        self
    }
}
