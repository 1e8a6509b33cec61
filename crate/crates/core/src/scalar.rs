//! Scalar abstraction shared by every numeric module.
//!
//! All physics is written against [`Real`], so the same code runs in `f64`
//! (the default used by the CLI and I/O layer) and `f32`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

/// A real floating point scalar usable throughout the toolkit.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion of an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn sq(self) -> Self {
        self * self
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssignOps
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Relative closeness, scaled by the larger magnitude.
pub fn rel_close<T: Real>(a: T, b: T, rel: T) -> bool {
    let scale = a.abs().max(b.abs());
    if scale == T::zero() {
        return true;
    }
    (a - b).abs() <= rel * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip_both_widths() {
        assert_eq!(<f64 as Real>::lit(2.8e6), 2.8e6);
        assert_eq!(<f32 as Real>::lit(0.5), 0.5f32);
        assert_eq!(<f32 as Real>::two(), 2.0);
        assert_eq!(3.0f64.sq(), 9.0);
    }

    #[test]
    fn rel_close_handles_zero() {
        assert!(rel_close(0.0f64, 0.0, 1e-12));
        assert!(rel_close(1.0f64, 1.0 + 1e-13, 1e-12));
        assert!(!rel_close(1.0f64, 1.001, 1e-6));
    }
}
