//! Scalar abstraction for the numerical kernels.
//!
//! Everything in this crate computes over a floating point type chosen by the
//! caller; `f64` is the default used by the harness and the CLI (see the type
//! aliases at the crate root), `f32` works for rough interactive use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}

/// Volume of the unit ball in dimension `n`.
///
/// Computed by the recurrence v(n) = 2*pi*v(n-2)/n with v(0) = 1, v(1) = 2,
/// which avoids a gamma function and is exact enough for any desk dimension.
pub fn unit_ball_volume<T: Real>(n: usize) -> T {
    let two_pi = T::PI() * real::<T>(2.0);
    match n {
        0 => T::one(),
        1 => real(2.0),
        _ => unit_ball_volume::<T>(n - 2) * two_pi / real::<T>(n as f64),
    }
}

/// Total surface measure of the unit sphere S^{n-1} in dimension `n`,
/// i.e. n times the unit ball volume.
pub fn sphere_measure<T: Real>(n: usize) -> T {
    real::<T>(n as f64) * unit_ball_volume::<T>(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes_match_closed_forms() {
        let pi = std::f64::consts::PI;
        assert!((unit_ball_volume::<f64>(2) - pi).abs() < 1e-15);
        assert!((unit_ball_volume::<f64>(3) - 4.0 * pi / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume::<f64>(4) - pi * pi / 2.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_measures() {
        let pi = std::f64::consts::PI;
        assert!((sphere_measure::<f64>(2) - 2.0 * pi).abs() < 1e-14);
        assert!((sphere_measure::<f64>(3) - 4.0 * pi).abs() < 1e-14);
        // sigma(S^3) = 2 pi^2
        assert!((sphere_measure::<f64>(4) - 2.0 * pi * pi).abs() < 1e-13);
    }

    #[test]
    fn works_at_f32() {
        assert!((unit_ball_volume::<f32>(2) - std::f32::consts::PI).abs() < 1e-6);
    }
}
