//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All geometry, densities, bounds and integrators are written against
//! [`Real`], so the same code runs in `f32` (cheap sweeps) and `f64`
//! (everything that feeds an acceptance check). Random variates are always
//! drawn in `f64` and narrowed, which keeps seeded streams identical across
//! scalar types.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal. Never fails for finite input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::lit(n as f64)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite float")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Volume of the Euclidean unit ball in `d` dimensions.
pub fn unit_ball_volume<T: Real>(d: usize) -> T {
    // V_d = 2π/d · V_{d-2}
    let mut v = if d.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if d.is_multiple_of(2) { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    T::lit(v)
}

/// Surface measure of the unit sphere in `d` dimensions, `d · V_d`.
pub fn unit_sphere_area<T: Real>(d: usize) -> T {
    T::from_usize_lossy(d) * unit_ball_volume::<T>(d)
}

pub(crate) fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        let pi = std::f64::consts::PI;
        assert!((unit_ball_volume::<f64>(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume::<f64>(2) - pi).abs() < 1e-15);
        assert!((unit_ball_volume::<f64>(3) - 4.0 * pi / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume::<f64>(4) - pi * pi / 2.0).abs() < 1e-14);
        assert!((unit_sphere_area::<f64>(2) - 2.0 * pi).abs() < 1e-14);
        assert!((unit_sphere_area::<f32>(3) - 4.0 * std::f32::consts::PI).abs() < 1e-5);
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), 1);
        assert_eq!(factorial(5), 120);
        assert_eq!(factorial(10), 3_628_800);
    }
}
