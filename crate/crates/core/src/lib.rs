//! Component counts of random geometric graphs over Poisson processes:
//! sampling, graph construction, concentration bounds and regime limits.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` and `*32` aliases fix it.
// `!(x > 0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod components;
pub mod concentration;
pub mod error;
pub mod geometry;
pub mod intensity;
pub mod quad;
pub mod scalar;
pub mod seed;
pub mod simulate;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Window64 = intensity::Window<f64>;
pub type Window32 = intensity::Window<f32>;
pub type PointConfig64 = intensity::PointConfig<f64>;
pub type PointConfig32 = intensity::PointConfig<f32>;
pub type IntensityModel64 = intensity::IntensityModel<f64>;
pub type IntensityModel32 = intensity::IntensityModel<f32>;
pub type Shape64 = geometry::Shape<f64>;
pub type Shape32 = geometry::Shape<f32>;
pub type GeomGraph64 = geometry::GeomGraph<f64>;
pub type GeomGraph32 = geometry::GeomGraph<f32>;
