use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::{unit_ball_volume, Real};

/// Norm whose closed ball of radius `rho` is the structuring set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Norm {
    Euclidean,
    Sup,
}

/// Symmetric structuring set `S`: the closed `norm`-ball of radius `rho`.
///
/// `B(0, ρ) ⊆ S ⊆ B(0, θρ)` with `θ = 1` for the Euclidean ball and
/// `θ = √d` for the cube `ρ·[-1, 1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shape<T> {
    pub norm: Norm,
    pub rho: T,
    pub dim: usize,
}

impl<T: Real> Shape<T> {
    pub fn new(norm: Norm, rho: T, dim: usize) -> Result<Self> {
        let shape = Shape { norm, rho, dim };
        shape.validate()?;
        Ok(shape)
    }

    pub fn euclidean(rho: T, dim: usize) -> Result<Self> {
        Self::new(Norm::Euclidean, rho, dim)
    }

    pub fn sup(rho: T, dim: usize) -> Result<Self> {
        Self::new(Norm::Sup, rho, dim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(invalid("shape dimension must be positive"));
        }
        if !(self.rho > T::zero()) || !self.rho.is_finite() {
            return Err(invalid(format!("shape rho must be positive and finite, got {}", self.rho)));
        }
        Ok(())
    }

    pub fn theta(&self) -> T {
        match self.norm {
            Norm::Euclidean => T::one(),
            Norm::Sup => T::from_usize_lossy(self.dim).sqrt(),
        }
    }

    /// Euclidean radius of the smallest centred ball containing `S`.
    pub fn circumradius(&self) -> T {
        self.theta() * self.rho
    }

    /// Norm of `v` in the shape's own norm.
    #[inline]
    pub fn gauge(&self, v: &[T]) -> T {
        match self.norm {
            Norm::Euclidean => v.iter().map(|&x| x * x).sum::<T>().sqrt(),
            Norm::Sup => v.iter().fold(T::zero(), |m, &x| m.max(x.abs())),
        }
    }

    /// Closed membership `v ∈ S`; a difference of norm exactly `rho` is inside.
    #[inline]
    pub fn contains(&self, v: &[T]) -> bool {
        match self.norm {
            Norm::Euclidean => v.iter().map(|&x| x * x).sum::<T>() <= self.rho * self.rho,
            Norm::Sup => v.iter().all(|&x| x.abs() <= self.rho),
        }
    }

    /// Lebesgue volume `λ(S)`.
    pub fn volume(&self) -> T {
        match self.norm {
            Norm::Euclidean => unit_ball_volume::<T>(self.dim) * self.rho.powi(self.dim as i32),
            Norm::Sup => (self.rho + self.rho).powi(self.dim as i32),
        }
    }

    /// `factor · S`.
    pub fn scaled(&self, factor: T) -> Self {
        Shape { norm: self.norm, rho: self.rho * factor, dim: self.dim }
    }

    /// Writes a point drawn uniformly from `S` into `out`.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [T]) {
        let rho = self.rho.as_f64();
        match self.norm {
            Norm::Sup => {
                for o in out.iter_mut() {
                    *o = T::lit(rho * (2.0 * rng.random::<f64>() - 1.0));
                }
            }
            Norm::Euclidean => sample_in_ball(rng, rho, out),
        }
    }
}

/// Uniform point in the centred Euclidean ball of radius `radius`.
pub(crate) fn sample_in_ball<T: Real, R: Rng + ?Sized>(rng: &mut R, radius: f64, out: &mut [T]) {
    let d = out.len();
    if d <= 3 {
        let mut buf = [0.0f64; 3];
        loop {
            let mut r2 = 0.0;
            for b in buf.iter_mut().take(d) {
                *b = 2.0 * rng.random::<f64>() - 1.0;
                r2 += *b * *b;
            }
            if r2 <= 1.0 {
                break;
            }
        }
        for (o, b) in out.iter_mut().zip(buf.iter()) {
            *o = T::lit(radius * b);
        }
    } else {
        let mut v: Vec<f64> =
            (0..d).map(|_| rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = radius * rng.random::<f64>().powf(1.0 / d as f64) / norm;
        for (o, x) in out.iter_mut().zip(v.iter_mut()) {
            *o = T::lit(*x * scale);
        }
    }
}
