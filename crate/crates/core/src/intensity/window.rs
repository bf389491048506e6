use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::{unit_ball_volume, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    Box,
    Ball,
    /// Box with periodic boundary; distances use the minimum image.
    TorusBox,
}

/// Bounded simulation window. For balls `half_extent` holds the radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window<T> {
    pub kind: WindowKind,
    pub center: Vec<T>,
    pub half_extent: Vec<T>,
}

impl<T: Real> Window<T> {
    pub fn new(kind: WindowKind, center: Vec<T>, half_extent: Vec<T>) -> Result<Self> {
        let w = Window { kind, center, half_extent };
        w.validate()?;
        Ok(w)
    }

    /// `[-h, h]^d`.
    pub fn cube(dim: usize, h: T) -> Result<Self> {
        Self::new(WindowKind::Box, vec![T::zero(); dim], vec![h; dim])
    }

    /// Periodic `[-h, h]^d`.
    pub fn torus(dim: usize, h: T) -> Result<Self> {
        Self::new(WindowKind::TorusBox, vec![T::zero(); dim], vec![h; dim])
    }

    pub fn ball(center: Vec<T>, radius: T) -> Result<Self> {
        Self::new(WindowKind::Ball, center, vec![radius])
    }

    pub fn validate(&self) -> Result<()> {
        if self.center.is_empty() {
            return Err(invalid("window dimension must be positive"));
        }
        let expected = match self.kind {
            WindowKind::Ball => 1,
            _ => self.center.len(),
        };
        if self.half_extent.len() != expected {
            return Err(invalid(format!(
                "window half_extent has {} entries, expected {expected}",
                self.half_extent.len()
            )));
        }
        if self.half_extent.iter().any(|&h| !(h > T::zero()) || !h.is_finite()) {
            return Err(invalid("window half_extent must be strictly positive and finite"));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(invalid("window center must be finite"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn is_torus(&self) -> bool {
        self.kind == WindowKind::TorusBox
    }

    fn half(&self, axis: usize) -> T {
        match self.kind {
            WindowKind::Ball => self.half_extent[0],
            _ => self.half_extent[axis],
        }
    }

    pub fn volume(&self) -> T {
        match self.kind {
            WindowKind::Ball => unit_ball_volume::<T>(self.dim()) * self.half_extent[0].powi(self.dim() as i32),
            _ => self.half_extent.iter().fold(T::one(), |v, &h| v * (h + h)),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounds(&self) -> (Vec<T>, Vec<T>) {
        let lo = (0..self.dim()).map(|a| self.center[a] - self.half(a)).collect();
        let hi = (0..self.dim()).map(|a| self.center[a] + self.half(a)).collect();
        (lo, hi)
    }

    /// Closed containment.
    pub fn contains(&self, x: &[T]) -> bool {
        match self.kind {
            WindowKind::Ball => {
                let r = self.half_extent[0];
                x.iter().zip(&self.center).map(|(&a, &c)| (a - c) * (a - c)).sum::<T>() <= r * r
            }
            _ => x.iter().zip(self.center.iter().zip(&self.half_extent)).all(|(&a, (&c, &h))| (a - c).abs() <= h),
        }
    }

    /// Side length of the periodic box along `axis`.
    pub fn period(&self, axis: usize) -> T {
        self.half_extent[axis] + self.half_extent[axis]
    }

    /// Writes `b - a` into `out`, using the minimum image on a torus.
    #[inline]
    pub fn displacement(&self, a: &[T], b: &[T], out: &mut [T]) {
        if self.is_torus() {
            for axis in 0..a.len() {
                let l = self.period(axis);
                let mut v = b[axis] - a[axis];
                let half = self.half_extent[axis];
                if v > half {
                    v = v - l;
                } else if v < -half {
                    v = v + l;
                }
                out[axis] = v;
            }
        } else {
            for axis in 0..a.len() {
                out[axis] = b[axis] - a[axis];
            }
        }
    }

    /// Maps `x` into the fundamental box of a torus; identity otherwise.
    pub fn wrap(&self, x: &mut [T]) {
        if !self.is_torus() {
            return;
        }
        for (axis, xa) in x.iter_mut().enumerate() {
            let lo = self.center[axis] - self.half_extent[axis];
            let l = self.period(axis);
            let mut v = *xa - lo;
            v = v - (v / l).floor() * l;
            if v >= l {
                v = v - l;
            }
            *xa = lo + v;
        }
    }

    /// Window shrunk by `margin` on every side, or `None` if nothing is left.
    pub fn eroded(&self, margin: T) -> Option<Window<T>> {
        let half: Vec<T> = self.half_extent.iter().map(|&h| h - margin).collect();
        if half.iter().any(|&h| !(h > T::zero())) {
            return None;
        }
        Some(Window { kind: self.kind, center: self.center.clone(), half_extent: half })
    }
}
