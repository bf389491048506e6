use serde::{Deserialize, Serialize};

use super::Window;
use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Where a configuration's random stream came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub replication: u64,
}

/// Finite point configuration inside a window, stored as a flat
/// coordinate array of `len() * dim()` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfig<T> {
    coords: Vec<T>,
    window: Window<T>,
    provenance: Provenance,
}

impl<T: Real> PointConfig<T> {
    /// Checks that every point lies in `window`.
    pub fn new(window: Window<T>, coords: Vec<T>) -> Result<Self> {
        window.validate()?;
        let d = window.dim();
        if !coords.len().is_multiple_of(d) {
            return Err(invalid(format!("coordinate count {} is not a multiple of dimension {d}", coords.len())));
        }
        if let Some(bad) = coords.chunks_exact(d).position(|p| !window.contains(p)) {
            return Err(invalid(format!("point {bad} lies outside the window")));
        }
        Ok(PointConfig { coords, window, provenance: Provenance::default() })
    }

    pub(crate) fn from_parts(window: Window<T>, coords: Vec<T>, provenance: Provenance) -> Self {
        PointConfig { coords, window, provenance }
    }

    pub fn empty(window: Window<T>) -> Self {
        PointConfig { coords: Vec::new(), window, provenance: Provenance::default() }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        let d = self.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[T]> {
        self.coords.chunks_exact(self.dim())
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn window(&self) -> &Window<T> {
        &self.window
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Copy with `x` appended (wrapped into the fundamental box on a torus).
    pub fn with_point(&self, x: &[T]) -> Result<Self> {
        let mut p = x.to_vec();
        self.window.wrap(&mut p);
        if !self.window.contains(&p) {
            return Err(invalid("inserted point lies outside the window"));
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&p);
        Ok(PointConfig { coords, window: self.window.clone(), provenance: self.provenance })
    }

    /// Copy with vertex `i` removed; later vertices shift down by one.
    pub fn without_point(&self, i: usize) -> Self {
        let d = self.dim();
        let mut coords = Vec::with_capacity(self.coords.len().saturating_sub(d));
        coords.extend_from_slice(&self.coords[..i * d]);
        coords.extend_from_slice(&self.coords[(i + 1) * d..]);
        PointConfig { coords, window: self.window.clone(), provenance: self.provenance }
    }

    /// True if no two points coincide exactly.
    pub fn all_distinct(&self) -> bool {
        let mut pts: Vec<&[T]> = self.points().collect();
        pts.sort_by(|a, b| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        pts.windows(2).all(|w| w[0] != w[1])
    }
}
