use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{Density, IntensityModel, PointConfig, Provenance, Window};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seed::{derive_seed, rng_from_seed};

/// Tiles stop splitting once `sup/inf` over the tile is at most this.
const TILE_RATIO: f64 = 2.0;
const MAX_TILE_DEPTH: u32 = 40;
const MAX_TILES: usize = 1 << 20;

#[derive(Debug, Clone)]
struct Tile {
    lo: Vec<f64>,
    hi: Vec<f64>,
    bound: f64,
}

/// Precomputed thinning plan for one (model, window) pair.
///
/// The window's bounding box is cut into tiles on which a homogeneous
/// process with the tile's density bound dominates `t·m`; each dominating
/// point is kept with probability `t·m(x)/bound`.
#[derive(Debug, Clone)]
pub struct ThinningSampler<T> {
    model: IntensityModel<T>,
    window: Window<T>,
    tiles: Vec<Tile>,
    /// Running sums of tile masses, for single draws.
    cumulative: Vec<f64>,
}

impl<T: Real> ThinningSampler<T> {
    pub fn new(model: &IntensityModel<T>, window: &Window<T>) -> Result<Self> {
        model.check_window(window)?;
        let (lo, hi) = window.bounds();
        let lo: Vec<f64> = lo.iter().map(|v| v.as_f64()).collect();
        let hi: Vec<f64> = hi.iter().map(|v| v.as_f64()).collect();
        let mut tiles = Vec::new();
        match &model.density {
            Density::RadialPower { .. } => split(model, lo, hi, 0, &mut tiles),
            _ => {
                let bound = model.sup_density().as_f64();
                tiles.push(Tile { lo, hi, bound });
            }
        }
        let mass: f64 = tiles.iter().map(|t| t.bound * volume(&t.lo, &t.hi)).sum();
        if !mass.is_finite() || tiles.len() > MAX_TILES {
            return Err(Error::WindowMassNotFinite);
        }
        let cumulative = tiles
            .iter()
            .scan(0.0, |acc, t| {
                *acc += t.bound * volume(&t.lo, &t.hi);
                Some(*acc)
            })
            .collect();
        Ok(ThinningSampler { model: model.clone(), window: window.clone(), tiles, cumulative })
    }

    /// Expected number of dominating points.
    pub fn dominating_mass(&self) -> f64 {
        self.tiles.iter().map(|t| t.bound * volume(&t.lo, &t.hi)).sum()
    }

    pub fn tile_count(&self) -> usize {
        self.tiles.len()
    }

    pub fn sample(&self, seed: u64) -> Result<PointConfig<T>> {
        let mut rng = rng_from_seed(seed);
        let d = self.window.dim();
        let mut coords: Vec<T> = Vec::new();
        let mut x = vec![T::zero(); d];
        for tile in &self.tiles {
            let mean = tile.bound * volume(&tile.lo, &tile.hi);
            if mean <= 0.0 {
                continue;
            }
            let n = Poisson::new(mean).map_err(|_| Error::WindowMassNotFinite)?.sample(&mut rng) as u64;
            for _ in 0..n {
                for (a, xa) in x.iter_mut().enumerate() {
                    *xa = T::lit(rng.random_range(tile.lo[a]..=tile.hi[a]));
                }
                let u: f64 = rng.random();
                if !self.window.contains(&x) {
                    continue;
                }
                let m = self.model.density(&x).as_f64();
                if m > tile.bound * (1.0 + 1e-9) {
                    return Err(Error::InvalidParameter(format!(
                        "density {m} exceeds its declared bound {}",
                        tile.bound
                    )));
                }
                if u * tile.bound < m {
                    coords.extend_from_slice(&x);
                }
            }
        }
        Ok(PointConfig::from_parts(self.window.clone(), coords, Provenance { master_seed: seed, replication: 0 }))
    }

    /// One point from `μ` restricted to the window, normalised; `None` if
    /// the window has no mass.
    pub fn draw_one<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [T]) -> Option<()> {
        let total = *self.cumulative.last()?;
        if total <= 0.0 {
            return None;
        }
        loop {
            let u = rng.random::<f64>() * total;
            let i = self.cumulative.partition_point(|&c| c <= u).min(self.tiles.len() - 1);
            let tile = &self.tiles[i];
            for (a, o) in out.iter_mut().enumerate() {
                *o = T::lit(rng.random_range(tile.lo[a]..=tile.hi[a]));
            }
            if !self.window.contains(out) {
                continue;
            }
            if rng.random::<f64>() * tile.bound < self.model.density(out).as_f64() {
                return Some(());
            }
        }
    }

    /// Replication `index` under `master`, seeded by `derive_seed`.
    pub fn sample_replication(&self, master: u64, index: u64) -> Result<PointConfig<T>> {
        let cfg = self.sample(derive_seed(master, index))?;
        Ok(cfg.with_provenance(Provenance { master_seed: master, replication: index }))
    }
}

fn volume(lo: &[f64], hi: &[f64]) -> f64 {
    lo.iter().zip(hi).map(|(l, h)| h - l).product()
}

fn split<T: Real>(model: &IntensityModel<T>, lo: Vec<f64>, hi: Vec<f64>, depth: u32, out: &mut Vec<Tile>) {
    let (sup, inf) = model.box_bounds(&lo, &hi);
    if sup <= TILE_RATIO * inf || depth >= MAX_TILE_DEPTH || out.len() >= MAX_TILES {
        out.push(Tile { lo, hi, bound: sup });
        return;
    }
    // split the longest axis in half
    let axis = (0..lo.len()).max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b]))).unwrap_or(0);
    let mid = 0.5 * (lo[axis] + hi[axis]);
    let mut hi_left = hi.clone();
    hi_left[axis] = mid;
    let mut lo_right = lo.clone();
    lo_right[axis] = mid;
    split(model, lo, hi_left, depth + 1, out);
    split(model, lo_right, hi, depth + 1, out);
}

/// Samples a Poisson process with intensity `t·m` on `window`.
pub fn sample_poisson<T: Real>(model: &IntensityModel<T>, window: &Window<T>, seed: u64) -> Result<PointConfig<T>> {
    ThinningSampler::new(model, window)?.sample(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_gives_empty() {
        let w = Window::cube(2, 5.0).unwrap();
        let c = sample_poisson(&IntensityModel::homogeneous(0.0), &w, 3).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn same_seed_same_points() {
        let w = Window::cube(2, 4.0).unwrap();
        let m = IntensityModel::radial_power(10.0, 2.0);
        let a = sample_poisson(&m, &w, 77).unwrap();
        let b = sample_poisson(&m, &w, 77).unwrap();
        assert_eq!(a.coords(), b.coords());
        let c = sample_poisson(&m, &w, 78).unwrap();
        assert_ne!(a.coords(), c.coords());
    }

    #[test]
    fn tiles_cover_window_and_dominate() {
        let w = Window::cube(2, 30.0).unwrap();
        let m = IntensityModel::radial_power(100.0, 2.0);
        let s = ThinningSampler::new(&m, &w).unwrap();
        let area: f64 = s.tiles.iter().map(|t| volume(&t.lo, &t.hi)).sum();
        assert!((area - 3600.0).abs() < 1e-9);
        let mass = m.mass(&w).unwrap();
        assert!(s.dominating_mass() >= mass && s.dominating_mass() <= 2.0 * mass);
    }

    #[test]
    fn torus_needs_homogeneous() {
        let w = Window::torus(2, 3.0).unwrap();
        assert!(ThinningSampler::new(&IntensityModel::radial_power(1.0, 2.0), &w).is_err());
        assert!(ThinningSampler::new(&IntensityModel::homogeneous(1.0), &w).is_ok());
    }

    #[test]
    fn ball_window_points_inside() {
        let w = Window::ball(vec![1.0, -1.0], 2.0).unwrap();
        let c = sample_poisson(&IntensityModel::homogeneous(20.0), &w, 5).unwrap();
        assert!(c.points().all(|p| w.contains(p)));
        assert!(c.len() > 100);
    }
}
