use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Norm, Shape};
use crate::scalar::Real;
use crate::seed::{derive_seed, rng_from_seed};

const SEARCH_SEED: u64 = 0x7061_636b;
const RESTARTS: u64 = 24;
const SWEEPS: usize = 4000;

/// Packing constant `c_S`: the largest number of points of `S` whose
/// pairwise differences all lie outside `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    /// Size of an explicit configuration found by search.
    pub lower_bound: usize,
    /// Exact value where known.
    pub value: Option<usize>,
}

impl Packing {
    /// The exact value, else `max(override, lower_bound)`; the flag is true
    /// when the result is not certified.
    pub fn resolve(&self, override_value: Option<usize>) -> Option<(usize, bool)> {
        match (self.value, override_value) {
            (Some(v), _) => Some((v, false)),
            (None, Some(o)) => Some((o.max(self.lower_bound), true)),
            (None, None) => None,
        }
    }
}

/// Known table values.
pub fn packing_table(norm: Norm, dim: usize) -> Option<usize> {
    match (norm, dim) {
        (_, 1) => Some(2),
        (Norm::Euclidean, 2) => Some(5),
        // ρ-subcubes of the 2^d orthants pin it; corners attain it
        (Norm::Sup, d) if d < usize::BITS as usize => Some(1 << d),
        _ => None,
    }
}

pub fn packing_constant<T: Real>(shape: &Shape<T>) -> Packing {
    let value = packing_table(shape.norm, shape.dim);
    let mut lower_bound = search_lower_bound(shape.norm, shape.dim);
    if let Some(v) = value {
        lower_bound = lower_bound.min(v);
    }
    Packing { lower_bound, value }
}

/// Largest `m` for which a repulsion search inside the unit `S` finds `m`
/// points with all pairwise gauge distances strictly above 1.
pub fn search_lower_bound(norm: Norm, dim: usize) -> usize {
    let mut best = 1;
    let cap = 64;
    while best < cap && try_place(norm, dim, best + 1) {
        best += 1;
    }
    best
}

fn gauge(norm: Norm, v: &[f64]) -> f64 {
    match norm {
        Norm::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        Norm::Sup => v.iter().fold(0.0, |m: f64, x| m.max(x.abs())),
    }
}

fn project(norm: Norm, p: &mut [f64]) {
    match norm {
        Norm::Euclidean => {
            let r = gauge(norm, p);
            if r > 1.0 {
                p.iter_mut().for_each(|x| *x /= r);
            }
        }
        Norm::Sup => p.iter_mut().for_each(|x| *x = x.clamp(-1.0, 1.0)),
    }
}

fn min_gap(norm: Norm, pts: &[Vec<f64>]) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    let mut diff = vec![0.0; pts[0].len()];
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for a in 0..diff.len() {
                diff[a] = pts[i][a] - pts[j][a];
            }
            let g = gauge(norm, &diff);
            if g < best.0 {
                best = (g, i, j);
            }
        }
    }
    best
}

fn try_place(norm: Norm, dim: usize, m: usize) -> bool {
    for restart in 0..RESTARTS {
        let mut rng = rng_from_seed(derive_seed(SEARCH_SEED ^ ((dim as u64) << 32) ^ m as u64, restart));
        let mut pts: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let mut p: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                project(norm, &mut p);
                p
            })
            .collect();
        let mut step = 0.5;
        for _ in 0..SWEEPS {
            let (g, i, j) = min_gap(norm, &pts);
            if g > 1.0 + 1e-9 {
                return true;
            }
            // push the closest pair apart, jittering ties
            let mut dir: Vec<f64> = (0..dim).map(|a| pts[i][a] - pts[j][a]).collect();
            let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len < 1e-12 {
                dir.iter_mut().for_each(|x| *x = rng.random_range(-1.0..1.0));
            }
            let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            for a in 0..dim {
                let jitter = 0.05 * step * rng.random_range(-1.0..1.0);
                pts[i][a] += step * dir[a] / len + jitter;
                pts[j][a] -= step * dir[a] / len - jitter;
            }
            project(norm, &mut pts[i]);
            project(norm, &mut pts[j]);
            step = (step * 0.999).max(0.01);
        }
    }
    false
}
