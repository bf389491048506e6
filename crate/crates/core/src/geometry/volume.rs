use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Norm, Shape};
use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::seed::{par_chunks, MeanAcc};

const PILOT: usize = 4096;
const MAX_SAMPLES: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    /// Zero for closed-form results.
    pub std_error: f64,
    pub exact: bool,
}

/// `λ(S ∪ (S + x₂) ∪ … ∪ (S + x_k))` for `offsets = [x₂, …, x_k]`.
///
/// Closed forms cover `k = 1`, `d = 1`, two Euclidean discs in the plane and
/// unions of cubes (inclusion–exclusion over box intersections, `k ≤ 16`);
/// other cases use hit-or-miss Monte Carlo with relative standard error
/// `rel_se`.
pub fn union_volume<T: Real>(shape: &Shape<T>, offsets: &[&[T]], rel_se: f64, seed: u64) -> Result<VolumeEstimate> {
    if !(rel_se > 0.0) {
        return Err(invalid(format!("requested relative error must be positive, got {rel_se}")));
    }
    shape.validate()?;
    let rho = shape.rho.as_f64();
    let vol = shape.volume().as_f64();
    let exact = |value| Ok(VolumeEstimate { value, std_error: 0.0, exact: true });
    if offsets.is_empty() {
        return exact(vol);
    }
    let centres = centres(shape.dim, offsets);
    if shape.dim == 1 || shape.norm == Norm::Sup && centres.len() <= 16 {
        return exact(box_union(&centres, rho));
    }
    if shape.dim == 2 && offsets.len() == 1 {
        let s = (centres[1][0].powi(2) + centres[1][1].powi(2)).sqrt();
        return exact(2.0 * vol - lens_area(rho, s));
    }
    union_volume_mc(shape, offsets, rel_se, seed)
}

/// Area of the intersection of two discs of radius `rho` at distance `s`.
pub fn lens_area(rho: f64, s: f64) -> f64 {
    if s >= 2.0 * rho {
        return 0.0;
    }
    2.0 * rho * rho * (s / (2.0 * rho)).acos() - 0.5 * s * (4.0 * rho * rho - s * s).sqrt()
}

fn centres<T: Real>(dim: usize, offsets: &[&[T]]) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; dim]];
    c.extend(offsets.iter().map(|o| o.iter().map(|v| v.as_f64()).collect::<Vec<_>>()));
    c
}

fn box_union(centres: &[Vec<f64>], rho: f64) -> f64 {
    let k = centres.len();
    let d = centres[0].len();
    let mut total = 0.0;
    for mask in 1u32..(1 << k) {
        let mut lo = vec![f64::NEG_INFINITY; d];
        let mut hi = vec![f64::INFINITY; d];
        for (i, c) in centres.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for a in 0..d {
                    lo[a] = lo[a].max(c[a] - rho);
                    hi[a] = hi[a].min(c[a] + rho);
                }
            }
        }
        let v: f64 = lo.iter().zip(&hi).map(|(l, h)| (h - l).max(0.0)).product();
        if mask.count_ones() % 2 == 1 {
            total += v;
        } else {
            total -= v;
        }
    }
    total
}

/// Hit-or-miss estimate over the bounding box of the union, sized from a
/// pilot run to reach relative standard error `rel_se`.
pub fn union_volume_mc<T: Real>(shape: &Shape<T>, offsets: &[&[T]], rel_se: f64, seed: u64) -> Result<VolumeEstimate> {
    if !(rel_se > 0.0) {
        return Err(invalid(format!("requested relative error must be positive, got {rel_se}")));
    }
    let d = shape.dim;
    let centres = centres(d, offsets);
    let r = shape.circumradius().as_f64();
    let lo: Vec<f64> = (0..d).map(|a| centres.iter().map(|c| c[a]).fold(f64::INFINITY, f64::min) - r).collect();
    let hi: Vec<f64> = (0..d).map(|a| centres.iter().map(|c| c[a]).fold(f64::NEG_INFINITY, f64::max) + r).collect();
    let box_vol: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    let hits = |n: usize, rng: &mut crate::seed::SimRng| {
        let mut x = vec![T::zero(); d];
        let mut diff = vec![T::zero(); d];
        let mut h = 0u64;
        for _ in 0..n {
            for a in 0..d {
                x[a] = T::lit(rng.random_range(lo[a]..hi[a]));
            }
            let inside = centres.iter().any(|c| {
                for a in 0..d {
                    diff[a] = x[a] - T::lit(c[a]);
                }
                shape.contains(&diff)
            });
            h += inside as u64;
        }
        h
    };
    let pilot: u64 = par_chunks(seed, PILOT, PILOT, |n, rng| hits(n, rng)).into_iter().sum();
    let p = ((pilot as f64 + 0.5) / (PILOT as f64 + 1.0)).min(1.0 - 1e-12);
    let need = ((1.0 - p) / (p * rel_se * rel_se)).ceil() as usize;
    let n = need.clamp(PILOT, MAX_SAMPLES);
    let chunk = crate::seed::DEFAULT_CHUNK;
    let parts = par_chunks(seed ^ 0x766f_6c75_6d65, n, chunk, |len, rng| {
        let h = hits(len, rng);
        MeanAcc { n: len as u64, sum: h as f64, sum_sq: h as f64 }
    });
    let acc = MeanAcc::combine(&parts);
    Ok(VolumeEstimate { value: box_vol * acc.mean(), std_error: box_vol * acc.std_error(), exact: false })
}
