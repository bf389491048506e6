use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

const SERIES_CUTOFF: f64 = 1e-4;

/// `ψ(z) = z e^z − e^z + 1`.
pub fn psi<T: Real>(z: T) -> T {
    if z.abs() < T::lit(SERIES_CUTOFF) {
        let z2 = z * z;
        return z2 * (T::lit(0.5) + z * (T::lit(1.0 / 3.0) + z * (T::lit(0.125) + z * T::lit(1.0 / 30.0))));
    }
    z * z.exp() - z.exp_m1()
}

/// `φ(z) = e^z − z − 1`.
pub fn phi<T: Real>(z: T) -> T {
    if z.abs() < T::lit(SERIES_CUTOFF) {
        let z2 = z * z;
        return z2 * (T::lit(0.5) + z * (T::lit(1.0 / 6.0) + z * (T::lit(1.0 / 24.0) + z * T::lit(1.0 / 120.0))));
    }
    z.exp_m1() - z
}

/// `(aψ(z)/z²) / (1 + aψ(z)/z) ≤ max(a, 4/3)/2` for `a, z > 0`.
pub fn psi_bound_check(a: f64, z: f64) -> bool {
    psi_bound_lhs(a, z) <= psi_bound_rhs(a)
}

pub fn psi_bound_lhs(a: f64, z: f64) -> f64 {
    let p = psi(z);
    (a * p / (z * z)) / (1.0 + a * p / z)
}

pub fn psi_bound_rhs(a: f64) -> f64 {
    a.max(4.0 / 3.0) / 2.0
}

/// `ψ(z)(1 − 2z/3) ≤ z²/2`.
pub fn psi_rearrangement_check(z: f64) -> bool {
    psi(z) * (1.0 - 2.0 * z / 3.0) <= 0.5 * z * z
}

/// Van der Corput radical inverse of `i` in `base`.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub points: u64,
    pub lemma_violations: u64,
    pub rearrangement_violations: u64,
    /// Largest `lhs / rhs` seen in the lemma.
    pub max_lemma_ratio: f64,
    pub a_max: f64,
    pub z_max: f64,
}

/// Evaluates both inequalities at `n` Halton points
/// `(a, z) ∈ (0, a_max] × (0, z_max]` (bases 2 and 3, indices from 1).
pub fn lemma_sweep(n: u64, a_max: f64, z_max: f64) -> SweepSummary {
    const CHUNK: u64 = 1 << 15;
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<(u64, u64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut out = (0u64, 0u64, 0.0f64);
            for i in c * CHUNK + 1..=((c + 1) * CHUNK).min(n) {
                let a = a_max * (1.0 - radical_inverse(i, 2));
                let z = z_max * (1.0 - radical_inverse(i, 3));
                let ratio = psi_bound_lhs(a, z) / psi_bound_rhs(a);
                if !psi_bound_check(a, z) {
                    out.0 += 1;
                }
                if !psi_rearrangement_check(z) {
                    out.1 += 1;
                }
                out.2 = out.2.max(ratio);
            }
            out
        })
        .collect();
    let mut s = SweepSummary {
        points: n,
        lemma_violations: 0,
        rearrangement_violations: 0,
        max_lemma_ratio: 0.0,
        a_max,
        z_max,
    };
    for (l, r, m) in parts {
        s.lemma_violations += l;
        s.rearrangement_violations += r;
        s.max_lemma_ratio = s.max_lemma_ratio.max(m);
    }
    s
}
