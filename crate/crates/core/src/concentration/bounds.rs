use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// 99% two-sided standard normal quantile.
pub const Z99: f64 = 2.5758293035489004;

/// Where `E F` in the bound constants came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MeanSource {
    /// Replication mean of the same run, with its standard error.
    PlugIn {
        std_error: f64,
    },
    Theory,
}

/// Constants of the concentration bounds; `a = k(c_S² σ + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub k: usize,
    pub c_s: usize,
    pub sigma: f64,
    pub a: f64,
    pub mean_f: f64,
    pub mean_source: MeanSource,
}

impl BoundParams {
    pub fn new(k: usize, c_s: usize, sigma: f64, mean_f: f64, mean_source: MeanSource) -> Result<Self> {
        if k == 0 || c_s == 0 {
            return Err(invalid("k and c_S must be positive"));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(invalid(format!("sigma must be finite and nonnegative, got {sigma}")));
        }
        if !(mean_f >= 0.0) || !mean_f.is_finite() {
            return Err(invalid(format!("mean of F must be finite and nonnegative, got {mean_f}")));
        }
        let c = c_s as f64;
        let a = k as f64 * (c * c * sigma + 1.0);
        Ok(BoundParams { k, c_s, sigma, a, mean_f, mean_source })
    }

    /// `max(a, 4c_S/3)`.
    pub fn lower_constant(&self) -> f64 {
        self.a.max(4.0 * self.c_s as f64 / 3.0)
    }

    /// `2v₂ + 4v₁ + 8w²` with `v₁ = 2a E F`, `w = a`, `v₂ = max(a, 4c_S/3) E F`.
    pub fn variance_bound(&self) -> f64 {
        let v1 = 2.0 * self.a * self.mean_f;
        let v2 = self.lower_constant() * self.mean_f;
        2.0 * v2 + 4.0 * v1 + 8.0 * self.a * self.a
    }
}

/// `P(F ≥ E F + r) ≤ exp(−r² / (a(2 E F + r)))`.
pub fn upper_tail_bound(r: f64, p: &BoundParams) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    (-(r * r) / (p.a * (2.0 * p.mean_f + r))).exp()
}

/// `P(F ≤ E F − r) ≤ exp(−r² / (2 max(a, 4c_S/3) E F))`; `0` when `E F = 0`.
pub fn lower_tail_bound(r: f64, p: &BoundParams) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    if p.mean_f == 0.0 {
        return 0.0;
    }
    (-(r * r) / (2.0 * p.lower_constant() * p.mean_f)).exp()
}

/// Wilson score interval for `successes / n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}
