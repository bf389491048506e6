use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{lower_tail_bound, upper_tail_bound, wilson_interval, BoundParams, MeanSource, Z99};
use crate::components::{count_f_mode, CensusMode, Selector};
use crate::error::{invalid, Error, Result};
use crate::geometry::{packing_constant, Shape};
use crate::intensity::{sigma_s, IntensityModel, Window};
use crate::scalar::Real;
use crate::simulate::replicate_graphs;

pub const MIN_TAIL_REPLICATIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TailOptions {
    pub mode: CensusMode,
    /// Used when `c_S` has no certified value.
    pub c_s_override: Option<usize>,
    /// Theoretical `E F`; the replication mean is used otherwise.
    pub theoretical_mean: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub r: f64,
    pub upper_bound: f64,
    pub upper_emp: f64,
    pub upper_lo: f64,
    pub upper_hi: f64,
    pub lower_bound: f64,
    pub lower_emp: f64,
    pub lower_lo: f64,
    pub lower_hi: f64,
}

impl TailRow {
    /// `bound ≥ empirical − half-width` for the upper tail.
    pub fn upper_dominates(&self) -> bool {
        self.upper_bound >= self.upper_emp - 0.5 * (self.upper_hi - self.upper_lo)
    }

    pub fn lower_dominates(&self) -> bool {
        self.lower_bound >= self.lower_emp - 0.5 * (self.lower_hi - self.lower_lo)
    }

    /// Empirical frequency above the bound by more than five half-widths.
    fn hard_failure(&self) -> bool {
        let up = 0.5 * (self.upper_hi - self.upper_lo);
        let lo = 0.5 * (self.lower_hi - self.lower_lo);
        self.upper_emp - self.upper_bound > 5.0 * up || self.lower_emp - self.lower_bound > 5.0 * lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub rows: Vec<TailRow>,
    pub n_replications: usize,
    pub master_seed: u64,
    pub params: BoundParams,
    pub c_s_certified: bool,
    pub sample_mean: f64,
    pub sample_variance: f64,
    pub variance_bound: f64,
    pub counts: Vec<u64>,
}

impl TailReport {
    pub const CSV_HEADER: &'static str =
        "r,upper_bound,upper_emp,upper_lo,upper_hi,lower_bound,lower_emp,lower_lo,lower_hi";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                r.r,
                r.upper_bound,
                r.upper_emp,
                r.upper_lo,
                r.upper_hi,
                r.lower_bound,
                r.lower_emp,
                r.lower_lo,
                r.lower_hi
            );
        }
        s
    }

    pub fn all_dominated(&self) -> bool {
        self.rows.iter().all(|r| r.upper_dominates() && r.lower_dominates())
    }

    pub fn variance_ok(&self) -> bool {
        self.sample_variance <= self.variance_bound
    }
}

/// `c_S` for bound constants and whether it is certified.
pub fn resolve_c_s<T: Real>(shape: &Shape<T>, override_value: Option<usize>) -> Result<(usize, bool)> {
    let p = packing_constant(shape);
    p.resolve(override_value).map(|(v, flagged)| (v, !flagged)).ok_or_else(|| {
        Error::PackingUnknown(format!(
            "c_S not certified for {:?} in dimension {} (search lower bound {}); supply an override",
            shape.norm, shape.dim, p.lower_bound
        ))
    })
}

/// Tail frequencies of `F` from independent replications, set against the
/// concentration bounds.
#[allow(clippy::too_many_arguments)]
pub fn empirical_tails<T: Real>(
    model: &IntensityModel<T>,
    window: &Window<T>,
    shape: &Shape<T>,
    selector: &Selector,
    r_grid: &[f64],
    n_replications: usize,
    master_seed: u64,
    opts: &TailOptions,
) -> Result<TailReport> {
    if n_replications < MIN_TAIL_REPLICATIONS {
        return Err(invalid(format!("need at least {MIN_TAIL_REPLICATIONS} replications, got {n_replications}")));
    }
    if let Some(r) = r_grid.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
        return Err(invalid(format!("r grid entries must be finite and nonnegative, got {r}")));
    }
    let (c_s, certified) = resolve_c_s(shape, opts.c_s_override)?;
    let sigma = sigma_s(model, shape)?.value.as_f64();
    let counts = replicate_graphs(model, window, shape, n_replications, master_seed, |g| {
        Ok(count_f_mode(g, selector, opts.mode))
    })?;
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let (mean_f, source) = match opts.theoretical_mean {
        Some(m) => (m, MeanSource::Theory),
        None => (mean, MeanSource::PlugIn { std_error: (var / n).sqrt() }),
    };
    let params = BoundParams::new(selector.k(), c_s, sigma, mean_f, source)?;
    let rows: Vec<TailRow> = r_grid
        .iter()
        .map(|&r| {
            let up = counts.iter().filter(|&&c| c as f64 >= mean_f + r).count() as u64;
            let dn = counts.iter().filter(|&&c| c as f64 <= mean_f - r).count() as u64;
            let (ulo, uhi) = wilson_interval(up, n_replications as u64, Z99);
            let (llo, lhi) = wilson_interval(dn, n_replications as u64, Z99);
            TailRow {
                r,
                upper_bound: upper_tail_bound(r, &params),
                upper_emp: up as f64 / n,
                upper_lo: ulo,
                upper_hi: uhi,
                lower_bound: lower_tail_bound(r, &params),
                lower_emp: dn as f64 / n,
                lower_lo: llo,
                lower_hi: lhi,
            }
        })
        .collect();
    let report = TailReport {
        rows,
        n_replications,
        master_seed,
        params,
        c_s_certified: certified,
        sample_mean: mean,
        sample_variance: var,
        variance_bound: params.variance_bound(),
        counts,
    };
    if let Some(bad) = report.rows.iter().find(|r| r.hard_failure()) {
        return Err(Error::HardFailure(format!(
            "empirical tail exceeds bound by more than 5 half-widths: {bad:?}; params {params:?}; seed {master_seed}"
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_grid_point() {
        let w = Window::torus(2, 5.0).unwrap();
        let m = IntensityModel::homogeneous(1.0);
        let s = Shape::euclidean(0.5, 2).unwrap();
        let rep =
            empirical_tails(&m, &w, &s, &Selector::ExactlyK(1), &[0.0], 1000, 9, &TailOptions::default()).unwrap();
        let row = rep.rows[0];
        assert_eq!(row.upper_bound, 1.0);
        assert_eq!(row.lower_bound, 1.0);
        assert!(row.upper_emp <= 1.0 && row.lower_emp <= 1.0);
        assert!(rep.to_csv().starts_with(TailReport::CSV_HEADER));
        assert!(rep.c_s_certified);
    }

    #[test]
    fn rejects_small_runs() {
        let w = Window::torus(2, 5.0).unwrap();
        let m = IntensityModel::homogeneous(1.0);
        let s = Shape::euclidean(0.5, 2).unwrap();
        assert!(empirical_tails(&m, &w, &s, &Selector::ExactlyK(1), &[0.0], 10, 9, &TailOptions::default()).is_err());
        let s3 = Shape::euclidean(0.5, 3).unwrap();
        assert!(matches!(resolve_c_s(&s3, None), Err(Error::PackingUnknown(_))));
        assert!(!resolve_c_s(&s3, Some(12)).unwrap().1);
    }
}
