use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::constants::{dense_constant, sparse_constant, thermo_constant, AsymptoticsReport, ConstantOptions};
use super::integrand::{fixed_k, radial_params};
use crate::components::{count_f_mode, count_u, CensusMode, Selector, DEFAULT_U_CAP};
use crate::error::{invalid, Error, Result};
use crate::geometry::{GeomGraph, Shape};
use crate::intensity::{IntensityModel, ThinningSampler, Window};
use crate::scalar::{factorial, unit_ball_volume, Real};
use crate::seed::{derive_seed, par_replicate, MeanAcc};

/// Relative drift of `tρ^d` over the grid tolerated as constant.
pub const THERMO_DRIFT: f64 = 1e-6;

/// `t ↦ ρ_t`.
#[derive(Clone)]
pub enum RhoRule {
    /// `ρ_t = coef · t^exponent`.
    Power {
        coef: f64,
        exponent: f64,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl RhoRule {
    pub fn power(coef: f64, exponent: f64) -> Self {
        RhoRule::Power { coef, exponent }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            RhoRule::Power { coef, exponent } => coef * t.powf(*exponent),
            RhoRule::Custom(f) => f(t),
        }
    }
}

impl fmt::Debug for RhoRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoRule::Power { coef, exponent } => write!(f, "Power({coef} * t^{exponent})"),
            RhoRule::Custom(_) => f.write_str("Custom"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum Regime {
    Sparse,
    Thermodynamic { c: f64 },
    Dense,
}

#[derive(Debug, Clone)]
pub struct RegimeSpec {
    pub t_grid: Vec<f64>,
    pub rho_rule: RhoRule,
    pub dim: usize,
    regime: Regime,
}

impl RegimeSpec {
    /// Validates the grid and classifies the regime from `tρ_t^d`.
    pub fn new(t_grid: Vec<f64>, rho_rule: RhoRule, dim: usize) -> Result<Self> {
        if t_grid.len() < 2 {
            return Err(invalid("t_grid needs at least two values"));
        }
        if t_grid.iter().any(|t| !(t.is_finite() && *t > 1.0)) {
            return Err(invalid("t_grid values must be finite and > 1"));
        }
        if t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("t_grid must be strictly increasing"));
        }
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let rho: Vec<f64> = t_grid.iter().map(|&t| rho_rule.eval(t)).collect();
        if rho.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(invalid("rho_t must be finite and positive on the grid"));
        }
        let v: Vec<f64> = t_grid.iter().zip(&rho).map(|(t, r)| t * r.powi(dim as i32)).collect();
        let drift = v.iter().map(|x| (x / v[0] - 1.0).abs()).fold(0.0, f64::max);
        let last = v[v.len() - 1];
        let regime = if drift <= THERMO_DRIFT {
            Regime::Thermodynamic { c: last }
        } else if last < v[0] {
            Regime::Sparse
        } else {
            Regime::Dense
        };
        if !matches!(regime, Regime::Dense) && rho[rho.len() - 1] >= rho[0] {
            return Err(invalid("rho_t must decrease along the grid in the sparse and thermodynamic regimes"));
        }
        Ok(RegimeSpec { t_grid, rho_rule, dim, regime })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn rho(&self, t: f64) -> f64 {
        self.rho_rule.eval(t)
    }

    /// `t · ρ_t^d`.
    pub fn occupancy(&self, t: f64) -> f64 {
        t * self.rho(t).powi(self.dim as i32)
    }

    /// Normaliser of `F_t`: `t^k ρ^{d(k−1)}`, `t` or `t(tρ^d)^{d/γ−1}`.
    pub fn scaling(&self, t: f64, k: usize, gamma: Option<f64>) -> f64 {
        let d = self.dim as f64;
        let rho = self.rho(t);
        match self.regime {
            Regime::Sparse => t.powi(k as i32) * rho.powf(d * (k as f64 - 1.0)),
            Regime::Thermodynamic { .. } => t,
            Regime::Dense => t * self.occupancy(t).powf(d / gamma.unwrap_or(f64::NAN) - 1.0),
        }
    }

    /// Growth quantity of the strong law: `t^kρ^{d(k−1)}/log t` or
    /// `t(tρ^d)^{d/γ−2}/log t`.
    pub fn growth(&self, t: f64, k: usize, gamma: Option<f64>) -> f64 {
        let d = self.dim as f64;
        match self.regime {
            Regime::Dense => t * self.occupancy(t).powf(d / gamma.unwrap_or(f64::NAN) - 2.0) / t.ln(),
            _ => t.powi(k as i32) * self.rho(t).powf(d * (k as f64 - 1.0)) / t.ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeOptions {
    /// Share of the predicted mean allowed to fall outside the window.
    pub tail_fraction: f64,
    pub min_half_extent: f64,
    /// Half-extent of the torus used for homogeneous models.
    pub torus_half_extent: f64,
    /// Replaces the computed limit constant.
    pub constant_override: Option<f64>,
    pub constants: ConstantOptions,
    pub u_cap: usize,
}

impl Default for RegimeOptions {
    fn default() -> Self {
        RegimeOptions {
            tail_fraction: 1e-3,
            min_half_extent: 1.0,
            torus_half_extent: 10.0,
            constant_override: None,
            constants: ConstantOptions::default(),
            u_cap: DEFAULT_U_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRow {
    pub t: f64,
    pub rho: f64,
    pub occupancy: f64,
    pub half_extent: f64,
    pub mean_f: f64,
    pub se_f: f64,
    pub scaled: f64,
    pub scaled_se: f64,
    pub constant: f64,
    pub ratio: f64,
    pub mean_u: Option<f64>,
    /// `k! · mean(F) / mean(U)`, with `0/0 = 1`.
    pub fu_ratio: Option<f64>,
    /// `e^{−tρ^d k λ(S) ‖m‖∞}`.
    pub bracket_lo: Option<f64>,
}

impl RegimeRow {
    pub fn in_bracket(&self) -> bool {
        match (self.fu_ratio, self.bracket_lo) {
            (Some(r), Some(lo)) => r >= lo && r <= 1.0,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeTable {
    pub regime: Regime,
    pub constant: AsymptoticsReport,
    pub n_replications: usize,
    pub master_seed: u64,
    pub rows: Vec<RegimeRow>,
}

impl RegimeTable {
    pub const CSV_HEADER: &'static str =
        "t,rho,t_rho_d,half_extent,mean_f,se_f,scaled,scaled_se,constant,ratio,mean_u,fu_ratio,bracket_lo";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for r in &self.rows {
            s.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{}\n",
                r.t,
                r.rho,
                r.occupancy,
                r.half_extent,
                r.mean_f,
                r.se_f,
                r.scaled,
                r.scaled_se,
                r.constant,
                r.ratio,
                opt(r.mean_u),
                opt(r.fu_ratio),
                opt(r.bracket_lo)
            ));
        }
        s
    }

    /// `|scaled / constant − 1|` at the largest `t`.
    pub fn final_gap(&self) -> f64 {
        self.rows.last().map(|r| (r.ratio - 1.0).abs()).unwrap_or(f64::NAN)
    }
}

/// Constant of the classified regime at unit scale.
pub fn regime_constant<T: Real>(
    spec: &RegimeSpec,
    shape: &Shape<T>,
    selector: &Selector,
    model: &IntensityModel<T>,
    opts: &RegimeOptions,
) -> Result<AsymptoticsReport> {
    if shape.dim != spec.dim {
        return Err(invalid("shape dimension differs from the regime dimension"));
    }
    let mut copts = opts.constants;
    if model.is_homogeneous() {
        copts.torus_volume = Some((2.0 * opts.torus_half_extent).powi(spec.dim as i32));
    }
    let mut report = match spec.regime {
        Regime::Sparse => sparse_constant(shape, selector, model, &copts)?,
        Regime::Thermodynamic { c } => thermo_constant(shape, selector, model, c, &copts)?,
        Regime::Dense => dense_constant(shape, selector, model, &copts)?,
    };
    if let Some(v) = opts.constant_override {
        report.value = v;
        report.std_error = 0.0;
    }
    Ok(report)
}

/// Window at scale `t`: a torus for homogeneous models, otherwise a cube
/// whose eroded core leaves at most `tail_fraction · predicted` of the mean
/// outside.
fn window_at<T: Real>(
    model: &IntensityModel<T>,
    shape_t: &Shape<T>,
    k: usize,
    t: f64,
    predicted: f64,
    opts: &RegimeOptions,
) -> Result<Window<T>> {
    let d = shape_t.dim;
    if model.is_homogeneous() {
        return Window::torus(d, T::lit(opts.torus_half_extent));
    }
    let reach = shape_t.circumradius().as_f64();
    let core = if predicted > 0.0 {
        let b = unit_ball_volume::<f64>(d) * ((k as f64 - 1.0) * reach).powi(d as i32);
        let pre = k as f64 / factorial(k) as f64 * b.powi(k as i32 - 1) * t.powi(k as i32);
        let target = opts.tail_fraction * predicted;
        let excess = |r: f64| -> Result<bool> { Ok(pre * model.power_tail(k as u32, d, T::lit(r))?.as_f64() > target) };
        let mut hi = 1.0;
        while excess(hi)? {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::NotIntegrable("window radius does not converge".into()));
            }
        }
        let mut lo = 0.0;
        while hi - lo > 1e-3 * hi {
            let mid = 0.5 * (lo + hi);
            if excess(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    } else {
        model.truncation_radius(k as u32, d, opts.tail_fraction)?.as_f64()
    };
    let half = (core + k as f64 * reach).max(opts.min_half_extent);
    Window::cube(d, T::lit(half))
}

fn gamma_of<T: Real>(spec: &RegimeSpec, model: &IntensityModel<T>) -> Result<Option<f64>> {
    match (spec.regime, radial_params(model)) {
        (Regime::Dense, None) => {
            Err(Error::HypothesisViolation("the dense regime is defined for radial power densities only".into()))
        }
        (_, p) => Ok(p.map(|(_, g)| g)),
    }
}

/// Simulated `𝔼F_t` per grid point against the regime's limit constant;
/// the sparse regime also reports `𝔼U_t` and the bracket
/// `e^{−tρ^d k λ(S) ‖m‖∞} ≤ k!𝔼F/𝔼U ≤ 1`.
pub fn regime_experiment<T: Real>(
    spec: &RegimeSpec,
    shape: &Shape<T>,
    selector: &Selector,
    model: &IntensityModel<T>,
    n_replications: usize,
    master_seed: u64,
    opts: &RegimeOptions,
) -> Result<RegimeTable> {
    if n_replications == 0 {
        return Err(invalid("n_replications must be positive"));
    }
    let k = fixed_k(selector)?;
    let gamma = gamma_of(spec, model)?;
    let constant = regime_constant(spec, shape, selector, model, opts)?;
    let sparse = matches!(spec.regime, Regime::Sparse);
    let kf = factorial(k) as f64;
    let mut rows = Vec::with_capacity(spec.t_grid.len());
    for (i, &t) in spec.t_grid.iter().enumerate() {
        let rho = spec.rho(t);
        let shape_t = shape.scaled(T::lit(rho));
        let model_t = model.clone().with_scale(T::lit(t));
        let scale = spec.scaling(t, k, gamma);
        let window = window_at(model, &shape_t, k, t, constant.value * scale, opts)?;
        let sampler = ThinningSampler::new(&model_t, &window)?;
        let seed = derive_seed(master_seed, i as u64);
        let counts = par_replicate(seed, n_replications, |r, _| -> Result<(f64, f64)> {
            let cfg = sampler.sample_replication(seed, r)?;
            let g = GeomGraph::build(&cfg, &shape_t)?;
            let f = count_f_mode(&g, selector, CensusMode::Eroded) as f64;
            let u = if sparse { count_u(&g, selector, opts.u_cap)? as f64 } else { 0.0 };
            Ok((f, u))
        });
        let mut fa = MeanAcc::default();
        let mut ua = MeanAcc::default();
        for c in counts {
            let (f, u) = c?;
            fa.push(f);
            ua.push(u);
        }
        let scaled = fa.mean() / scale;
        let (mean_u, fu_ratio, bracket_lo) = if sparse {
            let ratio = if ua.mean() == 0.0 && fa.mean() == 0.0 { 1.0 } else { kf * fa.mean() / ua.mean() };
            let lo = (-spec.occupancy(t) * k as f64 * shape.volume().as_f64() * model.sup_density().as_f64()).exp();
            (Some(ua.mean()), Some(ratio), Some(lo))
        } else {
            (None, None, None)
        };
        rows.push(RegimeRow {
            t,
            rho,
            occupancy: spec.occupancy(t),
            half_extent: window.half_extent[0].as_f64(),
            mean_f: fa.mean(),
            se_f: fa.std_error(),
            scaled,
            scaled_se: fa.std_error() / scale,
            constant: constant.value,
            ratio: scaled / constant.value,
            mean_u,
            fu_ratio,
            bracket_lo,
        });
    }
    Ok(RegimeTable { regime: spec.regime, constant, n_replications, master_seed, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongLawRow {
    pub t: f64,
    pub rho: f64,
    pub half_extent: f64,
    pub f: u64,
    pub scaled: f64,
    pub deviation: f64,
    /// `max_{s ≥ t} |scaled_s − constant|` over the grid.
    pub tail_max_deviation: f64,
    pub growth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongLawTable {
    pub regime: Regime,
    pub constant: AsymptoticsReport,
    pub master_seed: u64,
    pub rows: Vec<StrongLawRow>,
    /// Growth quantity increasing along the whole grid.
    pub growth_ok: bool,
    pub bottom_quartile_max: f64,
    pub top_quartile_max: f64,
}

impl StrongLawTable {
    pub const CSV_HEADER: &'static str = "t,rho,half_extent,f,scaled,deviation,tail_max_deviation,growth";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{:e},{:e},{:e},{},{:e},{:e},{:e},{:e}\n",
                r.t, r.rho, r.half_extent, r.f, r.scaled, r.deviation, r.tail_max_deviation, r.growth
            ));
        }
        s
    }

    /// Top-quartile deviation strictly below the bottom-quartile one.
    pub fn trend_ok(&self) -> bool {
        self.top_quartile_max < self.bottom_quartile_max
    }
}

/// One independent realization per grid point, scaled by the regime's
/// normaliser; the quartiles are the first and last `⌈n/4⌉` grid points.
pub fn strong_law_experiment<T: Real>(
    spec: &RegimeSpec,
    shape: &Shape<T>,
    selector: &Selector,
    model: &IntensityModel<T>,
    master_seed: u64,
    opts: &RegimeOptions,
) -> Result<StrongLawTable> {
    let k = fixed_k(selector)?;
    let gamma = gamma_of(spec, model)?;
    let constant = regime_constant(spec, shape, selector, model, opts)?;
    let mut rows: Vec<StrongLawRow> = spec
        .t_grid
        .iter()
        .enumerate()
        .map(|(i, &t)| -> Result<StrongLawRow> {
            let rho = spec.rho(t);
            let shape_t = shape.scaled(T::lit(rho));
            let model_t = model.clone().with_scale(T::lit(t));
            let scale = spec.scaling(t, k, gamma);
            let window = window_at(model, &shape_t, k, t, constant.value * scale, opts)?;
            let sampler = ThinningSampler::new(&model_t, &window)?;
            let cfg = sampler.sample_replication(master_seed, i as u64)?;
            let g = GeomGraph::build(&cfg, &shape_t)?;
            let f = count_f_mode(&g, selector, CensusMode::Eroded);
            let scaled = f as f64 / scale;
            Ok(StrongLawRow {
                t,
                rho,
                half_extent: window.half_extent[0].as_f64(),
                f,
                scaled,
                deviation: (scaled - constant.value).abs(),
                tail_max_deviation: 0.0,
                growth: spec.growth(t, k, gamma),
            })
        })
        .collect::<Result<_>>()?;
    let mut running: f64 = 0.0;
    for r in rows.iter_mut().rev() {
        running = running.max(r.deviation);
        r.tail_max_deviation = running;
    }
    let q = rows.len().div_ceil(4);
    let max_dev = |rs: &[StrongLawRow]| rs.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let growth_ok = rows.windows(2).all(|w| w[1].growth > w[0].growth);
    Ok(StrongLawTable {
        regime: spec.regime,
        constant,
        master_seed,
        bottom_quartile_max: max_dev(&rows[..q]),
        top_quartile_max: max_dev(&rows[rows.len() - q..]),
        rows,
        growth_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let grid: Vec<f64> = (4..=14).map(|e| 2f64.powi(e)).collect();
        let s = RegimeSpec::new(grid.clone(), RhoRule::power(1.0, -0.7), 2).unwrap();
        assert_eq!(s.regime(), Regime::Sparse);
        let th = RegimeSpec::new(grid.clone(), RhoRule::power(1.0, -0.5), 2).unwrap();
        assert!(matches!(th.regime(), Regime::Thermodynamic { c } if (c - 1.0).abs() < 1e-12));
        let de = RegimeSpec::new(grid.clone(), RhoRule::power(1.0, -0.25), 2).unwrap();
        assert_eq!(de.regime(), Regime::Dense);
        // t(tρ²)^{-1}/log t = t^{1/2}/log t for γ = 2
        let g = de.growth(4096.0, 1, Some(2.0));
        assert!((g - 64.0 / 4096f64.ln()).abs() < 1e-9);
        assert!(RegimeSpec::new(vec![4.0, 2.0], RhoRule::power(1.0, -0.5), 2).is_err());
        assert!(RegimeSpec::new(grid, RhoRule::power(1.0, 0.5), 2).is_ok());
    }

    #[test]
    fn empty_selector_scales_to_zero() {
        let grid = vec![16.0, 64.0, 256.0];
        let spec = RegimeSpec::new(grid, RhoRule::power(1.0, -0.7), 2).unwrap();
        let m = IntensityModel::radial_power(1.0, 3.0);
        let s = Shape::euclidean(1.0, 2).unwrap();
        let law = strong_law_experiment(&spec, &s, &Selector::Empty(2), &m, 3, &RegimeOptions::default()).unwrap();
        assert_eq!(law.constant.value, 0.0);
        assert!(law.rows.iter().all(|r| r.scaled == 0.0 && r.deviation == 0.0));
    }

    #[test]
    fn dense_needs_radial_power() {
        let grid = vec![16.0, 64.0];
        let spec = RegimeSpec::new(grid, RhoRule::power(1.0, -0.25), 2).unwrap();
        let s = Shape::euclidean(1.0, 2).unwrap();
        let m = IntensityModel::homogeneous(1.0);
        let r = regime_experiment(&spec, &s, &Selector::ExactlyK(1), &m, 2, 0, &RegimeOptions::default());
        assert!(matches!(r, Err(Error::HypothesisViolation(_))));
    }
}
