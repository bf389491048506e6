//! Experiment config file: a JSON tree mirroring the library types, and
//! its validation into those types.

use std::fmt;

use geomconc::asymptotics::{
    ConstantKind, ConstantOptions, RegimeOptions, RegimeSpec, RhoRule, VolumeMethod, X1Method,
};
use geomconc::components::{CensusMode, Selector, SmallGraph, MAX_K};
use geomconc::geometry::{Norm, Shape, MAX_DIM};
use geomconc::intensity::{IntensityModel, Window, WindowKind};
use serde::{Deserialize, Serialize};

/// Validation failure located by a dotted path into the config tree.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

type VResult<T> = Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selector: Option<SelectorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<CensusMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_replications: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_s_override: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theoretical_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_points: Option<usize>,
    /// Largest component size broken down by isomorphism class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub census_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<ConstantConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_rule: Option<RhoRuleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Homogeneous {
        rate: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    RadialPower {
        alpha: f64,
        gamma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Extent {
    Uniform(f64),
    PerAxis(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub kind: WindowKind,
    pub dim: usize,
    /// Radius for balls.
    pub half_extent: Extent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeConfig {
    pub norm: Norm,
    pub rho: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SelectorConfig {
    AtMostK {
        k: usize,
    },
    ExactlyK {
        k: usize,
    },
    Empty {
        k: usize,
    },
    /// `h` is the row-major upper triangle of the adjacency matrix as a
    /// `0`/`1` string.
    IsoToH {
        h: String,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ConstantKind>,
    /// Thermodynamic `tρ^d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<X1Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<VolumeMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume_rel_se: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus_volume: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoRuleConfig {
    pub coef: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_half_extent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus_half_extent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_override: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_cap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
}

pub const DEFAULT_SWEEP_POINTS: u64 = 1_000_000;
pub const DEFAULT_A_MAX: f64 = 10.0;
pub const DEFAULT_Z_MAX: f64 = 50.0;
pub const DEFAULT_MC_POINTS: usize = 4096;
pub const DEFAULT_CENSUS_DEPTH: usize = 4;

/// Parses a config, reporting the path of the first offending field.
pub fn parse(text: &str) -> VResult<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "<root>".to_string() } else { path };
        ConfigError::new(path, e.into_inner().to_string())
    })
}

/// Compact canonical JSON of a config.
pub fn to_canonical_json(cfg: &ExperimentConfig) -> String {
    serde_json::to_string(cfg).expect("config serializes")
}

fn required<'a, T>(v: &'a Option<T>, path: &str) -> VResult<&'a T> {
    v.as_ref().ok_or_else(|| ConfigError::new(path, "required for this subcommand"))
}

fn positive(v: f64, path: &str) -> VResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(path, format!("must be positive and finite, got {v}")))
    }
}

fn nonnegative(v: f64, path: &str) -> VResult<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(path, format!("must be nonnegative and finite, got {v}")))
    }
}

fn dimension(d: usize, path: &str) -> VResult<usize> {
    if (1..=MAX_DIM).contains(&d) {
        Ok(d)
    } else {
        Err(ConfigError::new(path, format!("must lie in 1..={MAX_DIM}, got {d}")))
    }
}

fn lib<T>(r: geomconc::Result<T>, path: &str) -> VResult<T> {
    r.map_err(|e| ConfigError::new(path, e.to_string()))
}

impl ExperimentConfig {
    pub fn master_seed(&self) -> VResult<u64> {
        self.master_seed.ok_or_else(|| ConfigError::new("master_seed", "required; pass --seed or set it in the config"))
    }

    pub fn model(&self) -> VResult<IntensityModel<f64>> {
        let m = required(&self.model, "model")?;
        let (model, scale) = match m {
            ModelConfig::Homogeneous { rate, scale } => {
                nonnegative(*rate, "model.rate")?;
                (IntensityModel::homogeneous(*rate), scale)
            }
            ModelConfig::RadialPower { alpha, gamma, scale } => {
                positive(*alpha, "model.alpha")?;
                positive(*gamma, "model.gamma")?;
                (IntensityModel::radial_power(*alpha, *gamma), scale)
            }
        };
        let model = match scale {
            Some(s) => model.with_scale(positive(*s, "model.scale")?),
            None => model,
        };
        lib(model.validate(), "model")?;
        Ok(model)
    }

    pub fn window(&self) -> VResult<Window<f64>> {
        let w = required(&self.window, "window")?;
        let d = dimension(w.dim, "window.dim")?;
        let half = match &w.half_extent {
            Extent::Uniform(h) => {
                positive(*h, "window.half_extent")?;
                if w.kind == WindowKind::Ball {
                    vec![*h]
                } else {
                    vec![*h; d]
                }
            }
            Extent::PerAxis(v) => {
                let want = if w.kind == WindowKind::Ball { 1 } else { d };
                if v.len() != want {
                    return Err(ConfigError::new(
                        "window.half_extent",
                        format!("expected {want} entries, got {}", v.len()),
                    ));
                }
                for (i, h) in v.iter().enumerate() {
                    positive(*h, &format!("window.half_extent[{i}]"))?;
                }
                v.clone()
            }
        };
        let center = match &w.center {
            Some(c) => {
                if c.len() != d {
                    return Err(ConfigError::new("window.center", format!("expected {d} entries, got {}", c.len())));
                }
                if let Some(i) = c.iter().position(|x| !x.is_finite()) {
                    return Err(ConfigError::new(format!("window.center[{i}]"), "must be finite"));
                }
                c.clone()
            }
            None => vec![0.0; d],
        };
        lib(Window::new(w.kind, center, half), "window")
    }

    /// Model and window, checked against each other.
    pub fn model_on_window(&self) -> VResult<(IntensityModel<f64>, Window<f64>)> {
        let model = self.model()?;
        let window = self.window()?;
        lib(model.check_window(&window), "window.kind")?;
        Ok((model, window))
    }

    pub fn shape(&self) -> VResult<Shape<f64>> {
        let s = required(&self.shape, "shape")?;
        let d = dimension(s.dim, "shape.dim")?;
        positive(s.rho, "shape.rho")?;
        if let Some(w) = &self.window {
            if w.dim != d {
                return Err(ConfigError::new("shape.dim", format!("window has dimension {}, shape has {d}", w.dim)));
            }
        }
        lib(Shape::new(s.norm, s.rho, d), "shape")
    }

    pub fn selector(&self) -> VResult<Selector> {
        let s = required(&self.selector, "selector")?;
        let check = |k: usize| {
            if (1..=MAX_K).contains(&k) {
                Ok(k)
            } else {
                Err(ConfigError::new("selector.k", format!("must lie in 1..={MAX_K}, got {k}")))
            }
        };
        match s {
            SelectorConfig::AtMostK { k } => lib(Selector::at_most(check(*k)?), "selector"),
            SelectorConfig::ExactlyK { k } => lib(Selector::exactly(check(*k)?), "selector"),
            SelectorConfig::Empty { k } => lib(Selector::empty(check(*k)?), "selector"),
            SelectorConfig::IsoToH { h } => {
                let g = lib(SmallGraph::from_upper_bits(h), "selector.h")?;
                lib(Selector::iso_to(g), "selector.h")
            }
        }
    }

    pub fn boundary(&self) -> CensusMode {
        self.boundary.unwrap_or_default()
    }

    pub fn n_replications(&self, min: usize) -> VResult<usize> {
        let n = *required(&self.n_replications, "n_replications")?;
        if n < min {
            return Err(ConfigError::new("n_replications", format!("must be at least {min}, got {n}")));
        }
        Ok(n)
    }

    pub fn r_grid(&self) -> VResult<Vec<f64>> {
        let g = required(&self.r_grid, "r_grid")?;
        if g.is_empty() {
            return Err(ConfigError::new("r_grid", "must not be empty"));
        }
        for (i, r) in g.iter().enumerate() {
            nonnegative(*r, &format!("r_grid[{i}]"))?;
        }
        Ok(g.clone())
    }

    pub fn theoretical_mean(&self) -> VResult<Option<f64>> {
        self.theoretical_mean.map(|m| nonnegative(m, "theoretical_mean")).transpose()
    }

    pub fn constant_options(&self) -> VResult<ConstantOptions> {
        let mut o = ConstantOptions::default();
        let Some(c) = &self.constant else { return Ok(o) };
        if let Some(n) = c.samples {
            if n == 0 {
                return Err(ConfigError::new("constant.samples", "must be positive"));
            }
            o.samples = n;
        }
        if let Some(s) = c.seed {
            o.seed = s;
        }
        if let Some(x) = c.x1 {
            o.x1 = x;
        }
        if let Some(v) = c.volume {
            o.volume = v;
        }
        if let Some(r) = c.volume_rel_se {
            o.volume_rel_se = positive(r, "constant.volume_rel_se")?;
        }
        if let Some(v) = c.torus_volume {
            o.torus_volume = Some(positive(v, "constant.torus_volume")?);
        }
        Ok(o)
    }

    /// Kind and, for the thermodynamic limit, `c`.
    pub fn constant_kind(&self) -> VResult<(ConstantKind, Option<f64>)> {
        let c = required(&self.constant, "constant")?;
        let kind = *required(&c.kind, "constant.kind")?;
        match kind {
            ConstantKind::Thermodynamic => {
                let v = *required(&c.c, "constant.c")?;
                Ok((kind, Some(positive(v, "constant.c")?)))
            }
            _ => Ok((kind, None)),
        }
    }

    pub fn regime_spec(&self) -> VResult<RegimeSpec> {
        let grid = required(&self.t_grid, "t_grid")?;
        for (i, t) in grid.iter().enumerate() {
            positive(*t, &format!("t_grid[{i}]"))?;
        }
        let rule = required(&self.rho_rule, "rho_rule")?;
        positive(rule.coef, "rho_rule.coef")?;
        if !rule.exponent.is_finite() {
            return Err(ConfigError::new("rho_rule.exponent", "must be finite"));
        }
        let dim = self.shape()?.dim;
        lib(RegimeSpec::new(grid.clone(), RhoRule::power(rule.coef, rule.exponent), dim), "t_grid")
    }

    pub fn regime_options(&self) -> VResult<RegimeOptions> {
        let mut o = RegimeOptions { constants: self.constant_options()?, ..RegimeOptions::default() };
        let Some(r) = &self.regime else { return Ok(o) };
        if let Some(v) = r.tail_fraction {
            positive(v, "regime.tail_fraction")?;
            if v >= 1.0 {
                return Err(ConfigError::new("regime.tail_fraction", format!("must be below 1, got {v}")));
            }
            o.tail_fraction = v;
        }
        if let Some(v) = r.min_half_extent {
            o.min_half_extent = positive(v, "regime.min_half_extent")?;
        }
        if let Some(v) = r.torus_half_extent {
            o.torus_half_extent = positive(v, "regime.torus_half_extent")?;
        }
        if let Some(v) = r.constant_override {
            if !v.is_finite() {
                return Err(ConfigError::new("regime.constant_override", "must be finite"));
            }
            o.constant_override = Some(v);
        }
        if let Some(v) = r.u_cap {
            if v == 0 {
                return Err(ConfigError::new("regime.u_cap", "must be positive"));
            }
            o.u_cap = v;
        }
        Ok(o)
    }

    pub fn mc_points(&self) -> VResult<usize> {
        let n = self.mc_points.unwrap_or(DEFAULT_MC_POINTS);
        if n < geomconc::concentration::MIN_CONDITION_POINTS {
            return Err(ConfigError::new(
                "mc_points",
                format!("must be at least {}, got {n}", geomconc::concentration::MIN_CONDITION_POINTS),
            ));
        }
        Ok(n)
    }

    pub fn census_depth(&self) -> VResult<usize> {
        let d = self.census_depth.unwrap_or(DEFAULT_CENSUS_DEPTH);
        if d > MAX_K {
            return Err(ConfigError::new("census_depth", format!("must be at most {MAX_K}, got {d}")));
        }
        Ok(d)
    }

    pub fn sweep(&self) -> VResult<(u64, f64, f64)> {
        let s = self.sweep.clone().unwrap_or_default();
        let n = s.points.unwrap_or(DEFAULT_SWEEP_POINTS);
        if n == 0 {
            return Err(ConfigError::new("sweep.points", "must be positive"));
        }
        let a = positive(s.a_max.unwrap_or(DEFAULT_A_MAX), "sweep.a_max")?;
        let z = positive(s.z_max.unwrap_or(DEFAULT_Z_MAX), "sweep.z_max")?;
        Ok((n, a, z))
    }
}
