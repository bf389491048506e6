use rand::Rng;
use serde::{Deserialize, Serialize};

use super::integrand::{
    draw_offsets, fixed_k, indicator, radial_params, support_volume, union_lebesgue, Chebyshev, PowerRadialSampler,
    VolumeMethod,
};
use crate::components::Selector;
use crate::error::{Error, Result};
use crate::geometry::{sample_in_ball, Shape};
use crate::intensity::{Density, IntensityModel};
use crate::quad;
use crate::scalar::{factorial, unit_ball_volume, unit_sphere_area, Real};
use crate::seed::{par_chunks, MeanAcc, DEFAULT_CHUNK};

const QUAD_TOL: f64 = 1e-12;
const CHEB_NODES: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantKind {
    Sparse,
    Thermodynamic,
    Dense,
}

/// Treatment of the `x₁` integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum X1Method {
    /// Deterministic quadrature in `x₁`; Monte Carlo only over `x₂, …, x_k`.
    #[default]
    Quadrature,
    /// `x₁` sampled by radial importance sampling as well.
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantOptions {
    pub samples: usize,
    pub seed: u64,
    pub volume: VolumeMethod,
    pub volume_rel_se: f64,
    pub x1: X1Method,
    /// Volume of the torus that replaces `ℝ^d` for homogeneous models.
    pub torus_volume: Option<f64>,
}

impl Default for ConstantOptions {
    fn default() -> Self {
        ConstantOptions {
            samples: 1 << 18,
            seed: 0,
            volume: VolumeMethod::Exact,
            volume_rel_se: 1e-3,
            x1: X1Method::Quadrature,
            torus_volume: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub constant: ConstantKind,
    pub value: f64,
    pub std_error: f64,
    pub integrand_evals: u64,
    pub x1_method: X1Method,
    pub volume_method: VolumeMethod,
}

/// Monte Carlo over the offsets `x₂, …, x_k` drawn from the support ball:
/// returns the mean and standard error of `B^{k−1} · I(y) · g(λ(U(y)), rng)`.
/// Without a `g` the union volume is never evaluated.
/// Weight of one sample as a function of the union volume.
type UnionWeight<'a> = dyn Fn(f64, &mut crate::seed::SimRng) -> f64 + Sync + 'a;

fn offsets_mc<T: Real>(
    shape: &Shape<T>,
    selector: &Selector,
    k: usize,
    opts: &ConstantOptions,
    g: Option<&UnionWeight<'_>>,
) -> Result<(f64, f64, u64)> {
    let d = shape.dim;
    let ball = support_volume(shape, k).powi(k as i32 - 1);
    let parts = par_chunks(opts.seed, opts.samples, DEFAULT_CHUNK, |len, rng| -> Result<MeanAcc> {
        let mut acc = MeanAcc::default();
        let mut y = vec![T::zero(); (k - 1) * d];
        for _ in 0..len {
            draw_offsets(rng, shape, k, &mut y);
            if !indicator(shape, selector, &y) {
                acc.push(0.0);
                continue;
            }
            let Some(g) = g else {
                acc.push(ball);
                continue;
            };
            let offs: Vec<&[T]> = y.chunks_exact(d).collect();
            let vseed = rng.random::<u64>();
            let l = union_lebesgue(shape, &offs, opts.volume, opts.volume_rel_se, vseed)?;
            acc.push(ball * g(l, rng));
        }
        Ok(acc)
    });
    let parts: Vec<MeanAcc> = parts.into_iter().collect::<Result<_>>()?;
    let acc = MeanAcc::combine(&parts);
    Ok((acc.mean(), acc.std_error(), acc.n))
}

/// `∫ m^k`, with a torus volume standing in for `ℝ^d` under homogeneous models.
fn mk_integral<T: Real>(model: &IntensityModel<T>, k: usize, d: usize, torus: Option<f64>) -> Result<f64> {
    match (&model.density, torus) {
        (Density::Homogeneous { rate }, Some(v)) => Ok(v * rate.as_f64().powi(k as i32)),
        _ => Ok(model.power_integral(k as u32, d)?.as_f64()),
    }
}

/// `𝔰 = (1/k!) ∫ m^k dx · ∫ I(x) dx`.
pub fn sparse_constant<T: Real>(
    shape: &Shape<T>,
    selector: &Selector,
    model: &IntensityModel<T>,
    opts: &ConstantOptions,
) -> Result<AsymptoticsReport> {
    shape.validate()?;
    model.validate()?;
    let k = fixed_k(selector)?;
    let d = shape.dim;
    let mk = mk_integral(model, k, d, opts.torus_volume)?;
    let kf = factorial(k) as f64;
    let (inner, se, evals) = match k {
        1 => (selector.selects(1, |_, _| false) as u8 as f64, 0.0, 0),
        // a pair is connected iff x₂ ∈ S
        2 => {
            let v = if selector.selects(2, |_, _| true) { shape.volume().as_f64() } else { 0.0 };
            (v, 0.0, 0)
        }
        _ => offsets_mc(shape, selector, k, opts, None)?,
    };
    Ok(AsymptoticsReport {
        constant: ConstantKind::Sparse,
        value: mk * inner / kf,
        std_error: mk * se / kf,
        integrand_evals: evals,
        x1_method: X1Method::Quadrature,
        volume_method: opts.volume,
    })
}

/// `G(L) = ∫ m(x)^k e^{−c L m(x)} dx` by quadrature.
fn thermo_x1_quadrature<T: Real>(
    model: &IntensityModel<T>,
    k: usize,
    d: usize,
    c: f64,
    torus: Option<f64>,
) -> Result<Box<dyn Fn(f64) -> f64 + Sync>> {
    match (&model.density, torus) {
        (Density::Homogeneous { rate }, Some(v)) => {
            let r = rate.as_f64();
            Ok(Box::new(move |l| v * r.powi(k as i32) * (-c * l * r).exp()))
        }
        (Density::RadialPower { alpha, gamma }, _) => {
            let (a, g) = (alpha.as_f64(), gamma.as_f64());
            if g * k as f64 <= d as f64 {
                return Err(Error::NotIntegrable(format!("gamma*k = {} <= d = {d}", g * k as f64)));
            }
            Ok(Box::new(move |l| {
                quad::radial(
                    |r| {
                        let m = a * (r + 1.0).powf(-g);
                        m.powi(k as i32) * (-c * l * m).exp()
                    },
                    d,
                    &[1.0],
                    QUAD_TOL,
                )
            }))
        }
        _ => Err(Error::HypothesisViolation(
            "quadrature in x1 needs a radial power model or a homogeneous model on a torus".into(),
        )),
    }
}

/// `𝔱 = c^{k−1}/k! ∫ I(x) m(x₁)^k e^{−c λ(S ∪ (S+x₂) ∪ …) m(x₁)} dx`.
pub fn thermo_constant<T: Real>(
    shape: &Shape<T>,
    selector: &Selector,
    model: &IntensityModel<T>,
    c: f64,
    opts: &ConstantOptions,
) -> Result<AsymptoticsReport> {
    shape.validate()?;
    model.validate()?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("thermodynamic constant c must be positive, got {c}")));
    }
    let k = fixed_k(selector)?;
    let d = shape.dim;
    let kf = factorial(k) as f64;
    let pre = c.powi(k as i32 - 1) / kf;
    let vol = shape.volume().as_f64();
    let (value, se, evals) = match opts.x1 {
        X1Method::Quadrature => {
            let g = thermo_x1_quadrature(model, k, d, c, opts.torus_volume)?;
            if k == 1 {
                (selector.selects(1, |_, _| false) as u8 as f64 * g(vol), 0.0, 0)
            } else {
                let cheb = Chebyshev::fit(&g, vol, k as f64 * vol, CHEB_NODES);
                let (m, s, n) = offsets_mc(shape, selector, k, opts, Some(&|l, _| cheb.eval(l)))?;
                (pre * m, pre * s, n)
            }
        }
        X1Method::MonteCarlo => {
            let x1 = X1Sampler::new(model, k, d, opts.torus_volume)?;
            let f = |l: f64, rng: &mut crate::seed::SimRng| {
                let (w, m) = x1.draw(rng);
                w * (-c * l * m).exp()
            };
            if k == 1 {
                let one = selector.selects(1, |_, _| false) as u8 as f64;
                let parts = par_chunks(opts.seed, opts.samples, DEFAULT_CHUNK, |len, rng| {
                    let mut acc = MeanAcc::default();
                    for _ in 0..len {
                        acc.push(one * f(vol, rng));
                    }
                    acc
                });
                let acc = MeanAcc::combine(&parts);
                (acc.mean(), acc.std_error(), acc.n)
            } else {
                let (m, s, n) = offsets_mc(shape, selector, k, opts, Some(&f))?;
                (pre * m, pre * s, n)
            }
        }
    };
    Ok(AsymptoticsReport {
        constant: ConstantKind::Thermodynamic,
        value,
        std_error: se,
        integrand_evals: evals,
        x1_method: opts.x1,
        volume_method: opts.volume,
    })
}

/// Draws `x₁` for the Monte Carlo path of the thermodynamic integral.
struct X1Sampler<'a, T> {
    model: &'a IntensityModel<T>,
    kind: X1Kind,
    total: f64,
    d: usize,
    k: i32,
}

enum X1Kind {
    /// `x₁ ∝ m^k`.
    Radial(PowerRadialSampler),
    Constant(f64),
    /// Uniform on the support ball of a custom density.
    Ball(f64),
}

impl<'a, T: Real> X1Sampler<'a, T> {
    fn new(model: &'a IntensityModel<T>, k: usize, d: usize, torus: Option<f64>) -> Result<Self> {
        let kind = match (&model.density, torus) {
            (Density::Homogeneous { rate }, Some(_)) => X1Kind::Constant(rate.as_f64()),
            (Density::RadialPower { gamma, .. }, _) => {
                X1Kind::Radial(PowerRadialSampler::new(gamma.as_f64() * k as f64, d)?)
            }
            (Density::Custom(c), _) if c.support_radius.is_some() => {
                X1Kind::Ball(c.support_radius.map(|r| r.as_f64()).unwrap_or(0.0))
            }
            _ => {
                return Err(Error::HypothesisViolation(
                    "x1 sampling needs a radial power model, a torus, or a custom density with bounded support".into(),
                ))
            }
        };
        let total = match kind {
            X1Kind::Ball(r) => unit_ball_volume::<f64>(d) * r.powi(d as i32),
            _ => mk_integral(model, k, d, torus)?,
        };
        Ok(X1Sampler { model, kind, total, d, k: k as i32 })
    }

    /// `(weight, m(x₁))` with `E[weight · h(m(x₁))] = ∫ m^k h(m)`.
    fn draw(&self, rng: &mut crate::seed::SimRng) -> (f64, f64) {
        let mut x = vec![0.0f64; self.d];
        match &self.kind {
            X1Kind::Constant(r) => (self.total, *r),
            X1Kind::Radial(s) => {
                s.sample(rng, &mut x);
                (self.total, self.density(&x))
            }
            X1Kind::Ball(r) => {
                sample_in_ball::<f64, _>(rng, *r, &mut x);
                let m = self.density(&x);
                (self.total * m.powi(self.k), m)
            }
        }
    }

    fn density(&self, x: &[f64]) -> f64 {
        let p: Vec<T> = x.iter().map(|&v| T::lit(v)).collect();
        self.model.base_density(&p).as_f64()
    }
}

/// `H(1) = α^k ∫ ‖x‖^{−γk} e^{−α‖x‖^{−γ}} dx`; `H(L) = L^{d/γ−k} H(1)`.
fn dense_h1(alpha: f64, gamma: f64, k: usize, d: usize) -> f64 {
    let p = gamma * k as f64;
    let r0 = alpha.powf(1.0 / gamma);
    let f = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        (k as f64 * alpha.ln() + (d as f64 - 1.0 - p) * r.ln() - alpha * r.powf(-gamma)).exp()
    };
    unit_sphere_area::<f64>(d) * quad::half_line(f, &[0.25 * r0, r0, 4.0 * r0], QUAD_TOL)
}

/// `𝔡 = α^k/k! ∫ I(x) ‖x₁‖^{−γk} e^{−α‖x₁‖^{−γ} λ(S ∪ ⋃(S+x_i))} dx` for
/// `m(x) = α(‖x‖+1)^{−γ}`.
pub fn dense_constant<T: Real>(
    shape: &Shape<T>,
    selector: &Selector,
    model: &IntensityModel<T>,
    opts: &ConstantOptions,
) -> Result<AsymptoticsReport> {
    shape.validate()?;
    model.validate()?;
    let (alpha, gamma) = radial_params(model).ok_or_else(|| {
        Error::HypothesisViolation("the dense limit is defined for radial power densities only".into())
    })?;
    let k = fixed_k(selector)?;
    let d = shape.dim;
    let p = gamma * k as f64;
    if p <= d as f64 {
        return Err(Error::NotIntegrable(format!("dense constant needs gamma*k > d, got gamma*k = {p}, d = {d}")));
    }
    let kf = factorial(k) as f64;
    let vol = shape.volume().as_f64();
    let expo = d as f64 / gamma - k as f64;
    let (value, se, evals) = match opts.x1 {
        X1Method::Quadrature => {
            let h1 = dense_h1(alpha, gamma, k, d);
            if k == 1 {
                (selector.selects(1, |_, _| false) as u8 as f64 * h1 * vol.powf(expo), 0.0, 0)
            } else {
                let (m, s, n) = offsets_mc(shape, selector, k, opts, Some(&|l, _| h1 * l.powf(expo)))?;
                (m / kf, s / kf, n)
            }
        }
        X1Method::MonteCarlo => {
            let prop = DenseProposal::new(alpha, gamma, k, d, vol);
            let f = |l: f64, rng: &mut crate::seed::SimRng| prop.weight(l, rng);
            if k == 1 {
                let one = selector.selects(1, |_, _| false) as u8 as f64;
                let parts = par_chunks(opts.seed, opts.samples, DEFAULT_CHUNK, |len, rng| {
                    let mut acc = MeanAcc::default();
                    for _ in 0..len {
                        acc.push(one * f(vol, rng));
                    }
                    acc
                });
                let acc = MeanAcc::combine(&parts);
                (acc.mean(), acc.std_error(), acc.n)
            } else {
                let (m, s, n) = offsets_mc(shape, selector, k, opts, Some(&f))?;
                (m / kf, s / kf, n)
            }
        }
    };
    Ok(AsymptoticsReport {
        constant: ConstantKind::Dense,
        value,
        std_error: se,
        integrand_evals: evals,
        x1_method: opts.x1,
        volume_method: opts.volume,
    })
}

/// Radial proposal `q(x) ∝ min(‖x‖^{−γk}, C)` with `C = (k/(αλ(S)e))^k`,
/// the envelope of `z^k e^{−αLz}` over `L ≥ λ(S)`.
struct DenseProposal {
    alpha: f64,
    gamma: f64,
    k: usize,
    d: usize,
    p: f64,
    cap: f64,
    r0: f64,
    inner_mass: f64,
    norm: f64,
}

impl DenseProposal {
    fn new(alpha: f64, gamma: f64, k: usize, d: usize, vol: f64) -> Self {
        let p = gamma * k as f64;
        let cap = (k as f64 / (alpha * vol * std::f64::consts::E)).powi(k as i32);
        let r0 = cap.powf(-1.0 / p);
        let df = d as f64;
        let inner = cap * r0.powf(df) / df;
        let outer = r0.powf(df - p) / (p - df);
        let norm = unit_sphere_area::<f64>(d) * (inner + outer);
        DenseProposal { alpha, gamma, k, d, p, cap, r0, inner_mass: inner / (inner + outer), norm }
    }

    /// One importance weight of `α^k ∫ ‖x‖^{−γk} e^{−α‖x‖^{−γ}L} dx`.
    fn weight(&self, l: f64, rng: &mut crate::seed::SimRng) -> f64 {
        let df = self.d as f64;
        let u: f64 = rng.random();
        let v: f64 = 1.0 - rng.random::<f64>();
        let r = if u < self.inner_mass { self.r0 * v.powf(1.0 / df) } else { self.r0 * v.powf(-1.0 / (self.p - df)) };
        if r <= 0.0 {
            return 0.0;
        }
        let log_f = self.k as f64 * self.alpha.ln() - self.p * r.ln() - self.alpha * l * r.powf(-self.gamma);
        let q = if r < self.r0 { self.cap } else { r.powf(-self.p) };
        log_f.exp() * self.norm / q
    }
}
