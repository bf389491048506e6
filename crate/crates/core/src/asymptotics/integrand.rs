use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::components::{Selector, SmallGraph};
use crate::error::{Error, Result};
use crate::geometry::{sample_in_ball, union_volume, union_volume_mc, Shape};
use crate::intensity::{Density, IntensityModel};
use crate::scalar::{unit_ball_volume, Real};

/// How `λ(S ∪ (S + x₂) ∪ …)` is evaluated inside the integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeMethod {
    /// Closed forms where available, hit-or-miss otherwise.
    #[default]
    Exact,
    /// Always hit-or-miss.
    HitOrMiss,
}

pub(crate) fn union_lebesgue<T: Real>(
    shape: &Shape<T>,
    offsets: &[&[T]],
    method: VolumeMethod,
    rel_se: f64,
    seed: u64,
) -> Result<f64> {
    let v = match method {
        VolumeMethod::Exact => union_volume(shape, offsets, rel_se, seed)?,
        VolumeMethod::HitOrMiss => union_volume_mc(shape, offsets, rel_se, seed)?,
    };
    Ok(v.value)
}

/// Radius of the ball holding every vertex of a connected `k`-set that
/// contains the origin.
pub(crate) fn support_radius<T: Real>(shape: &Shape<T>, k: usize) -> f64 {
    (k.saturating_sub(1)) as f64 * shape.circumradius().as_f64()
}

pub(crate) fn support_volume<T: Real>(shape: &Shape<T>, k: usize) -> f64 {
    unit_ball_volume::<f64>(shape.dim) * support_radius(shape, k).powi(shape.dim as i32)
}

/// Fills `offsets` (flat, `(k−1)·d`) uniformly from the support ball.
pub(crate) fn draw_offsets<T: Real, R: Rng + ?Sized>(rng: &mut R, shape: &Shape<T>, k: usize, offsets: &mut [T]) {
    let r = support_radius(shape, k);
    for o in offsets.chunks_exact_mut(shape.dim) {
        sample_in_ball(rng, r, o);
    }
}

/// `I(0, y₂, …, y_k)`: the set is connected under `S` and lies in `A`.
pub(crate) fn indicator<T: Real>(shape: &Shape<T>, selector: &Selector, offsets: &[T]) -> bool {
    let d = shape.dim;
    let k = offsets.len() / d + 1;
    let zero = vec![T::zero(); d];
    let vertex = |i: usize| if i == 0 { &zero[..] } else { &offsets[(i - 1) * d..i * d] };
    let mut diff = vec![T::zero(); d];
    let mut edge = |i: usize, j: usize| {
        let (a, b) = (vertex(i), vertex(j));
        for x in 0..d {
            diff[x] = b[x] - a[x];
        }
        shape.contains(&diff)
    };
    let Ok(g) = SmallGraph::from_fn(k, &mut edge) else { return false };
    g.is_connected() && selector.selects(k, |i, j| g.has_edge(i, j))
}

/// Fixed-size `k` of a selector usable in the limit integrals.
pub(crate) fn fixed_k(selector: &Selector) -> Result<usize> {
    selector.fixed_k().ok_or_else(|| Error::InvalidParameter("limit constants need a selector of fixed size k".into()))
}

/// Samples `x` with density proportional to `(‖x‖ + 1)^{-p}` on `ℝ^d`
/// (radial inverse CDF on the closed-form tail).
pub(crate) struct PowerRadialSampler {
    p: f64,
    d: usize,
    total: f64,
}

impl PowerRadialSampler {
    pub fn new(p: f64, d: usize) -> Result<Self> {
        if p <= d as f64 {
            return Err(Error::NotIntegrable(format!("(|x|+1)^-{p} is not integrable in dimension {d}")));
        }
        let total = power_tail_unit(p, d, 0.0);
        Ok(PowerRadialSampler { p, d, total })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let target = rng.random::<f64>() * self.total;
        let mut hi = 1.0;
        while power_tail_unit(self.p, self.d, hi) > target {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if power_tail_unit(self.p, self.d, mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        random_direction(rng, out);
        let r = 0.5 * (lo + hi);
        out.iter_mut().for_each(|x| *x *= r);
    }
}

/// `∫_{‖x‖>R} (‖x‖+1)^{-p} dx / |S^{d-1}|`.
fn power_tail_unit(p: f64, d: usize, radius: f64) -> f64 {
    let u0 = radius + 1.0;
    let n = d - 1;
    let mut binom = 1.0;
    let mut sum = 0.0;
    for j in 0..=n {
        if j > 0 {
            binom = binom * (n - j + 1) as f64 / j as f64;
        }
        let sign = if (n - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        sum += sign * binom * u0.powf(j as f64 - p + 1.0) / (p - j as f64 - 1.0);
    }
    sum
}

pub(crate) fn random_direction<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut n2 = 0.0;
        for x in out.iter_mut() {
            *x = StandardNormal.sample(rng);
            n2 += *x * *x;
        }
        if n2 > 1e-300 {
            let n = n2.sqrt();
            out.iter_mut().for_each(|x| *x /= n);
            return;
        }
    }
}

/// `(α, γ)` of a radial power model.
pub(crate) fn radial_params<T: Real>(model: &IntensityModel<T>) -> Option<(f64, f64)> {
    match &model.density {
        Density::RadialPower { alpha, gamma } => Some((alpha.as_f64(), gamma.as_f64())),
        _ => None,
    }
}

/// Chebyshev interpolant of a smooth function on `[a, b]`.
pub(crate) struct Chebyshev {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    pub fn fit(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Self {
        let nodes: Vec<f64> = (0..n).map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos()).collect();
        let vals: Vec<f64> = nodes.iter().map(|&x| f(0.5 * (a + b) + 0.5 * (b - a) * x)).collect();
        let coeffs = (0..n)
            .map(|i| {
                let s: f64 = (0..n)
                    .map(|j| vals[j] * (std::f64::consts::PI * i as f64 * (j as f64 + 0.5) / n as f64).cos())
                    .sum();
                2.0 * s / n as f64
            })
            .collect();
        Chebyshev { a, b, coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.b <= self.a {
            return self.coeffs[0] / 2.0;
        }
        let u = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * u * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + 0.5 * self.coeffs[0]
    }
}
