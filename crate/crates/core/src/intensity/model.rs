use std::fmt;
use std::sync::Arc;

use super::Window;
use crate::error::{invalid, Error, Result};
use crate::quad::{self, Region};
use crate::scalar::{unit_sphere_area, Real};

type DensityFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// Axis-aligned region and grid pitch for the `σ_S^μ` grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBox<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
    pub pitch: T,
}

/// A bounded user density.
#[derive(Clone)]
pub struct CustomDensity<T> {
    density: DensityFn<T>,
    pub sup_bound: T,
    /// Radially nonincreasing about the origin; puts the sup of `μ(S + x)`
    /// at `x = 0` for centred convex `S`.
    pub radially_nonincreasing: bool,
    pub search_box: Option<SearchBox<T>>,
    /// Declared values of `∫ m(x)^k dx`, keyed by `k`.
    pub power_integrals: Vec<(u32, T)>,
    /// `m` vanishes outside the centred ball of this radius.
    pub support_radius: Option<T>,
}

impl<T: Real> CustomDensity<T> {
    pub fn new(density: impl Fn(&[T]) -> T + Send + Sync + 'static, sup_bound: T) -> Self {
        CustomDensity {
            density: Arc::new(density),
            sup_bound,
            radially_nonincreasing: false,
            search_box: None,
            power_integrals: Vec::new(),
            support_radius: None,
        }
    }

    pub fn eval(&self, x: &[T]) -> T {
        (self.density)(x)
    }
}

impl<T: fmt::Debug> fmt::Debug for CustomDensity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("sup_bound", &self.sup_bound)
            .field("radially_nonincreasing", &self.radially_nonincreasing)
            .field("search_box", &self.search_box)
            .field("power_integrals", &self.power_integrals)
            .field("support_radius", &self.support_radius)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Density<T> {
    Homogeneous {
        rate: T,
    },
    /// `m(x) = α (‖x‖ + 1)^{-γ}`.
    RadialPower {
        alpha: T,
        gamma: T,
    },
    Custom(CustomDensity<T>),
}

/// Intensity measure `t·μ` given by the Lebesgue density `t·m`.
#[derive(Debug, Clone)]
pub struct IntensityModel<T> {
    pub density: Density<T>,
    pub scale: T,
}

impl<T: Real> IntensityModel<T> {
    pub fn homogeneous(rate: T) -> Self {
        IntensityModel { density: Density::Homogeneous { rate }, scale: T::one() }
    }

    pub fn radial_power(alpha: T, gamma: T) -> Self {
        IntensityModel { density: Density::RadialPower { alpha, gamma }, scale: T::one() }
    }

    pub fn custom(density: CustomDensity<T>) -> Self {
        IntensityModel { density: Density::Custom(density), scale: T::one() }
    }

    pub fn with_scale(mut self, scale: T) -> Self {
        self.scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > T::zero()) || !self.scale.is_finite() {
            return Err(invalid(format!("scale must be positive, got {}", self.scale)));
        }
        match &self.density {
            Density::Homogeneous { rate } => {
                if !(*rate >= T::zero()) || !rate.is_finite() {
                    return Err(invalid(format!("rate must be nonnegative, got {rate}")));
                }
            }
            Density::RadialPower { alpha, gamma } => {
                if !(*alpha > T::zero()) || !alpha.is_finite() {
                    return Err(invalid(format!("alpha must be positive, got {alpha}")));
                }
                if !(*gamma > T::zero()) || !gamma.is_finite() {
                    return Err(invalid(format!("gamma must be positive, got {gamma}")));
                }
            }
            Density::Custom(c) => {
                if !(c.sup_bound >= T::zero()) || !c.sup_bound.is_finite() {
                    return Err(invalid("custom sup_bound must be nonnegative and finite"));
                }
            }
        }
        Ok(())
    }

    /// Validates the model together with a window it is to be sampled on.
    pub fn check_window(&self, window: &Window<T>) -> Result<()> {
        self.validate()?;
        window.validate()?;
        if window.is_torus() && !self.is_homogeneous() {
            return Err(invalid("torus windows require a homogeneous intensity"));
        }
        Ok(())
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.density, Density::Homogeneous { .. })
    }

    /// True if `m` depends on `‖x‖` only and never increases with it.
    pub fn is_radially_nonincreasing(&self) -> bool {
        match &self.density {
            Density::Homogeneous { .. } | Density::RadialPower { .. } => true,
            Density::Custom(c) => c.radially_nonincreasing,
        }
    }

    /// Unscaled density `m(x)`.
    #[inline]
    pub fn base_density(&self, x: &[T]) -> T {
        match &self.density {
            Density::Homogeneous { rate } => *rate,
            Density::RadialPower { alpha, gamma } => {
                let r = x.iter().map(|&v| v * v).sum::<T>().sqrt();
                *alpha * (r + T::one()).powf(-*gamma)
            }
            Density::Custom(c) => c.eval(x),
        }
    }

    /// Density of the scaled measure, `t·m(x)`.
    #[inline]
    pub fn density(&self, x: &[T]) -> T {
        self.scale * self.base_density(x)
    }

    /// `m` as a function of the radius for radial power laws.
    pub fn radial_profile(&self) -> Option<impl Fn(f64) -> f64> {
        match &self.density {
            Density::RadialPower { alpha, gamma } => {
                let (a, g) = (alpha.as_f64(), gamma.as_f64());
                Some(move |r: f64| a * (r + 1.0).powf(-g))
            }
            _ => None,
        }
    }

    /// Global bound on `t·m`.
    pub fn sup_density(&self) -> T {
        let m = match &self.density {
            Density::Homogeneous { rate } => *rate,
            Density::RadialPower { alpha, .. } => *alpha,
            Density::Custom(c) => c.sup_bound,
        };
        self.scale * m
    }

    /// Upper and lower bounds of `t·m` over the box `[lo, hi]`.
    pub(crate) fn box_bounds(&self, lo: &[f64], hi: &[f64]) -> (f64, f64) {
        let t = self.scale.as_f64();
        match &self.density {
            Density::Homogeneous { rate } => {
                let r = t * rate.as_f64();
                (r, r)
            }
            Density::RadialPower { alpha, gamma } => {
                let mut near = 0.0;
                let mut far = 0.0;
                for (&l, &h) in lo.iter().zip(hi) {
                    let n = if l > 0.0 {
                        l
                    } else if h < 0.0 {
                        -h
                    } else {
                        0.0
                    };
                    let f = l.abs().max(h.abs());
                    near += n * n;
                    far += f * f;
                }
                let (a, g) = (alpha.as_f64(), gamma.as_f64());
                (t * a * (near.sqrt() + 1.0).powf(-g), t * a * (far.sqrt() + 1.0).powf(-g))
            }
            Density::Custom(c) => (t * c.sup_bound.as_f64(), 0.0),
        }
    }

    /// `t·μ(W)`.
    pub fn mass(&self, window: &Window<T>) -> Result<T> {
        self.check_window(window)?;
        let t = self.scale.as_f64();
        let value = match &self.density {
            Density::Homogeneous { rate } => return Ok(self.scale * *rate * window.volume()),
            _ => {
                let center: Vec<f64> = window.center.iter().map(|v| v.as_f64()).collect();
                let (lo, hi) = window.bounds();
                let lo: Vec<f64> = lo.iter().map(|v| v.as_f64()).collect();
                let hi: Vec<f64> = hi.iter().map(|v| v.as_f64()).collect();
                let region = match window.kind {
                    super::WindowKind::Ball => Region::Ball { center: &center, radius: window.half_extent[0].as_f64() },
                    _ => Region::Box { lo: &lo, hi: &hi },
                };
                t * self.integrate_base_over(&region)
            }
        };
        if !value.is_finite() {
            return Err(Error::WindowMassNotFinite);
        }
        Ok(T::lit(value))
    }

    /// `∫_region m(x) dx` by iterated quadrature.
    pub(crate) fn integrate_base_over(&self, region: &Region<'_>) -> f64 {
        let f = |x: &[f64]| {
            let p: Vec<T> = x.iter().map(|&v| T::lit(v)).collect();
            self.base_density(&p).as_f64()
        };
        quad::iterated(&f, region, 1e-10)
    }

    /// `∫_{ℝ^d} m(x)^k dx` (unscaled).
    pub fn power_integral(&self, k: u32, dim: usize) -> Result<T> {
        match &self.density {
            Density::Homogeneous { .. } => {
                Err(Error::NotIntegrable("homogeneous density has infinite mass on R^d".into()))
            }
            Density::RadialPower { alpha, gamma } => {
                let p = gamma.as_f64() * k as f64;
                if p <= dim as f64 {
                    return Err(Error::NotIntegrable(format!("gamma*k = {p} <= d = {dim} for radial power density")));
                }
                let a = alpha.as_f64().powi(k as i32);
                let v = quad::radial(|r| a * (r + 1.0).powf(-p), dim, &[1.0], 1e-12);
                Ok(T::lit(v))
            }
            Density::Custom(c) => c
                .power_integrals
                .iter()
                .find(|(kk, _)| *kk == k)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::NotIntegrable(format!("custom density declares no integral of m^{k}"))),
        }
    }

    /// Closed form of `∫_{‖x‖>R} m(x)^k dx` for radial power laws with
    /// `γk > d`, via `u = r + 1` and a binomial expansion of `(u-1)^{d-1}`.
    pub fn power_tail(&self, k: u32, dim: usize, radius: T) -> Result<T> {
        let Density::RadialPower { alpha, gamma } = &self.density else {
            return Err(invalid("closed-form tail needs a radial power density"));
        };
        let p = gamma.as_f64() * k as f64;
        if p <= dim as f64 {
            return Err(Error::NotIntegrable(format!("gamma*k = {p} <= d = {dim}")));
        }
        let u0 = radius.as_f64().max(0.0) + 1.0;
        let n = dim - 1;
        let mut binom = 1.0;
        let mut sum = 0.0;
        for j in 0..=n {
            if j > 0 {
                binom = binom * (n - j + 1) as f64 / j as f64;
            }
            let sign = if (n - j).is_multiple_of(2) { 1.0 } else { -1.0 };
            let e = j as f64 - p + 1.0;
            sum += sign * binom * u0.powf(e) / (p - j as f64 - 1.0);
        }
        let area: f64 = unit_sphere_area(dim);
        Ok(T::lit(alpha.as_f64().powi(k as i32) * area * sum))
    }

    /// Smallest radius (to 0.1% precision) whose exterior carries at most
    /// `fraction` of `∫ m^k`.
    pub fn truncation_radius(&self, k: u32, dim: usize, fraction: f64) -> Result<T> {
        let total = self.power_tail(k, dim, T::zero())?.as_f64();
        let tail = |r: f64| self.power_tail(k, dim, T::lit(r)).map(|v| v.as_f64());
        let mut hi = 1.0;
        while tail(hi)? > fraction * total {
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::NotIntegrable("tail decays too slowly".into()));
            }
        }
        let mut lo = 0.0;
        while hi - lo > 1e-3 * hi {
            let mid = 0.5 * (lo + hi);
            if tail(mid)? > fraction * total {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(T::lit(hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn radial_power_values() {
        let m = IntensityModel::radial_power(100.0f64, 2.0);
        assert!((m.base_density(&[3.0, 4.0]) - 100.0 / 36.0).abs() < 1e-12);
        let m2 = m.clone().with_scale(2.0);
        assert!((m2.density(&[0.0, 0.0]) - 200.0).abs() < 1e-12);
        assert!(IntensityModel::radial_power(0.0, 2.0).validate().is_err());
        assert!(IntensityModel::homogeneous(1.0).with_scale(0.0).validate().is_err());
    }

    #[test]
    fn power_integral_matches_closed_form() {
        let m = IntensityModel::radial_power(1.0, 3.0);
        let q = m.power_integral(2, 2).unwrap();
        assert!((q - PI / 10.0).abs() < 1e-10, "{q}");
        let c = m.power_tail(2, 2, 0.0).unwrap();
        assert!((c - PI / 10.0).abs() < 1e-12);
        // d = 3, k = 1, γ = 5: 4π ∫ r²(r+1)^{-5} = 4π/12
        let m3 = IntensityModel::radial_power(1.0, 5.0);
        assert!((m3.power_tail(1, 3, 0.0).unwrap() - 4.0 * PI / 12.0).abs() < 1e-12);
        assert!((m3.power_integral(1, 3).unwrap() - 4.0 * PI / 12.0).abs() < 1e-9);
        assert!(matches!(m.power_integral(1, 3), Err(Error::NotIntegrable(_))));
    }

    #[test]
    fn tail_against_quadrature() {
        let m = IntensityModel::radial_power(2.0, 1.7);
        let r = 12.5;
        let p = 1.7 * 2.0;
        let q = 2.0 * PI * quad::half_line(|s| 4.0 * (s + r + 1.0).powf(-p) * (s + r), &[1.0], 1e-13);
        let c = m.power_tail(2, 2, r).unwrap();
        assert!((q - c).abs() < 1e-10 * c, "{q} vs {c}");
        let rt = m.truncation_radius(2, 2, 1e-3).unwrap();
        let total = m.power_tail(2, 2, 0.0).unwrap();
        assert!(m.power_tail(2, 2, rt).unwrap() <= 1e-3 * total);
        assert!(m.power_tail(2, 2, rt * 0.99).unwrap() > 1e-3 * total);
    }

    #[test]
    fn box_bounds_bracket_density() {
        let m = IntensityModel::radial_power(5.0, 2.5);
        let (sup, inf) = m.box_bounds(&[-1.0, 2.0], &[3.0, 4.0]);
        for p in [[-1.0, 2.0], [0.0, 2.0], [3.0, 4.0], [1.0, 3.0]] {
            let v = m.density(&p);
            assert!(v <= sup + 1e-12 && v >= inf - 1e-12);
        }
        assert!((sup - m.density(&[0.0, 2.0])).abs() < 1e-12);
    }
}
