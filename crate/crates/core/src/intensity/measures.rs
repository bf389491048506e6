use serde::{Deserialize, Serialize};

use super::{Density, IntensityModel};
use crate::error::{Error, Result};
use crate::geometry::{Norm, Shape};
use crate::quad::{self, Region};
use crate::scalar::Real;

/// `σ_S^μ = sup_x t·μ(S + x)`; `grid_pitch` is set when the value comes
/// from a grid search and is then a lower bound at that resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sigma<T> {
    pub value: T,
    pub grid_pitch: Option<T>,
}

/// `t·μ(S + x)` by quadrature.
pub fn translate_mass<T: Real>(model: &IntensityModel<T>, shape: &Shape<T>, x: &[T]) -> T {
    let center: Vec<f64> = x.iter().map(|v| v.as_f64()).collect();
    let rho = shape.rho.as_f64();
    let t = model.scale.as_f64();
    if let Density::Homogeneous { rate } = &model.density {
        return model.scale * *rate * shape.volume();
    }
    let at_origin = center.iter().all(|&c| c == 0.0);
    let value = match (shape.norm, &model.density) {
        (Norm::Euclidean, Density::RadialPower { .. }) if at_origin => {
            let g = model.radial_profile().expect("radial profile");
            quad::radial_ball(g, shape.dim, rho, 1e-12)
        }
        (Norm::Euclidean, _) => model.integrate_base_over(&Region::Ball { center: &center, radius: rho }),
        (Norm::Sup, _) => {
            let lo: Vec<f64> = center.iter().map(|c| c - rho).collect();
            let hi: Vec<f64> = center.iter().map(|c| c + rho).collect();
            model.integrate_base_over(&Region::Box { lo: &lo, hi: &hi })
        }
    };
    T::lit(t * value)
}

pub fn sigma_s<T: Real>(model: &IntensityModel<T>, shape: &Shape<T>) -> Result<Sigma<T>> {
    model.validate()?;
    shape.validate()?;
    let d = shape.dim;
    if model.is_radially_nonincreasing() {
        let origin = vec![T::zero(); d];
        return Ok(Sigma { value: translate_mass(model, shape, &origin), grid_pitch: None });
    }
    let Density::Custom(c) = &model.density else { unreachable!() };
    let sb = c.search_box.as_ref().ok_or(Error::SigmaSearchRegionRequired)?;
    if sb.lo.len() != d || sb.hi.len() != d || !(sb.pitch > T::zero()) {
        return Err(Error::InvalidParameter("malformed sigma search box".into()));
    }
    let steps: Vec<usize> =
        (0..d).map(|a| ((sb.hi[a] - sb.lo[a]) / sb.pitch).floor().to_usize().unwrap_or(0) + 1).collect();
    let mut idx = vec![0usize; d];
    let mut x = vec![T::zero(); d];
    let mut best = T::zero();
    'outer: loop {
        for a in 0..d {
            x[a] = (sb.lo[a] + sb.pitch * T::from_usize_lossy(idx[a])).min(sb.hi[a]);
        }
        best = best.max(translate_mass(model, shape, &x));
        for a in 0..d {
            idx[a] += 1;
            if idx[a] < steps[a] {
                continue 'outer;
            }
            idx[a] = 0;
        }
        break;
    }
    Ok(Sigma { value: best, grid_pitch: Some(sb.pitch) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Integrable,
    /// Only the restriction to a bounded window has finite `E F`.
    IntegrableOnWindow,
    Unknown,
    NotIntegrable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrabilityDiagnostic {
    pub sigma_finite: bool,
    pub mk_integrable: bool,
    pub verdict: Verdict,
}

/// Checks the sufficient condition `σ < ∞` and `∫ m^k < ∞` for `E F < ∞`.
pub fn validate_integrability<T: Real>(
    model: &IntensityModel<T>,
    k: usize,
    shape: &Shape<T>,
) -> IntegrabilityDiagnostic {
    let sigma_finite = model.validate().is_ok() && model.sup_density().is_finite();
    let mk_integrable = match &model.density {
        Density::Homogeneous { .. } => false,
        Density::RadialPower { gamma, .. } => gamma.as_f64() * k as f64 > shape.dim as f64,
        Density::Custom(c) => c.support_radius.is_some() || c.power_integrals.iter().any(|(kk, _)| *kk as usize == k),
    };
    let verdict = if !sigma_finite || k == 0 {
        Verdict::NotIntegrable
    } else if mk_integrable {
        Verdict::Integrable
    } else if model.is_homogeneous() {
        Verdict::IntegrableOnWindow
    } else {
        Verdict::Unknown
    };
    IntegrabilityDiagnostic { sigma_finite, mk_integrable, verdict }
}
