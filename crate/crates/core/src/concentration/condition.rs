use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{resolve_c_s, BoundParams, MeanSource};
use crate::components::{add_one_cost, component_selected, count_f, remove_one_cost, Selector};
use crate::error::{invalid, Result};
use crate::geometry::{GeomGraph, Shape};
use crate::intensity::{sigma_s, IntensityModel, PointConfig};
use crate::scalar::Real;
use crate::seed::{par_chunks, MeanAcc, DEFAULT_CHUNK};

pub const MIN_CONDITION_POINTS: usize = 1000;

/// Relative slack for floating-point ties between estimate and bound.
const ROUNDING: f64 = 1e-12;

/// Terms of `∫ (D_x F)₋² dμ(x) + Σ_{x∈η} (D_x F(η − δ_x))₊² ≤ a F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub f: u64,
    pub sum_term: f64,
    pub integral_estimate: f64,
    pub integral_se: f64,
    pub a: f64,
    pub a_f: f64,
    /// `sum_term + integral_estimate − 4·integral_se ≤ a·F`.
    pub satisfied: bool,
    /// `Σ (·)₊² ≤ kF`, exact.
    pub sum_within_kf: bool,
    /// Estimate of `μ{x : D_x F < 0}` and its bound `kσF`.
    pub negative_mass: f64,
    pub negative_mass_se: f64,
    pub negative_mass_bound: f64,
    pub negative_mass_ok: bool,
    pub c_s_certified: bool,
}

/// Checks the condition on one configuration with `c_S` resolved from the
/// shape (or `c_s_override` when uncertified).
#[allow(clippy::too_many_arguments)]
pub fn condition_check<T: Real>(
    config: &PointConfig<T>,
    shape: &Shape<T>,
    selector: &Selector,
    model: &IntensityModel<T>,
    mc_points: usize,
    seed: u64,
    c_s_override: Option<usize>,
) -> Result<ConditionRecord> {
    if mc_points < MIN_CONDITION_POINTS {
        return Err(invalid(format!("need at least {MIN_CONDITION_POINTS} Monte Carlo points, got {mc_points}")));
    }
    let (c_s, certified) = resolve_c_s(shape, c_s_override)?;
    let sigma = sigma_s(model, shape)?.value.as_f64();
    let graph = GeomGraph::build(config, shape)?;
    let f = count_f(&graph, selector);
    let params = BoundParams::new(selector.k(), c_s, sigma, f as f64, MeanSource::Theory)?;

    let mut sum_term = 0.0;
    for v in 0..graph.vertex_count() {
        let d = remove_one_cost(&graph, selector, v)?.max(0) as f64;
        sum_term += d * d;
    }

    // vertices of selected components: D_x F < 0 needs x within S of one
    let comps = graph.components();
    let k = selector.k();
    let support: Vec<u32> = (0..comps.count())
        .filter(|&c| comps.members(c).len() <= k && component_selected(&graph, selector, comps.members(c)))
        .flat_map(|c| comps.members(c).iter().copied())
        .collect();
    let (integral, integral_se, neg, neg_se) = if support.is_empty() {
        (0.0, 0.0, 0.0, 0.0)
    } else {
        integral_terms(&graph, selector, model, &support, mc_points, seed)?
    };
    let a_f = params.a * f as f64;
    let kf = (k as u64 * f) as f64;
    let neg_bound = k as f64 * sigma * f as f64;
    Ok(ConditionRecord {
        f,
        sum_term,
        integral_estimate: integral,
        integral_se,
        a: params.a,
        a_f,
        satisfied: sum_term + integral - 4.0 * integral_se <= a_f * (1.0 + ROUNDING),
        sum_within_kf: sum_term <= kf,
        negative_mass: neg,
        negative_mass_se: neg_se,
        negative_mass_bound: neg_bound,
        negative_mass_ok: neg - 4.0 * neg_se <= neg_bound * (1.0 + ROUNDING),
        c_s_certified: certified,
    })
}

/// Importance sampling over `∪_{v ∈ support} (S + v)`: pick `v` uniformly,
/// then `x` uniformly in `S + v`, and weight by `t·m(x)·λ(S)·|support| / n(x)`
/// with `n(x)` the number of support vertices within `S` of `x`.
fn integral_terms<T: Real>(
    graph: &GeomGraph<T>,
    selector: &Selector,
    model: &IntensityModel<T>,
    support: &[u32],
    n: usize,
    seed: u64,
) -> Result<(f64, f64, f64, f64)> {
    let shape = graph.shape();
    let config = graph.config();
    let window = config.window();
    let d = config.dim();
    let mut in_support = vec![false; graph.vertex_count()];
    for &v in support {
        in_support[v as usize] = true;
    }
    let scale = shape.volume().as_f64() * support.len() as f64;
    let parts = par_chunks(seed, n, DEFAULT_CHUNK, |len, rng| -> Result<(MeanAcc, MeanAcc)> {
        let mut sq = MeanAcc::default();
        let mut ind = MeanAcc::default();
        let mut off = vec![T::zero(); d];
        let mut x = vec![T::zero(); d];
        for _ in 0..len {
            let v = support[rng.random_range(0..support.len())] as usize;
            shape.sample_uniform(rng, &mut off);
            let p = config.point(v);
            for a in 0..d {
                x[a] = p[a] + off[a];
            }
            window.wrap(&mut x);
            let hits = graph.neighbors_of_point(&x).iter().filter(|&&j| in_support[j as usize]).count();
            let w = model.density(&x).as_f64() * scale / hits.max(1) as f64;
            let dx = add_one_cost(graph, selector, &x)?;
            let neg = (-dx).max(0) as f64;
            sq.push(w * neg * neg);
            ind.push(if dx < 0 { w } else { 0.0 });
        }
        Ok((sq, ind))
    });
    let mut sq = Vec::with_capacity(parts.len());
    let mut ind = Vec::with_capacity(parts.len());
    for p in parts {
        let (a, b) = p?;
        sq.push(a);
        ind.push(b);
    }
    let (sq, ind) = (MeanAcc::combine(&sq), MeanAcc::combine(&ind));
    Ok((sq.mean(), sq.std_error(), ind.mean(), ind.std_error()))
}
