//! Randomized difference-operator trials shared by the test targets.
#![allow(dead_code)]

use geomconc::components::{add_one_cost, component_selected, count_f, remove_one_cost, Selector, SmallGraph};
use geomconc::geometry::{packing_constant, GeomGraph, Norm, Shape};
use geomconc::intensity::{PointConfig, Window};
use geomconc::seed::rng_from_seed;
use rand::Rng;

#[derive(Debug, Default)]
pub struct TrialStats {
    pub probes: usize,
    pub removals: usize,
    pub oracle_checks: usize,
    pub violations: Vec<String>,
}

impl TrialStats {
    pub fn merge(&mut self, other: TrialStats) {
        self.probes += other.probes;
        self.removals += other.removals;
        self.oracle_checks += other.oracle_checks;
        self.violations.extend(other.violations);
    }
}

/// Random connected graph on `k` vertices: a random tree plus extra edges.
pub fn random_connected<R: Rng>(rng: &mut R, k: usize) -> SmallGraph {
    let mut g = SmallGraph::empty(k).unwrap();
    for v in 1..k {
        let u = rng.random_range(0..v);
        g.set_edge(u, v);
    }
    for i in 0..k {
        for j in i + 1..k {
            if rng.random_bool(0.3) {
                g.set_edge(i, j);
            }
        }
    }
    g
}

pub fn random_selector<R: Rng>(rng: &mut R, variant: usize, k: usize) -> Selector {
    match variant % 3 {
        0 => Selector::at_most(k).unwrap(),
        1 => Selector::exactly(k).unwrap(),
        _ => Selector::iso_to(random_connected(rng, k)).unwrap(),
    }
}

/// One randomized configuration checked against the difference-operator facts, the
/// bounded-difference property, `Σ (D⁻)₊² ≤ kF`, and full-rebuild oracles.
pub fn difference_trial(seed: u64) -> TrialStats {
    let mut rng = rng_from_seed(seed);
    let mut stats = TrialStats::default();
    let d = 1 + (seed % 2) as usize;
    let k = 1 + rng.random_range(0..5usize);
    let selector = random_selector(&mut rng, seed as usize / 2, k);
    let norm = if rng.random_bool(0.5) { Norm::Euclidean } else { Norm::Sup };
    let n = rng.random_range(0..=500usize);
    let h = 10.0f64;
    let torus = rng.random_bool(0.5);
    let window = if torus { Window::torus(d, h).unwrap() } else { Window::cube(d, h).unwrap() };
    // mean degree between about 0.2 and 3
    let vol = (2.0 * h).powi(d as i32);
    let degree = rng.random_range(0.2..3.0);
    let rho = (degree * vol / (n.max(1) as f64 * 2f64.powi(d as i32))).powf(1.0 / d as f64).min(0.25 * h);
    let shape = Shape::new(norm, rho, d).unwrap();
    let c_s = packing_constant(&shape).value.expect("c_S known for d ≤ 2") as i64;

    let coords: Vec<f64> = (0..n * d).map(|_| rng.random_range(-h..h)).collect();
    let config = PointConfig::new(window.clone(), coords).unwrap();
    let graph = GeomGraph::build(&config, &shape).unwrap();
    let f = count_f(&graph, &selector) as i64;
    let tag = format!("seed {seed} d {d} k {k} n {n} {selector:?}");

    // support of the negative part: copies of S around selected components
    let comps = graph.components();
    let mut in_selected = vec![false; n];
    for c in 0..comps.count() {
        let m = comps.members(c);
        if m.len() <= k && component_selected(&graph, &selector, m) {
            for &v in m {
                in_selected[v as usize] = true;
            }
        }
    }
    let mut diff = vec![0.0; d];

    for p in 0..40 {
        let mut x = vec![0.0; d];
        if n > 0 && p % 2 == 0 {
            let v = rng.random_range(0..n);
            for (a, xa) in x.iter_mut().enumerate() {
                *xa = config.point(v)[a] + rng.random_range(-1.2..1.2) * shape.circumradius();
            }
            if torus {
                window.wrap(&mut x);
            } else if !window.contains(&x) {
                continue;
            }
        } else {
            for xa in x.iter_mut() {
                *xa = rng.random_range(-h..h);
            }
        }
        let add = match add_one_cost(&graph, &selector, &x) {
            Ok(v) => v,
            Err(e) => {
                stats.violations.push(format!("{tag}: add_one_cost error {e}"));
                continue;
            }
        };
        stats.probes += 1;
        if add < -c_s {
            stats.violations.push(format!("{tag}: D_x F = {add} < -c_S"));
        }
        if add.abs() > c_s {
            stats.violations.push(format!("{tag}: |D_x F| = {} > c_S", add.abs()));
        }
        let near_selected = (0..n).any(|v| {
            in_selected[v] && {
                window.displacement(config.point(v), &x, &mut diff);
                shape.contains(&diff)
            }
        });
        if !near_selected && add < 0 {
            stats.violations.push(format!("{tag}: D_x F = {add} < 0 away from selected components"));
        }
        if p < 10 {
            let with = GeomGraph::build(&config.with_point(&x).unwrap(), &shape).unwrap();
            stats.oracle_checks += 1;
            let want = count_f(&with, &selector) as i64 - f;
            if add != want {
                stats.violations.push(format!("{tag}: add_one_cost {add} != rebuild {want}"));
            }
        }
    }

    let mut sum_sq = 0i64;
    for (v, &selected) in in_selected.iter().enumerate() {
        let rem = remove_one_cost(&graph, &selector, v).unwrap();
        stats.removals += 1;
        sum_sq += rem.max(0).pow(2);
        if rem > 1 {
            stats.violations.push(format!("{tag}: remove cost {rem} > 1"));
        }
        if rem == 1 && !selected {
            stats.violations.push(format!("{tag}: remove cost 1 outside a selected component"));
        }
        if rem.abs() > c_s {
            stats.violations.push(format!("{tag}: |remove cost| {} > c_S", rem.abs()));
        }
        if v < 10 {
            let without = GeomGraph::build(&config.without_point(v), &shape).unwrap();
            stats.oracle_checks += 1;
            let want = f - count_f(&without, &selector) as i64;
            if rem != want {
                stats.violations.push(format!("{tag}: remove_one_cost {rem} != rebuild {want}"));
            }
        }
    }
    if sum_sq > k as i64 * f {
        stats.violations.push(format!("{tag}: sum of squares {sum_sq} > kF = {}", k as i64 * f));
    }
    stats
}
