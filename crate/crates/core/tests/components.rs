mod common;

use std::collections::BTreeMap;

use geomconc::components::{
    canonical_form, canonical_form_matrix, census, count_f, count_u, CensusMode, Selector, SmallGraph, DEFAULT_U_CAP,
};
use geomconc::geometry::{GeomGraph, Shape};
use geomconc::intensity::{sample_poisson, IntensityModel, PointConfig, Window};
use geomconc::seed::rng_from_seed;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn path3() -> GeomGraph<f64> {
    let cfg = PointConfig::new(Window::cube(2, 5.0).unwrap(), vec![0.0, 0.0, 1.0, 0.0, 2.0, 0.0]).unwrap();
    GeomGraph::build(&cfg, &Shape::euclidean(1.0, 2).unwrap()).unwrap()
}

fn graph_from_mask(k: usize, mask: u64) -> SmallGraph {
    let mut g = SmallGraph::empty(k).unwrap();
    let mut bit = 0;
    for i in 0..k {
        for j in i + 1..k {
            if mask >> bit & 1 == 1 {
                g.set_edge(i, j);
            }
            bit += 1;
        }
    }
    g
}

fn permuted(g: &SmallGraph, perm: &[usize]) -> SmallGraph {
    let k = g.order();
    SmallGraph::from_fn(k, |i, j| g.has_edge(perm[i], perm[j])).unwrap()
}

fn brute_isomorphic(a: &SmallGraph, b: &SmallGraph) -> bool {
    fn rec(a: &SmallGraph, b: &SmallGraph, perm: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let k = a.order();
        if perm.len() == k {
            return (0..k).all(|i| (i + 1..k).all(|j| a.has_edge(i, j) == b.has_edge(perm[i], perm[j])));
        }
        for v in 0..k {
            if !used[v] {
                used[v] = true;
                perm.push(v);
                if rec(a, b, perm, used) {
                    return true;
                }
                perm.pop();
                used[v] = false;
            }
        }
        false
    }
    rec(a, b, &mut Vec::new(), &mut vec![false; a.order()])
}

#[test]
fn eleven_classes_on_four_vertices() {
    let graphs: Vec<SmallGraph> = (0..64).map(|m| graph_from_mask(4, m)).collect();
    let mut buckets: BTreeMap<u64, usize> = BTreeMap::new();
    for g in &graphs {
        *buckets.entry(canonical_form(g).code).or_default() += 1;
    }
    assert_eq!(buckets.len(), 11);
    let mut sizes: Vec<usize> = buckets.values().copied().collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![1, 1, 3, 3, 4, 4, 6, 6, 12, 12, 12]);
    for a in &graphs {
        for b in &graphs {
            assert_eq!(canonical_form(a) == canonical_form(b), brute_isomorphic(a, b));
        }
    }
}

#[test]
fn path_and_triangle_codes() {
    let p = SmallGraph::from_upper_bits("101").unwrap();
    let q = SmallGraph::from_upper_bits("110").unwrap();
    let t = SmallGraph::from_upper_bits("111").unwrap();
    assert_eq!(canonical_form(&p), canonical_form(&q));
    assert_ne!(canonical_form(&p), canonical_form(&t));
    assert!(canonical_form_matrix(&[vec![0, 1], vec![0, 0]]).is_err());
    assert!(canonical_form_matrix(&[vec![1, 0], vec![0, 0]]).is_err());
    assert!(Selector::iso_to(SmallGraph::from_upper_bits("100").unwrap()).is_err());
}

#[test]
fn path_counts() {
    let g = path3();
    let path = SmallGraph::from_upper_bits("101").unwrap();
    let tri = SmallGraph::from_upper_bits("111").unwrap();
    assert_eq!(count_f(&g, &Selector::exactly(3).unwrap()), 1);
    assert_eq!(count_f(&g, &Selector::exactly(2).unwrap()), 0);
    assert_eq!(count_f(&g, &Selector::iso_to(tri).unwrap()), 0);
    assert_eq!(count_f(&g, &Selector::iso_to(path).unwrap()), 1);
    assert_eq!(count_u(&g, &Selector::exactly(2).unwrap(), DEFAULT_U_CAP).unwrap(), 4);
    assert_eq!(count_u(&g, &Selector::exactly(3).unwrap(), DEFAULT_U_CAP).unwrap(), 6);
}

#[test]
fn decomposition_by_size() {
    for seed in 0..20 {
        let w = Window::cube(2, 5.0).unwrap();
        let cfg = sample_poisson(&IntensityModel::homogeneous(2.0), &w, seed).unwrap();
        let g = GeomGraph::build(&cfg, &Shape::euclidean(0.4, 2).unwrap()).unwrap();
        let total = count_f(&g, &Selector::at_most(3).unwrap());
        let parts: u64 = (1..=3).map(|i| count_f(&g, &Selector::exactly(i).unwrap())).sum();
        assert_eq!(total, parts);
    }
}

#[test]
fn census_consistency() {
    let w = Window::cube(2, 8.0).unwrap();
    let cfg = sample_poisson(&IntensityModel::homogeneous(1.5), &w, 4).unwrap();
    let g = GeomGraph::build(&cfg, &Shape::euclidean(0.6, 2).unwrap()).unwrap();
    let c = census(&g, 5, CensusMode::Raw);
    assert_eq!(c.total_components as usize, g.components().count());
    for size in 1..=5usize {
        let by_class: u64 =
            c.counts_by_isoclass.iter().filter(|(code, _)| code.k as usize == size).map(|(_, n)| n).sum();
        assert_eq!(by_class, c.counts_by_size.get(&size).copied().unwrap_or(0), "size {size}");
    }
    let eroded = census(&g, 5, CensusMode::Eroded);
    assert!(eroded.total_components <= c.total_components);
}

#[test]
fn difference_operator_trials() {
    let mut stats = common::TrialStats::default();
    for seed in 0..60 {
        stats.merge(common::difference_trial(seed));
    }
    assert!(stats.violations.is_empty(), "{:#?}", &stats.violations[..stats.violations.len().min(10)]);
    assert!(stats.oracle_checks > 500);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_invariant(k in 1usize..=7, mask in any::<u64>(), seed in any::<u64>()) {
        let m = k * (k - 1) / 2;
        let g = graph_from_mask(k, if m == 0 { 0 } else { mask & ((1u64 << m) - 1) });
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut rng_from_seed(seed));
        prop_assert_eq!(canonical_form(&g), canonical_form(&permuted(&g, &perm)));
    }

    #[test]
    fn u_dominates_k_factorial_f(seed in any::<u64>(), k in 1usize..=4, rate in 0.5f64..3.0, rho in 0.1f64..0.5) {
        let w = Window::cube(2, 4.0).unwrap();
        let cfg = sample_poisson(&IntensityModel::homogeneous(rate), &w, seed).unwrap();
        let g = GeomGraph::build(&cfg, &Shape::euclidean(rho, 2).unwrap()).unwrap();
        let sel = Selector::exactly(k).unwrap();
        if let Ok(u) = count_u(&g, &sel, DEFAULT_U_CAP) {
            let kf: u64 = (1..=k as u64).product();
            prop_assert!(u >= kf * count_f(&g, &sel));
        }
    }
}
