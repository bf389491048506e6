use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{canonical_form, CanonicalCode, Selector, SmallGraph, MAX_K};
use crate::geometry::GeomGraph;
use crate::scalar::Real;

/// Boundary policy for counting components in a bounded window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusMode {
    /// Every component counts.
    #[default]
    Raw,
    /// Only components with all vertices in the window shrunk by
    /// `kθρ` count; identical to `Raw` on a torus.
    Eroded,
}

/// Induced graph of a component, `None` when it has more than `MAX_K` vertices.
pub fn induced_graph<T: Real>(graph: &GeomGraph<T>, members: &[u32]) -> Option<SmallGraph> {
    if members.len() > MAX_K {
        return None;
    }
    SmallGraph::from_fn(members.len(), |i, j| graph.has_edge(members[i] as usize, members[j] as usize)).ok()
}

/// Whether the component with the given vertex list is selected.
pub fn component_selected<T: Real>(graph: &GeomGraph<T>, selector: &Selector, members: &[u32]) -> bool {
    selector.selects(members.len(), |i, j| graph.has_edge(members[i] as usize, members[j] as usize))
}

/// `F_S^A(ξ)`: number of components whose vertex set lies in `A`.
pub fn count_f<T: Real>(graph: &GeomGraph<T>, selector: &Selector) -> u64 {
    count_f_mode(graph, selector, CensusMode::Raw)
}

pub fn count_f_mode<T: Real>(graph: &GeomGraph<T>, selector: &Selector, mode: CensusMode) -> u64 {
    let comps = graph.components();
    let keep = eroded_filter(graph, selector.k(), mode);
    (0..comps.count())
        .filter(|&c| {
            let m = comps.members(c);
            m.len() <= selector.k()
                && component_selected(graph, selector, m)
                && keep.as_ref().is_none_or(|f| m.iter().all(|&v| f(v)))
        })
        .count() as u64
}

type VertexFilter<'a> = Box<dyn Fn(u32) -> bool + 'a>;

fn eroded_filter<T: Real>(graph: &GeomGraph<T>, k: usize, mode: CensusMode) -> Option<VertexFilter<'_>> {
    let window = graph.config().window();
    if mode == CensusMode::Raw || window.is_torus() {
        return None;
    }
    let shape = graph.shape();
    let margin = T::from_usize_lossy(k) * shape.circumradius();
    match window.eroded(margin) {
        Some(inner) => Some(Box::new(move |v| inner.contains(graph.config().point(v as usize)))),
        None => Some(Box::new(|_| false)),
    }
}

/// Component counts by size and, up to `depth` vertices, by isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentCensus {
    pub counts_by_size: BTreeMap<usize, u64>,
    pub counts_by_isoclass: BTreeMap<CanonicalCode, u64>,
    pub total_components: u64,
    pub depth: usize,
}

pub fn census<T: Real>(graph: &GeomGraph<T>, depth: usize, mode: CensusMode) -> ComponentCensus {
    let depth = depth.min(MAX_K);
    let comps = graph.components();
    let keep = eroded_filter(graph, depth.max(1), mode);
    let mut out = ComponentCensus { depth, ..Default::default() };
    for c in 0..comps.count() {
        let m = comps.members(c);
        if let Some(f) = &keep {
            if !m.iter().all(|&v| f(v)) {
                continue;
            }
        }
        out.total_components += 1;
        *out.counts_by_size.entry(m.len()).or_default() += 1;
        if m.len() <= depth {
            if let Some(g) = induced_graph(graph, m) {
                *out.counts_by_isoclass.entry(canonical_form(&g)).or_default() += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;
    use crate::intensity::{PointConfig, Window};

    fn path3() -> GeomGraph<f64> {
        let w = Window::cube(2, 10.0).unwrap();
        let c = PointConfig::new(w, vec![0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 6.0, 6.0]).unwrap();
        GeomGraph::build(&c, &Shape::euclidean(1.0, 2).unwrap()).unwrap()
    }

    #[test]
    fn path_counts() {
        let g = path3();
        assert_eq!(count_f(&g, &Selector::ExactlyK(3)), 1);
        assert_eq!(count_f(&g, &Selector::ExactlyK(2)), 0);
        assert_eq!(count_f(&g, &Selector::ExactlyK(1)), 1);
        assert_eq!(count_f(&g, &Selector::AtMostK(3)), 2);
        let tri = Selector::iso_to(SmallGraph::from_upper_bits("111").unwrap()).unwrap();
        let p3 = Selector::iso_to(SmallGraph::from_upper_bits("101").unwrap()).unwrap();
        assert_eq!(count_f(&g, &tri), 0);
        assert_eq!(count_f(&g, &p3), 1);
    }

    #[test]
    fn census_totals() {
        let g = path3();
        let c = census(&g, 3, CensusMode::Raw);
        assert_eq!(c.total_components, 2);
        assert_eq!(c.counts_by_size[&3], 1);
        assert_eq!(c.counts_by_isoclass.values().sum::<u64>(), 2);
    }

    #[test]
    fn eroded_drops_boundary_components() {
        let w = Window::cube(1, 10.0).unwrap();
        let c = PointConfig::new(w, vec![-9.6, 0.0, 9.9]).unwrap();
        let g = GeomGraph::build(&c, &Shape::euclidean(0.5, 1).unwrap()).unwrap();
        assert_eq!(count_f_mode(&g, &Selector::ExactlyK(1), CensusMode::Raw), 3);
        assert_eq!(count_f_mode(&g, &Selector::ExactlyK(1), CensusMode::Eroded), 1);
    }
}
