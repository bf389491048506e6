use std::collections::VecDeque;

use super::{component_selected, Selector};
use crate::error::{Error, Result};
use crate::geometry::{GeomGraph, Shape};
use crate::intensity::PointConfig;
use crate::scalar::Real;

/// `D_x F(ξ) = F(ξ + δ_x) − F(ξ)` by merging the components adjacent to `x`.
pub fn add_one_cost<T: Real>(graph: &GeomGraph<T>, selector: &Selector, x: &[T]) -> Result<i64> {
    let mut x = x.to_vec();
    graph.config().window().wrap(&mut x);
    let nbrs = graph.neighbors_of_point(&x);
    let config = graph.config();
    if let Some(&dup) = nbrs.iter().find(|&&j| config.point(j as usize) == x.as_slice()) {
        return Err(Error::DuplicatePoint(dup as usize));
    }
    let comps = graph.components();
    let mut affected: Vec<usize> = nbrs.iter().map(|&j| graph.component_of(j as usize)).collect();
    affected.sort_unstable();
    affected.dedup();
    let k = selector.k();
    let mut before = 0i64;
    let mut merged_size = 1usize;
    for &c in &affected {
        let m = comps.members(c);
        merged_size += m.len();
        if m.len() <= k && component_selected(graph, selector, m) {
            before += 1;
        }
    }
    let after = if merged_size <= k {
        // vertex list: members of affected components, then x last
        let mut verts: Vec<u32> = affected.iter().flat_map(|&c| comps.members(c).iter().copied()).collect();
        let xi = verts.len();
        verts.push(u32::MAX);
        let sel = selector.selects(merged_size, |i, j| {
            if i == xi || j == xi {
                let other = if i == xi { verts[j] } else { verts[i] };
                nbrs.contains(&other)
            } else {
                graph.has_edge(verts[i] as usize, verts[j] as usize)
            }
        });
        sel as i64
    } else {
        0
    };
    Ok(after - before)
}

/// `F(ξ) − F(ξ − δ_v) = D_v F(ξ − δ_v)` for vertex `index`.
pub fn remove_one_cost<T: Real>(graph: &GeomGraph<T>, selector: &Selector, index: usize) -> Result<i64> {
    let n = graph.vertex_count();
    if index >= n {
        return Err(Error::InvalidIndex { index, len: n });
    }
    let k = selector.k();
    let comps = graph.components();
    let own = comps.members(graph.component_of(index));
    let before = (own.len() <= k && component_selected(graph, selector, own)) as i64;
    if own.len() == 1 {
        return Ok(before);
    }
    // pieces of the component after removal; only pieces of size ≤ k matter
    let mut claimed: Vec<u32> = Vec::new();
    let mut after = 0i64;
    let mut queue = VecDeque::new();
    for &start in graph.neighbors(index) {
        if claimed.contains(&start) {
            continue;
        }
        let mut piece = vec![start];
        queue.clear();
        queue.push_back(start);
        let mut small = true;
        while let Some(v) = queue.pop_front() {
            for &w in graph.neighbors(v as usize) {
                if w as usize != index && !piece.contains(&w) {
                    piece.push(w);
                    if piece.len() > k {
                        small = false;
                        break;
                    }
                    queue.push_back(w);
                }
            }
            if !small {
                break;
            }
        }
        if small {
            piece.sort_unstable();
            if component_selected(graph, selector, &piece) {
                after += 1;
            }
            claimed.extend_from_slice(&piece);
        }
    }
    Ok(before - after)
}

/// Convenience forms that build the graph first.
pub fn add_one_cost_config<T: Real>(
    config: &PointConfig<T>,
    shape: &Shape<T>,
    selector: &Selector,
    x: &[T],
) -> Result<i64> {
    add_one_cost(&GeomGraph::build(config, shape)?, selector, x)
}

pub fn remove_one_cost_config<T: Real>(
    config: &PointConfig<T>,
    shape: &Shape<T>,
    selector: &Selector,
    index: usize,
) -> Result<i64> {
    remove_one_cost(&GeomGraph::build(config, shape)?, selector, index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intensity::Window;

    fn cfg(coords: Vec<f64>) -> PointConfig<f64> {
        PointConfig::new(Window::cube(2, 10.0).unwrap(), coords).unwrap()
    }

    #[test]
    fn add_examples() {
        let s = Shape::euclidean(1.0, 2).unwrap();
        let c = cfg(vec![0.0, 0.0, 1.5, 0.0]);
        assert_eq!(add_one_cost_config(&c, &s, &Selector::ExactlyK(1), &[5.0, 5.0]).unwrap(), 1);
        assert_eq!(add_one_cost_config(&c, &s, &Selector::ExactlyK(1), &[0.75, 0.0]).unwrap(), -2);
        assert_eq!(add_one_cost_config(&c, &s, &Selector::ExactlyK(3), &[0.75, 0.0]).unwrap(), 1);
        assert!(matches!(
            add_one_cost_config(&c, &s, &Selector::ExactlyK(1), &[0.0, 0.0]),
            Err(Error::DuplicatePoint(0))
        ));
    }

    #[test]
    fn remove_examples() {
        let s = Shape::euclidean(1.0, 2).unwrap();
        let c = cfg(vec![0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 7.0, 7.0]);
        let g = GeomGraph::build(&c, &s).unwrap();
        assert_eq!(remove_one_cost(&g, &Selector::ExactlyK(1), 3).unwrap(), 1);
        assert_eq!(remove_one_cost(&g, &Selector::ExactlyK(1), 1).unwrap(), -2);
        assert_eq!(remove_one_cost(&g, &Selector::ExactlyK(3), 1).unwrap(), 1);
        assert_eq!(remove_one_cost(&g, &Selector::ExactlyK(2), 0).unwrap(), -1);
        assert!(remove_one_cost(&g, &Selector::ExactlyK(1), 4).is_err());
    }
}
