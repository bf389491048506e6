use super::Selector;
use crate::error::{invalid, Error, Result};
use crate::geometry::GeomGraph;
use crate::scalar::{factorial, Real};

/// Default largest component in which connected `k`-subsets are enumerated.
pub const DEFAULT_U_CAP: usize = 40;

/// `U_S^A`: ordered `k`-tuples of distinct points whose induced graph is
/// connected and in `A`, i.e. `k!` times the number of such vertex sets.
///
/// `k ≤ 2` is counted from vertex and edge totals; larger `k` enumerates
/// connected induced subgraphs inside each component, which must have at
/// most `cap` vertices.
pub fn count_u<T: Real>(graph: &GeomGraph<T>, selector: &Selector, cap: usize) -> Result<u64> {
    let k = selector.fixed_k().ok_or_else(|| invalid("U-statistic needs a selector of fixed size"))?;
    if matches!(selector, Selector::Empty(_)) {
        return Ok(0);
    }
    let kf = factorial(k);
    match k {
        1 => return Ok(graph.vertex_count() as u64),
        2 => return Ok(2 * graph.edge_count() as u64),
        _ => {}
    }
    let comps = graph.components();
    let mut sets = 0u64;
    for c in 0..comps.count() {
        let m = comps.members(c);
        if m.len() < k {
            continue;
        }
        if m.len() > cap {
            return Err(Error::UEnumerationInfeasible { size: m.len(), cap });
        }
        enumerate_connected(graph, m, k, &mut |set: &[u32]| {
            if selector.selects(k, |i, j| graph.has_edge(set[i] as usize, set[j] as usize)) {
                sets += 1;
            }
        });
    }
    Ok(sets * kf)
}

/// ESU enumeration: every connected induced `k`-subset of the component
/// `members` is reported exactly once.
fn enumerate_connected<T: Real>(graph: &GeomGraph<T>, members: &[u32], k: usize, visit: &mut dyn FnMut(&[u32])) {
    let mut sub = Vec::with_capacity(k);
    for &v in members {
        sub.clear();
        sub.push(v);
        let ext: Vec<u32> = graph.neighbors(v as usize).iter().copied().filter(|&u| u > v).collect();
        extend(graph, &mut sub, ext, v, k, visit);
    }
}

fn extend<T: Real>(
    graph: &GeomGraph<T>,
    sub: &mut Vec<u32>,
    mut ext: Vec<u32>,
    root: u32,
    k: usize,
    visit: &mut dyn FnMut(&[u32]),
) {
    if sub.len() == k {
        visit(sub);
        return;
    }
    while let Some(w) = ext.pop() {
        // exclusive neighbours of w: above root, not in or adjacent to sub
        let mut next = ext.clone();
        for &u in graph.neighbors(w as usize) {
            if u > root
                && !sub.contains(&u)
                && !next.contains(&u)
                && u != w
                && !sub.iter().any(|&s| graph.has_edge(s as usize, u as usize))
            {
                next.push(u);
            }
        }
        sub.push(w);
        extend(graph, sub, next, root, k, visit);
        sub.pop();
    }
}
