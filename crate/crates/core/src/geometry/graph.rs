use rayon::prelude::*;

use super::{CellIndex, Shape};
use crate::error::{invalid, Error, Result};
use crate::intensity::PointConfig;
use crate::scalar::Real;

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = self.parent[x as usize];
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }
}

/// Component partition: ids follow the order of each component's lowest
/// vertex; `members` lists vertices of component `c` in
/// `members[offsets[c]..offsets[c + 1]]`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub component_id: Vec<u32>,
    pub sizes: Vec<usize>,
    offsets: Vec<usize>,
    members: Vec<u32>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn members(&self, c: usize) -> &[u32] {
        &self.members[self.offsets[c]..self.offsets[c + 1]]
    }

    fn from_labels(labels: &[u32]) -> Self {
        // relabel roots by first appearance
        let n = labels.len();
        let mut map = vec![u32::MAX; n];
        let mut component_id = Vec::with_capacity(n);
        let mut sizes = Vec::new();
        for &l in labels {
            if map[l as usize] == u32::MAX {
                map[l as usize] = sizes.len() as u32;
                sizes.push(0);
            }
            let c = map[l as usize];
            sizes[c as usize] += 1;
            component_id.push(c);
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        offsets.push(0);
        for &s in &sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        let mut fill = offsets.clone();
        let mut members = vec![0u32; n];
        for (v, &c) in component_id.iter().enumerate() {
            members[fill[c as usize]] = v as u32;
            fill[c as usize] += 1;
        }
        Components { component_id, sizes, offsets, members }
    }
}

/// The geometric graph `G_S(ξ)`: an edge joins `x ≠ y` whenever `x − y ∈ S`.
#[derive(Debug, Clone)]
pub struct GeomGraph<T> {
    config: PointConfig<T>,
    shape: Shape<T>,
    index: CellIndex<T>,
    adj_offsets: Vec<usize>,
    adj: Vec<u32>,
    components: Components,
}

impl<T: Real> GeomGraph<T> {
    pub fn build(config: &PointConfig<T>, shape: &Shape<T>) -> Result<Self> {
        shape.validate()?;
        if shape.dim != config.dim() {
            return Err(invalid(format!(
                "shape dimension {} does not match configuration dimension {}",
                shape.dim,
                config.dim()
            )));
        }
        let n = config.len();
        if n > i32::MAX as usize {
            return Err(Error::ConfigTooLarge(n));
        }
        let index = CellIndex::build(config.window(), config.coords(), shape.circumradius())?;
        let lists: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut nb = neighbours(&index, config, shape, config.point(i), Some(i as u32));
                nb.sort_unstable();
                nb
            })
            .collect();
        let mut adj_offsets = Vec::with_capacity(n + 1);
        adj_offsets.push(0);
        for l in &lists {
            adj_offsets.push(adj_offsets.last().unwrap() + l.len());
        }
        let adj: Vec<u32> = lists.into_iter().flatten().collect();
        let mut uf = UnionFind::new(n);
        for i in 0..n {
            for &j in &adj[adj_offsets[i]..adj_offsets[i + 1]] {
                if (j as usize) > i {
                    uf.union(i as u32, j);
                }
            }
        }
        let labels: Vec<u32> = (0..n as u32).map(|i| uf.find(i)).collect();
        let components = Components::from_labels(&labels);
        Ok(GeomGraph { config: config.clone(), shape: shape.clone(), index, adj_offsets, adj, components })
    }

    pub fn config(&self) -> &PointConfig<T> {
        &self.config
    }

    pub fn shape(&self) -> &Shape<T> {
        &self.shape
    }

    pub fn vertex_count(&self) -> usize {
        self.config.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    /// Sorted neighbours of vertex `i`.
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adj[self.adj_offsets[i]..self.adj_offsets[i + 1]]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    pub fn component_of(&self, i: usize) -> usize {
        self.components.component_id[i] as usize
    }

    /// Vertices `y` with `y − x ∈ S` for an arbitrary point `x`, unsorted.
    pub fn neighbors_of_point(&self, x: &[T]) -> Vec<u32> {
        neighbours(&self.index, &self.config, &self.shape, x, None)
    }
}

fn neighbours<T: Real>(
    index: &CellIndex<T>,
    config: &PointConfig<T>,
    shape: &Shape<T>,
    x: &[T],
    skip: Option<u32>,
) -> Vec<u32> {
    let window = config.window();
    let mut diff = vec![T::zero(); x.len()];
    let mut out = Vec::new();
    index.for_each_candidate(x, |j| {
        if Some(j) == skip {
            return;
        }
        window.displacement(x, config.point(j as usize), &mut diff);
        if shape.contains(&diff) {
            out.push(j);
        }
    });
    out
}

/// Connected components of `graph` (union-find over its edges).
pub fn connected_components<T: Real>(graph: &GeomGraph<T>) -> &Components {
    graph.components()
}

/// `O(n²)` reference adjacency.
pub fn brute_force_adjacency<T: Real>(config: &PointConfig<T>, shape: &Shape<T>) -> Vec<Vec<u32>> {
    let n = config.len();
    let window = config.window();
    let mut diff = vec![T::zero(); config.dim()];
    let mut adj = vec![Vec::new(); n];
    for (i, row) in adj.iter_mut().enumerate() {
        for j in 0..n {
            if i != j {
                window.displacement(config.point(i), config.point(j), &mut diff);
                if shape.contains(&diff) {
                    row.push(j as u32);
                }
            }
        }
    }
    adj
}

/// Component labels by breadth-first search over an adjacency list,
/// numbered in order of first vertex.
pub fn bfs_components(adj: &[Vec<u32>]) -> Vec<u32> {
    let n = adj.len();
    let mut label = vec![u32::MAX; n];
    let mut next = 0;
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        if label[s] != u32::MAX {
            continue;
        }
        label[s] = next;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if label[w as usize] == u32::MAX {
                    label[w as usize] = next;
                    queue.push_back(w as usize);
                }
            }
        }
        next += 1;
    }
    label
}
