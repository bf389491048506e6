use crate::error::{invalid, Error, Result};

/// Largest `k` for which canonical forms are computed.
pub const MAX_K: usize = 10;

/// Graph on at most [`MAX_K`] vertices, stored as its upper triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SmallGraph {
    k: usize,
    /// Bit `pair_index(i, j)` is set iff `{i, j}` is an edge.
    bits: u64,
}

/// Bit position of pair `i < j`, ordered by `j` then `i`, so the pairs
/// among the first `p` vertices form a prefix.
#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    j * (j - 1) / 2 + i
}

impl SmallGraph {
    pub fn empty(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_K {
            return Err(Error::InvalidAdjacency(format!("graph order must lie in 1..={MAX_K}, got {k}")));
        }
        Ok(SmallGraph { k, bits: 0 })
    }

    /// From a full 0/1 matrix; rejects asymmetric input and loops.
    pub fn from_matrix(m: &[Vec<u8>]) -> Result<Self> {
        let mut g = Self::empty(m.len())?;
        for (i, row) in m.iter().enumerate() {
            if row.len() != m.len() {
                return Err(Error::InvalidAdjacency("matrix is not square".into()));
            }
            if row[i] != 0 {
                return Err(Error::InvalidAdjacency(format!("nonzero diagonal at {i}")));
            }
            for (j, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(Error::InvalidAdjacency(format!("entry ({i}, {j}) is not 0/1")));
                }
                if v != m[j][i] {
                    return Err(Error::InvalidAdjacency(format!("asymmetric at ({i}, {j})")));
                }
                if v == 1 && i < j {
                    g.set_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    /// From the row-major upper triangle `a01 a02 … a0(k-1) a12 …` given
    /// as a string of `0`/`1`, e.g. `"101"` for the path `1 - 0 - 2`.
    pub fn from_upper_bits(s: &str) -> Result<Self> {
        let s: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let k = (1..=MAX_K)
            .find(|k| k * (k - 1) / 2 == s.len())
            .ok_or_else(|| Error::InvalidAdjacency(format!("{} bits is not k(k-1)/2 for k <= {MAX_K}", s.len())))?;
        let mut g = Self::empty(k)?;
        let mut pos = 0;
        for i in 0..k {
            for j in i + 1..k {
                match s[pos] {
                    '1' => g.set_edge(i, j),
                    '0' => {}
                    c => return Err(Error::InvalidAdjacency(format!("unexpected character {c:?}"))),
                }
                pos += 1;
            }
        }
        Ok(g)
    }

    /// Induced graph on `k` vertices given an edge predicate.
    pub fn from_fn(k: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut g = Self::empty(k)?;
        for j in 1..k {
            for i in 0..j {
                if edge(i, j) {
                    g.set_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn set_edge(&mut self, i: usize, j: usize) {
        self.bits |= 1 << pair_index(i, j);
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.bits >> pair_index(i, j) & 1 == 1
    }

    pub fn edge_count(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.k).filter(|&u| self.has_edge(u, v)).count()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = 1u32;
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            for u in 0..self.k {
                if seen >> u & 1 == 0 && self.has_edge(u, v) {
                    seen |= 1 << u;
                    stack.push(u);
                }
            }
        }
        seen.count_ones() as usize == self.k
    }

    /// Sorted degree sequence, descending.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.k).map(|v| self.degree(v)).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }
}

/// Isomorphism-invariant code of a [`SmallGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    pub k: u8,
    /// Upper-triangle bits of the minimising relabelling, first pair in
    /// the most significant position.
    pub code: u64,
}

/// Minimum upper-triangle bit string over all relabellings that list the
/// vertices by nonincreasing degree. Equal codes ⇔ isomorphic graphs.
pub fn canonical_form(g: &SmallGraph) -> CanonicalCode {
    let k = g.k;
    let m = k * (k - 1) / 2;
    let deg: Vec<usize> = (0..k).map(|v| g.degree(v)).collect();
    let mut target = deg.clone();
    target.sort_unstable_by(|a, b| b.cmp(a));
    let mut search = Search { g, k, m, deg, target, perm: Vec::with_capacity(k), used: 0, best: None };
    search.descend(0);
    CanonicalCode { k: k as u8, code: search.best.unwrap_or(0) }
}

/// Validating form of [`canonical_form`] for a raw matrix.
pub fn canonical_form_matrix(m: &[Vec<u8>]) -> Result<CanonicalCode> {
    Ok(canonical_form(&SmallGraph::from_matrix(m)?))
}

struct Search<'a> {
    g: &'a SmallGraph,
    k: usize,
    m: usize,
    deg: Vec<usize>,
    target: Vec<usize>,
    perm: Vec<usize>,
    used: u32,
    best: Option<u64>,
}

impl Search<'_> {
    /// Code bits for positions `0..p` (pairs with larger index unset).
    fn prefix(&self, p: usize) -> u64 {
        let mut code = 0u64;
        for j in 1..p {
            for i in 0..j {
                if self.g.has_edge(self.perm[i], self.perm[j]) {
                    code |= 1 << (self.m - 1 - pair_index(i, j));
                }
            }
        }
        code
    }

    fn descend(&mut self, p: usize) {
        if p >= 2 {
            let len = p * (p - 1) / 2;
            let shift = self.m - len;
            let cur = self.prefix(p) >> shift;
            if let Some(b) = self.best {
                let bp = b >> shift;
                if cur > bp {
                    return;
                }
                if cur < bp && p < self.k {
                    // strictly better prefix: any completion beats the best
                    self.best = None;
                }
            }
        }
        if p == self.k {
            let code = self.prefix(p);
            if self.best.is_none_or(|b| code < b) {
                self.best = Some(code);
            }
            return;
        }
        for v in 0..self.k {
            if self.used >> v & 1 == 0 && self.deg[v] == self.target[p] {
                self.used |= 1 << v;
                self.perm.push(v);
                self.descend(p + 1);
                self.perm.pop();
                self.used &= !(1 << v);
            }
        }
    }
}

/// Admissible family `A` of component vertex sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    /// `|x| ≤ k`.
    AtMostK(usize),
    /// `|x| = k`.
    ExactlyK(usize),
    /// `G_S(x) ≅ H` for a connected `H`.
    IsoToH { h: SmallGraph, code: CanonicalCode },
    /// `A = ∅` on `k` vertices.
    Empty(usize),
}

impl Selector {
    pub fn at_most(k: usize) -> Result<Self> {
        check_k(k)?;
        Ok(Selector::AtMostK(k))
    }

    pub fn exactly(k: usize) -> Result<Self> {
        check_k(k)?;
        Ok(Selector::ExactlyK(k))
    }

    pub fn empty(k: usize) -> Result<Self> {
        check_k(k)?;
        Ok(Selector::Empty(k))
    }

    pub fn iso_to(h: SmallGraph) -> Result<Self> {
        if !h.is_connected() {
            return Err(Error::InvalidAdjacency("H must be connected".into()));
        }
        Ok(Selector::IsoToH { h, code: canonical_form(&h) })
    }

    pub fn k(&self) -> usize {
        match self {
            Selector::AtMostK(k) | Selector::ExactlyK(k) | Selector::Empty(k) => *k,
            Selector::IsoToH { h, .. } => h.order(),
        }
    }

    /// `Some(k)` when every selected set has exactly `k` vertices.
    pub fn fixed_k(&self) -> Option<usize> {
        match self {
            Selector::AtMostK(_) => None,
            _ => Some(self.k()),
        }
    }

    /// Whether a vertex set of size `size` with induced adjacency `edge`
    /// lies in `A`; `edge` is only queried for isomorphism tests.
    pub fn selects(&self, size: usize, edge: impl FnMut(usize, usize) -> bool) -> bool {
        match self {
            Selector::AtMostK(k) => size >= 1 && size <= *k,
            Selector::ExactlyK(k) => size == *k,
            Selector::Empty(_) => false,
            Selector::IsoToH { h, code } => {
                if size != h.order() {
                    return false;
                }
                let Ok(g) = SmallGraph::from_fn(size, edge) else { return false };
                g.edge_count() == h.edge_count() && canonical_form(&g) == *code
            }
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(invalid(format!("selector k must lie in 1..={MAX_K}, got {k}")));
    }
    Ok(())
}
