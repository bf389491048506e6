use std::collections::HashMap;

use crate::error::{invalid, Result};
use crate::intensity::Window;
use crate::scalar::Real;

/// Largest dimension supported by the cell index.
pub const MAX_DIM: usize = 4;

pub(crate) type CellKey = [i64; MAX_DIM];

/// Uniform grid over a window with cells of side at least `cell`. Points are
/// stored sorted by cell; `cells` maps a key to its range in `order`.
#[derive(Debug, Clone)]
pub struct CellIndex<T> {
    window: Window<T>,
    origin: Vec<T>,
    side: Vec<T>,
    /// Cells per axis on a torus; `None` for open windows.
    wrap: Option<Vec<i64>>,
    cells: HashMap<CellKey, (u32, u32)>,
    order: Vec<u32>,
}

impl<T: Real> CellIndex<T> {
    pub fn build(window: &Window<T>, coords: &[T], cell: T) -> Result<Self> {
        let d = window.dim();
        if d > MAX_DIM {
            return Err(invalid(format!("dimension {d} exceeds the supported maximum {MAX_DIM}")));
        }
        if !(cell > T::zero()) {
            return Err(invalid("grid cell side must be positive"));
        }
        let (lo, _) = window.bounds();
        let (side, wrap) = if window.is_torus() {
            let mut side = Vec::with_capacity(d);
            let mut counts = Vec::with_capacity(d);
            for a in 0..d {
                let l = window.period(a);
                let n = (l / cell).floor().to_i64().unwrap_or(1).max(1);
                counts.push(n);
                side.push(l / T::lit(n as f64));
            }
            (side, Some(counts))
        } else {
            (vec![cell; d], None)
        };
        let mut index =
            CellIndex { window: window.clone(), origin: lo, side, wrap, cells: HashMap::new(), order: Vec::new() };
        let n = coords.len() / d.max(1);
        let mut keyed: Vec<(CellKey, u32)> =
            (0..n).map(|i| (index.key(&coords[i * d..(i + 1) * d]), i as u32)).collect();
        keyed.sort_unstable();
        let mut start = 0usize;
        while start < keyed.len() {
            let key = keyed[start].0;
            let mut end = start;
            while end < keyed.len() && keyed[end].0 == key {
                end += 1;
            }
            index.cells.insert(key, (start as u32, end as u32));
            start = end;
        }
        index.order = keyed.into_iter().map(|(_, i)| i).collect();
        Ok(index)
    }

    /// Cell key of an arbitrary point.
    pub(crate) fn key(&self, x: &[T]) -> CellKey {
        let mut key = [0i64; MAX_DIM];
        for (a, k) in key.iter_mut().enumerate().take(x.len()) {
            let mut c = ((x[a] - self.origin[a]) / self.side[a]).floor().to_i64().unwrap_or(0);
            if let Some(counts) = &self.wrap {
                c = c.rem_euclid(counts[a]);
            }
            *k = c;
        }
        key
    }

    /// Calls `f` with every stored point index in the `3^d` cells around
    /// `x` (each index once, even when a small torus aliases cells).
    pub fn for_each_candidate(&self, x: &[T], mut f: impl FnMut(u32)) {
        let d = x.len();
        let centre = self.key(x);
        let mut seen: Vec<CellKey> = Vec::with_capacity(3usize.pow(d as u32));
        let total = 3usize.pow(d as u32);
        for code in 0..total {
            let mut key = centre;
            let mut rem = code;
            for (a, k) in key.iter_mut().enumerate().take(d) {
                let off = (rem % 3) as i64 - 1;
                rem /= 3;
                *k += off;
                if let Some(counts) = &self.wrap {
                    *k = k.rem_euclid(counts[a]);
                }
            }
            if self.wrap.is_some() {
                if seen.contains(&key) {
                    continue;
                }
                seen.push(key);
            }
            if let Some(&(s, e)) = self.cells.get(&key) {
                for &i in &self.order[s as usize..e as usize] {
                    f(i);
                }
            }
        }
    }

    pub fn window(&self) -> &Window<T> {
        &self.window
    }

    pub fn occupied_cells(&self) -> usize {
        self.cells.len()
    }
}
