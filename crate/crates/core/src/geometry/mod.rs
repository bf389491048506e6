//! Structuring sets, geometric graphs and volumes of translates.

mod graph;
mod grid;
mod packing;
mod shape;
mod volume;

pub use graph::{bfs_components, brute_force_adjacency, connected_components, Components, GeomGraph, UnionFind};
pub use grid::{CellIndex, MAX_DIM};
pub use packing::{packing_constant, packing_table, search_lower_bound, Packing};
pub(crate) use shape::sample_in_ball;
pub use shape::{Norm, Shape};
pub use volume::{lens_area, union_volume, union_volume_mc, VolumeEstimate};
