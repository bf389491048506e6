//! Component-count functionals, selectors and difference operators.

mod census;
mod difference;
mod selector;
mod ustat;

pub use census::{census, component_selected, count_f, count_f_mode, induced_graph, CensusMode, ComponentCensus};
pub use difference::{add_one_cost, add_one_cost_config, remove_one_cost, remove_one_cost_config};
pub use selector::{canonical_form, canonical_form_matrix, CanonicalCode, Selector, SmallGraph, MAX_K};
pub use ustat::{count_u, DEFAULT_U_CAP};
