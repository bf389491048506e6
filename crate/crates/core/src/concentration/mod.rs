//! Concentration bounds, their constants and empirical checks.

mod analytic;
mod bounds;
mod condition;
mod tails;

pub use analytic::{
    lemma_sweep, phi, psi, psi_bound_check, psi_bound_lhs, psi_bound_rhs, psi_rearrangement_check, radical_inverse,
    SweepSummary,
};
pub use bounds::{lower_tail_bound, upper_tail_bound, wilson_interval, BoundParams, MeanSource, Z99};
pub use condition::{condition_check, ConditionRecord, MIN_CONDITION_POINTS};
pub use tails::{empirical_tails, resolve_c_s, TailOptions, TailReport, TailRow, MIN_TAIL_REPLICATIONS};
