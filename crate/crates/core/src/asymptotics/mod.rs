//! Limit constants of the sparse, thermodynamic and dense regimes, the
//! exact expectation integral, and the experiments that compare
//! simulations against them.

mod constants;
mod expectation;
mod integrand;
mod regime;

pub use constants::{
    dense_constant, sparse_constant, thermo_constant, AsymptoticsReport, ConstantKind, ConstantOptions, X1Method,
};
pub use expectation::{expected_count_exact, ExpectationEstimate, ExpectationOptions, MAX_EXACT_K};
pub use integrand::VolumeMethod;
pub use regime::{
    regime_constant, regime_experiment, strong_law_experiment, Regime, RegimeOptions, RegimeRow, RegimeSpec,
    RegimeTable, RhoRule, StrongLawRow, StrongLawTable, THERMO_DRIFT,
};
