use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("window mass not finite")]
    WindowMassNotFinite,
    #[error("config too large: {0} points (limit 2^31)")]
    ConfigTooLarge(usize),
    #[error("sigma search region required")]
    SigmaSearchRegionRequired,
    #[error("duplicate point: inserted point coincides with vertex {0}")]
    DuplicatePoint(usize),
    #[error("invalid vertex index {index} (graph has {len} vertices)")]
    InvalidIndex { index: usize, len: usize },
    #[error("invalid adjacency matrix: {0}")]
    InvalidAdjacency(String),
    #[error("U enumeration infeasible: component of {size} vertices exceeds cap {cap}")]
    UEnumerationInfeasible { size: usize, cap: usize },
    #[error("use simulation estimate: exact integration supports k <= 4, got k = {0}")]
    UseSimulationEstimate(usize),
    #[error("not integrable: {0}")]
    NotIntegrable(String),
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),
    #[error("c_S not certified for {0}; a packing override is required")]
    PackingUnknown(String),
    #[error("bound violated beyond tolerance: {0}")]
    HardFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
