//! Intensity measures, windows and Poisson sampling.

mod config;
mod measures;
mod model;
mod sampler;
mod window;

pub use config::{PointConfig, Provenance};
pub use measures::{sigma_s, translate_mass, validate_integrability, IntegrabilityDiagnostic, Sigma, Verdict};
pub use model::{CustomDensity, Density, IntensityModel, SearchBox};
pub use sampler::{sample_poisson, ThinningSampler};
pub use window::{Window, WindowKind};
