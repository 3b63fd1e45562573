//! Discretized 2-sphere: grids, spin-weighted fields, metrics, calculus
//! and norms.

pub mod calculus;
pub mod field;
pub mod grid;
pub mod metric;
pub mod norms;
pub mod spectral;

pub use field::SphereField;
pub use grid::{GridRef, SphereGrid};
pub use metric::SphereMetric;
pub use norms::NormKind;
pub use spectral::SpectralField;
