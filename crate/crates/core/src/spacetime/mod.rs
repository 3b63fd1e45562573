//! Spacetime metric adapters and the extraction of null-frame and
//! maximal-slice data.

pub mod adapter;
pub mod cone;
pub mod fd;
pub mod slice;

pub use adapter::{AdapterSpec, MetricAdapter, Point};
pub use cone::{ConeDerivs, ConeState, EfCones, FoliationType};
pub use fd::FdOracle;
pub use slice::{SliceReport, SliceState};
