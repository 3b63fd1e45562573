//! Numerical machinery for double-null foliation geometry: spectral
//! calculus on 2-spheres, Hodge systems, null-frame extraction from
//! analytic spacetimes, structure/Bianchi residual evaluation,
//! Bel-Robinson diagnostics, the canonical-foliation fixed point and
//! global harmonic coordinates on 3-disks.

pub mod error;
pub mod frame_change;
pub mod hodge;
pub mod num;
pub mod residuals;
pub mod spacetime;
pub mod sphere;

pub use error::{Error, Result};
