//! Residual evaluators for the null structure, Bianchi, commutation and
//! averaged equations, plus the cone transport integrator.
//!
//! Every evaluator computes `LHS - RHS` of one displayed equation as a
//! sphere field and wraps it in a [`ResidualReport`] with L2 / Linf /
//! fractional norms. On exact solutions the residuals sit at the
//! discretization floor.

pub mod averaged;
pub mod bianchi;
pub mod commutation;
pub mod probes;
pub mod structure;
pub mod transport;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sphere::norms::{self, NormKind};
use crate::sphere::{SphereField, SphereMetric};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualNorms {
    pub l2: f64,
    pub linf: f64,
    pub hhalf: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation: String,
    pub norms: ResidualNorms,
    pub band_limit: usize,
    /// Reference scale of the equation's individual terms, for relative
    /// assessment (max of LHS/RHS term norms).
    pub scale: f64,
}

impl ResidualReport {
    pub fn from_field(
        equation: &str,
        residual: &SphereField,
        metric: &SphereMetric,
        scale: f64,
    ) -> Result<Self> {
        Ok(Self {
            equation: equation.to_string(),
            norms: ResidualNorms {
                l2: norms::norm(residual, metric, NormKind::L2)?,
                linf: norms::norm(residual, metric, NormKind::Linf)?,
                hhalf: norms::norm(residual, metric, NormKind::Hhalf)?,
            },
            band_limit: metric.grid().band_limit(),
            scale,
        })
    }
}

/// Equation catalogs selectable from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationCatalog {
    Structure,
    Bianchi,
    Commutation,
    Averaged,
}
