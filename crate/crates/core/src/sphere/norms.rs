//! Norm family on sphere fields: L2, L4, Linf and the scaling-homogeneous
//! fractional norm.
//!
//! The fractional norm rescales `gh -> r^-2 gh` and applies the spectral
//! multiplier `(1 + lambda_{l,s})^{1/4}` against the round basis, with
//! `lambda_{l,s} = l(l+1) - s^2` the Bochner Laplacian eigenvalue on spin
//! weight `s`. On a k-tensor this gives `r^{(1+2k)/2}` times the unit-
//! sphere quantity, i.e. slope 1/2 in `r` for scalars and 3/2 for unit
//! 1-forms.

use serde::{Deserialize, Serialize};

use super::field::SphereField;
use super::metric::SphereMetric;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    L2,
    L4,
    Linf,
    Hhalf,
}

/// Integral of a scalar field over `(S, gh)`.
pub fn integrate(field: &SphereField, metric: &SphereMetric) -> f64 {
    metric.integrate(field)
}

/// Mean value over `(S, gh)`.
pub fn average(field: &SphereField, metric: &SphereMetric) -> f64 {
    metric.average(field)
}

pub fn norm(field: &SphereField, metric: &SphereMetric, kind: NormKind) -> Result<f64> {
    Ok(match kind {
        NormKind::L2 => {
            let n2 = metric.norm_sqr_at_nodes(field);
            n2.iter()
                .enumerate()
                .map(|(i, v)| v * metric.area_element(i))
                .sum::<f64>()
                .max(0.0)
                .sqrt()
        }
        NormKind::L4 => {
            let n2 = metric.norm_sqr_at_nodes(field);
            n2.iter()
                .enumerate()
                .map(|(i, v)| v * v * metric.area_element(i))
                .sum::<f64>()
                .max(0.0)
                .powf(0.25)
        }
        NormKind::Linf => {
            let n2 = metric.norm_sqr_at_nodes(field);
            n2.iter().fold(0.0f64, |a, b| a.max(*b)).sqrt()
        }
        NormKind::Hhalf => {
            let r = metric.area_radius();
            let k = field.rank() as i32;
            let mut spec = field.to_spectral()?;
            spec.apply_multiplier(|l, s| {
                let lam = (l as f64) * (l as f64 + 1.0) - (s as f64) * (s as f64);
                (1.0 + lam.max(0.0)).powf(0.25)
            });
            (r.powi(1 + 2 * k) * spec.l2_norm_sqr()).sqrt()
        }
    })
}

/// `sqrt( sum_{k <= max_order} || (r grad)^k F ||_{L2}^2 )`.
pub fn sobolev_l2(field: &SphereField, metric: &SphereMetric, max_order: usize) -> Result<f64> {
    let r = metric.area_radius();
    let mut total = 0.0;
    let mut current = field.clone();
    for k in 0..=max_order {
        let n = norm(&current, metric, NormKind::L2)?;
        total += n * n;
        if k < max_order {
            current = metric.covariant_derivative(&current)?.scale(r);
        }
    }
    Ok(total.sqrt())
}
