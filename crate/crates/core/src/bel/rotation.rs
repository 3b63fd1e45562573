//! Approximate Killing rotation vectorfields built from Cartesian
//! boundary functions, with their coefficients `H`, `Y`, `P_O` and the
//! second-derivative decomposition residual.

use crate::error::{Error, Result};
use crate::sphere::calculus::{grad, trace_two_tensor};
use crate::sphere::norms::{self, NormKind};
use crate::sphere::{GridRef, SphereField, SphereMetric};

/// The three rotation fields and their coefficients on one sphere.
pub struct RotationFields {
    /// `O^(l)` as 1-forms (indices lowered with the sphere metric).
    pub fields: [SphereField; 3],
    /// Symmetrized gradients `H_ab = grad_a O_b + grad_b O_a`.
    pub h: [SphereField; 3],
    /// `P_O` third-order defects (rank 3).
    pub p: [SphereField; 3],
}

/// Cartesian functions on the sphere: `x^i` with `sum (x^i)^2 = r^2`.
/// On a round-reference sphere these are `r` times the embedding
/// directions.
pub fn cartesian_functions(grid: &GridRef, radius: f64) -> [SphereField; 3] {
    let x1 = SphereField::scalar_from_fn(grid, |t, p| radius * t.sin() * p.cos());
    let x2 = SphereField::scalar_from_fn(grid, |t, p| radius * t.sin() * p.sin());
    let x3 = SphereField::scalar_from_fn(grid, |t, _| radius * t.cos());
    [x1, x2, x3]
}

/// Builds the rotation fields `O^(1) = x^2 grad x^3 - x^3 grad x^2` (and
/// cyclic) together with `H` and `P_O`.
pub fn rotation_fields(metric: &SphereMetric, xs: &[SphereField; 3]) -> Result<RotationFields> {
    let r = metric.area_radius();
    // normalization check: sum (x^i)^2 = r^2
    let grid = metric.grid();
    for i in 0..grid.n_nodes() {
        let s2: f64 = xs.iter().map(|x| x.comp(0)[i].re.powi(2)).sum();
        if (s2 - r * r).abs() > 1e-6 * r * r {
            return Err(Error::InvalidParameter(format!(
                "cartesian functions not normalized: sum x^2 = {s2} vs r^2 = {}",
                r * r
            )));
        }
    }
    let gx: Vec<SphereField> =
        xs.iter().map(|x| grad(metric, x)).collect::<Result<Vec<_>>>()?;
    let build = |a: usize, b: usize| -> SphereField {
        gx[b].mul_scalar_field(&xs[a]).sub(&gx[a].mul_scalar_field(&xs[b]))
    };
    let fields = [build(1, 2), build(2, 0), build(0, 1)];
    let mut h = Vec::with_capacity(3);
    let mut p = Vec::with_capacity(3);
    for o in &fields {
        let d = metric.covariant_derivative(o)?;
        h.push(d.add(&d.permute_slots(&[1, 0])));
        let dd = metric.covariant_derivative(&d)?; // (a, b, c) = grad_a grad_b O_c
        // P_abc = grad2_{ab} O_c - r^-2 O_b gh_ac + r^-2 O_c gh_ab
        let gh = metric.tensor();
        let term2 = gh.outer(o).permute_slots(&[0, 2, 1]); // gh_ac O_b -> slots (a,b,c)
        let term3 = gh.outer(o); // gh_ab O_c
        p.push(
            dd.sub(&term2.scale(1.0 / (r * r)))
                .add(&term3.scale(1.0 / (r * r))),
        );
    }
    Ok(RotationFields {
        fields,
        h: [h.remove(0), h.remove(0), h.remove(0)],
        p: [p.remove(0), p.remove(0), p.remove(0)],
    })
}

/// Report for the rotation-field identities on one sphere.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RotationReport {
    pub h_linf: f64,
    pub h_l2: f64,
    pub p_linf: f64,
    pub max_speed_ratio: f64,
    pub trace_h_linf: f64,
}

pub fn rotation_report(metric: &SphereMetric, rot: &RotationFields) -> Result<RotationReport> {
    let r = metric.area_radius();
    let mut h_linf = 0.0f64;
    let mut h_l2 = 0.0f64;
    let mut p_linf = 0.0f64;
    let mut speed = 0.0f64;
    let mut tr_h = 0.0f64;
    for k in 0..3 {
        h_linf = h_linf.max(norms::norm(&rot.h[k], metric, NormKind::Linf)?);
        h_l2 = h_l2.max(norms::norm(&rot.h[k], metric, NormKind::L2)?);
        p_linf = p_linf.max(norms::norm(&rot.p[k], metric, NormKind::Linf)?);
        let n2 = metric.norm_sqr_at_nodes(&rot.fields[k]);
        speed = speed.max(n2.iter().fold(0.0f64, |a, b| a.max(*b)).sqrt() / r);
        tr_h = tr_h.max(trace_two_tensor(metric, &rot.h[k]).max_abs());
    }
    Ok(RotationReport {
        h_linf,
        h_l2,
        p_linf,
        max_speed_ratio: speed,
        trace_h_linf: tr_h,
    })
}
