//! RK4 transport of the metric and connection coefficients along the
//! outgoing null direction, with curvature sourced from the adapter
//! family; the endpoint is compared against direct extraction.
//!
//! Evolved system (geodesic outgoing foliation, so `xi = omega = 0`,
//! `eta = zeta`, `etab = -zeta`):
//!
//! ```text
//!   D4 trchi  = -(trchi)^2/2 - |chihat|^2
//!   D4 chihat = -trchi chihat - alpha
//!   D4 zeta   = -trchi zeta - 2 chihat.zeta - beta
//!   D4 trchib = -(trchi trchib)/2 + 2 div zeta - chihat.chibhat
//!               + 2|zeta|^2 + 2 rho
//!   D4 chibhat = -(trchi/2) chibhat - grad-hat zeta - (trchib/2) chihat
//!                + zeta hat zeta
//!   D4 omegab = 3|zeta|^2 + rho
//!   D4 y      = -4 omegab
//!   Lie_4 gh  = 2 chi
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spacetime::cone::ConeFamily;
use crate::spacetime::FoliationType;
use crate::sphere::calculus::{div, dot, dot_tensor_vector, dot_two_tensors, grad_hat, hat_product};
use crate::sphere::norms::average;
use crate::sphere::{GridRef, SphereField, SphereMetric};

const CAUSTIC_THRESHOLD: f64 = 50.0;

#[derive(Clone)]
struct TransportState {
    radius: f64,
    h: SphereField,
    trchi: SphereField,
    chihat: SphereField,
    zeta: SphereField,
    trchib: SphereField,
    chibhat: SphereField,
    omegab: SphereField,
    defect: SphereField,
}

impl TransportState {
    fn axpy(&self, a: f64, rhs: &TransportState) -> TransportState {
        TransportState {
            radius: self.radius + a * rhs.radius,
            h: self.h.add(&rhs.h.scale(a)),
            trchi: self.trchi.add(&rhs.trchi.scale(a)),
            chihat: self.chihat.add(&rhs.chihat.scale(a)),
            zeta: self.zeta.add(&rhs.zeta.scale(a)),
            trchib: self.trchib.add(&rhs.trchib.scale(a)),
            chibhat: self.chibhat.add(&rhs.chibhat.scale(a)),
            omegab: self.omegab.add(&rhs.omegab.scale(a)),
            defect: self.defect.add(&rhs.defect.scale(a)),
        }
    }

    fn metric(&self) -> Result<SphereMetric> {
        SphereMetric::perturbed(self.radius, &self.h)
    }
}

/// Curvature sources along the integration path.
pub struct SourceSamples {
    pub alpha: SphereField,
    pub beta: SphereField,
    pub rho: SphereField,
    pub chibhat_coupling: Option<SphereField>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportReport {
    pub steps: usize,
    pub u: f64,
    pub ubar_start: f64,
    pub ubar_end: f64,
    /// Sup-norm endpoint mismatches against direct extraction.
    pub trchi_error: f64,
    pub trchib_error: f64,
    pub chihat_error: f64,
    pub zeta_error: f64,
    pub omegab_error: f64,
    pub radius_error: f64,
}

/// Integrates the transport system from `ubar_start` to `ubar_end` and
/// compares the endpoint with direct extraction from the family.
pub fn integrate_cone(
    family: &dyn ConeFamily,
    grid: &GridRef,
    u: f64,
    ubar_start: f64,
    ubar_end: f64,
    steps: usize,
) -> Result<TransportReport> {
    assert!(matches!(family.foliation(), FoliationType::OutgoingGeodesic));
    let initial = family.extract(grid, u, ubar_start)?;
    let mut state = TransportState {
        radius: initial.metric.scale_radius(),
        h: initial.metric.perturbation().clone(),
        trchi: initial.trchi.clone(),
        chihat: initial.chihat.clone(),
        zeta: initial.zeta.clone(),
        trchib: initial.trchib.clone(),
        chibhat: initial.chibhat.clone(),
        omegab: initial.omegab.clone(),
        defect: initial.optical_defect.clone(),
    };

    let dt = (ubar_end - ubar_start) / steps as f64;
    for step in 0..steps {
        let ub = ubar_start + step as f64 * dt;
        let k1 = rhs(family, grid, u, ub, &state)?;
        let k2 = rhs(family, grid, u, ub + 0.5 * dt, &state.axpy(0.5 * dt, &k1))?;
        let k3 = rhs(family, grid, u, ub + 0.5 * dt, &state.axpy(0.5 * dt, &k2))?;
        let k4 = rhs(family, grid, u, ub + dt, &state.axpy(dt, &k3))?;
        state = state
            .axpy(dt / 6.0, &k1)
            .axpy(dt / 3.0, &k2)
            .axpy(dt / 3.0, &k3)
            .axpy(dt / 6.0, &k4);
        let g = state.metric()?;
        let caustic = g.area_radius() * state.trchib.max_abs();
        if caustic > CAUSTIC_THRESHOLD {
            return Err(Error::CausticDetected(caustic));
        }
    }

    let target = family.extract(grid, u, ubar_end)?;
    Ok(TransportReport {
        steps,
        u,
        ubar_start,
        ubar_end,
        trchi_error: state.trchi.sub(&target.trchi).max_abs(),
        trchib_error: state.trchib.sub(&target.trchib).max_abs(),
        chihat_error: state.chihat.sub(&target.chihat).max_abs(),
        zeta_error: state.zeta.sub(&target.zeta).max_abs(),
        omegab_error: state.omegab.sub(&target.omegab).max_abs(),
        radius_error: (state.radius - target.metric.scale_radius()).abs(),
    })
}

/// d/dubar of the transport state: `d_ub = D4/2` on scalars, with dyad
/// drift and chi-contraction corrections on tensors.
fn rhs(
    family: &dyn ConeFamily,
    grid: &GridRef,
    u: f64,
    ubar: f64,
    state: &TransportState,
) -> Result<TransportState> {
    let g = state.metric()?;
    let src = {
        let s = family.extract(grid, u, ubar)?;
        SourceSamples {
            alpha: s.alpha,
            beta: s.beta,
            rho: s.rho,
            chibhat_coupling: None,
        }
    };
    let chi_full = g.tensor().mul_scalar_field(&state.trchi).scale(0.5).add(&state.chihat);
    let zeta_sq = dot(&g, &state.zeta, &state.zeta);

    // D4 values from the structure equations.
    let d4_trchi = state
        .trchi
        .mul_scalar_field(&state.trchi)
        .scale(-0.5)
        .sub(&dot_two_tensors(&g, &state.chihat, &state.chihat));
    let d4_chihat = state.chihat.mul_scalar_field(&state.trchi).scale(-1.0).sub(&src.alpha);
    let d4_zeta = state
        .zeta
        .mul_scalar_field(&state.trchi)
        .scale(-1.0)
        .sub(&dot_tensor_vector(&g, &state.chihat, &state.zeta).scale(2.0))
        .sub(&src.beta);
    let d4_trchib = state
        .trchi
        .mul_scalar_field(&state.trchib)
        .scale(-0.5)
        .add(&div(&g, &state.zeta)?.scale(2.0))
        .sub(&dot_two_tensors(&g, &state.chihat, &state.chibhat))
        .add(&zeta_sq.scale(2.0))
        .add(&src.rho.scale(2.0));
    let d4_chibhat = state
        .chibhat
        .mul_scalar_field(&state.trchi)
        .scale(-0.5)
        .sub(&grad_hat(&g, &state.zeta)?)
        .sub(&state.chihat.mul_scalar_field(&state.trchib).scale(0.5))
        .add(&hat_product(&g, &state.zeta, &state.zeta));
    let d4_omegab = zeta_sq.scale(3.0).add(&src.rho);
    let d4_defect = state.omegab.scale(-4.0);

    // Radius split: d r / d ub = (r/4) avg(trchi) (area transport / 2).
    let trchi_bar = average(&state.trchi, &g);
    let dr = 0.25 * state.radius * trchi_bar;

    // Metric perturbation: d h = chi_dyad - (2 dr / r)(delta + h).
    let dh = chi_full.sub(&g.tensor().scale(2.0 * dr / state.radius));

    // Tensor components: d T = (D4 T)/2 - (k/2)(l(r)/r) T
    //   + (1/2) sum chi-contractions.
    let l_r = 2.0 * dr;
    let to_dubar = |d4: &SphereField, field: &SphereField| -> SphereField {
        let rank = field.rank();
        let mut out = d4.scale(0.5);
        if rank > 0 {
            out = out.sub(&field.scale(0.5 * rank as f64 * l_r / state.radius));
            for slot in 0..rank {
                let corr = g.contract(&chi_full, 1, field, slot);
                let mut perm = Vec::with_capacity(rank);
                let mut rest = 1usize;
                for i in 0..rank {
                    if i == slot {
                        perm.push(0);
                    } else {
                        perm.push(rest);
                        rest += 1;
                    }
                }
                out = out.add(&corr.permute_slots(&perm).scale(0.5));
            }
        }
        out
    };

    Ok(TransportState {
        radius: dr,
        h: dh,
        trchi: d4_trchi.scale(0.5),
        chihat: to_dubar(&d4_chihat, &state.chihat),
        zeta: to_dubar(&d4_zeta, &state.zeta),
        trchib: d4_trchib.scale(0.5),
        chibhat: to_dubar(&d4_chibhat, &state.chibhat),
        omegab: d4_omegab.scale(0.5),
        defect: d4_defect.scale(0.5),
    })
}
