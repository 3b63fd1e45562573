//! Null decompositions of the traceless deformation tensors of the
//! approximate conformal Killing fields `T_E`, `S_E`, `K_E`, `O_E` on a
//! geodesic-foliation cone state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spacetime::{ConeState, FoliationType};
use crate::sphere::calculus::dot;
use crate::sphere::SphereField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KillingFieldTag {
    TimeTranslation,
    Scaling,
    Morawetz,
    Rotation,
}

/// Null components of the traceless deformation tensor: `n = pih_44`,
/// `nb = pih_33`, `m = pih_4a`, `mb = pih_3a`, `j = pih_34`, `i = pih_ab`,
/// plus the full trace `tr pi`.
#[derive(Debug, Clone)]
pub struct DeformationData {
    pub tag: KillingFieldTag,
    pub trace: SphereField,
    pub n: SphereField,
    pub nb: SphereField,
    pub m: SphereField,
    pub mb: SphereField,
    pub j: SphereField,
    pub i: SphereField,
}

impl DeformationData {
    /// Worst violation of `tr_gh i = j` (the trace-free consistency of
    /// the null decomposition).
    pub fn trace_consistency_defect(&self, state: &ConeState) -> f64 {
        let tr_i = crate::sphere::calculus::trace_two_tensor(&state.metric, &self.i);
        tr_i.sub(&self.j).max_abs()
    }

    pub fn max_component(&self) -> f64 {
        [
            self.n.max_abs(),
            self.nb.max_abs(),
            self.m.max_abs(),
            self.mb.max_abs(),
            self.j.max_abs(),
            self.i.max_abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Rotation coefficients needed for the `O_E` deformation tensor.
pub struct RotationCoefficients<'a> {
    pub o_field: &'a SphereField,
    pub h: &'a SphereField,
    pub y: &'a SphereField,
}

/// Evaluates the deformation tensor components of the requested
/// approximate Killing field from the cone state.
pub fn deformation_tensors(
    state: &ConeState,
    tag: KillingFieldTag,
    rotation: Option<&RotationCoefficients>,
) -> Result<DeformationData> {
    if !matches!(state.foliation, FoliationType::OutgoingGeodesic) {
        return Err(Error::InvalidParameter(
            "deformation formulas assume the outgoing geodesic foliation".into(),
        ));
    }
    let grid = state.grid();
    let g = &state.metric;
    let gh = g.tensor();
    let u = state.u;
    let ub = state.ubar;
    let zero_s = SphereField::zeros(grid, 0);
    let zero_1 = SphereField::zeros(grid, 1);
    let sum_tr = state.trchi.add(&state.trchib);
    let y = &state.optical_defect;

    let data = match tag {
        KillingFieldTag::TimeTranslation => {
            let trace = state.omegab.scale(-2.0).add(&sum_tr);
            let j = state.omegab.add(&sum_tr.scale(0.5));
            let i = gh
                .mul_scalar_field(&state.omegab)
                .scale(0.5)
                .add(&gh.mul_scalar_field(&sum_tr).scale(0.25))
                .add(&state.chihat)
                .add(&state.chibhat);
            DeformationData {
                tag,
                trace,
                n: zero_s.clone(),
                nb: state.omegab.scale(-4.0),
                m: state.zeta.scale(-2.0),
                mb: state.xib.add(&state.zeta.scale(2.0)),
                j,
                i,
            }
        }
        KillingFieldTag::Scaling => {
            let wsum = state.trchi.scale(ub).add(&state.trchib.scale(u));
            let trace = SphereField::constant(grid, 4.0)
                .add(&state.omegab.scale(-2.0 * u))
                .add(&wsum);
            let j = SphereField::constant(grid, -2.0)
                .add(&state.omegab.scale(u))
                .add(&wsum.scale(0.5));
            let i = gh
                .scale(-1.0)
                .add(&gh.mul_scalar_field(&state.omegab).scale(0.5 * u))
                .add(&gh.mul_scalar_field(&wsum).scale(0.25))
                .add(&state.chihat.scale(ub))
                .add(&state.chibhat.scale(u));
            DeformationData {
                tag,
                trace,
                n: zero_s.clone(),
                nb: y.scale(-2.0).add(&state.omegab.scale(-4.0 * ub)),
                m: state.zeta.scale(-2.0 * u),
                mb: state.xib.scale(u).add(&state.zeta.scale(2.0 * ub)),
                j,
                i,
            }
        }
        KillingFieldTag::Morawetz => {
            let wsum = state.trchi.scale(ub * ub).add(&state.trchib.scale(u * u));
            let trace = SphereField::constant(grid, 4.0 * (u + ub))
                .add(&state.omegab.scale(-2.0 * u * u))
                .add(&wsum);
            let j = SphereField::constant(grid, -2.0 * (u + ub))
                .add(&state.omegab.scale(u * u))
                .add(&wsum.scale(0.5));
            let i = gh
                .scale(-(u + ub))
                .add(&gh.mul_scalar_field(&state.omegab).scale(0.5 * u * u))
                .add(&gh.mul_scalar_field(&wsum).scale(0.25))
                .add(&state.chihat.scale(ub * ub))
                .add(&state.chibhat.scale(u * u));
            DeformationData {
                tag,
                trace,
                n: zero_s.clone(),
                nb: y.scale(-4.0 * ub).add(&state.omegab.scale(-4.0 * ub * ub)),
                m: state.zeta.scale(-2.0 * u * u),
                mb: state.xib.scale(u * u).add(&state.zeta.scale(2.0 * ub * ub)),
                j,
                i,
            }
        }
        KillingFieldTag::Rotation => {
            let rot = rotation.ok_or_else(|| {
                Error::InvalidParameter("rotation coefficients required for O_E".into())
            })?;
            let zeta_o = dot(g, &state.zeta, rot.o_field);
            let tr_h = crate::sphere::calculus::trace_two_tensor(g, rot.h);
            let trace = zeta_o.scale(2.0).add(&tr_h);
            let j = zeta_o.scale(-1.0).add(&tr_h.scale(0.5));
            let i = rot.h.sub(&gh.mul_scalar_field(&trace).scale(0.25));
            DeformationData {
                tag,
                trace,
                n: zero_s.clone(),
                nb: dot(g, &state.xib, rot.o_field).scale(-4.0),
                m: zero_1,
                mb: rot.y.clone(),
                j,
                i,
            }
        }
    };
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::EfCones;
    use crate::sphere::SphereGrid;

    #[test]
    fn minkowski_conformal_killing_deformations_vanish() {
        let grid = SphereGrid::new(8);
        let cones = EfCones::minkowski(FoliationType::OutgoingGeodesic);
        let state = cones.extract(&grid, 2.0, 10.0).unwrap();
        for tag in [
            KillingFieldTag::TimeTranslation,
            KillingFieldTag::Scaling,
            KillingFieldTag::Morawetz,
        ] {
            let d = deformation_tensors(&state, tag, None).unwrap();
            assert!(
                d.max_component() < 1e-12,
                "{tag:?}: pih component {:.3e}",
                d.max_component()
            );
            assert!(d.trace_consistency_defect(&state) < 1e-12);
        }
    }

    #[test]
    fn schwarzschild_te_j_matches_closed_form() {
        let grid = SphereGrid::new(8);
        let cones = EfCones::schwarzschild(1.0, FoliationType::OutgoingGeodesic);
        let state = cones.extract(&grid, 0.0, 20.0).unwrap();
        let d = deformation_tensors(&state, KillingFieldTag::TimeTranslation, None).unwrap();
        // j = omegab + (trchi + trchib)/2 = M/r^2 + (2/r - 2W/r)/2
        //   = M/r^2 + 2M/r^2 = 3M/r^2
        let r: f64 = 10.0;
        let expect = 3.0 / (r * r);
        assert!(
            (d.j.comp(0)[0].re - expect).abs() < 1e-12,
            "j = {} vs {expect}",
            d.j.comp(0)[0].re
        );
        assert!(d.trace_consistency_defect(&state) < 1e-12);
    }

    /// FD oracle for the T_E deformation: pi_{mu nu} = D_mu X_nu +
    /// D_nu X_mu computed in the chart for X = (l + lb)/2 and projected on
    /// the frame, against the tabulated null components.
    #[test]
    fn te_deformation_matches_fd_lie_derivative() {
        let grid = SphereGrid::new(6);
        let cones = EfCones::schwarzschild(1.0, FoliationType::OutgoingGeodesic);
        let state = cones.extract(&grid, 0.0, 20.0).unwrap();
        let frames = state.frames.as_ref().unwrap();
        let adapter = cones.adapter();
        let d = deformation_tensors(&state, KillingFieldTag::TimeTranslation, None).unwrap();
        let h = 1e-3;
        let node = 11usize;
        let x0 = frames.position[node];
        let w_of = |r: f64| 1.0 - 2.0 / r;
        // T_E(x) = (l + lb)/2 in the outgoing chart
        let xfield = |x: &[f64; 4]| -> [f64; 4] {
            let w = w_of(x[1]);
            [1.0, 0.5 * (1.0 - w), 0.0, 0.0]
        };
        let gamma = adapter.christoffel(&x0);
        let g = adapter.metric(&x0);
        // pi_{mu nu} = d_mu X_nu + d_nu X_mu - 2 Gamma^l_{mu nu} X_l (lowered)
        let lower = |x: &[f64; 4], v: &[f64; 4]| -> [f64; 4] {
            let gm = adapter.metric(x);
            let mut out = [0.0; 4];
            for m in 0..4 {
                for n in 0..4 {
                    out[m] += gm[(m, n)] * v[n];
                }
            }
            out
        };
        let mut pi = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                let dnu = {
                    let mut xp = x0;
                    let mut xm = x0;
                    xp[mu] += h;
                    xm[mu] -= h;
                    (lower(&xp, &xfield(&xp))[nu] - lower(&xm, &xfield(&xm))[nu]) / (2.0 * h)
                };
                let dmu = {
                    let mut xp = x0;
                    let mut xm = x0;
                    xp[nu] += h;
                    xm[nu] -= h;
                    (lower(&xp, &xfield(&xp))[mu] - lower(&xm, &xfield(&xm))[mu]) / (2.0 * h)
                };
                // covariant: D_mu X_nu = d_mu X_nu - Gamma^l_{mu nu} X_l
                let xl = lower(&x0, &xfield(&x0));
                let mut corr = 0.0;
                for l in 0..4 {
                    corr += gamma[l][mu][nu] * xl[l];
                }
                pi[mu][nu] = dnu + dmu - 2.0 * corr;
            }
        }
        // frame components
        let ip = |a: &[f64; 4], b: &[f64; 4]| -> f64 {
            let mut acc = 0.0;
            for m in 0..4 {
                for n in 0..4 {
                    acc += pi[m][n] * a[m] * b[n];
                }
            }
            acc
        };
        let _ = g;
        let l = frames.l[node];
        let lb = frames.lb[node];
        let e1 = frames.e1[node];
        // trace of pi
        let ginv = adapter.inverse_metric(&x0);
        let mut trpi = 0.0;
        for m in 0..4 {
            for n in 0..4 {
                trpi += ginv[(m, n)] * pi[m][n];
            }
        }
        assert!(
            (trpi - d.trace.comp(0)[node].re).abs() < 1e-8,
            "tr pi {} vs {}",
            trpi,
            d.trace.comp(0)[node].re
        );
        // pih_34 = pi_34 - (tr pi / 4) g(l, lb) = pi_34 + tr pi / 2
        let pih_34 = ip(&lb, &l) - 0.25 * trpi * (-2.0);
        assert!(
            (pih_34 - d.j.comp(0)[node].re).abs() < 1e-8,
            "j: {} vs {}",
            pih_34,
            d.j.comp(0)[node].re
        );
        // pih_33 = pi_33 (null direction)
        let pih_33 = ip(&lb, &lb);
        assert!((pih_33 - d.nb.comp(0)[node].re).abs() < 1e-8);
        // pih_3a = pi_3a
        let pih_31 = ip(&lb, &e1);
        let mb = d.mb.frame_components(node);
        assert!((pih_31 - mb[0]).abs() < 1e-8, "mb {} vs {}", pih_31, mb[0]);
    }
}
