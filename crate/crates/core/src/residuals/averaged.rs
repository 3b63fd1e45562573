//! Averaged and renormalized transport equations, the mass-aspect
//! identities, the average-commutation formula and the area-radius
//! transport, plus quasi-local mass diagnostics.
//!
//! Derivatives of sphere averages are measured by Richardson differencing
//! of neighboring leaves, independently of the pointwise identities those
//! averages satisfy.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spacetime::cone::ConeFamily;
use crate::spacetime::{ConeState, FoliationType};
use crate::sphere::calculus::{div, dot, dot_tensor_vector, dot_two_tensors, grad, wedge_two_tensors};
use crate::sphere::norms::{average, integrate};
use crate::sphere::{GridRef, SphereField};

use super::ResidualReport;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AveragedDiagnostics {
    pub rho_bar: f64,
    pub sigma_bar: f64,
    pub trchi_bar: f64,
    pub trchib_bar: f64,
    pub omegab_bar: f64,
    /// Mean of the mass aspect `mu = div zeta + rho`; equals `rho_bar`.
    pub mu_bar: f64,
    pub hawking_mass: f64,
    /// Second route to the Hawking mass through `-rho + chihat.chibhat/2`.
    pub hawking_mass_curvature_route: f64,
    pub area_radius: f64,
}

pub fn diagnostics(state: &ConeState) -> Result<AveragedDiagnostics> {
    let g = &state.metric;
    let r = g.area_radius();
    let mu = div(g, &state.zeta)?.add(&state.rho);
    let trchi_trchib = state.trchi.mul_scalar_field(&state.trchib);
    let hawking = 0.5 * r + r / (32.0 * std::f64::consts::PI) * integrate(&trchi_trchib, g);
    let curvature_route = {
        let integrand = state
            .rho
            .scale(-1.0)
            .add(&dot_two_tensors(g, &state.chihat, &state.chibhat).scale(0.5));
        r / (8.0 * std::f64::consts::PI) * integrate(&integrand, g)
    };
    Ok(AveragedDiagnostics {
        rho_bar: average(&state.rho, g),
        sigma_bar: average(&state.sigma, g),
        trchi_bar: average(&state.trchi, g),
        trchib_bar: average(&state.trchib, g),
        omegab_bar: average(&state.omegab, g),
        mu_bar: average(&mu, g),
        hawking_mass: hawking,
        hawking_mass_curvature_route: curvature_route,
        area_radius: r,
    })
}

/// d/dparam of a leaf functional by Richardson differencing of the family.
fn family_derivative(
    family: &dyn ConeFamily,
    grid: &GridRef,
    u: f64,
    ubar: f64,
    along_ubar: bool,
    delta: f64,
    functional: &dyn Fn(&ConeState) -> Result<f64>,
) -> Result<f64> {
    let eval = |step: f64| -> Result<f64> {
        let (uu, ub) = if along_ubar { (u, ubar + step) } else { (u + step, ubar) };
        functional(&family.extract(grid, uu, ub)?)
    };
    let d = |h: f64| -> Result<f64> { Ok((eval(h)? - eval(-h)?) / (2.0 * h)) };
    Ok((4.0 * d(delta / 2.0)? - d(delta)?) / 3.0)
}

fn report_scalar(equation: &str, value: f64, scale: f64, band_limit: usize) -> ResidualReport {
    ResidualReport {
        equation: equation.to_string(),
        norms: super::ResidualNorms { l2: value.abs(), linf: value.abs(), hhalf: value.abs() },
        band_limit,
        scale,
    }
}

/// Evaluates the averaged family on a leaf, including the transport of
/// averages in the foliation's outgoing (`D4`, exterior setup) or ingoing
/// (`D3`, last-cone setup) direction.
pub fn eval_averaged_equations(
    family: &dyn ConeFamily,
    grid: &GridRef,
    u: f64,
    ubar: f64,
    delta: f64,
) -> Result<(AveragedDiagnostics, Vec<ResidualReport>)> {
    let state = family.extract(grid, u, ubar)?;
    let derivs = family.derivs(grid, u, ubar)?;
    let g = &state.metric;
    let bl = grid.band_limit();
    let diag = diagnostics(&state)?;
    let mut out = Vec::new();

    // transport direction: scalar-average derivative along the
    // non-generator direction of the foliation (l for outgoing cones in
    // the exterior, lb on the last cone), with the factor from
    // l = 2 d_ub resp. lb = 2 d_u in transported coordinates.
    let along_ubar = matches!(state.foliation, FoliationType::OutgoingGeodesic);
    let transport_avg = |f: &dyn Fn(&ConeState) -> Result<f64>| -> Result<f64> {
        Ok(2.0 * family_derivative(family, grid, u, ubar, along_ubar, delta, f)?)
    };

    // identity: sigma_bar = (1/2) avg(chihat wedge chibhat)
    {
        let w = wedge_two_tensors(g, &state.chihat, &state.chibhat);
        let resid = diag.sigma_bar - 0.5 * average(&w, g);
        out.push(report_scalar("sigmao", resid, diag.sigma_bar.abs().max(1e-300), bl));
    }
    // identity: mu_bar = rho_bar
    {
        let resid = diag.mu_bar - diag.rho_bar;
        out.push(report_scalar("muorhoo", resid, diag.rho_bar.abs().max(1e-300), bl));
    }
    // area-radius transport: X(r) = (r/2) avg(tr of the generator's
    // transverse expansion): l(r) = (r/2) trchi_bar or lb(r) = (r/2) trchib_bar.
    {
        let dr = transport_avg(&|s: &ConeState| Ok(s.metric.area_radius()))?;
        let expect = if along_ubar {
            0.5 * diag.area_radius * diag.trchi_bar
        } else {
            0.5 * diag.area_radius * diag.trchib_bar
        };
        out.push(report_scalar("elbr", dr - expect, expect.abs().max(1e-300), bl));
    }
    // average commutation on the probe trchib (trchi for ingoing):
    // X(avg f) = avg(X f) + avg((tr - tr_bar) f)
    {
        let (probe, probe_d, trg, trg_bar): (&SphereField, &SphereField, &SphereField, f64) =
            if along_ubar {
                (&state.trchib, &derivs.d4.trchib, &state.trchi, diag.trchi_bar)
            } else {
                (&state.trchi, &derivs.d3.trchi, &state.trchib, diag.trchib_bar)
            };
        let lhs = transport_avg(&|s: &ConeState| {
            Ok(average(if along_ubar { &s.trchib } else { &s.trchi }, &s.metric))
        })?;
        let correction = trg.sub(&SphereField::constant(grid, trg_bar)).mul_scalar_field(probe);
        let rhs = average(probe_d, g) + average(&correction, g);
        out.push(report_scalar("commelbov", lhs - rhs, rhs.abs().max(probe.max_abs()), bl));
    }

    if along_ubar {
        eval_outgoing_family(family, grid, u, ubar, delta, &state, &diag, &mut out)?;
    } else {
        eval_ingoing_family(family, grid, u, ubar, delta, &state, &diag, &mut out)?;
    }

    Ok((diag, out))
}

/// Exterior-region family: transport of averages along `l`.
#[allow(clippy::too_many_arguments)]
fn eval_outgoing_family(
    family: &dyn ConeFamily,
    grid: &GridRef,
    u: f64,
    ubar: f64,
    delta: f64,
    state: &ConeState,
    diag: &AveragedDiagnostics,
    out: &mut Vec<ResidualReport>,
) -> Result<()> {
    let g = &state.metric;
    let bl = grid.band_limit();
    let derivs = family.derivs(grid, u, ubar)?;
    let davg = |f: &dyn Fn(&ConeState) -> Result<f64>| -> Result<f64> {
        Ok(2.0 * family_derivative(family, grid, u, ubar, true, delta, f)?)
    };
    let r = diag.area_radius;

    let trchi_dev = state.trchi.sub(&SphereField::constant(grid, diag.trchi_bar));
    let trchib_dev = state.trchib.sub(&SphereField::constant(grid, diag.trchib_bar));
    let zeta_sq = dot(g, &state.zeta, &state.zeta);
    let chihat_sq = dot_two_tensors(g, &state.chihat, &state.chihat);
    let chi_dot_chib = dot_two_tensors(g, &state.chihat, &state.chibhat);

    // D4 rho_bar + (3/2) trchi_bar rho_bar = -avg(chibhat.alpha)/2
    //   - avg(zeta.beta) - avg((trchi - trchi_bar)(rho - rho_bar))/2
    {
        let lhs = davg(&|s: &ConeState| Ok(average(&s.rho, &s.metric)))?
            + 1.5 * diag.trchi_bar * diag.rho_bar;
        let rho_dev = state.rho.sub(&SphereField::constant(grid, diag.rho_bar));
        let rhs = -0.5 * average(&dot_two_tensors(g, &state.chibhat, &state.alpha), g)
            - average(&dot(g, &state.zeta, &state.beta), g)
            - 0.5 * average(&trchi_dev.mul_scalar_field(&rho_dev), g);
        out.push(report_scalar("nd4_rhoo", lhs - rhs, diag.rho_bar.abs().max(1e-300), bl));
    }

    // D4 (trchi_bar - 2/r) + trchi_bar (trchi_bar - 2/r)/2
    //   = -avg|chihat|^2 + avg((trchi-trchi_bar)^2)/2
    {
        let lhs = davg(&|s: &ConeState| {
            Ok(average(&s.trchi, &s.metric) - 2.0 / s.metric.area_radius())
        })? + 0.5 * diag.trchi_bar * (diag.trchi_bar - 2.0 / r);
        let rhs = -average(&chihat_sq, g)
            + 0.5 * average(&trchi_dev.mul_scalar_field(&trchi_dev), g);
        out.push(report_scalar("nd4_trchio", lhs - rhs, (2.0 / (r * r)).max(1e-300), bl));
    }

    // D4 (trchi - trchi_bar) + trchi_bar (trchi - trchi_bar) = Err
    {
        let d_trchibar = davg(&|s: &ConeState| Ok(average(&s.trchi, &s.metric)))?;
        let lhs = derivs
            .d4
            .trchi
            .sub(&SphereField::constant(grid, d_trchibar))
            .add(&trchi_dev.mul_scalar_field(&SphereField::constant(grid, diag.trchi_bar)));
        let rhs = chihat_sq
            .scale(-1.0)
            .sub(&trchi_dev.mul_scalar_field(&trchi_dev).scale(0.5))
            .add(&SphereField::constant(
                grid,
                average(&chihat_sq, g)
                    - 0.5 * average(&trchi_dev.mul_scalar_field(&trchi_dev), g),
            ));
        let resid = lhs.sub(&rhs);
        out.push(ResidualReport::from_field("nd4_trchitrchio", &resid, g, lhs.max_abs())?);
    }

    // D4 (trchib_bar + 2/r) + trchi_bar (trchib_bar + 2/r)/2 = 2 rho_bar + Err
    {
        let lhs = davg(&|s: &ConeState| {
            Ok(average(&s.trchib, &s.metric) + 2.0 / s.metric.area_radius())
        })? + 0.5 * diag.trchi_bar * (diag.trchib_bar + 2.0 / r);
        let rhs = 2.0 * diag.rho_bar - average(&chi_dot_chib, g)
            + 2.0 * average(&zeta_sq, g)
            + 0.5 * average(&trchi_dev.mul_scalar_field(&trchib_dev), g);
        out.push(report_scalar("nd4_trchibo", lhs - rhs, (2.0 / (r * r)).max(1e-300), bl));
    }

    // D4 (trchib - trchib_bar) + trchi_bar (trchib - trchib_bar)/2
    //   = -(trchib/2)(trchi - trchi_bar) + 2 div zeta + 2 (rho - rho_bar) + Err
    {
        let d_trchibbar = davg(&|s: &ConeState| Ok(average(&s.trchib, &s.metric)))?;
        let lhs = derivs
            .d4
            .trchib
            .sub(&SphereField::constant(grid, d_trchibbar))
            .add(&trchib_dev.scale(0.5 * diag.trchi_bar));
        let rho_dev = state.rho.sub(&SphereField::constant(grid, diag.rho_bar));
        let err = chi_dot_chib
            .scale(-1.0)
            .add(&zeta_sq.scale(2.0))
            .add(&SphereField::constant(
                grid,
                average(&chi_dot_chib, g) - 2.0 * average(&zeta_sq, g)
                    - 0.5 * average(&trchi_dev.mul_scalar_field(&trchib_dev), g),
            ));
        let rhs = state
            .trchib
            .mul_scalar_field(&trchi_dev)
            .scale(-0.5)
            .add(&div(g, &state.zeta)?.scale(2.0))
            .add(&rho_dev.scale(2.0))
            .add(&err);
        let resid = lhs.sub(&rhs);
        out.push(ResidualReport::from_field("nd4_trchibtrchibo", &resid, g, lhs.max_abs())?);
    }

    // D4 omegab_bar = rho_bar + 3 avg|zeta|^2
    //   + avg((trchi - trchi_bar)(omegab - omegab_bar))
    {
        let omegab_dev = state.omegab.sub(&SphereField::constant(grid, diag.omegab_bar));
        let lhs = davg(&|s: &ConeState| Ok(average(&s.omegab, &s.metric)))?;
        let rhs = diag.rho_bar
            + 3.0 * average(&zeta_sq, g)
            + average(&trchi_dev.mul_scalar_field(&omegab_dev), g);
        out.push(report_scalar("nd4_ombo", lhs - rhs, diag.rho_bar.abs().max(1e-300), bl));
    }

    // D4 (omegab - omegab_bar) = (rho - rho_bar) + 3|zeta|^2 - 3 avg|zeta|^2
    //   - avg((trchi - trchi_bar)(omegab - omegab_bar))
    {
        let omegab_dev = state.omegab.sub(&SphereField::constant(grid, diag.omegab_bar));
        let d_ombar = davg(&|s: &ConeState| Ok(average(&s.omegab, &s.metric)))?;
        let lhs = derivs.d4.omegab.sub(&SphereField::constant(grid, d_ombar));
        let rho_dev = state.rho.sub(&SphereField::constant(grid, diag.rho_bar));
        let rhs = rho_dev.add(&zeta_sq.scale(3.0)).add(&SphereField::constant(
            grid,
            -3.0 * average(&zeta_sq, g)
                - average(&trchi_dev.mul_scalar_field(&omegab_dev), g),
        ));
        let resid = lhs.sub(&rhs);
        out.push(ResidualReport::from_field(
            "nd4_ombombo",
            &resid,
            g,
            lhs.max_abs().max(state.rho.max_abs()),
        )?);
    }

    // Mass aspect transport: D4 mu + (3/2) trchi mu = Err(D4, mu)
    {
        let mu_of = |s: &ConeState| -> Result<SphereField> {
            Ok(div(&s.metric, &s.zeta)?.add(&s.rho))
        };
        let mu = mu_of(state)?;
        // D4 of the scalar field mu by leaf differencing in transported
        // coordinates: scalars need no dyad correction.
        let d4_mu = {
            let f = |step: f64| -> Result<SphereField> {
                mu_of(&family.extract(grid, u, ubar + step)?)
            };
            let d = |h: f64| -> Result<SphereField> {
                Ok(f(h)?.sub(&f(-h)?).scale(1.0 / (2.0 * h)))
            };
            d(delta / 2.0)?.scale(4.0).sub(&d(delta)?).scale(2.0 / 3.0)
        };
        let lhs = d4_mu.add(&mu.mul_scalar_field(&state.trchi).scale(1.5));
        let div_chihat = div(g, &state.chihat)?;
        let grad_zeta = g.covariant_derivative(&state.zeta)?;
        let chihat_grad_zeta = {
            let t = g.contract(&state.chihat, 0, &grad_zeta, 0); // (b, b')
            g.trace(&t, 0, 1)
        };
        let chi_zeta_zeta = dot(g, &dot_tensor_vector(g, &state.chi_full(), &state.zeta), &state.zeta);
        let rhs = dot(g, &div_chihat, &state.zeta)
            .scale(-2.0)
            .sub(&chihat_grad_zeta.scale(3.0))
            .sub(&chi_zeta_zeta)
            .add(&zeta_sq.mul_scalar_field(&state.trchi))
            .sub(&dot(g, &state.zeta, &state.beta).scale(2.0))
            .sub(&dot(g, &grad(g, &state.trchi)?, &state.zeta))
            .sub(&dot_two_tensors(g, &state.chibhat, &state.alpha).scale(0.5));
        let resid = lhs.sub(&rhs);
        out.push(ResidualReport::from_field(
            "nd4_mu",
            &resid,
            g,
            lhs.max_abs().max(mu.max_abs()),
        )?);
    }

    Ok(())
}

/// Last-cone family: transport of averages along `lb`.
#[allow(clippy::too_many_arguments)]
fn eval_ingoing_family(
    family: &dyn ConeFamily,
    grid: &GridRef,
    u: f64,
    ubar: f64,
    delta: f64,
    state: &ConeState,
    diag: &AveragedDiagnostics,
    out: &mut Vec<ResidualReport>,
) -> Result<()> {
    let g = &state.metric;
    let bl = grid.band_limit();
    let derivs = family.derivs(grid, u, ubar)?;
    let davg = |f: &dyn Fn(&ConeState) -> Result<f64>| -> Result<f64> {
        Ok(2.0 * family_derivative(family, grid, u, ubar, false, delta, f)?)
    };
    let r = diag.area_radius;

    let trchi_dev = state.trchi.sub(&SphereField::constant(grid, diag.trchi_bar));
    let trchib_dev = state.trchib.sub(&SphereField::constant(grid, diag.trchib_bar));
    let omegab_dev = state.omegab.sub(&SphereField::constant(grid, diag.omegab_bar));
    let zeta_sq = dot(g, &state.zeta, &state.zeta);
    let chibhat_sq = dot_two_tensors(g, &state.chibhat, &state.chibhat);
    let chi_dot_chib = dot_two_tensors(g, &state.chihat, &state.chibhat);

    // D3 rho_bar + (3/2) trchib_bar rho_bar = -avg(chihat.alphab)/2
    //   - avg(zeta.betab) - avg((trchib - trchib_bar)(rho - rho_bar))/2
    {
        let lhs = davg(&|s: &ConeState| Ok(average(&s.rho, &s.metric)))?
            + 1.5 * diag.trchib_bar * diag.rho_bar;
        let rho_dev = state.rho.sub(&SphereField::constant(grid, diag.rho_bar));
        let rhs = -0.5 * average(&dot_two_tensors(g, &state.chihat, &state.alphab), g)
            - average(&dot(g, &state.zeta, &state.betab), g)
            - 0.5 * average(&trchib_dev.mul_scalar_field(&rho_dev), g);
        out.push(report_scalar("nd3_rhoo", lhs - rhs, diag.rho_bar.abs().max(1e-300), bl));
    }

    // D3 (trchib_bar + 2/r) + trchib_bar (trchib_bar + 2/r)/2
    //   = -2 avg((omegab - omegab_bar)(trchib - trchib_bar)) - avg|chibhat|^2
    //     + avg((trchib - trchib_bar)^2)/2
    {
        let lhs = davg(&|s: &ConeState| {
            Ok(average(&s.trchib, &s.metric) + 2.0 / s.metric.area_radius())
        })? + 0.5 * diag.trchib_bar * (diag.trchib_bar + 2.0 / r);
        let rhs = -2.0 * average(&omegab_dev.mul_scalar_field(&trchib_dev), g)
            - average(&chibhat_sq, g)
            + 0.5 * average(&trchib_dev.mul_scalar_field(&trchib_dev), g);
        out.push(report_scalar("nd3_trchibo", lhs - rhs, (2.0 / (r * r)).max(1e-300), bl));
    }

    // D3 (trchib - trchib_bar) + trchib_bar (trchib - trchib_bar)
    //   = -2 (omegab - omegab_bar) trchib + Err
    {
        let d_bar = davg(&|s: &ConeState| Ok(average(&s.trchib, &s.metric)))?;
        let lhs = derivs
            .d3
            .trchib
            .sub(&SphereField::constant(grid, d_bar))
            .add(&trchib_dev.scale(diag.trchib_bar));
        let err = chibhat_sq
            .scale(-1.0)
            .sub(&trchib_dev.mul_scalar_field(&trchib_dev).scale(0.5))
            .add(&SphereField::constant(
                grid,
                average(&chibhat_sq, g)
                    + 2.0 * average(&omegab_dev.mul_scalar_field(&trchib_dev), g)
                    - 0.5 * average(&trchib_dev.mul_scalar_field(&trchib_dev), g),
            ));
        let rhs = omegab_dev.mul_scalar_field(&state.trchib).scale(-2.0).add(&err);
        let resid = lhs.sub(&rhs);
        out.push(ResidualReport::from_field("nd3_trchibtrchibo", &resid, g, lhs.max_abs())?);
    }

    // D3 (trchi_bar - 2/r) + trchib_bar (trchi_bar - 2/r)/2 = 2 rho_bar + Err
    {
        let lhs = davg(&|s: &ConeState| {
            Ok(average(&s.trchi, &s.metric) - 2.0 / s.metric.area_radius())
        })? + 0.5 * diag.trchib_bar * (diag.trchi_bar - 2.0 / r);
        let rhs = 2.0 * diag.rho_bar
            + 2.0 * average(&omegab_dev.mul_scalar_field(&trchi_dev), g)
            - average(&chi_dot_chib, g)
            + 2.0 * average(&zeta_sq, g)
            + 0.5 * average(&trchib_dev.mul_scalar_field(&trchi_dev), g);
        out.push(report_scalar("nd3_trchio", lhs - rhs, (2.0 / (r * r)).max(1e-300), bl));
    }

    // D3 (trchi - trchi_bar) + trchib_bar (trchi - trchi_bar)/2
    //   = 2 (omegab - omegab_bar) trchi + Err
    {
        let d_bar = davg(&|s: &ConeState| Ok(average(&s.trchi, &s.metric)))?;
        let lhs = derivs
            .d3
            .trchi
            .sub(&SphereField::constant(grid, d_bar))
            .add(&trchi_dev.scale(0.5 * diag.trchib_bar));
        let err = chi_dot_chib
            .scale(-1.0)
            .add(&zeta_sq.scale(2.0))
            .sub(&trchib_dev.mul_scalar_field(&trchi_dev).scale(0.5))
            .add(&SphereField::constant(
                grid,
                average(&chi_dot_chib, g) - 2.0 * average(&zeta_sq, g)
                    - 2.0 * average(&omegab_dev.mul_scalar_field(&trchi_dev), g)
                    - 0.5 * average(&trchib_dev.mul_scalar_field(&trchi_dev), g),
            ));
        let rhs = omegab_dev.mul_scalar_field(&state.trchi).scale(2.0).add(&err);
        let resid = lhs.sub(&rhs);
        out.push(ResidualReport::from_field("nd3_trchitrchio", &resid, g, lhs.max_abs())?);
    }

    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::{EfCones, FoliationType};
    use crate::sphere::SphereGrid;

    #[test]
    fn minkowski_averaged_family_vanishes() {
        let grid = SphereGrid::new(12);
        for fol in [FoliationType::OutgoingGeodesic, FoliationType::IngoingGeodesic] {
            let cones = EfCones::minkowski(fol);
            let (diag, reports) =
                eval_averaged_equations(&cones, &grid, 1.0, 9.0, 1e-3).unwrap();
            assert!(diag.hawking_mass.abs() < 1e-10, "m = {}", diag.hawking_mass);
            assert!((diag.mu_bar - diag.rho_bar).abs() < 1e-13);
            for rep in reports {
                assert!(
                    rep.norms.linf < 1e-9,
                    "{fol:?} {}: {:.3e}",
                    rep.equation,
                    rep.norms.linf
                );
            }
        }
    }

    #[test]
    fn schwarzschild_hawking_mass_equals_parameter() {
        let grid = SphereGrid::new(12);
        for fol in [FoliationType::OutgoingGeodesic, FoliationType::IngoingGeodesic] {
            let cones = EfCones::schwarzschild(1.0, fol);
            for r in [5.0, 10.0, 20.0] {
                let state = cones.extract(&grid, 0.0, 2.0 * r).unwrap();
                let diag = diagnostics(&state).unwrap();
                assert!(
                    (diag.hawking_mass - 1.0).abs() < 1e-6,
                    "{fol:?} r={r}: m = {}",
                    diag.hawking_mass
                );
                assert!(
                    (diag.hawking_mass_curvature_route - 1.0).abs() < 1e-6,
                    "curvature route m = {}",
                    diag.hawking_mass_curvature_route
                );
            }
        }
    }

    #[test]
    fn schwarzschild_averaged_residuals_vanish() {
        let grid = SphereGrid::new(12);
        for fol in [FoliationType::OutgoingGeodesic, FoliationType::IngoingGeodesic] {
            let cones = EfCones::schwarzschild(1.0, fol);
            let (_, reports) =
                eval_averaged_equations(&cones, &grid, 0.0, 20.0, 1e-3).unwrap();
            for rep in reports {
                assert!(
                    rep.norms.linf < 1e-8,
                    "{fol:?} {}: {:.3e}",
                    rep.equation,
                    rep.norms.linf
                );
            }
        }
    }
}
