//! The null structure equations: transport equations along both null
//! directions, the elliptic (Codazzi/torsion/Gauss) equations on the
//! spheres, and the metric transport `Lie_3 gh = 2 chib`, `Lie_4 gh = 2 chi`.

use crate::error::Result;
use crate::spacetime::{ConeDerivs, ConeState};
use crate::sphere::calculus::{
    div, dot, dot_tensor_vector, dot_two_tensors, grad, grad_hat, hat_product, trace_free_part,
    wedge_one_forms, wedge_two_tensors,
};
use crate::sphere::SphereField;

use super::ResidualReport;

/// Shorthand context: state plus calculus bound to its metric.
pub(crate) struct Ctx<'a> {
    pub s: &'a ConeState,
}

impl<'a> Ctx<'a> {
    pub fn new(s: &'a ConeState) -> Self {
        Self { s }
    }

    pub fn g(&self) -> &crate::sphere::SphereMetric {
        &self.s.metric
    }

    /// `chi . v` with the full chi.
    pub fn chi_dot(&self, v: &SphereField) -> SphereField {
        dot_tensor_vector(self.g(), &self.s.chi_full(), v)
    }

    pub fn chib_dot(&self, v: &SphereField) -> SphereField {
        dot_tensor_vector(self.g(), &self.s.chib_full(), v)
    }

    pub fn report(&self, eq: &str, residual: &SphereField, scale: f64) -> Result<ResidualReport> {
        ResidualReport::from_field(eq, residual, self.g(), scale)
    }
}

fn scale_of(fields: &[&SphereField]) -> f64 {
    fields.iter().map(|f| f.max_abs()).fold(0.0, f64::max)
}

/// Evaluates every registered structure equation.
pub fn eval_structure_residuals(
    state: &ConeState,
    derivs: &ConeDerivs,
) -> Result<Vec<ResidualReport>> {
    let c = Ctx::new(state);
    let g = c.g();
    let s = state;
    let d = derivs;
    let mut out = Vec::new();

    // Lie_3 gh = 2 chib, Lie_4 gh = 2 chi.
    {
        let r3 = d.d3.lie_metric.sub(&s.chib_full().scale(2.0));
        out.push(c.report("lie3_metric", &r3, scale_of(&[&d.d3.lie_metric]))?);
        let r4 = d.d4.lie_metric.sub(&s.chi_full().scale(2.0));
        out.push(c.report("lie4_metric", &r4, scale_of(&[&d.d4.lie_metric]))?);
    }

    let eta_plus_etab = s.eta.add(&s.etab);

    // D3 chibhat + trchib chibhat = grad-hat xib - 2 omegab chibhat
    //   + (eta + etab - 2 zeta) hat xib - alphab
    {
        let lhs = d.d3.chibhat.add(&s.chibhat.mul_scalar_field(&s.trchib));
        let coupling = eta_plus_etab.sub(&s.zeta.scale(2.0));
        let rhs = grad_hat(g, &s.xib)?
            .sub(&s.chibhat.mul_scalar_field(&s.omegab).scale(2.0))
            .add(&hat_product(g, &coupling, &s.xib))
            .sub(&s.alphab);
        out.push(c.report("nd3_chibhat", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D3 trchib + (trchib)^2/2 = 2 div xib - 2 omegab trchib
    //   + 2 xib . (eta + etab - 2 zeta) - |chibhat|^2
    {
        let lhs = d.d3.trchib.add(&s.trchib.mul_scalar_field(&s.trchib).scale(0.5));
        let coupling = eta_plus_etab.sub(&s.zeta.scale(2.0));
        let chibhat_sq = dot_two_tensors(g, &s.chibhat, &s.chibhat);
        let rhs = div(g, &s.xib)?
            .scale(2.0)
            .sub(&s.omegab.mul_scalar_field(&s.trchib).scale(2.0))
            .add(&dot(g, &s.xib, &coupling).scale(2.0))
            .sub(&chibhat_sq);
        out.push(c.report("nd3_trchib", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D3 zeta = -2 grad omegab - chib.(zeta + eta) + 2 omegab (zeta - eta)
    //   + chi.xib + 2 omega xib - betab
    {
        let lhs = d.d3.zeta.clone();
        let rhs = grad(g, &s.omegab)?
            .scale(-2.0)
            .sub(&c.chib_dot(&s.zeta.add(&s.eta)))
            .add(&s.zeta.sub(&s.eta).mul_scalar_field(&s.omegab).scale(2.0))
            .add(&c.chi_dot(&s.xib))
            .add(&s.xib.mul_scalar_field(&s.omega).scale(2.0))
            .sub(&s.betab);
        out.push(c.report("nd3_zeta", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D3 chihat + (trchib/2) chihat = grad-hat eta + 2 omegab chihat
    //   - (trchi/2) chibhat + sym-tf(xib ox xi) + eta hat eta
    {
        let lhs = d.d3.chihat.add(&s.chihat.mul_scalar_field(&s.trchib).scale(0.5));
        let mixed = trace_free_part(g, &s.xib.outer(&s.xi).add(&s.xi.outer(&s.xib)).scale(0.5));
        let rhs = grad_hat(g, &s.eta)?
            .add(&s.chihat.mul_scalar_field(&s.omegab).scale(2.0))
            .sub(&s.chibhat.mul_scalar_field(&s.trchi).scale(0.5))
            .add(&mixed)
            .add(&hat_product(g, &s.eta, &s.eta));
        out.push(c.report("nd3_chihat", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D3 trchi + (trchib trchi)/2 = 2 div eta + 2 omegab trchi
    //   - chihat . chibhat + 2 (xi.xib + |eta|^2) + 2 rho
    {
        let lhs = d.d3.trchi.add(&s.trchib.mul_scalar_field(&s.trchi).scale(0.5));
        let rhs = div(g, &s.eta)?
            .scale(2.0)
            .add(&s.omegab.mul_scalar_field(&s.trchi).scale(2.0))
            .sub(&dot_two_tensors(g, &s.chihat, &s.chibhat))
            .add(&dot(g, &s.xi, &s.xib).scale(2.0))
            .add(&dot(g, &s.eta, &s.eta).scale(2.0))
            .add(&s.rho.scale(2.0));
        out.push(c.report("nd3_trchi", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // Geodesic-collapsed mixed transport: D3 xi - D4 eta = 4 omegab xi
    //   + chi.(eta - etab) + beta. On the outgoing foliation xi = 0
    //   collapses the D3 xi term; on the ingoing foliation the mirrored
    //   equation D3 etab - D4 xib = -4 omega xib - chib.(etab - eta)
    //   + betab carries the content instead (evaluated below as nd3_etab).
    {
        let lhs = d.d3.xi.sub(&d.d4.eta);
        let rhs = s.xi.mul_scalar_field(&s.omegab).scale(4.0)
            .add(&c.chi_dot(&s.eta.sub(&s.etab)))
            .add(&s.beta);
        out.push(c.report("nd3_xi_nd4_eta", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D3 etab - D4 xib = -4 omega xib - chib.(etab - eta) + betab
    {
        let lhs = d.d3.etab.sub(&d.d4.xib);
        let rhs = s.xib.mul_scalar_field(&s.omega).scale(-4.0)
            .sub(&c.chib_dot(&s.etab.sub(&s.eta)))
            .add(&s.betab);
        out.push(c.report("nd3_etab_nd4_xib", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D3 omega + D4 omegab = xi.xib + zeta.(eta - etab) - eta.etab
    //   + 4 omega omegab + rho
    {
        let lhs = d.d3.omega.add(&d.d4.omegab);
        let rhs = dot(g, &s.xi, &s.xib)
            .add(&dot(g, &s.zeta, &s.eta.sub(&s.etab)))
            .sub(&dot(g, &s.eta, &s.etab))
            .add(&s.omega.mul_scalar_field(&s.omegab).scale(4.0))
            .add(&s.rho);
        out.push(c.report("nd3_omega_nd4_omegab", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D4 chihat + trchi chihat = grad-hat xi - 2 omega chihat
    //   + (eta + etab + 2 zeta) hat xi - alpha
    {
        let lhs = d.d4.chihat.add(&s.chihat.mul_scalar_field(&s.trchi));
        let coupling = eta_plus_etab.add(&s.zeta.scale(2.0));
        let rhs = grad_hat(g, &s.xi)?
            .sub(&s.chihat.mul_scalar_field(&s.omega).scale(2.0))
            .add(&hat_product(g, &coupling, &s.xi))
            .sub(&s.alpha);
        out.push(c.report("nd4_chihat", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D4 trchi + (trchi)^2/2 = 2 div xi - 2 omega trchi
    //   + 2 xi.(eta + etab + 2 zeta) - |chihat|^2
    {
        let lhs = d.d4.trchi.add(&s.trchi.mul_scalar_field(&s.trchi).scale(0.5));
        let coupling = eta_plus_etab.add(&s.zeta.scale(2.0));
        let rhs = div(g, &s.xi)?
            .scale(2.0)
            .sub(&s.omega.mul_scalar_field(&s.trchi).scale(2.0))
            .add(&dot(g, &s.xi, &coupling).scale(2.0))
            .sub(&dot_two_tensors(g, &s.chihat, &s.chihat));
        out.push(c.report("nd4_trchi", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D4 zeta = 2 grad omega + chi.(-zeta + etab) + 2 omega (zeta + etab)
    //   - chib.xi - 2 omegab xi - beta
    {
        let lhs = d.d4.zeta.clone();
        let rhs = grad(g, &s.omega)?
            .scale(2.0)
            .add(&c.chi_dot(&s.etab.sub(&s.zeta)))
            .add(&s.zeta.add(&s.etab).mul_scalar_field(&s.omega).scale(2.0))
            .sub(&c.chib_dot(&s.xi))
            .sub(&s.xi.mul_scalar_field(&s.omegab).scale(2.0))
            .sub(&s.beta);
        out.push(c.report("nd4_zeta", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D4 chibhat + (trchi/2) chibhat = grad-hat etab + 2 omega chibhat
    //   - (trchib/2) chihat + sym-tf(xi ox xib) + etab hat etab
    {
        let lhs = d.d4.chibhat.add(&s.chibhat.mul_scalar_field(&s.trchi).scale(0.5));
        let mixed = trace_free_part(g, &s.xi.outer(&s.xib).add(&s.xib.outer(&s.xi)).scale(0.5));
        let rhs = grad_hat(g, &s.etab)?
            .add(&s.chibhat.mul_scalar_field(&s.omega).scale(2.0))
            .sub(&s.chihat.mul_scalar_field(&s.trchib).scale(0.5))
            .add(&mixed)
            .add(&hat_product(g, &s.etab, &s.etab));
        out.push(c.report("nd4_chibhat", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D4 trchib + (trchi trchib)/2 = 2 div etab + 2 omega trchib
    //   - chibhat.chihat + 2 (xib.xi + |etab|^2) + 2 rho
    {
        let lhs = d.d4.trchib.add(&s.trchi.mul_scalar_field(&s.trchib).scale(0.5));
        let rhs = div(g, &s.etab)?
            .scale(2.0)
            .add(&s.omega.mul_scalar_field(&s.trchib).scale(2.0))
            .sub(&dot_two_tensors(g, &s.chibhat, &s.chihat))
            .add(&dot(g, &s.xib, &s.xi).scale(2.0))
            .add(&dot(g, &s.etab, &s.etab).scale(2.0))
            .add(&s.rho.scale(2.0));
        out.push(c.report("nd4_trchib", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // Elliptic equations on the spheres.

    // curl etab = -curl eta = (1/2) chihat wedge chibhat - xi wedge xib - sigma
    {
        let rhs = wedge_two_tensors(g, &s.chihat, &s.chibhat)
            .scale(0.5)
            .sub(&wedge_one_forms(g, &s.xi, &s.xib))
            .sub(&s.sigma);
        let r1 = crate::sphere::calculus::curl(g, &s.etab)?.sub(&rhs);
        out.push(c.report("curl_etab", &r1, scale_of(&[&rhs]))?);
        let r2 = crate::sphere::calculus::curl(g, &s.eta)?.add(&rhs);
        out.push(c.report("curl_eta", &r2, scale_of(&[&rhs]))?);
    }

    // div chibhat = grad trchib + chib.zeta - trchib zeta + betab
    {
        let lhs = div(g, &s.chibhat)?;
        let rhs = grad(g, &s.trchib)?
            .add(&c.chib_dot(&s.zeta))
            .sub(&s.zeta.mul_scalar_field(&s.trchib))
            .add(&s.betab);
        out.push(c.report("div_chibhat", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // div chihat = grad trchi - chi.zeta + trchi zeta - beta
    {
        let lhs = div(g, &s.chihat)?;
        let rhs = grad(g, &s.trchi)?
            .sub(&c.chi_dot(&s.zeta))
            .add(&s.zeta.mul_scalar_field(&s.trchi))
            .sub(&s.beta);
        out.push(c.report("div_chihat", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // curl xi = xi wedge (eta + etab + 2 zeta)
    {
        let lhs = crate::sphere::calculus::curl(g, &s.xi)?;
        let rhs = wedge_one_forms(g, &s.xi, &eta_plus_etab.add(&s.zeta.scale(2.0)));
        out.push(c.report("curl_xi", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs, &s.xi]))?);
    }

    // curl xib = xib wedge (eta + etab - 2 zeta)
    {
        let lhs = crate::sphere::calculus::curl(g, &s.xib)?;
        let rhs = wedge_one_forms(g, &s.xib, &eta_plus_etab.sub(&s.zeta.scale(2.0)));
        out.push(c.report("curl_xib", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs, &s.xib]))?);
    }

    // Gauss: K = -(1/4) trchi trchib + (1/2) chihat.chibhat - rho
    {
        let k = g.gauss_curvature()?;
        let rhs = s.trchi.mul_scalar_field(&s.trchib).scale(-0.25)
            .add(&dot_two_tensors(g, &s.chihat, &s.chibhat).scale(0.5))
            .sub(&s.rho);
        out.push(c.report("gauss", &k.sub(&rhs), scale_of(&[&k, &rhs]))?);
    }

    Ok(out)
}
