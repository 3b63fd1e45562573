//! The ten Bianchi equations relating transport of the null curvature
//! components to angular derivatives and connection couplings.

use crate::error::Result;
use crate::spacetime::{ConeDerivs, ConeState};
use crate::sphere::calculus::{
    curl, div, dot, dot_tensor_vector, dot_two_tensors, dual_one_form, dual_two_tensor, grad,
    grad_hat, hat_product,
};
use crate::sphere::SphereField;

use super::structure::Ctx;
use super::ResidualReport;

fn scale_of(fields: &[&SphereField]) -> f64 {
    fields.iter().map(|f| f.max_abs()).fold(0.0, f64::max)
}

pub fn eval_bianchi_residuals(
    state: &ConeState,
    derivs: &ConeDerivs,
) -> Result<Vec<ResidualReport>> {
    let c = Ctx::new(state);
    let g = c.g();
    let s = state;
    let d = derivs;
    let mut out = Vec::new();

    let dual_beta = dual_one_form(g, &s.beta);
    let dual_betab = dual_one_form(g, &s.betab);
    let dual_xi = dual_one_form(g, &s.xi);
    let dual_xib = dual_one_form(g, &s.xib);
    let dual_eta = dual_one_form(g, &s.eta);
    let dual_etab = dual_one_form(g, &s.etab);
    let dual_zeta = dual_one_form(g, &s.zeta);
    let dual_chihat = dual_two_tensor(g, &s.chihat);
    let dual_chibhat = dual_two_tensor(g, &s.chibhat);
    let dual_alpha = dual_two_tensor(g, &s.alpha);
    let dual_alphab = dual_two_tensor(g, &s.alphab);

    // D3 alpha + (trchib/2) alpha = grad-hat beta + 2 omegab alpha
    //   - 3 (chihat rho + *chihat sigma) + (zeta + 4 eta) hat beta
    {
        let lhs = d.d3.alpha.add(&s.alpha.mul_scalar_field(&s.trchib).scale(0.5));
        let rhs = grad_hat(g, &s.beta)?
            .add(&s.alpha.mul_scalar_field(&s.omegab).scale(2.0))
            .sub(
                &s.chihat
                    .mul_scalar_field(&s.rho)
                    .add(&dual_chihat.mul_scalar_field(&s.sigma))
                    .scale(3.0),
            )
            .add(&hat_product(g, &s.zeta.add(&s.eta.scale(4.0)), &s.beta));
        out.push(c.report("nd3_alpha", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D4 beta + 2 trchi beta = div alpha - 2 omega beta
    //   + (2 zeta + etab) . alpha + 3 (xi rho + *xi sigma)
    {
        let lhs = d.d4.beta.add(&s.beta.mul_scalar_field(&s.trchi).scale(2.0));
        let rhs = div(g, &s.alpha)?
            .sub(&s.beta.mul_scalar_field(&s.omega).scale(2.0))
            .add(&dot_tensor_vector(g, &s.alpha, &s.zeta.scale(2.0).add(&s.etab)))
            .add(
                &s.xi
                    .mul_scalar_field(&s.rho)
                    .add(&dual_xi.mul_scalar_field(&s.sigma))
                    .scale(3.0),
            );
        out.push(c.report("nd4_beta", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D3 beta + trchib beta = grad rho + *grad sigma + 2 omegab beta
    //   + xib . alpha + 3 (eta rho + *eta sigma)
    {
        let lhs = d.d3.beta.add(&s.beta.mul_scalar_field(&s.trchib));
        let rhs = grad(g, &s.rho)?
            .add(&dual_one_form(g, &grad(g, &s.sigma)?))
            .add(&s.beta.mul_scalar_field(&s.omegab).scale(2.0))
            .add(&dot_tensor_vector(g, &s.alpha, &s.xib))
            .add(
                &s.eta
                    .mul_scalar_field(&s.rho)
                    .add(&dual_eta.mul_scalar_field(&s.sigma))
                    .scale(3.0),
            );
        out.push(c.report("nd3_beta", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D4 rho + (3/2) trchi rho = div beta - (1/2) chibhat . alpha
    //   + zeta . beta + 2 (etab . beta - xi . betab)
    {
        let lhs = d.d4.rho.add(&s.rho.mul_scalar_field(&s.trchi).scale(1.5));
        let rhs = div(g, &s.beta)?
            .sub(&dot_two_tensors(g, &s.chibhat, &s.alpha).scale(0.5))
            .add(&dot(g, &s.zeta, &s.beta))
            .add(&dot(g, &s.etab, &s.beta).sub(&dot(g, &s.xi, &s.betab)).scale(2.0));
        out.push(c.report("nd4_rho", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D3 rho + (3/2) trchib rho = -div betab - (1/2) chihat . alphab
    //   + zeta . betab + 2 (xib . beta - eta . betab)
    {
        let lhs = d.d3.rho.add(&s.rho.mul_scalar_field(&s.trchib).scale(1.5));
        let rhs = div(g, &s.betab)?
            .scale(-1.0)
            .sub(&dot_two_tensors(g, &s.chihat, &s.alphab).scale(0.5))
            .add(&dot(g, &s.zeta, &s.betab))
            .add(&dot(g, &s.xib, &s.beta).sub(&dot(g, &s.eta, &s.betab)).scale(2.0));
        out.push(c.report("nd3_rho", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D4 sigma + (3/2) trchi sigma = -curl beta + (1/2) chibhat . *alpha
    //   - zeta . *beta - 2 (etab . *beta + 2 xi . *betab)
    {
        let lhs = d.d4.sigma.add(&s.sigma.mul_scalar_field(&s.trchi).scale(1.5));
        let rhs = curl(g, &s.beta)?
            .scale(-1.0)
            .add(&dot_two_tensors(g, &s.chibhat, &dual_alpha).scale(0.5))
            .sub(&dot(g, &s.zeta, &dual_beta))
            .sub(
                &dot(g, &s.etab, &dual_beta)
                    .add(&dot(g, &s.xi, &dual_betab).scale(2.0))
                    .scale(2.0),
            );
        out.push(c.report("nd4_sigma", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D3 sigma + (3/2) trchib sigma = -curl betab - (1/2) chihat . *alphab
    //   + zeta . *betab - 2 (etab . *beta + eta . *betab)
    {
        let lhs = d.d3.sigma.add(&s.sigma.mul_scalar_field(&s.trchib).scale(1.5));
        let rhs = curl(g, &s.betab)?
            .scale(-1.0)
            .sub(&dot_two_tensors(g, &s.chihat, &dual_alphab).scale(0.5))
            .add(&dot(g, &s.zeta, &dual_betab))
            .sub(
                &dot(g, &s.etab, &dual_beta)
                    .add(&dot(g, &s.eta, &dual_betab))
                    .scale(2.0),
            );
        out.push(c.report("nd3_sigma", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D4 betab + trchi betab = -grad rho + *grad sigma + 2 chibhat . beta
    //   + 2 omega betab - xi . alphab - 3 (etab rho - *etab sigma)
    {
        let lhs = d.d4.betab.add(&s.betab.mul_scalar_field(&s.trchi));
        let rhs = grad(g, &s.rho)?
            .scale(-1.0)
            .add(&dual_one_form(g, &grad(g, &s.sigma)?))
            .add(&dot_tensor_vector(g, &s.chibhat, &s.beta).scale(2.0))
            .add(&s.betab.mul_scalar_field(&s.omega).scale(2.0))
            .sub(&dot_tensor_vector(g, &s.alphab, &s.xi))
            .sub(
                &s.etab
                    .mul_scalar_field(&s.rho)
                    .sub(&dual_etab.mul_scalar_field(&s.sigma))
                    .scale(3.0),
            );
        out.push(c.report("nd4_betab", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D3 betab + 2 trchib betab = -div alphab - 2 omegab betab
    //   - (-2 zeta + eta) . alphab + 3 (-xib rho + *xib sigma)
    {
        let lhs = d.d3.betab.add(&s.betab.mul_scalar_field(&s.trchib).scale(2.0));
        let rhs = div(g, &s.alphab)?
            .scale(-1.0)
            .sub(&s.betab.mul_scalar_field(&s.omegab).scale(2.0))
            .sub(&dot_tensor_vector(g, &s.alphab, &s.eta.sub(&s.zeta.scale(2.0))))
            .add(
                &s.xib
                    .mul_scalar_field(&s.rho)
                    .scale(-1.0)
                    .add(&dual_xib.mul_scalar_field(&s.sigma))
                    .scale(3.0),
            );
        out.push(c.report("nd3_betab", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    // D4 alphab + (trchi/2) alphab = -grad-hat betab + 4 omega alphab
    //   - 3 (chibhat rho - *chibhat sigma) + (zeta - 4 etab) hat betab
    {
        let lhs = d.d4.alphab.add(&s.alphab.mul_scalar_field(&s.trchi).scale(0.5));
        let rhs = grad_hat(g, &s.betab)?
            .scale(-1.0)
            .add(&s.alphab.mul_scalar_field(&s.omega).scale(4.0))
            .sub(
                &s.chibhat
                    .mul_scalar_field(&s.rho)
                    .sub(&dual_chibhat.mul_scalar_field(&s.sigma))
                    .scale(3.0),
            )
            .add(&hat_product(g, &s.zeta.sub(&s.etab.scale(4.0)), &s.betab));
        out.push(c.report("nd4_alphab", &lhs.sub(&rhs), scale_of(&[&lhs, &rhs]))?);
    }

    let _ = dual_zeta;
    Ok(out)
}
