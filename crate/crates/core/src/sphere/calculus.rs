//! Metric-aware tensor calculus used by the structure equations: grad,
//! div, curl, duals, wedges, symmetrized traceless products.

use super::field::SphereField;
use super::metric::SphereMetric;
use crate::error::Result;

/// Gradient of a scalar (or covariant derivative of any field; new slot
/// leads).
pub fn grad(g: &SphereMetric, f: &SphereField) -> Result<SphereField> {
    g.covariant_derivative(f)
}

/// Divergence of a 1-form or of a symmetric 2-tensor (contract the
/// derivative slot with the leading tensor slot).
pub fn div(g: &SphereMetric, f: &SphereField) -> Result<SphereField> {
    assert!(f.rank() >= 1);
    let d = g.covariant_derivative(f)?;
    Ok(g.trace(&d, 0, 1))
}

/// Curl of a 1-form: `eps^{ab} grad_a U_b`.
pub fn curl(g: &SphereMetric, u: &SphereField) -> Result<SphereField> {
    assert_eq!(u.rank(), 1);
    let d = g.covariant_derivative(u)?;
    let t = g.contract(&d, 0, &g.epsilon(), 0);
    Ok(g.trace(&t, 0, 1))
}

/// Left dual of a 1-form: `(*U)_a = eps_{ab} U^b`.
pub fn dual_one_form(g: &SphereMetric, u: &SphereField) -> SphereField {
    assert_eq!(u.rank(), 1);
    g.contract(&g.epsilon(), 1, u, 0)
}

/// Left dual of a 2-tensor: `(*F)_{ab} = eps_a^c F_{cb}`.
pub fn dual_two_tensor(g: &SphereMetric, f: &SphereField) -> SphereField {
    assert_eq!(f.rank(), 2);
    g.contract(&g.epsilon(), 1, f, 0)
}

/// Wedge of two 1-forms: `eps^{ab} x_a y_b`.
pub fn wedge_one_forms(g: &SphereMetric, x: &SphereField, y: &SphereField) -> SphereField {
    let t = g.contract(&g.epsilon(), 0, x, 0);
    g.contract(&t, 0, y, 0)
}

/// Wedge of two symmetric 2-tensors: `eps^{ab} F_a^c G_{bc}`.
pub fn wedge_two_tensors(g: &SphereMetric, f: &SphereField, h: &SphereField) -> SphereField {
    let t = g.contract(&g.epsilon(), 0, f, 0); // (b, c)
    let t = g.contract(&t, 0, h, 0); // (c, d)
    g.trace(&t, 0, 1)
}

/// `(F . u)_a = F_{ab} u^b` for a 2-tensor and a 1-form.
pub fn dot_tensor_vector(g: &SphereMetric, f: &SphereField, u: &SphereField) -> SphereField {
    g.contract(f, 1, u, 0)
}

/// `u . v` scalar product of 1-forms.
pub fn dot(g: &SphereMetric, u: &SphereField, v: &SphereField) -> SphereField {
    g.contract(u, 0, v, 0)
}

/// `F . G` full contraction of two 2-tensors (scalar `F_{ab} G^{ab}`).
pub fn dot_two_tensors(g: &SphereMetric, f: &SphereField, h: &SphereField) -> SphereField {
    let t = g.contract(f, 0, h, 0); // (b, b')
    g.trace(&t, 0, 1)
}

/// Matrix product `(F . G)_{ab} = F_a^c G_{cb}`.
pub fn compose_two_tensors(g: &SphereMetric, f: &SphereField, h: &SphereField) -> SphereField {
    g.contract(f, 1, h, 0)
}

/// Metric trace of a 2-tensor.
pub fn trace_two_tensor(g: &SphereMetric, f: &SphereField) -> SphereField {
    g.trace(f, 0, 1)
}

/// Trace-free part of a symmetric 2-tensor.
pub fn trace_free_part(g: &SphereMetric, f: &SphereField) -> SphereField {
    let tr = trace_two_tensor(g, f);
    f.sub(&g.tensor().mul_scalar_field(&tr).scale(0.5))
}

/// Symmetrized traceless product `x (ox-hat) y = x ox y + y ox x - (x.y) gh`.
pub fn hat_product(g: &SphereMetric, x: &SphereField, y: &SphereField) -> SphereField {
    let outer = x.outer(y).add(&y.outer(x));
    let inner = dot(g, x, y);
    outer.sub(&g.tensor().mul_scalar_field(&inner))
}

/// `grad (ox-hat) u = grad_a u_b + grad_b u_a - (div u) gh_{ab}`.
pub fn grad_hat(g: &SphereMetric, u: &SphereField) -> Result<SphereField> {
    assert_eq!(u.rank(), 1);
    let d = g.covariant_derivative(u)?;
    let sym = d.add(&d.permute_slots(&[1, 0]));
    let dv = g.trace(&d, 0, 1);
    Ok(sym.sub(&g.tensor().mul_scalar_field(&dv)))
}

/// Laplace-Beltrami of a scalar.
pub fn laplacian(g: &SphereMetric, f: &SphereField) -> Result<SphereField> {
    let d = g.covariant_derivative(f)?;
    div(g, &d)
}
