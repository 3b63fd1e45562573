//! Energy fluxes of Bel-Robinson tensors through sphere leaves, and the
//! chart-components Bel-Robinson field used by the divergence oracle.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spacetime::adapter::{MetricAdapter, Point};
use crate::spacetime::ConeState;
use crate::sphere::norms::integrate;
use crate::sphere::SphereField;

use super::weyl::{bel_robinson, contract4, reconstruct, WeylField};

/// A frame vector specified by `(lb, l, e1, e2)` components, possibly
/// weighted by the foliation parameters.
#[derive(Debug, Clone, Copy)]
pub enum MultiplierSpec {
    /// `T = (l + lb)/2`.
    TimeTranslation,
    /// `K = (ub^2 l + u^2 lb)/2`.
    Morawetz,
    /// `l`.
    OutgoingNull,
    /// `lb`.
    IngoingNull,
}

impl MultiplierSpec {
    pub fn components(&self, u: f64, ubar: f64) -> [f64; 4] {
        match self {
            MultiplierSpec::TimeTranslation => [0.5, 0.5, 0.0, 0.0],
            MultiplierSpec::Morawetz => [0.5 * u * u, 0.5 * ubar * ubar, 0.0, 0.0],
            MultiplierSpec::OutgoingNull => [0.0, 1.0, 0.0, 0.0],
            MultiplierSpec::IngoingNull => [1.0, 0.0, 0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FluxReport {
    pub flux: f64,
    pub min_integrand: f64,
    /// Weighted null-component norms on the same leaf:
    /// `ub^4 int |alpha|^2` and the mirrored `u^4 int |alphab|^2`.
    pub weighted_alpha: f64,
    pub weighted_alphab: f64,
}

/// Flux `int_S Q(W)(X1, X2, X3, direction) dA` on one sphere leaf.
pub fn sphere_flux(
    state: &ConeState,
    weyl: &WeylField,
    multipliers: [MultiplierSpec; 3],
    direction: MultiplierSpec,
) -> Result<FluxReport> {
    let g = &state.metric;
    let grid = state.grid();
    let (u, ub) = (state.u, state.ubar);
    let x1 = multipliers[0].components(u, ub);
    let x2 = multipliers[1].components(u, ub);
    let x3 = multipliers[2].components(u, ub);
    let x4 = direction.components(u, ub);
    let mut integrand = SphereField::zeros(grid, 0);
    let mut min_integrand = f64::INFINITY;
    for i in 0..grid.n_nodes() {
        let q = bel_robinson(&reconstruct(&weyl.at_node(i)));
        let v = contract4(&q, &x1, &x2, &x3, &x4);
        min_integrand = min_integrand.min(v);
        integrand.comp_mut(0)[i] = num_complex::Complex64::new(v, 0.0);
    }
    let flux = integrate(&integrand, g);
    let alpha_sq = crate::sphere::calculus::dot_two_tensors(g, &weyl.alpha, &weyl.alpha);
    let alphab_sq = crate::sphere::calculus::dot_two_tensors(g, &weyl.alphab, &weyl.alphab);
    Ok(FluxReport {
        flux,
        min_integrand,
        weighted_alpha: ub.powi(4) * integrate(&alpha_sq, g),
        weighted_alphab: u.powi(4) * integrate(&alphab_sq, g),
    })
}

/// Bel-Robinson tensor of the adapter's curvature in chart components,
/// for use with the finite-difference divergence oracle.
pub fn bel_robinson_chart(adapter: &dyn MetricAdapter, x: &Point) -> [[[[f64; 4]; 4]; 4]; 4] {
    let w = adapter.riemann(x);
    let g = adapter.metric(x);
    let ginv = g.try_inverse().expect("invertible");
    let dual = hodge_dual_chart(&w, &g, &ginv);
    let up2 = |t: &[[[[f64; 4]; 4]; 4]; 4]| -> [[[[f64; 4]; 4]; 4]; 4] {
        // raise slots 1 and 3
        let mut out = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let mut acc = 0.0;
                        for m in 0..4 {
                            for n in 0..4 {
                                acc += ginv[(b, m)] * ginv[(d, n)] * t[a][m][c][n];
                            }
                        }
                        out[a][b][c][d] = acc;
                    }
                }
            }
        }
        out
    };
    let w_up = up2(&w);
    let dual_up = up2(&dual);
    let mut q = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut acc = 0.0;
                    for m in 0..4 {
                        for n in 0..4 {
                            acc += w[a][m][c][n] * w_up[b][m][d][n]
                                + dual[a][m][c][n] * dual_up[b][m][d][n];
                        }
                    }
                    q[a][b][c][d] = acc;
                }
            }
        }
    }
    q
}

fn hodge_dual_chart(
    w: &[[[[f64; 4]; 4]; 4]; 4],
    g: &Matrix4<f64>,
    ginv: &Matrix4<f64>,
) -> [[[[f64; 4]; 4]; 4]; 4] {
    let sqrt_det = (-g.determinant()).sqrt();
    let lc = |a: usize, b: usize, c: usize, d: usize| -> f64 {
        let perm = [a, b, c, d];
        let mut seen = [false; 4];
        for &i in &perm {
            if seen[i] {
                return 0.0;
            }
            seen[i] = true;
        }
        let mut sign = 1.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if perm[i] > perm[j] {
                    sign = -sign;
                }
            }
        }
        sign * sqrt_det
    };
    let mut out = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut acc = 0.0;
                    for m in 0..4 {
                        for n in 0..4 {
                            let mut eps_up = 0.0;
                            for p in 0..4 {
                                for q in 0..4 {
                                    eps_up += lc(a, b, p, q) * ginv[(p, m)] * ginv[(q, n)];
                                }
                            }
                            acc += 0.5 * eps_up * w[m][n][c][d];
                        }
                    }
                    out[a][b][c][d] = acc;
                }
            }
        }
    }
    out
}
