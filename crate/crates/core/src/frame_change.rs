//! Change-of-null-frame algebra: transition coefficients, the predicted
//! transformation of connection and curvature (leading terms plus the
//! displayed quadratic corrections), a direct frame-construction oracle in
//! the Eddington-Finkelstein charts, and the null-to-maximal boundary
//! transition relations.

use crate::error::{Error, Result};
use crate::spacetime::adapter::{MetricAdapter, Point};
use crate::spacetime::{ConeState, EfCones, FoliationType};
use crate::sphere::calculus::{dot, dot_tensor_vector, grad, trace_free_part, trace_two_tensor};
use crate::sphere::{GridRef, SphereField, SphereMetric};

pub const MAX_COEFFICIENT_SIZE: f64 = 0.3;

/// The transition triplet `(lambda, f, fbar)` relating two null pairs.
#[derive(Debug, Clone)]
pub struct TransitionCoefficients {
    pub lambda: SphereField,
    pub f: SphereField,
    pub fbar: SphereField,
}

impl TransitionCoefficients {
    pub fn validate(&self) -> Result<()> {
        let log_lambda: f64 = self
            .lambda
            .comp(0)
            .iter()
            .map(|z| z.re.max(1e-300).ln().abs())
            .fold(0.0, f64::max);
        if self.lambda.comp(0).iter().any(|z| z.re <= 0.0) {
            return Err(Error::FrameNormalization("lambda must be positive".into()));
        }
        let worst = self.f.max_abs().max(self.fbar.max_abs()).max(log_lambda);
        if worst > MAX_COEFFICIENT_SIZE {
            return Err(Error::FrameNormalization(format!(
                "coefficient size {worst:.3} exceeds {MAX_COEFFICIENT_SIZE}"
            )));
        }
        Ok(())
    }

    pub fn identity(grid: &GridRef) -> Self {
        Self {
            lambda: SphereField::constant(grid, 1.0),
            f: SphereField::zeros(grid, 1),
            fbar: SphereField::zeros(grid, 1),
        }
    }
}

/// Transverse derivatives of the transition coefficients (test data;
/// zero for profiles carried rigidly along the foliation).
#[derive(Debug, Clone)]
pub struct CoefficientDerivs {
    pub d3_lambda: SphereField,
    pub d4_lambda: SphereField,
    pub d3_f: SphereField,
    pub d4_f: SphereField,
    pub d3_fbar: SphereField,
    pub d4_fbar: SphereField,
}

impl CoefficientDerivs {
    pub fn zero(grid: &GridRef) -> Self {
        Self {
            d3_lambda: SphereField::zeros(grid, 0),
            d4_lambda: SphereField::zeros(grid, 0),
            d3_f: SphereField::zeros(grid, 1),
            d4_f: SphereField::zeros(grid, 1),
            d3_fbar: SphereField::zeros(grid, 1),
            d4_fbar: SphereField::zeros(grid, 1),
        }
    }
}

/// Primed coefficients predicted by the transformation laws. The second
/// fundamental forms stay undecomposed: for a general transition the
/// primed horizontal span need not be integrable, and the formulas
/// predict the full (possibly non-symmetric) 2-tensors.
#[derive(Debug, Clone)]
pub struct PrimedPrediction {
    pub chi: SphereField,
    pub chib: SphereField,
    pub zeta: SphereField,
    pub eta: SphereField,
    pub etab: SphereField,
    pub omega: SphereField,
    pub omegab: SphereField,
    pub xi: SphereField,
    pub xib: SphereField,
    pub alpha: SphereField,
    pub beta: SphereField,
    pub rho: SphereField,
    pub sigma: SphereField,
    pub betab: SphereField,
    pub alphab: SphereField,
}

fn reciprocal(field: &SphereField) -> SphereField {
    let mut out = field.clone();
    for v in out.comp_mut(0).iter_mut() {
        *v = 1.0 / *v;
    }
    out
}

fn log_field(field: &SphereField) -> SphereField {
    let mut out = field.clone();
    for v in out.comp_mut(0).iter_mut() {
        *v = num_complex::Complex64::new(v.re.max(1e-300).ln(), 0.0);
    }
    out
}

/// Predicted primed connection and curvature per the transformation laws,
/// with the displayed bilinear corrections (`include_err`) or the leading
/// terms only. The cubic remainder is dropped by construction.
pub fn transform_frame(
    state: &ConeState,
    coeffs: &TransitionCoefficients,
    cderivs: &CoefficientDerivs,
    include_err: bool,
) -> Result<PrimedPrediction> {
    coeffs.validate()?;
    let g = &state.metric;
    let grid = state.grid();
    let lam = &coeffs.lambda;
    let lam_inv = reciprocal(lam);
    let log_lam = log_field(lam);
    let f = &coeffs.f;
    let fb = &coeffs.fbar;
    let f_sq = dot(g, f, f);
    let fb_sq = dot(g, fb, fb);
    let f_dot_fb = dot(g, f, fb);
    let chi = state.chi_full();
    let chib = state.chib_full();

    // Projected-derivative conversions (displayed main terms of the
    // derivative transition formulas; their own bilinear remainders land
    // at cubic order here because every use is multiplied by a
    // coefficient).
    let grad_f = g.covariant_derivative(f)?;
    let grad_fb = g.covariant_derivative(fb)?;
    let grad_loglam = grad(g, &log_lam)?;
    let d4p_f = cderivs
        .d4_f
        .add(&g.contract(f, 0, &grad_f, 0))
        .add(&cderivs.d3_f.mul_scalar_field(&f_sq).scale(0.25))
        .mul_scalar_field(lam);
    let d3p_f = cderivs
        .d3_f
        .add(&g.contract(fb, 0, &grad_f, 0))
        .add(&cderivs.d4_f.mul_scalar_field(&fb_sq).scale(0.25))
        .add(&cderivs.d3_f.mul_scalar_field(&f_dot_fb).scale(0.5))
        .mul_scalar_field(&lam_inv);
    let d4p_fb = cderivs
        .d4_fbar
        .add(&g.contract(f, 0, &grad_fb, 0))
        .add(&cderivs.d3_fbar.mul_scalar_field(&f_sq).scale(0.25))
        .mul_scalar_field(lam);
    let d3p_fb = cderivs
        .d3_fbar
        .add(&g.contract(fb, 0, &grad_fb, 0))
        .add(&cderivs.d4_fbar.mul_scalar_field(&fb_sq).scale(0.25))
        .add(&cderivs.d3_fbar.mul_scalar_field(&f_dot_fb).scale(0.5))
        .mul_scalar_field(&lam_inv);
    // grad' X = grad X + (fb/2) ox D4 X + (f/2 + |f|^2 fb / 8) ox D3 X
    //   + (fb/2) ox (f . grad X)   [for S-tangent X]
    let primed_grad = |x_grad: &SphereField,
                       d3x: &SphereField,
                       d4x: &SphereField|
     -> SphereField {
        let f_dot_grad = g.contract(f, 0, x_grad, 0);
        x_grad
            .add(&fb.outer(d4x).scale(0.5))
            .add(&fb.outer(&f_dot_grad).scale(0.5))
            .add(&f.outer(d3x).scale(0.5))
            .add(&fb.outer(d3x).mul_scalar_field(&f_sq).scale(0.125))
    };
    let gradp_f = primed_grad(&grad_f, &cderivs.d3_f, &cderivs.d4_f);
    let gradp_fb = primed_grad(&grad_fb, &cderivs.d3_fbar, &cderivs.d4_fbar);
    let gradp_loglam = primed_grad(&grad_loglam, &cderivs.d3_lambda, &cderivs.d4_lambda);
    let l_prime_loglam = cderivs
        .d4_lambda
        .add(&dot(g, f, &grad_loglam))
        .add(&cderivs.d3_lambda.mul_scalar_field(&f_sq).scale(0.25))
        .mul_scalar_field(lam);
    let lb_prime_loglam = cderivs
        .d3_lambda
        .mul_scalar_field(&SphereField::constant(grid, 1.0).add(&f_dot_fb.scale(0.5)))
        .add(&dot(g, fb, &grad_loglam))
        .add(&cderivs.d4_lambda.mul_scalar_field(&fb_sq).scale(0.25))
        .mul_scalar_field(&lam_inv);

    let xi_lead = state
        .xi
        .add(&d4p_f.mul_scalar_field(&lam_inv).scale(0.5))
        .add(&f.mul_scalar_field(&state.trchi).scale(0.25))
        .mul_scalar_field(&lam.mul_scalar_field(lam));
    let eta_lead = state
        .eta
        .add(&d3p_f.mul_scalar_field(lam).scale(0.5))
        .add(&fb.mul_scalar_field(&state.trchi).scale(0.25));

    // Leading-order primed trace-free parts entering the eta corrections.
    let chihat_lead = trace_free_part(g, &sym_part(&chi.add(&grad_f)));
    let chibhat_lead = trace_free_part(g, &sym_part(&chib.add(&grad_fb)));

    let z = |rank: usize| SphereField::zeros(grid, rank);

    // xi: lambda^-2 xi' = xi + (1/2) lam^-1 D4' f + (trchi/4) f + Err
    let xi = {
        let rhs = state
            .xi
            .add(&d4p_f.mul_scalar_field(&lam_inv).scale(0.5))
            .add(&f.mul_scalar_field(&state.trchi).scale(0.25))
            .add(&f.mul_scalar_field(&state.omega))
            .add(&dot_tensor_vector(g, &state.chihat, f).scale(0.5));
        rhs.mul_scalar_field(&lam.mul_scalar_field(lam))
    };
    // xib: lambda^2 xib' = xib + (lam/2) D3' fb + (trchib/4) fb + Err
    let xib = {
        let rhs = state
            .xib
            .add(&d3p_fb.mul_scalar_field(lam).scale(0.5))
            .add(&fb.mul_scalar_field(&state.trchib).scale(0.25))
            .add(&fb.mul_scalar_field(&state.omegab))
            .add(&dot_tensor_vector(g, &state.chibhat, fb).scale(0.5));
        rhs.mul_scalar_field(&lam_inv.mul_scalar_field(&lam_inv))
    };
    // chi: lambda^-1 chi' = chi + grad f + quadratic corrections derived
    // from the frame algebra (several displayed schematic terms cancel).
    let chi_pred = {
        let mut rhs = chi
            .add(&grad_f)
            .add(&state.zeta.outer(f))
            .add(&f.outer(&state.eta))
            .add(&fb.outer(&state.xi));
        if include_err {
            let corr = fb
                .outer(&cderivs.d4_f)
                .scale(0.5)
                .add(&f.outer(&cderivs.d3_f).scale(0.5))
                .sub(&dot_tensor_vector(g, &chib, f).outer(f).scale(0.5))
                .add(&fb.outer(&dot_tensor_vector(g, &chi, f)).scale(0.5))
                .add(&chib.mul_scalar_field(&f_sq).scale(0.25))
                .add(&fb.outer(f).mul_scalar_field(&state.omega))
                .sub(&f.outer(f).mul_scalar_field(&state.omegab));
            rhs = rhs.add(&corr);
        }
        rhs.mul_scalar_field(lam)
    };
    // chib: mirror of the chi law plus the extra (f.fb)/2 chib term from
    // the normalization factor of lb'.
    let chib_pred = {
        let mut rhs = chib
            .add(&grad_fb)
            .sub(&state.zeta.outer(fb))
            .add(&fb.outer(&state.etab))
            .add(&f.outer(&state.xib));
        if include_err {
            let corr = f
                .outer(&cderivs.d3_fbar)
                .scale(0.5)
                .add(&fb.outer(&cderivs.d4_fbar).scale(0.5))
                .sub(&dot_tensor_vector(g, &chi, fb).outer(fb).scale(0.5))
                .add(&f.outer(&dot_tensor_vector(g, &chib, fb)).scale(0.5))
                .add(&chi.mul_scalar_field(&fb_sq).scale(0.25))
                .add(&f.outer(fb).mul_scalar_field(&state.omegab))
                .sub(&fb.outer(fb).mul_scalar_field(&state.omega))
                .add(&chib.mul_scalar_field(&f_dot_fb).scale(0.5));
            rhs = rhs.add(&corr);
        }
        rhs.mul_scalar_field(&lam_inv)
    };
    // zeta' = zeta - grad' log lambda + (chi.fb)/2 - (chib.f)/2
    //   + omega fb - omegab f + derived quadratic couplings.
    let zeta = {
        let mut rhs = state
            .zeta
            .sub(&gradp_loglam)
            .add(&dot_tensor_vector(g, &chi, fb).scale(0.5))
            .sub(&dot_tensor_vector(g, &chib, f).scale(0.5))
            .add(&fb.mul_scalar_field(&state.omega))
            .sub(&f.mul_scalar_field(&state.omegab));
        if include_err {
            let grad_f_dot_fb = g.contract(&grad_f, 1, fb, 0);
            let corr = state.zeta.mul_scalar_field(&f_dot_fb).scale(0.5)
                .add(&grad_f_dot_fb.scale(0.5))
                .add(&fb.mul_scalar_field(&dot(g, &state.zeta, f)).scale(0.5))
                .add(&fb.mul_scalar_field(&dot(g, &state.xi, fb)).scale(0.5))
                .sub(&fb.mul_scalar_field(&dot(g, &state.etab, f)).scale(0.5))
                .add(&f.mul_scalar_field(&dot(g, &state.eta, fb)).scale(0.5))
                .sub(&f.mul_scalar_field(&dot(g, &state.xib, f)).scale(0.5));
            rhs = rhs.add(&corr);
        }
        rhs
    };
    // eta' = eta + (lam/2) D3' f + (trchi/4) fb + Err
    let eta = {
        let mut rhs = state
            .eta
            .add(&d3p_f.mul_scalar_field(lam).scale(0.5))
            .add(&fb.mul_scalar_field(&state.trchi).scale(0.25))
            .sub(&f.mul_scalar_field(&state.omegab))
            .add(&dot_tensor_vector(g, &state.chihat, fb).scale(0.5));
        if include_err {
            let renorm = chihat_lead.sub(&state.chihat);
            rhs = rhs.add(&dot_tensor_vector(g, &renorm, fb).scale(0.5));
        }
        rhs
    };
    // etab' = etab + (1/2) lam^-1 D4' fb + (trchib/4) f + Err
    let etab = {
        let mut rhs = state
            .etab
            .add(&d4p_fb.mul_scalar_field(&lam_inv).scale(0.5))
            .add(&f.mul_scalar_field(&state.trchib).scale(0.25))
            .add(&dot_tensor_vector(g, &state.chibhat, f).scale(0.5));
        if include_err {
            let renorm = chibhat_lead.sub(&state.chibhat);
            rhs = rhs.add(&dot_tensor_vector(g, &renorm, f).scale(0.5));
        }
        rhs
    };
    // omega: lambda^-1 omega' = omega - l'(log lambda)/(2 lambda)
    //   + derived quadratic couplings.
    let omega = {
        let mut rhs = state
            .omega
            .sub(&l_prime_loglam.mul_scalar_field(&lam_inv).scale(0.5))
            .add(&dot(g, f, &state.zeta.sub(&state.etab)).scale(0.5))
            .add(&dot(g, fb, &state.xi).scale(0.5));
        if include_err {
            let f_chi_fb = dot(g, f, &dot_tensor_vector(g, &chi, fb));
            let f_chib_f = dot(g, f, &dot_tensor_vector(g, &chib, f));
            let corr = f_chi_fb.scale(0.25)
                .sub(&f_chib_f.scale(0.25))
                .sub(&state.omegab.mul_scalar_field(&f_sq).scale(0.25))
                .add(&state.omega.mul_scalar_field(&f_dot_fb).scale(0.5))
                .add(&dot(g, &cderivs.d4_f, fb).scale(0.25));
            rhs = rhs.add(&corr);
        }
        rhs.mul_scalar_field(lam)
    };
    // omegab: lambda omegab' = omegab + lambda lb'(log lambda)/2
    //   + derived quadratic couplings.
    let omegab = {
        let mut rhs = state
            .omegab
            .add(&lb_prime_loglam.mul_scalar_field(lam).scale(0.5))
            .sub(&dot(g, fb, &state.zeta.add(&state.eta)).scale(0.5))
            .add(&dot(g, f, &state.xib).scale(0.5));
        if include_err {
            let fb_chib_f = dot(g, fb, &dot_tensor_vector(g, &chib, f));
            let fb_chi_fb = dot(g, fb, &dot_tensor_vector(g, &chi, fb));
            let corr = fb_chib_f.scale(0.25)
                .sub(&fb_chi_fb.scale(0.25))
                .sub(&state.omega.mul_scalar_field(&fb_sq).scale(0.25))
                .add(&state.omegab.mul_scalar_field(&f_dot_fb))
                .add(&dot(g, &cderivs.d3_fbar, f).scale(0.25));
            rhs = rhs.add(&corr);
        }
        rhs.mul_scalar_field(&lam_inv)
    };
    // Curvature transformations.
    let dual_f = crate::sphere::calculus::dual_one_form(g, f);
    let dual_fb = crate::sphere::calculus::dual_one_form(g, fb);
    let dual_beta = crate::sphere::calculus::dual_one_form(g, &state.beta);
    let dual_betab = crate::sphere::calculus::dual_one_form(g, &state.betab);
    let hat = |x: &SphereField, y: &SphereField| crate::sphere::calculus::hat_product(g, x, y);

    let alpha = {
        let mut rhs = state.alpha.clone();
        if include_err {
            rhs = rhs.add(&hat(f, &state.beta)).sub(&hat(&dual_f, &dual_beta));
        }
        rhs.mul_scalar_field(&lam.mul_scalar_field(lam))
    };
    let beta = {
        let mut rhs = state.beta.clone();
        if include_err {
            rhs = rhs
                .add(
                    &f.mul_scalar_field(&state.rho)
                        .add(&dual_f.mul_scalar_field(&state.sigma))
                        .scale(1.5),
                )
                .add(&dot_tensor_vector(g, &state.alpha, fb).scale(0.5));
        }
        rhs.mul_scalar_field(lam)
    };
    let rho = {
        let mut rhs = state.rho.clone();
        if include_err {
            rhs = rhs.add(&dot(g, fb, &state.beta)).sub(&dot(g, f, &state.betab));
        }
        rhs
    };
    let sigma = {
        let mut rhs = state.sigma.clone();
        if include_err {
            rhs = rhs
                .sub(&dot(g, fb, &dual_beta))
                .sub(&dot(g, f, &dual_betab));
        }
        rhs
    };
    let betab = {
        let mut rhs = state.betab.clone();
        if include_err {
            rhs = rhs
                .sub(
                    &fb.mul_scalar_field(&state.rho)
                        .add(&dual_fb.mul_scalar_field(&state.sigma))
                        .scale(1.5),
                )
                .sub(&dot_tensor_vector(g, &state.alphab, f).scale(0.5));
        }
        rhs.mul_scalar_field(&lam_inv)
    };
    let alphab = {
        let mut rhs = state.alphab.clone();
        if include_err {
            rhs = rhs
                .sub(&hat(fb, &state.betab).sub(&hat(&dual_fb, &dual_betab)));
        }
        rhs.mul_scalar_field(&lam_inv.mul_scalar_field(&lam_inv))
    };

    let _ = (z(0), xi_lead, eta_lead);
    Ok(PrimedPrediction {
        chi: chi_pred,
        chib: chib_pred,
        zeta,
        eta,
        etab,
        omega,
        omegab,
        xi,
        xib,
        alpha,
        beta,
        rho,
        sigma,
        betab,
        alphab,
    })
}

/// Closed-form angular profile evaluated anywhere (for the oracle's FD).
pub trait AngularProfile: Sync {
    /// `(lambda, f_1, f_2, fbar_1, fbar_2)` frame components at `(theta, phi)`.
    fn eval(&self, theta: f64, phi: f64) -> (f64, f64, f64, f64, f64);
}

/// Direct construction of the primed coefficients on an EF-family sphere:
/// builds the primed frame pointwise from the transition algebra and
/// differentiates it in the chart, never touching the transformation laws.
pub struct DirectPrimedFrame<'a> {
    pub cones: &'a EfCones,
    pub profile: &'a dyn AngularProfile,
    pub fd_step: f64,
}

impl<'a> DirectPrimedFrame<'a> {
    fn chart_frame(&self, x: &Point) -> [[f64; 4]; 4] {
        // (l, lb, e1, e2) as chart vectors at x = (x0, r, th, ph).
        let r = x[1];
        let th = x[2];
        let w = 1.0 - 2.0 * self.cones.mass / r;
        let (l, lb) = match self.cones.foliation {
            FoliationType::OutgoingGeodesic => {
                ([0.0, 1.0, 0.0, 0.0], [2.0, -w, 0.0, 0.0])
            }
            FoliationType::IngoingGeodesic => ([2.0, w, 0.0, 0.0], [0.0, -1.0, 0.0, 0.0]),
        };
        let e1 = [0.0, 0.0, 1.0 / r, 0.0];
        let e2 = [0.0, 0.0, 0.0, 1.0 / (r * th.sin())];
        [l, lb, e1, e2]
    }

    /// Primed frame `(l', lb', e1', e2')` as chart vectors at x.
    pub fn primed_frame_public(&self, x: &Point) -> [[f64; 4]; 4] {
        self.primed_frame(x)
    }

    fn primed_frame(&self, x: &Point) -> [[f64; 4]; 4] {
        let [l, lb, e1, e2] = self.chart_frame(x);
        let (lam, f1, f2, fb1, fb2) = self.profile.eval(x[2], x[3]);
        let fv = add4(&scale4(&e1, f1), &scale4(&e2, f2));
        let fbv = add4(&scale4(&e1, fb1), &scale4(&e2, fb2));
        let f_sq = f1 * f1 + f2 * f2;
        let fb_sq = fb1 * fb1 + fb2 * fb2;
        let f_dot_fb = f1 * fb1 + f2 * fb2;
        let lp = scale4(&add4(&add4(&l, &fv), &scale4(&lb, 0.25 * f_sq)), lam);
        let lbp = scale4(
            &add4(
                &add4(
                    &scale4(&lb, 1.0 + 0.5 * f_dot_fb + f_sq * fb_sq / 16.0),
                    &fbv,
                ),
                &add4(&scale4(&fv, 0.25 * fb_sq), &scale4(&l, 0.25 * fb_sq)),
            ),
            1.0 / lam,
        );
        let ep = |ea: &[f64; 4], fa: f64, fba: f64| -> [f64; 4] {
            add4(
                &add4(ea, &scale4(&fv, 0.5 * fba)),
                &add4(
                    &scale4(&l, 0.5 * fba),
                    &scale4(&lb, 0.5 * fa + f_sq * fba / 8.0),
                ),
            )
        };
        [lp, lbp, ep(&e1, f1, fb1), ep(&e2, f2, fb2)]
    }

    /// Covariant directional derivative `D_X V` of a frame leg by
    /// Richardson FD of the pointwise field plus the Christoffel term.
    fn cov_deriv(
        &self,
        adapter: &dyn MetricAdapter,
        x: &Point,
        direction: &[f64; 4],
        leg: usize,
    ) -> [f64; 4] {
        let h = self.fd_step;
        let v_at = |t: f64| -> [f64; 4] {
            let mut y = *x;
            for mu in 0..4 {
                y[mu] += t * direction[mu];
            }
            self.primed_frame(&y)[leg]
        };
        let coarse = sub4(&v_at(h), &v_at(-h));
        let fine = sub4(&v_at(h / 2.0), &v_at(-h / 2.0));
        let mut dv = [0.0; 4];
        for mu in 0..4 {
            dv[mu] = (4.0 * fine[mu] / h - coarse[mu] / (2.0 * h)) / 3.0;
        }
        let gamma = adapter.christoffel(x);
        let v0 = self.primed_frame(x)[leg];
        let mut out = dv;
        for lam_i in 0..4 {
            let mut acc = 0.0;
            for m in 0..4 {
                for n in 0..4 {
                    acc += gamma[lam_i][m][n] * direction[m] * v0[n];
                }
            }
            out[lam_i] += acc;
        }
        out
    }

    /// All primed connection and curvature coefficients at the grid nodes
    /// of the sphere `S_{u, ub}`, as frame components against the primed
    /// dyad `(e1', e2')`.
    pub fn construct(&self, grid: &GridRef, u: f64, ubar: f64) -> Result<PrimedPrediction> {
        let adapter = self.cones.adapter();
        let state = self.cones.extract(grid, u, ubar)?;
        let n = grid.n_nodes();
        let frames = state.frames.as_ref().expect("EF frames present");

        let mut acc = NodeAccumulator::new(n);
        for i in 0..n {
            let x = frames.position[i];
            let g = adapter.metric(&x);
            let ip = |a: &[f64; 4], b: &[f64; 4]| -> f64 {
                let mut s = 0.0;
                for mu in 0..4 {
                    for nu in 0..4 {
                        s += g[(mu, nu)] * a[mu] * b[nu];
                    }
                }
                s
            };
            let fr = self.primed_frame(&x);
            let (lp, lbp, e1p, e2p) = (fr[0], fr[1], fr[2], fr[3]);
            let d = |dir: &[f64; 4], leg: usize| self.cov_deriv(&adapter, &x, dir, leg);
            let d1_lp = d(&e1p, 0);
            let d2_lp = d(&e2p, 0);
            let d1_lbp = d(&e1p, 1);
            let d2_lbp = d(&e2p, 1);
            let dl_lp = d(&lp, 0);
            let dlb_lp = d(&lbp, 0);
            let dl_lbp = d(&lp, 1);
            let dlb_lbp = d(&lbp, 1);

            acc.chi[i] = [
                ip(&d1_lp, &e1p),
                ip(&d1_lp, &e2p),
                ip(&d2_lp, &e1p),
                ip(&d2_lp, &e2p),
            ];
            acc.chib[i] = [
                ip(&d1_lbp, &e1p),
                ip(&d1_lbp, &e2p),
                ip(&d2_lbp, &e1p),
                ip(&d2_lbp, &e2p),
            ];
            acc.zeta[i] = [0.5 * ip(&d1_lp, &lbp), 0.5 * ip(&d2_lp, &lbp)];
            acc.xi[i] = [0.5 * ip(&dl_lp, &e1p), 0.5 * ip(&dl_lp, &e2p)];
            acc.eta[i] = [0.5 * ip(&dlb_lp, &e1p), 0.5 * ip(&dlb_lp, &e2p)];
            acc.etab[i] = [0.5 * ip(&dl_lbp, &e1p), 0.5 * ip(&dl_lbp, &e2p)];
            acc.xib[i] = [0.5 * ip(&dlb_lbp, &e1p), 0.5 * ip(&dlb_lbp, &e2p)];
            acc.omega[i] = 0.25 * ip(&dl_lp, &lbp);
            acc.omegab[i] = 0.25 * ip(&dlb_lbp, &lp);

            let riem = adapter.riemann(&x);
            let rc = |a: &[f64; 4], b: &[f64; 4], c: &[f64; 4], dd: &[f64; 4]| -> f64 {
                let mut s = 0.0;
                for p in 0..4 {
                    for q in 0..4 {
                        for r2 in 0..4 {
                            for s2 in 0..4 {
                                s += riem[p][q][r2][s2] * a[p] * b[q] * c[r2] * dd[s2];
                            }
                        }
                    }
                }
                s
            };
            acc.alpha[i] = [
                rc(&lp, &e1p, &lp, &e1p),
                rc(&lp, &e1p, &lp, &e2p),
                rc(&lp, &e2p, &lp, &e1p),
                rc(&lp, &e2p, &lp, &e2p),
            ];
            acc.alphab[i] = [
                rc(&lbp, &e1p, &lbp, &e1p),
                rc(&lbp, &e1p, &lbp, &e2p),
                rc(&lbp, &e2p, &lbp, &e1p),
                rc(&lbp, &e2p, &lbp, &e2p),
            ];
            acc.beta[i] = [0.5 * rc(&e1p, &lp, &lbp, &lp), 0.5 * rc(&e2p, &lp, &lbp, &lp)];
            acc.betab[i] = [0.5 * rc(&e1p, &lbp, &lbp, &lp), 0.5 * rc(&e2p, &lbp, &lbp, &lp)];
            acc.rho[i] = 0.25 * rc(&lbp, &lp, &lbp, &lp);
            // sigma = (1/4) *R(lb, l, lb, l) = (1/2) R(e1, e2, lb, l) for
            // this frame orientation.
            acc.sigma[i] = 0.5 * rc(&e1p, &e2p, &lbp, &lp);
        }
        Ok(acc.assemble(grid, &state.metric))
    }

    /// Frame-normalization defect of the primed frame at the grid nodes.
    pub fn normalization_defect(&self, grid: &GridRef, u: f64, ubar: f64) -> Result<f64> {
        let adapter = self.cones.adapter();
        let state = self.cones.extract(grid, u, ubar)?;
        let frames = state.frames.as_ref().expect("frames");
        let mut worst = 0.0f64;
        for i in 0..grid.n_nodes() {
            let x = frames.position[i];
            let g = adapter.metric(&x);
            let ip = |a: &[f64; 4], b: &[f64; 4]| -> f64 {
                let mut s = 0.0;
                for mu in 0..4 {
                    for nu in 0..4 {
                        s += g[(mu, nu)] * a[mu] * b[nu];
                    }
                }
                s
            };
            let fr = self.primed_frame(&x);
            worst = worst.max((ip(&fr[0], &fr[1]) + 2.0).abs());
            worst = worst.max(ip(&fr[0], &fr[0]).abs());
            worst = worst.max(ip(&fr[1], &fr[1]).abs());
            worst = worst.max((ip(&fr[2], &fr[2]) - 1.0).abs());
            worst = worst.max((ip(&fr[3], &fr[3]) - 1.0).abs());
            worst = worst.max(ip(&fr[2], &fr[3]).abs());
            worst = worst.max(ip(&fr[0], &fr[2]).abs());
            worst = worst.max(ip(&fr[1], &fr[3]).abs());
        }
        Ok(worst)
    }
}

struct NodeAccumulator {
    chi: Vec<[f64; 4]>,
    chib: Vec<[f64; 4]>,
    alpha: Vec<[f64; 4]>,
    alphab: Vec<[f64; 4]>,
    zeta: Vec<[f64; 2]>,
    xi: Vec<[f64; 2]>,
    eta: Vec<[f64; 2]>,
    etab: Vec<[f64; 2]>,
    xib: Vec<[f64; 2]>,
    beta: Vec<[f64; 2]>,
    betab: Vec<[f64; 2]>,
    omega: Vec<f64>,
    omegab: Vec<f64>,
    rho: Vec<f64>,
    sigma: Vec<f64>,
}

impl NodeAccumulator {
    fn new(n: usize) -> Self {
        Self {
            chi: vec![[0.0; 4]; n],
            chib: vec![[0.0; 4]; n],
            alpha: vec![[0.0; 4]; n],
            alphab: vec![[0.0; 4]; n],
            zeta: vec![[0.0; 2]; n],
            xi: vec![[0.0; 2]; n],
            eta: vec![[0.0; 2]; n],
            etab: vec![[0.0; 2]; n],
            xib: vec![[0.0; 2]; n],
            beta: vec![[0.0; 2]; n],
            betab: vec![[0.0; 2]; n],
            omega: vec![0.0; n],
            omegab: vec![0.0; n],
            rho: vec![0.0; n],
            sigma: vec![0.0; n],
        }
    }

    fn assemble(self, grid: &GridRef, _metric: &SphereMetric) -> PrimedPrediction {
        let full2 = |v: &Vec<[f64; 4]>| -> SphereField {
            let t11: Vec<f64> = v.iter().map(|c| c[0]).collect();
            let t12: Vec<f64> = v.iter().map(|c| c[1]).collect();
            let t21: Vec<f64> = v.iter().map(|c| c[2]).collect();
            let t22: Vec<f64> = v.iter().map(|c| c[3]).collect();
            SphereField::rank2_from_frame(grid, &t11, &t12, &t21, &t22)
        };
        let form = |v: &Vec<[f64; 2]>| -> SphereField {
            let u1: Vec<f64> = v.iter().map(|c| c[0]).collect();
            let u2: Vec<f64> = v.iter().map(|c| c[1]).collect();
            SphereField::one_form_from_frame(grid, &u1, &u2)
        };
        let scal = |v: &Vec<f64>| -> SphereField { SphereField::scalar_from_real(grid, v) };
        PrimedPrediction {
            chi: full2(&self.chi),
            chib: full2(&self.chib),
            zeta: form(&self.zeta),
            eta: form(&self.eta),
            etab: form(&self.etab),
            omega: scal(&self.omega),
            omegab: scal(&self.omegab),
            xi: form(&self.xi),
            xib: form(&self.xib),
            alpha: full2(&self.alpha),
            beta: form(&self.beta),
            rho: scal(&self.rho),
            sigma: scal(&self.sigma),
            betab: form(&self.betab),
            alphab: full2(&self.alphab),
        }
    }
}

fn add4(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn sub4(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn scale4(a: &[f64; 4], s: f64) -> [f64; 4] {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

pub use boundary::boundary_transition;
pub mod boundary;

/// Sup-norm mismatch between a prediction and another prediction (or the
/// direct construction), over the connection coefficients only; the
/// curvature transformations drop coefficient-quadratic-times-curvature
/// terms by design and are compared separately.
pub fn connection_mismatch(a: &PrimedPrediction, b: &PrimedPrediction) -> f64 {
    [
        a.chi.sub(&b.chi).max_abs(),
        a.chib.sub(&b.chib).max_abs(),
        a.zeta.sub(&b.zeta).max_abs(),
        a.eta.sub(&b.eta).max_abs(),
        a.etab.sub(&b.etab).max_abs(),
        a.omega.sub(&b.omega).max_abs(),
        a.omegab.sub(&b.omegab).max_abs(),
        a.xi.sub(&b.xi).max_abs(),
        a.xib.sub(&b.xib).max_abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

pub fn curvature_mismatch(a: &PrimedPrediction, b: &PrimedPrediction) -> f64 {
    [
        a.alpha.sub(&b.alpha).max_abs(),
        a.beta.sub(&b.beta).max_abs(),
        a.rho.sub(&b.rho).max_abs(),
        a.sigma.sub(&b.sigma).max_abs(),
        a.betab.sub(&b.betab).max_abs(),
        a.alphab.sub(&b.alphab).max_abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Closed-form test profile: rigid low-degree angular dependence scaled by
/// `size`, mixing gradient and rotation vector parts.
pub struct TestProfile {
    pub size: f64,
}

impl AngularProfile for TestProfile {
    fn eval(&self, theta: f64, phi: f64) -> (f64, f64, f64, f64, f64) {
        let s = self.size;
        let lam = (s * (0.7 * theta.cos() + 0.4 * theta.sin() * phi.cos())).exp();
        // smooth vector basis: rotation generators and gradients of the
        // degree-one harmonics
        let rot_x = (-phi.sin(), -theta.cos() * phi.cos());
        let rot_z = (0.0, theta.sin());
        let grad_z = (-theta.sin(), 0.0);
        let grad_x = (theta.cos() * phi.cos(), -phi.sin());
        let grad_y = (theta.cos() * phi.sin(), phi.cos());
        let f1 = s * (grad_z.0 - 0.6 * rot_x.0 + 0.5 * grad_x.0);
        let f2 = s * (grad_z.1 - 0.6 * rot_x.1 + 0.5 * grad_x.1);
        let fb1 = s * (0.5 * grad_y.0 + 0.3 * rot_x.0 - 0.4 * rot_z.0);
        let fb2 = s * (0.5 * grad_y.1 + 0.3 * rot_x.1 - 0.4 * rot_z.1);
        (lam, f1, f2, fb1, fb2)
    }
}

/// Samples an angular profile into grid transition coefficients.
pub fn sample_profile(
    profile: &dyn AngularProfile,
    grid: &GridRef,
) -> TransitionCoefficients {
    let n = grid.n_nodes();
    let mut lam = vec![0.0; n];
    let mut f1 = vec![0.0; n];
    let mut f2 = vec![0.0; n];
    let mut fb1 = vec![0.0; n];
    let mut fb2 = vec![0.0; n];
    for i in 0..n {
        let (th, ph) = grid.node_angles(i);
        let (l, a, b, c, d) = profile.eval(th, ph);
        lam[i] = l;
        f1[i] = a;
        f2[i] = b;
        fb1[i] = c;
        fb2[i] = d;
    }
    TransitionCoefficients {
        lambda: SphereField::scalar_from_real(grid, &lam),
        f: SphereField::one_form_from_frame(grid, &f1, &f2),
        fbar: SphereField::one_form_from_frame(grid, &fb1, &fb2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphereGrid;

    #[test]
    fn identity_transition_preserves_the_state() {
        let grid = SphereGrid::new(6);
        let cones = EfCones::schwarzschild(1.0, FoliationType::OutgoingGeodesic);
        let state = cones.extract(&grid, 0.0, 20.0).unwrap();
        let coeffs = TransitionCoefficients::identity(&grid);
        let cd = CoefficientDerivs::zero(&grid);
        let pred = transform_frame(&state, &coeffs, &cd, true).unwrap();
        assert!(pred.chi.sub(&state.chi_full()).max_abs() < 1e-12);
        assert!(pred.zeta.sub(&state.zeta).max_abs() < 1e-12);
        assert!(pred.rho.sub(&state.rho).max_abs() < 1e-12);
        // the direct construction with the identity profile reproduces the
        // extraction (oracle self-check)
        struct Identity;
        impl AngularProfile for Identity {
            fn eval(&self, _: f64, _: f64) -> (f64, f64, f64, f64, f64) {
                (1.0, 0.0, 0.0, 0.0, 0.0)
            }
        }
        let oracle = DirectPrimedFrame { cones: &cones, profile: &Identity, fd_step: 1e-3 };
        let direct = oracle.construct(&grid, 0.0, 20.0).unwrap();
        assert!(
            connection_mismatch(&pred, &direct) < 1e-8,
            "identity oracle defect {:.3e}",
            connection_mismatch(&pred, &direct)
        );
        assert!(curvature_mismatch(&pred, &direct) < 1e-8);
    }

    #[test]
    fn constant_boost_on_minkowski_is_exact() {
        let grid = SphereGrid::new(6);
        let cones = EfCones::minkowski(FoliationType::OutgoingGeodesic);
        let state = cones.extract(&grid, 0.0, 8.0).unwrap();
        let delta = 0.1;
        let coeffs = TransitionCoefficients {
            lambda: SphereField::constant(&grid, 1.0 + delta),
            f: SphereField::zeros(&grid, 1),
            fbar: SphereField::zeros(&grid, 1),
        };
        let cd = CoefficientDerivs::zero(&grid);
        let pred = transform_frame(&state, &coeffs, &cd, true).unwrap();
        // trchi' = lambda trchi = (1 + delta) 2/r, rho' = 0
        let r = 4.0;
        let trchi_pred = trace_two_tensor(&state.metric, &pred.chi);
        assert!(
            (trchi_pred.comp(0)[0].re - (1.0 + delta) * 2.0 / r).abs() < 1e-12,
            "boosted trchi {}",
            trchi_pred.comp(0)[0].re
        );
        assert!(pred.rho.max_abs() < 1e-14);
        struct Boost;
        impl AngularProfile for Boost {
            fn eval(&self, _: f64, _: f64) -> (f64, f64, f64, f64, f64) {
                (1.1, 0.0, 0.0, 0.0, 0.0)
            }
        }
        let oracle = DirectPrimedFrame { cones: &cones, profile: &Boost, fd_step: 1e-3 };
        let direct = oracle.construct(&grid, 0.0, 8.0).unwrap();
        assert!(connection_mismatch(&pred, &direct) < 1e-9);
    }

    #[test]
    fn schwarzschild_mismatch_shrinks_cubically_with_err_terms() {
        let grid = SphereGrid::new(6);
        let cones = EfCones::schwarzschild(1.0, FoliationType::OutgoingGeodesic);
        let state = cones.extract(&grid, 0.0, 20.0).unwrap();
        let cd = CoefficientDerivs::zero(&grid);
        let sizes = [1e-2, 1e-3];
        let mut with_err = Vec::new();
        let mut without_err = Vec::new();
        for &s in &sizes {
            let profile = TestProfile { size: s };
            let coeffs = sample_profile(&profile, &grid);
            let oracle = DirectPrimedFrame { cones: &cones, profile: &profile, fd_step: 2e-3 };
            let direct = oracle.construct(&grid, 0.0, 20.0).unwrap();
            let pred_on = transform_frame(&state, &coeffs, &cd, true).unwrap();
            let pred_off = transform_frame(&state, &coeffs, &cd, false).unwrap();
            with_err.push(connection_mismatch(&pred_on, &direct));
            without_err.push(connection_mismatch(&pred_off, &direct));
        }
        let slope_on = crate::num::loglog_slope(&sizes, &with_err).unwrap();
        let slope_off = crate::num::loglog_slope(&sizes, &without_err).unwrap();
        assert!(
            (slope_on - 3.0).abs() < 0.2,
            "with-Err slope {slope_on} ({with_err:?})"
        );
        assert!(
            (slope_off - 2.0).abs() < 0.2,
            "without-Err slope {slope_off} ({without_err:?})"
        );
    }
}


fn sym_part(t: &SphereField) -> SphereField {
    t.add(&t.permute_slots(&[1, 0])).scale(0.5)
}
