//! Null-decomposition snapshots on sphere leaves of cone foliations.
//!
//! A `ConeState` carries the induced metric, all null connection
//! coefficients and curvature components of one sphere `S_{u, ub}`, with
//! the frame normalized by `g(l, lb) = -2` and the foliation relations
//! `lb(u) = 2`, `l(ub) = 2`. Transverse derivatives of the coefficients
//! ship separately as `ConeDerivs` so residual evaluation stays
//! independent of how they were produced (closed form or cone
//! differencing).

use serde::{Deserialize, Serialize};

use super::adapter::{MetricAdapter, Point, Schwarzschild, SchwarzschildChart};
use crate::error::{Error, Result};
use crate::sphere::{GridRef, SphereField, SphereMetric};

/// Which null direction is affinely geodesic along the foliated cones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoliationType {
    /// Outgoing cones `C_u`: `l` geodesic, `ub` affine along `l`
    /// (exterior-region setup: `xi = omega = 0`, `eta = zeta`,
    /// `etab = -zeta`).
    OutgoingGeodesic,
    /// Ingoing cones `C_ub`: `lb` geodesic, `u` affine along `lb`
    /// (last-cone setup: `xib = omegab = 0`, `eta = zeta`,
    /// `etab = -zeta`).
    IngoingGeodesic,
}

/// Per-node spacetime frame attached to the sphere.
#[derive(Debug, Clone)]
pub struct ConeFrames {
    /// Base point of each node in adapter coordinates.
    pub position: Vec<Point>,
    pub l: Vec<[f64; 4]>,
    pub lb: Vec<[f64; 4]>,
    /// Sphere dyad as spacetime vectors (round-orthonormal convention).
    pub e1: Vec<[f64; 4]>,
    pub e2: Vec<[f64; 4]>,
}

#[derive(Debug, Clone)]
pub struct ConeState {
    pub foliation: FoliationType,
    pub u: f64,
    pub ubar: f64,
    pub metric: SphereMetric,
    // connection coefficients
    pub trchi: SphereField,
    pub chihat: SphereField,
    pub trchib: SphereField,
    pub chibhat: SphereField,
    pub zeta: SphereField,
    pub eta: SphereField,
    pub etab: SphereField,
    pub omega: SphereField,
    pub omegab: SphereField,
    pub xi: SphereField,
    pub xib: SphereField,
    // curvature components
    pub alpha: SphereField,
    pub beta: SphereField,
    pub rho: SphereField,
    pub sigma: SphereField,
    pub betab: SphereField,
    pub alphab: SphereField,
    /// Optical defect of the non-null foliation function.
    pub optical_defect: SphereField,
    /// Angular shift of the transverse null direction (1-form).
    pub shift: SphereField,
    pub frames: Option<ConeFrames>,
}

impl ConeState {
    pub fn grid(&self) -> &GridRef {
        self.metric.grid()
    }

    pub fn area_radius(&self) -> f64 {
        self.metric.area_radius()
    }

    /// Full second fundamental form `chi = (trchi/2) gh + chihat`.
    pub fn chi_full(&self) -> SphereField {
        self.metric.tensor().mul_scalar_field(&self.trchi).scale(0.5).add(&self.chihat)
    }

    pub fn chib_full(&self) -> SphereField {
        self.metric.tensor().mul_scalar_field(&self.trchib).scale(0.5).add(&self.chibhat)
    }

    /// Checks the geodesic-foliation vanishing relations at the stated
    /// tolerance; returns the worst violation.
    pub fn geodesic_relation_defect(&self) -> f64 {
        let (a, b) = match self.foliation {
            FoliationType::OutgoingGeodesic => (&self.xi, &self.omega),
            FoliationType::IngoingGeodesic => (&self.xib, &self.omegab),
        };
        let eta_defect = self.eta.sub(&self.zeta).max_abs();
        let etab_defect = self.etab.add(&self.zeta).max_abs();
        a.max_abs().max(b.max_abs()).max(eta_defect).max(etab_defect)
    }
}

/// Transverse derivatives of every coefficient of a `ConeState`, as
/// projected covariant derivatives along `lb` (`d3`) and `l` (`d4`).
#[derive(Debug, Clone)]
pub struct DirectionalDerivs {
    pub trchi: SphereField,
    pub chihat: SphereField,
    pub trchib: SphereField,
    pub chibhat: SphereField,
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
    pub optical_defect: SphereField,
    /// Projected Lie derivative of the sphere metric along the direction
    /// (equals `2 chi` resp. `2 chib` by the first structure equation).
    pub lie_metric: SphereField,
}

#[derive(Debug, Clone)]
pub struct ConeDerivs {
    pub d3: DirectionalDerivs,
    pub d4: DirectionalDerivs,
}

/// A two-parameter family of sphere leaves: the provider for residual
/// evaluation, transverse differencing and transport integration.
pub trait ConeFamily: Sync {
    fn foliation(&self) -> FoliationType;
    fn extract(&self, grid: &GridRef, u: f64, ubar: f64) -> Result<ConeState>;
    fn derivs(&self, grid: &GridRef, u: f64, ubar: f64) -> Result<ConeDerivs>;
}

impl ConeFamily for EfCones {
    fn foliation(&self) -> FoliationType {
        self.foliation
    }
    fn extract(&self, grid: &GridRef, u: f64, ubar: f64) -> Result<ConeState> {
        EfCones::extract(self, grid, u, ubar)
    }
    fn derivs(&self, grid: &GridRef, u: f64, ubar: f64) -> Result<ConeDerivs> {
        EfCones::derivs(self, grid, u, ubar)
    }
}

/// Closed-form cone extraction for Schwarzschild (and Minkowski as the
/// `M = 0` case) in Eddington-Finkelstein form, where the leaves are exact
/// coordinate spheres of radius `r = (ub - u)/2`.
pub struct EfCones {
    pub mass: f64,
    pub foliation: FoliationType,
}

impl EfCones {
    pub fn minkowski(foliation: FoliationType) -> Self {
        Self { mass: 0.0, foliation }
    }

    pub fn schwarzschild(mass: f64, foliation: FoliationType) -> Self {
        Self { mass, foliation }
    }

    pub fn adapter(&self) -> Schwarzschild {
        let chart = match self.foliation {
            FoliationType::OutgoingGeodesic => SchwarzschildChart::EfOutgoing,
            FoliationType::IngoingGeodesic => SchwarzschildChart::EfIngoing,
        };
        Schwarzschild::new(self.mass, chart).expect("mass validated")
    }

    fn radius(&self, u: f64, ubar: f64) -> Result<f64> {
        let r = 0.5 * (ubar - u);
        if r <= 0.0 {
            return Err(Error::DegenerateSphere(r));
        }
        if self.mass > 0.0 && r <= 2.0 * self.mass {
            return Err(Error::InvalidParameter(format!(
                "sphere radius {r} inside the horizon"
            )));
        }
        Ok(r)
    }

    /// Scalar profiles of all nonvanishing quantities at radius `r`:
    /// `(trchi, trchib, omega, omegab, y, rho)`.
    fn profiles(&self, r: f64) -> (f64, f64, f64, f64, f64, f64) {
        let m = self.mass;
        let w = 1.0 - 2.0 * m / r;
        let rho = -2.0 * m / (r * r * r);
        match self.foliation {
            FoliationType::OutgoingGeodesic => {
                // l = d_r, lb = 2 d_u - W d_r
                (2.0 / r, -2.0 * w / r, 0.0, m / (r * r), 4.0 * m / r, rho)
            }
            FoliationType::IngoingGeodesic => {
                // lb = -d_r, l = 2 d_v + W d_r
                (2.0 * w / r, -2.0 / r, -m / (r * r), 0.0, 4.0 * m / r, rho)
            }
        }
    }

    /// `l(r)` and `lb(r)`.
    fn radial_speeds(&self, r: f64) -> (f64, f64) {
        let w = 1.0 - 2.0 * self.mass / r;
        match self.foliation {
            FoliationType::OutgoingGeodesic => (1.0, -w),
            FoliationType::IngoingGeodesic => (w, -1.0),
        }
    }

    pub fn extract(&self, grid: &GridRef, u: f64, ubar: f64) -> Result<ConeState> {
        let r = self.radius(u, ubar)?;
        let metric = SphereMetric::round(grid, r);
        let (trchi, trchib, omega, omegab, y, rho) = self.profiles(r);
        let zero_s = SphereField::zeros(grid, 0);
        let zero_1 = SphereField::zeros(grid, 1);
        let zero_2 = SphereField::zeros(grid, 2);
        let frames = self.frames(grid, u, ubar, r);
        Ok(ConeState {
            foliation: self.foliation,
            u,
            ubar,
            metric,
            trchi: SphereField::constant(grid, trchi),
            chihat: zero_2.clone(),
            trchib: SphereField::constant(grid, trchib),
            chibhat: zero_2.clone(),
            zeta: zero_1.clone(),
            eta: zero_1.clone(),
            etab: zero_1.clone(),
            omega: SphereField::constant(grid, omega),
            omegab: SphereField::constant(grid, omegab),
            xi: zero_1.clone(),
            xib: zero_1.clone(),
            alpha: zero_2.clone(),
            beta: zero_1.clone(),
            rho: SphereField::constant(grid, rho),
            sigma: zero_s.clone(),
            betab: zero_1,
            alphab: zero_2,
            optical_defect: SphereField::constant(grid, y),
            shift: SphereField::zeros(grid, 1),
            frames: Some(frames),
        })
    }

    fn frames(&self, grid: &GridRef, u: f64, ubar: f64, r: f64) -> ConeFrames {
        let w = 1.0 - 2.0 * self.mass / r;
        let n = grid.n_nodes();
        let mut position = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n);
        let mut lb = Vec::with_capacity(n);
        let mut e1 = Vec::with_capacity(n);
        let mut e2 = Vec::with_capacity(n);
        // chart coordinate x0 is u (outgoing) or v = ub (ingoing)
        let x0 = match self.foliation {
            FoliationType::OutgoingGeodesic => u,
            FoliationType::IngoingGeodesic => ubar,
        };
        for i in 0..n {
            let (th, ph) = grid.node_angles(i);
            position.push([x0, r, th, ph]);
            match self.foliation {
                FoliationType::OutgoingGeodesic => {
                    l.push([0.0, 1.0, 0.0, 0.0]);
                    lb.push([2.0, -w, 0.0, 0.0]);
                }
                FoliationType::IngoingGeodesic => {
                    l.push([2.0, w, 0.0, 0.0]);
                    lb.push([0.0, -1.0, 0.0, 0.0]);
                }
            }
            e1.push([0.0, 0.0, 1.0 / r, 0.0]);
            e2.push([0.0, 0.0, 0.0, 1.0 / (r * th.sin())]);
        }
        ConeFrames { position, l, lb, e1, e2 }
    }

    /// Exact transverse derivatives: every quantity is a function of `r`
    /// alone, so projected derivatives reduce to radial derivatives times
    /// `l(r)` resp. `lb(r)`.
    pub fn derivs(&self, grid: &GridRef, u: f64, ubar: f64) -> Result<ConeDerivs> {
        let r = self.radius(u, ubar)?;
        let (lr, lbr) = self.radial_speeds(r);
        let m = self.mass;
        let w = 1.0 - 2.0 * m / r;
        let wp = 2.0 * m / (r * r);
        // radial derivatives of the profiles: d/dr(a W / r) etc.
        let (d_trchi, d_trchib, d_omega, d_omegab) = match self.foliation {
            FoliationType::OutgoingGeodesic => (
                -2.0 / (r * r),
                -2.0 * (wp * r - w) / (r * r),
                0.0,
                -2.0 * m / (r * r * r),
            ),
            FoliationType::IngoingGeodesic => (
                2.0 * (wp * r - w) / (r * r),
                2.0 / (r * r),
                2.0 * m / (r * r * r),
                0.0,
            ),
        };
        let d_rho = 6.0 * m / (r * r * r * r);
        let d_y = -4.0 * m / (r * r);

        let mk = |scale: f64, d: f64| SphereField::constant(grid, scale * d);
        let zero_1 = SphereField::zeros(grid, 1);
        let zero_2 = SphereField::zeros(grid, 2);
        let zero_s = SphereField::zeros(grid, 0);
        let state = self.extract(grid, u, ubar)?;
        let _ = &state;
        let build = |speed: f64| -> DirectionalDerivs {
            // Lie derivative of gh along the direction, from the radial
            // geometry alone: components (2 speed / r) delta.
            let lie_metric = SphereField::round_metric(grid).scale(2.0 * speed / r);
            DirectionalDerivs {
                trchi: mk(speed, d_trchi),
                chihat: zero_2.clone(),
                trchib: mk(speed, d_trchib),
                chibhat: zero_2.clone(),
                zeta: zero_1.clone(),
                eta: zero_1.clone(),
                etab: zero_1.clone(),
                omega: mk(speed, d_omega),
                omegab: mk(speed, d_omegab),
                xi: zero_1.clone(),
                xib: zero_1.clone(),
                alpha: zero_2.clone(),
                beta: zero_1.clone(),
                rho: mk(speed, d_rho),
                sigma: zero_s.clone(),
                betab: zero_1.clone(),
                alphab: zero_2.clone(),
                optical_defect: mk(speed, d_y),
                lie_metric,
            }
        };
        Ok(ConeDerivs { d3: build(lbr), d4: build(lr) })
    }
}

/// Frame-normalization residuals of a state with frames, measured against
/// the adapter metric: `g(l, lb) + 2`, `g(l, l)`, `g(lb, lb)`,
/// `g(l, e_a)`, `g(e_a, e_b) - gh(e_a, e_b)`.
pub fn frame_normalization_defect(state: &ConeState, adapter: &dyn MetricAdapter) -> f64 {
    let Some(frames) = &state.frames else {
        return f64::NAN;
    };
    let grid = state.grid();
    let gh = state.metric.tensor();
    let mut worst = 0.0f64;
    for i in 0..grid.n_nodes() {
        let g = adapter.metric(&frames.position[i]);
        let ip = |a: &[f64; 4], b: &[f64; 4]| -> f64 {
            let mut acc = 0.0;
            for mu in 0..4 {
                for nu in 0..4 {
                    acc += g[(mu, nu)] * a[mu] * b[nu];
                }
            }
            acc
        };
        let l = &frames.l[i];
        let lb = &frames.lb[i];
        let e1 = &frames.e1[i];
        let e2 = &frames.e2[i];
        worst = worst.max((ip(l, lb) + 2.0).abs());
        worst = worst.max(ip(l, l).abs());
        worst = worst.max(ip(lb, lb).abs());
        for e in [e1, e2] {
            worst = worst.max(ip(l, e).abs());
            worst = worst.max(ip(lb, e).abs());
        }
        let ghc = gh.frame_components(i);
        worst = worst.max((ip(e1, e1) - ghc[0]).abs());
        worst = worst.max((ip(e1, e2) - ghc[1]).abs());
        worst = worst.max((ip(e2, e2) - ghc[3]).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphereGrid;
    use approx::assert_relative_eq;

    #[test]
    fn minkowski_cone_state_is_flat() {
        let grid = SphereGrid::new(8);
        for fol in [FoliationType::OutgoingGeodesic, FoliationType::IngoingGeodesic] {
            let cones = EfCones::minkowski(fol);
            let state = cones.extract(&grid, 2.0, 10.0).unwrap();
            let r = 4.0;
            assert_relative_eq!(state.area_radius(), r, max_relative = 1e-13);
            assert_relative_eq!(state.trchi.comp(0)[0].re, 2.0 / r, max_relative = 1e-13);
            assert_relative_eq!(state.trchib.comp(0)[0].re, -2.0 / r, max_relative = 1e-13);
            for f in [
                &state.chihat,
                &state.alpha,
                &state.alphab,
            ] {
                assert!(f.max_abs() < 1e-15);
            }
            assert!(state.rho.max_abs() < 1e-15);
            assert!(state.optical_defect.max_abs() < 1e-15);
            assert!(state.geodesic_relation_defect() < 1e-15);
            let defect = frame_normalization_defect(&state, &cones.adapter());
            assert!(defect < 1e-12, "frame defect {defect}");
        }
    }

    #[test]
    fn schwarzschild_ingoing_matches_closed_forms() {
        let grid = SphereGrid::new(8);
        let cones = EfCones::schwarzschild(1.0, FoliationType::IngoingGeodesic);
        // r = 10: u = ub - 20
        let state = cones.extract(&grid, -10.0, 10.0).unwrap();
        let r: f64 = 10.0;
        let w = 1.0 - 2.0 / r;
        assert_relative_eq!(state.rho.comp(0)[0].re, -2.0 / r.powi(3), max_relative = 1e-13);
        assert_relative_eq!(state.trchi.comp(0)[0].re, 2.0 * w / r, max_relative = 1e-13);
        assert_relative_eq!(state.trchib.comp(0)[0].re, -2.0 / r, max_relative = 1e-13);
        assert!(state.alpha.max_abs() < 1e-15);
        assert!(state.beta.max_abs() < 1e-15);
        assert!(state.sigma.max_abs() < 1e-15);
        let defect = frame_normalization_defect(&state, &cones.adapter());
        assert!(defect < 1e-12, "frame defect {defect}");
    }

    #[test]
    fn outgoing_foliation_satisfies_lemma_relations() {
        // grad y = -2 xib and D4 y = -4 omegab on the outgoing geodesic
        // foliation; y is spherically symmetric so xib = 0, and the radial
        // derivative relation fixes omegab = M/r^2.
        let grid = SphereGrid::new(8);
        let cones = EfCones::schwarzschild(1.0, FoliationType::OutgoingGeodesic);
        let state = cones.extract(&grid, 0.0, 20.0).unwrap();
        let derivs = cones.derivs(&grid, 0.0, 20.0).unwrap();
        let lhs = derivs.d4.optical_defect.clone();
        let rhs = state.omegab.scale(-4.0);
        assert!(lhs.sub(&rhs).max_abs() < 1e-13);
        assert!(state.xib.max_abs() < 1e-15);
        // horizon / degenerate guards
        assert!(cones.extract(&grid, 0.0, 3.0).is_err());
        assert!(cones.extract(&grid, 5.0, 1.0).is_err());
    }
}
