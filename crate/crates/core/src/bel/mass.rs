//! Quasi-local mass and angular-momentum diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spacetime::ConeState;
use crate::sphere::calculus::dot;
use crate::sphere::norms::integrate;

use super::rotation::RotationFields;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassMomentum {
    pub hawking_mass: f64,
    /// `-(r / 64 pi) int trchi |chibhat|^2`: the mass-loss integrand.
    pub bondi_loss_integrand: f64,
    pub angular_momentum: [f64; 3],
}

pub fn mass_momentum(state: &ConeState, rotation: Option<&RotationFields>) -> Result<MassMomentum> {
    let g = &state.metric;
    let r = g.area_radius();
    let trchi_trchib = state.trchi.mul_scalar_field(&state.trchib);
    let hawking =
        0.5 * r + r / (32.0 * std::f64::consts::PI) * integrate(&trchi_trchib, g);
    let chibhat_sq = crate::sphere::calculus::dot_two_tensors(g, &state.chibhat, &state.chibhat);
    let loss_integrand = -r / (64.0 * std::f64::consts::PI)
        * integrate(&state.trchi.mul_scalar_field(&chibhat_sq), g);
    let mut angular = [0.0; 3];
    if let Some(rot) = rotation {
        for (k, o) in rot.fields.iter().enumerate() {
            angular[k] = integrate(&dot(g, &state.zeta, o), g)
                / (8.0 * std::f64::consts::PI * r);
        }
    }
    Ok(MassMomentum {
        hawking_mass: hawking,
        bondi_loss_integrand: loss_integrand,
        angular_momentum: angular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bel::rotation::{cartesian_functions, rotation_fields};
    use crate::spacetime::{EfCones, FoliationType};
    use crate::sphere::SphereGrid;

    #[test]
    fn minkowski_mass_and_momentum_vanish() {
        let grid = SphereGrid::new(8);
        let cones = EfCones::minkowski(FoliationType::OutgoingGeodesic);
        let state = cones.extract(&grid, 1.0, 9.0).unwrap();
        let xs = cartesian_functions(&grid, state.area_radius());
        let rot = rotation_fields(&state.metric, &xs).unwrap();
        let mm = mass_momentum(&state, Some(&rot)).unwrap();
        assert!(mm.hawking_mass.abs() < 1e-10);
        assert!(mm.bondi_loss_integrand.abs() < 1e-14);
        for l in mm.angular_momentum {
            assert!(l.abs() < 1e-12);
        }
    }

    #[test]
    fn schwarzschild_mass_is_m_at_all_radii() {
        let grid = SphereGrid::new(8);
        for fol in [FoliationType::OutgoingGeodesic, FoliationType::IngoingGeodesic] {
            let cones = EfCones::schwarzschild(1.0, fol);
            for r in [5.0, 10.0, 20.0] {
                let state = cones.extract(&grid, 0.0, 2.0 * r).unwrap();
                let mm = mass_momentum(&state, None).unwrap();
                assert!(
                    (mm.hawking_mass - 1.0).abs() < 1e-6,
                    "m = {} at r = {r}",
                    mm.hawking_mass
                );
                assert!(mm.angular_momentum.iter().all(|l| l.abs() < 1e-12));
            }
        }
    }
}
