//! Grid-level oracles for the sphere calculus: finite-difference stencils
//! on the quadrature grid check the spectral derivative path, and the
//! norm/metric invariants run over a randomized catalog.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nullgeo_core::num::fd_weights;
use nullgeo_core::sphere::grid::{mode_count, mode_index};
use nullgeo_core::sphere::norms::{self, NormKind};
use nullgeo_core::sphere::{GridRef, SphereField, SphereGrid, SphereMetric};

fn random_real_scalar(grid: &GridRef, l_max: usize, rng: &mut ChaCha8Rng) -> SphereField {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); mode_count(grid.band_limit())];
    for l in 0..=l_max {
        for m in 0..=(l as i64) {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            coeffs[mode_index(l, m)] = c;
            // real field: c_{l,-m} = (-1)^m conj(c_{lm})
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[mode_index(l, -m)] = sign * c.conj();
        }
        coeffs[mode_index(l, 0)] = Complex64::new(coeffs[mode_index(l, 0)].re, 0.0);
    }
    let vals = grid.synthesize(0, &coeffs).unwrap();
    let mut f = SphereField::zeros(grid, 0);
    f.comp_mut(0).copy_from_slice(&vals);
    f
}

/// Dense finite-difference gradient on the grid: Lagrange stencils across
/// the Gauss-Legendre colatitudes, periodic stencils in longitude.
fn fd_gradient(grid: &GridRef, f: &SphereField, radius: f64) -> (Vec<f64>, Vec<f64>) {
    let nt = grid.n_theta();
    let np = grid.n_phi();
    let theta = grid.theta();
    let width = 13usize;
    let mut d_theta = vec![0.0; grid.n_nodes()];
    let mut d_phi = vec![0.0; grid.n_nodes()];
    for j in 0..nt {
        let lo = j.saturating_sub(width / 2).min(nt - width);
        let nodes: Vec<f64> = theta[lo..lo + width].to_vec();
        let w = fd_weights(theta[j], &nodes, 1);
        for k in 0..np {
            let mut acc = 0.0;
            for (off, wi) in w.iter().enumerate() {
                acc += wi * f.comp(0)[grid.node_index(lo + off, k)].re;
            }
            d_theta[grid.node_index(j, k)] = acc / radius;
        }
    }
    let dphi = 2.0 * std::f64::consts::PI / np as f64;
    // 12th-order periodic central stencil in phi.
    let offs: Vec<f64> = (-6..=6).map(|o| o as f64 * dphi).collect();
    let cw = fd_weights(0.0, &offs, 1);
    for j in 0..nt {
        let sin_t = theta[j].sin();
        for k in 0..np {
            let mut acc = 0.0;
            for (o, wi) in cw.iter().enumerate() {
                let kk = (k + np + o - 6) % np;
                acc += wi * f.comp(0)[grid.node_index(j, kk)].re;
            }
            d_phi[grid.node_index(j, k)] = acc / (radius * sin_t);
        }
    }
    (d_theta, d_phi)
}

#[test]
fn spectral_gradient_matches_fd_stencil_oracle() {
    let grid = SphereGrid::new(32);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let f = random_real_scalar(&grid, 4, &mut rng);
    let radius = 1.7;
    let metric = SphereMetric::round(&grid, radius);
    let grad = metric.covariant_derivative(&f).unwrap();
    let (dt, dp) = fd_gradient(&grid, &f, radius);
    let scale = f.max_abs().max(1.0);
    let mut worst = 0.0f64;
    for i in 0..grid.n_nodes() {
        let c = grad.frame_components(i);
        worst = worst.max((c[0] - dt[i]).abs().max((c[1] - dp[i]).abs()));
    }
    assert!(
        worst / scale < 1e-6,
        "spectral vs FD gradient relative error {:.3e}",
        worst / scale
    );
}

/// Random smooth symmetric perturbation assembled from scalar potentials:
/// `h = a delta + grad-hat(grad p + *grad q)`. Sampling raw per-node frame
/// values would not give a smooth tensor at the poles.
fn random_perturbation(grid: &GridRef, amp: f64, rng: &mut ChaCha8Rng) -> SphereField {
    use nullgeo_core::sphere::calculus::{dual_one_form, grad, grad_hat};
    let round = SphereMetric::round(grid, 1.0);
    let a = random_real_scalar(grid, 3, rng);
    let p = random_real_scalar(grid, 3, rng);
    let q = random_real_scalar(grid, 3, rng);
    let u = grad(&round, &p)
        .unwrap()
        .add(&dual_one_form(&round, &grad(&round, &q).unwrap()));
    let delta = SphereField::round_metric(grid);
    delta.mul_scalar_field(&a).add(&grad_hat(&round, &u).unwrap()).scale(amp)
}

#[test]
fn gauss_bonnet_over_perturbation_catalog() {
    let grid = SphereGrid::new(16);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..5 {
        let h = random_perturbation(&grid, 0.01, &mut rng);
        let g = SphereMetric::perturbed(1.3, &h).unwrap();
        let k = g.gauss_curvature().unwrap();
        let total = g.integrate(&k);
        assert!(
            (total - 4.0 * std::f64::consts::PI).abs() < 1e-10,
            "trial {trial}: Gauss-Bonnet defect {:.3e}",
            total - 4.0 * std::f64::consts::PI
        );
    }
}

/// Pullback of the round metric by an explicit diffeomorphism: a
/// non-conformal exact case where K stays identically 1.
#[test]
fn pullback_of_round_metric_has_unit_curvature() {
    let grid = SphereGrid::new(24);
    let n = grid.n_nodes();
    let eps = 0.02;
    let mut t11 = vec![0.0; n];
    let mut t12 = vec![0.0; n];
    let mut t22 = vec![0.0; n];
    for i in 0..n {
        let (th, _) = grid.node_angles(i);
        let a = 1.0 + 2.0 * eps * (2.0 * th).cos();
        let thp = th + eps * (2.0 * th).sin();
        let s2 = thp.sin() * thp.sin();
        let dphp_dth = -eps * th.sin();
        let e = a * a + s2 * dphp_dth * dphp_dth;
        let f = s2 * dphp_dth;
        t11[i] = e - 1.0;
        t12[i] = f / th.sin();
        t22[i] = s2 / (th.sin() * th.sin()) - 1.0;
    }
    let h = SphereField::sym2_from_frame(&grid, &t11, &t12, &t22);
    let g = SphereMetric::perturbed(1.0, &h).unwrap();
    let k = g.gauss_curvature().unwrap();
    for i in 0..n {
        assert!((k.comp(0)[i].re - 1.0).abs() < 1e-11, "node {i}");
    }
}

#[test]
fn l4_to_hhalf_ratio_bounded_on_catalog() {
    let grid = SphereGrid::new(16);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = random_perturbation(&grid, 0.01, &mut rng);
    for metric in [
        SphereMetric::round(&grid, 1.0),
        SphereMetric::round(&grid, 3.0),
        SphereMetric::perturbed(1.0, &h).unwrap(),
    ] {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let f = random_real_scalar(&grid, 8, &mut rng);
            let l4 = norms::norm(&f, &metric, NormKind::L4).unwrap();
            let hh = norms::norm(&f, &metric, NormKind::Hhalf).unwrap();
            if hh > 0.0 {
                worst = worst.max(l4 / hh);
            }
        }
        assert!(worst <= 2.0, "L4 / Hhalf ratio {worst} exceeds 2.0");
    }
}

#[test]
fn integration_is_linear_in_the_integrand() {
    let grid = SphereGrid::new(12);
    let g = SphereMetric::round(&grid, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random_real_scalar(&grid, 6, &mut rng);
    let b = random_real_scalar(&grid, 6, &mut rng);
    let lhs = norms::integrate(&a.scale(2.5).add(&b.scale(-0.75)), &g);
    let rhs = 2.5 * norms::integrate(&a, &g) - 0.75 * norms::integrate(&b, &g);
    assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
}

#[test]
fn hat_products_are_traceless_to_spec_tolerance() {
    let grid = SphereGrid::new(12);
    let g = SphereMetric::round(&grid, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = random_real_scalar(&grid, 5, &mut rng);
    let u = g.covariant_derivative(&f).unwrap();
    let p = nullgeo_core::sphere::calculus::hat_product(&g, &u, &u);
    let tr = nullgeo_core::sphere::calculus::trace_two_tensor(&g, &p);
    let rel = tr.max_abs() / p.max_abs().max(1e-300);
    assert!(rel < 1e-12, "trace defect {rel:.3e}");
}

mod roundtrip_properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn transform_round_trip_is_tight(seed in 0u64..1000) {
            let grid = SphereGrid::new(12);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_real_scalar(&grid, 12, &mut rng);
            let spec = f.to_spectral().unwrap();
            let back = spec.to_grid(&grid).unwrap();
            let err = back.sub(&f).max_abs();
            let scale = f.max_abs().max(1e-300);
            prop_assert!(err / scale < 1e-12);
        }
    }
}
