//! Discretized 2-sphere: Gauss-Legendre colatitudes times uniform
//! longitudes, with cached spin-weighted spherical-harmonic basis tables.
//!
//! The quadrature integrates products of two band-limited (degree <= L)
//! harmonics exactly: Gauss-Legendre with L+1 nodes handles polynomial
//! degree 2L+1 in cos(theta), and 2L+1 uniform longitudes handle Fourier
//! modes up to |m| = 2L.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Error;
use crate::num::{gauss_legendre, wigner::wigner_d_column};

/// Highest spin weight for which basis tables are built.
pub const MAX_SPIN: i32 = 4;

/// Spectral index layout: coefficients are stored densely as
/// `idx = l(l+1) + m` for `0 <= l <= L`, `|m| <= l`.
#[inline]
pub fn mode_index(l: usize, m: i64) -> usize {
    (l * (l + 1)) as usize + ((l as i64 + m) as usize) - l
}

/// Number of (l, m) modes up to band limit `l_max`.
#[inline]
pub fn mode_count(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 1)
}

/// Quadrature grid on the unit 2-sphere.
#[derive(Debug)]
pub struct SphereGrid {
    band_limit: usize,
    theta: Vec<f64>,
    /// Gauss-Legendre weights in cos(theta), one per colatitude row.
    theta_weight: Vec<f64>,
    phi: Vec<f64>,
    /// Per spin `s + MAX_SPIN`, flattened table
    /// `d[spin][(l, m)][j] = d^l_{m,-s}(theta_j)`, zero for `l < |s|`.
    basis: Vec<Vec<f64>>,
}

pub type GridRef = Arc<SphereGrid>;

impl SphereGrid {
    /// Builds the grid and basis tables for band limit `band_limit`.
    pub fn new(band_limit: usize) -> GridRef {
        assert!(band_limit >= MAX_SPIN as usize, "band limit below max spin weight");
        let n_theta = band_limit + 1;
        let n_phi = 2 * band_limit + 1;
        let (x, w) = gauss_legendre(n_theta);
        // x increasing => theta decreasing; store theta increasing.
        let theta: Vec<f64> = x.iter().rev().map(|x| x.acos()).collect();
        let theta_weight: Vec<f64> = w.iter().rev().copied().collect();
        let phi: Vec<f64> = (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect();

        let mut basis = Vec::with_capacity((2 * MAX_SPIN + 1) as usize);
        for s in -MAX_SPIN..=MAX_SPIN {
            let mut tab = vec![0.0; mode_count(band_limit) * n_theta];
            for m in -(band_limit as i64)..=(band_limit as i64) {
                for (j, &th) in theta.iter().enumerate() {
                    let col = wigner_d_column(band_limit as u32, m as i32, -s, th);
                    let l_min = (m.unsigned_abs() as usize).max(s.unsigned_abs() as usize);
                    for (off, val) in col.iter().enumerate() {
                        let l = l_min + off;
                        tab[mode_index(l, m) * n_theta + j] = *val;
                    }
                }
            }
            basis.push(tab);
        }

        Arc::new(Self { band_limit, theta, theta_weight, phi, basis })
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_theta() * self.n_phi()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    #[inline]
    pub fn node_index(&self, j_theta: usize, k_phi: usize) -> usize {
        j_theta * self.n_phi() + k_phi
    }

    #[inline]
    pub fn node_angles(&self, idx: usize) -> (f64, f64) {
        (self.theta[idx / self.n_phi()], self.phi[idx % self.n_phi()])
    }

    /// Quadrature weight of node `idx` for the unit round measure
    /// `sin(theta) dtheta dphi`.
    #[inline]
    pub fn node_weight(&self, idx: usize) -> f64 {
        self.theta_weight[idx / self.n_phi()] * 2.0 * PI / self.n_phi() as f64
    }

    fn check_spin(&self, spin: i32) -> Result<(), Error> {
        if spin.unsigned_abs() as usize > self.band_limit || spin.abs() > MAX_SPIN {
            return Err(Error::SpinBeyondBandLimit { spin, band_limit: self.band_limit });
        }
        Ok(())
    }

    /// `sYlm` value table access: `d^l_{m,-s}(theta_j)` scaled into a full
    /// harmonic with the Goldberg normalization
    /// `sYlm = (-1)^s sqrt((2l+1)/4pi) d^l_{m,-s}(theta) e^{im phi}`.
    #[inline]
    fn d_table(&self, spin: i32) -> &[f64] {
        &self.basis[(spin + MAX_SPIN) as usize]
    }

    /// Forward transform of a single spin-weighted grid function.
    pub fn analyze(&self, spin: i32, values: &[Complex64]) -> Result<Vec<Complex64>, Error> {
        self.check_spin(spin)?;
        assert_eq!(values.len(), self.n_nodes());
        let n_theta = self.n_theta();
        let n_phi = self.n_phi();
        let l_max = self.band_limit;

        // Longitudinal DFT per row: f_m(theta_j), m = -L..L.
        let mut fm = vec![Complex64::new(0.0, 0.0); n_theta * (2 * l_max + 1)];
        for j in 0..n_theta {
            for (mi, m) in (-(l_max as i64)..=(l_max as i64)).enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n_phi {
                    let ph = -(m as f64) * self.phi[k];
                    acc += values[self.node_index(j, k)] * Complex64::new(ph.cos(), ph.sin());
                }
                fm[j * (2 * l_max + 1) + mi] = acc * (2.0 * PI / n_phi as f64);
            }
        }

        let sign = if spin % 2 == 0 { 1.0 } else { -1.0 };
        let tab = self.d_table(spin);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); mode_count(l_max)];
        for l in (spin.unsigned_abs() as usize)..=l_max {
            let norm = sign * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
            for m in -(l as i64)..=(l as i64) {
                let mi = (m + l_max as i64) as usize;
                let row = &tab[mode_index(l, m) * n_theta..(mode_index(l, m) + 1) * n_theta];
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n_theta {
                    acc += fm[j * (2 * l_max + 1) + mi] * (self.theta_weight[j] * row[j]);
                }
                coeffs[mode_index(l, m)] = acc * norm;
            }
        }
        Ok(coeffs)
    }

    /// Inverse transform of a single spin-weighted coefficient vector.
    pub fn synthesize(&self, spin: i32, coeffs: &[Complex64]) -> Result<Vec<Complex64>, Error> {
        self.check_spin(spin)?;
        assert_eq!(coeffs.len(), mode_count(self.band_limit));
        let n_theta = self.n_theta();
        let n_phi = self.n_phi();
        let l_max = self.band_limit;
        let sign = if spin % 2 == 0 { 1.0 } else { -1.0 };
        let tab = self.d_table(spin);

        // Accumulate g_m(theta_j) = sum_l c_lm N_l d^l_{m,-s}(theta_j).
        let mut gm = vec![Complex64::new(0.0, 0.0); n_theta * (2 * l_max + 1)];
        for l in (spin.unsigned_abs() as usize)..=l_max {
            let norm = sign * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
            for m in -(l as i64)..=(l as i64) {
                let c = coeffs[mode_index(l, m)] * norm;
                if c.norm_sqr() == 0.0 {
                    continue;
                }
                let mi = (m + l_max as i64) as usize;
                let row = &tab[mode_index(l, m) * n_theta..(mode_index(l, m) + 1) * n_theta];
                for j in 0..n_theta {
                    gm[j * (2 * l_max + 1) + mi] += c * row[j];
                }
            }
        }

        let mut values = vec![Complex64::new(0.0, 0.0); self.n_nodes()];
        for j in 0..n_theta {
            for k in 0..n_phi {
                let mut acc = Complex64::new(0.0, 0.0);
                for (mi, m) in (-(l_max as i64)..=(l_max as i64)).enumerate() {
                    let g = gm[j * (2 * l_max + 1) + mi];
                    if g.norm_sqr() == 0.0 {
                        continue;
                    }
                    let ph = m as f64 * self.phi[k];
                    acc += g * Complex64::new(ph.cos(), ph.sin());
                }
                values[self.node_index(j, k)] = acc;
            }
        }
        Ok(values)
    }

    /// Grid samples of a single spin-weighted harmonic `sYlm`.
    pub fn harmonic(&self, spin: i32, l: usize, m: i64) -> Result<Vec<Complex64>, Error> {
        self.check_spin(spin)?;
        assert!(l <= self.band_limit && m.unsigned_abs() as usize <= l);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); mode_count(self.band_limit)];
        coeffs[mode_index(l, m)] = Complex64::new(1.0, 0.0);
        self.synthesize(spin, &coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_transforms_to_single_monopole() {
        let grid = SphereGrid::new(8);
        let ones = vec![Complex64::new(1.0, 0.0); grid.n_nodes()];
        let coeffs = grid.analyze(0, &ones).unwrap();
        assert_relative_eq!(coeffs[mode_index(0, 0)].re, (4.0 * PI).sqrt(), epsilon = 1e-13);
        for l in 1..=8usize {
            for m in -(l as i64)..=(l as i64) {
                assert!(coeffs[mode_index(l, m)].norm() < 1e-13);
            }
        }
    }

    #[test]
    fn y21_is_a_basis_element() {
        let grid = SphereGrid::new(12);
        let vals = grid.harmonic(0, 2, 1).unwrap();
        let coeffs = grid.analyze(0, &vals).unwrap();
        for l in 0..=12usize {
            for m in -(l as i64)..=(l as i64) {
                let expect = if (l, m) == (2, 1) { 1.0 } else { 0.0 };
                assert!(
                    (coeffs[mode_index(l, m)] - expect).norm() < 1e-12,
                    "coefficient ({l},{m}) off"
                );
            }
        }
    }

    #[test]
    fn y00_and_y10_match_closed_forms() {
        let grid = SphereGrid::new(6);
        let y00 = grid.harmonic(0, 0, 0).unwrap();
        let y10 = grid.harmonic(0, 1, 0).unwrap();
        for idx in 0..grid.n_nodes() {
            let (th, _) = grid.node_angles(idx);
            assert_relative_eq!(y00[idx].re, 0.5 / PI.sqrt(), epsilon = 1e-13);
            assert_relative_eq!(
                y10[idx].re,
                (3.0 / (4.0 * PI)).sqrt() * th.cos(),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn spin_weighted_orthonormality() {
        let grid = SphereGrid::new(10);
        for s in [-2i32, -1, 0, 1, 2] {
            for (l1, m1) in [(2usize, 1i64), (3, -2), (4, 0)] {
                let a = grid.harmonic(s, l1, m1).unwrap();
                for (l2, m2) in [(2usize, 1i64), (3, -2), (4, 0), (5, 3)] {
                    let b = grid.harmonic(s, l2, m2).unwrap();
                    let mut acc = Complex64::new(0.0, 0.0);
                    for idx in 0..grid.n_nodes() {
                        acc += a[idx].conj() * b[idx] * grid.node_weight(idx);
                    }
                    let expect = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
                    assert!(
                        (acc - expect).norm() < 1e-12,
                        "spin {s} <{l1}{m1}|{l2}{m2}> = {acc}"
                    );
                }
            }
        }
    }

    #[test]
    fn round_trip_of_random_band_limited_field() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let grid = SphereGrid::new(16);
        for s in [-2i32, 0, 1] {
            let mut coeffs = vec![Complex64::new(0.0, 0.0); mode_count(16)];
            for l in (s.unsigned_abs() as usize)..=16 {
                for m in -(l as i64)..=(l as i64) {
                    coeffs[mode_index(l, m)] =
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            let vals = grid.synthesize(s, &coeffs).unwrap();
            let back = grid.analyze(s, &vals).unwrap();
            let err: f64 = coeffs
                .iter()
                .zip(&back)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!(err / norm < 1e-12, "spin {s} round trip error {err}");
        }
    }

    #[test]
    fn spin_beyond_band_limit_is_rejected() {
        let grid = SphereGrid::new(4);
        let vals = vec![Complex64::new(0.0, 0.0); grid.n_nodes()];
        assert!(grid.analyze(5, &vals).is_err());
    }
}
