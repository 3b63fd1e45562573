//! Whole-field spectral transforms and the round-sphere derivative ladder.
//!
//! With components in the fixed round dyad, the unit-sphere covariant
//! derivative acts on a spin-s component as
//!
//! ```text
//!   (grad T)(m, ...)    = -(1/sqrt 2) eth  T_...,
//!   (grad T)(mbar, ...) = -(1/sqrt 2) ethb T_...,
//! ```
//!
//! and eth / ethb are diagonal on spin-weighted harmonics:
//! `eth sYlm = +sqrt((l-s)(l+s+1)) (s+1)Ylm`,
//! `ethb sYlm = -sqrt((l+s)(l-s+1)) (s-1)Ylm`.

use num_complex::Complex64;

use super::field::SphereField;
use super::grid::{mode_count, mode_index};
use crate::error::Result;

/// Spectral coefficients of every dyad component of a field.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub rank: usize,
    pub band_limit: usize,
    /// `coeffs[mask][mode_index(l, m)]`.
    pub coeffs: Vec<Vec<Complex64>>,
    pub spins: Vec<i32>,
}

impl SphereField {
    /// Forward transform of all components.
    pub fn to_spectral(&self) -> Result<SpectralField> {
        let grid = self.grid();
        let mut coeffs = Vec::with_capacity(self.n_comps());
        let mut spins = Vec::with_capacity(self.n_comps());
        for mask in 0..self.n_comps() {
            let s = self.spin(mask);
            coeffs.push(grid.analyze(s, self.comp(mask))?);
            spins.push(s);
        }
        Ok(SpectralField {
            rank: self.rank(),
            band_limit: grid.band_limit(),
            coeffs,
            spins,
        })
    }

    /// Projects out modes with `l > l_cut` (de-aliasing helper).
    pub fn low_pass(&self, l_cut: usize) -> Result<SphereField> {
        let mut spec = self.to_spectral()?;
        for (coeffs, &spin) in spec.coeffs.iter_mut().zip(&spec.spins) {
            for l in 0..=spec.band_limit {
                for m in -(l as i64)..=(l as i64) {
                    if l > l_cut || (l as i32) < spin.abs() {
                        coeffs[mode_index(l, m)] = Complex64::new(0.0, 0.0);
                    }
                }
            }
        }
        spec.to_grid(self.grid())
    }
}

impl SpectralField {
    pub fn to_grid(&self, grid: &super::grid::GridRef) -> Result<SphereField> {
        assert_eq!(grid.band_limit(), self.band_limit);
        let mut out = SphereField::zeros(grid, self.rank);
        for mask in 0..self.coeffs.len() {
            let vals = grid.synthesize(self.spins[mask], &self.coeffs[mask])?;
            out.comp_mut(mask).copy_from_slice(&vals);
        }
        Ok(out)
    }

    /// Applies a diagonal spectral multiplier `f(l, spin)` to every mode.
    pub fn apply_multiplier(&mut self, f: impl Fn(usize, i32) -> f64) {
        for (coeffs, &spin) in self.coeffs.iter_mut().zip(&self.spins) {
            for l in 0..=self.band_limit {
                let factor = f(l, spin);
                for m in -(l as i64)..=(l as i64) {
                    coeffs[mode_index(l, m)] *= factor;
                }
            }
        }
    }

    pub fn l2_norm_sqr(&self) -> f64 {
        self.coeffs.iter().flat_map(|c| c.iter()).map(|z| z.norm_sqr()).sum()
    }
}

/// eth ladder factor: spin s -> s+1 at harmonic degree l.
#[inline]
pub fn eth_factor(l: usize, s: i32) -> f64 {
    let lf = l as f64;
    let sf = s as f64;
    let arg = (lf - sf) * (lf + sf + 1.0);
    if arg <= 0.0 {
        0.0
    } else {
        arg.sqrt()
    }
}

/// ethbar ladder factor: spin s -> s-1 at harmonic degree l (with sign).
#[inline]
pub fn ethbar_factor(l: usize, s: i32) -> f64 {
    let lf = l as f64;
    let sf = s as f64;
    let arg = (lf + sf) * (lf - sf + 1.0);
    if arg <= 0.0 {
        0.0
    } else {
        -arg.sqrt()
    }
}

/// eth of a single spin-s coefficient vector; result has spin s+1.
pub fn eth_coeffs(band_limit: usize, s: i32, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); mode_count(band_limit)];
    for l in 0..=band_limit {
        if (l as i32) < s.abs() || (l as i32) < (s + 1).abs() {
            continue;
        }
        let f = eth_factor(l, s);
        for m in -(l as i64)..=(l as i64) {
            out[mode_index(l, m)] = coeffs[mode_index(l, m)] * f;
        }
    }
    out
}

/// ethbar of a single spin-s coefficient vector; result has spin s-1.
pub fn ethbar_coeffs(band_limit: usize, s: i32, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); mode_count(band_limit)];
    for l in 0..=band_limit {
        if (l as i32) < s.abs() || (l as i32) < (s - 1).abs() {
            continue;
        }
        let f = ethbar_factor(l, s);
        for m in -(l as i64)..=(l as i64) {
            out[mode_index(l, m)] = coeffs[mode_index(l, m)] * f;
        }
    }
    out
}

impl SphereField {
    /// Covariant derivative with respect to the round metric of radius
    /// `radius`; the derivative slot comes first.
    pub fn round_derivative(&self, radius: f64) -> Result<SphereField> {
        let grid = self.grid_ref();
        let rank = self.rank();
        let mut out = SphereField::zeros(&grid, rank + 1);
        let scale = -1.0 / (2f64.sqrt() * radius);
        for mask in 0..self.n_comps() {
            let s = self.spin(mask);
            let coeffs = grid.analyze(s, self.comp(mask))?;
            // New slot is the leading one: its bit is the top bit.
            let m_mask = mask; // leading slot = m (bit unset)
            let mb_mask = mask | (1 << rank); // leading slot = mbar
            let up = eth_coeffs(grid.band_limit(), s, &coeffs);
            let down = ethbar_coeffs(grid.band_limit(), s, &coeffs);
            let up_vals = grid.synthesize(s + 1, &up)?;
            let down_vals = grid.synthesize(s - 1, &down)?;
            for (i, v) in up_vals.iter().enumerate() {
                out.comp_mut(m_mask)[i] = v * scale;
            }
            for (i, v) in down_vals.iter().enumerate() {
                out.comp_mut(mb_mask)[i] = v * scale;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::grid::SphereGrid;

    /// Laplacian of Y10 on the unit round sphere is -2 Y10: the ladder
    /// composition ethbar(eth f) must reproduce it.
    #[test]
    fn ladder_composition_gives_laplacian_eigenvalue() {
        let grid = SphereGrid::new(8);
        let f = grid.harmonic(0, 1, 0).unwrap();
        let c = grid.analyze(0, &f).unwrap();
        let up = eth_coeffs(8, 0, &c);
        let back = ethbar_coeffs(8, 1, &up);
        for l in 0..=8usize {
            for m in -(l as i64)..=(l as i64) {
                let expect = if (l, m) == (1, 0) { -2.0 } else { 0.0 };
                assert!((back[mode_index(l, m)] - expect).norm() < 1e-12);
            }
        }
    }

    /// Derivative of a constant vanishes, and the round derivative of a
    /// scalar has conjugate-pair components (a real 1-form).
    #[test]
    fn derivative_shapes() {
        let grid = SphereGrid::new(8);
        let c = SphereField::constant(&grid, 3.25);
        let d = c.round_derivative(1.0).unwrap();
        assert_eq!(d.rank(), 1);
        assert!(d.max_abs() < 1e-13);

        let y = grid.harmonic(0, 2, 1).unwrap();
        let mut f = SphereField::zeros(&grid, 0);
        for (dst, v) in f.comp_mut(0).iter_mut().zip(&y) {
            *dst = *v;
        }
        let mut fr = f.clone();
        // Make the scalar real: f + conj(f) ~ Re Y21.
        for v in fr.comp_mut(0).iter_mut() {
            *v = Complex64::new(v.re, 0.0);
        }
        let d = fr.round_derivative(1.0).unwrap();
        assert!(d.reality_defect() < 1e-12);
    }

    /// grad then divergence equals the Laplacian eigenvalue at radius 2.
    #[test]
    fn laplacian_scales_with_radius() {
        let grid = SphereGrid::new(8);
        let y = grid.harmonic(0, 3, -2).unwrap();
        let mut f = SphereField::zeros(&grid, 0);
        f.comp_mut(0).copy_from_slice(&y);
        let r = 2.0;
        let grad = f.round_derivative(r).unwrap();
        let hess = grad.round_derivative(r).unwrap();
        // Round divergence of the gradient: contract first two slots on
        // the round metric: g^{ab} = m ox mbar + mbar ox m.
        let lap: Vec<Complex64> = (0..grid.n_nodes())
            .map(|i| hess.comp(0b01)[i] + hess.comp(0b10)[i])
            .collect();
        let eig = -3.0 * 4.0 / (r * r);
        for i in 0..grid.n_nodes() {
            assert!((lap[i] - y[i] * eig).norm() < 1e-11, "node {i}");
        }
    }
}
