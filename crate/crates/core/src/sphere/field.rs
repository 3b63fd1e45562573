//! S-tangent tensor fields stored as complex dyad components.
//!
//! Components are taken against the null dyad `m = (e_1 + i e_2)/sqrt(2)`,
//! `mbar = conj(m)`, where `(e_1, e_2) = (r^-1 d_theta, (r sin theta)^-1 d_phi)`
//! is the fixed round orthonormal frame. A rank-k field stores all 2^k
//! components, indexed by a bitmask whose set bits mark `mbar` slots. The
//! component with `p` m-slots and `q` mbar-slots carries spin weight
//! `s = p - q`, so round-sphere covariant derivatives act diagonally via
//! the eth ladder.
//!
//! Real tensors satisfy `comp(!mask) = conj(comp(mask))`; the redundancy is
//! kept for uniformity of the algebra.

use std::sync::Arc;

use num_complex::Complex64;

use super::grid::{GridRef, SphereGrid};
use crate::error::{Error, Result};

pub const MAX_RANK: usize = 4;

/// Spin weight of the component with the given slot mask.
#[inline]
pub fn component_spin(rank: usize, mask: usize) -> i32 {
    let q = mask.count_ones() as i32;
    rank as i32 - 2 * q
}

#[derive(Debug, Clone)]
pub struct SphereField {
    grid: GridRef,
    rank: usize,
    /// `comps[mask][node]`, mask over 2^rank dyad slot choices.
    comps: Vec<Vec<Complex64>>,
}

impl SphereField {
    pub fn zeros(grid: &GridRef, rank: usize) -> Self {
        assert!(rank <= MAX_RANK);
        let comps = vec![vec![Complex64::new(0.0, 0.0); grid.n_nodes()]; 1 << rank];
        Self { grid: Arc::clone(grid), rank, comps }
    }

    /// Scalar field from real node values.
    pub fn scalar_from_real(grid: &GridRef, values: &[f64]) -> Self {
        assert_eq!(values.len(), grid.n_nodes());
        let mut f = Self::zeros(grid, 0);
        for (c, v) in f.comps[0].iter_mut().zip(values) {
            *c = Complex64::new(*v, 0.0);
        }
        f
    }

    pub fn scalar_from_fn(grid: &GridRef, f: impl Fn(f64, f64) -> f64) -> Self {
        let vals: Vec<f64> =
            (0..grid.n_nodes()).map(|i| { let (t, p) = grid.node_angles(i); f(t, p) }).collect();
        Self::scalar_from_real(grid, &vals)
    }

    /// Constant scalar.
    pub fn constant(grid: &GridRef, value: f64) -> Self {
        Self::scalar_from_real(grid, &vec![value; grid.n_nodes()])
    }

    /// 1-form from real frame components `(U_1, U_2)` per node.
    pub fn one_form_from_frame(grid: &GridRef, u1: &[f64], u2: &[f64]) -> Self {
        let mut f = Self::zeros(grid, 1);
        let inv_sqrt2 = 1.0 / 2f64.sqrt();
        for i in 0..grid.n_nodes() {
            let m = Complex64::new(u1[i], u2[i]) * inv_sqrt2;
            f.comps[0][i] = m;
            f.comps[1][i] = m.conj();
        }
        f
    }

    /// General (possibly non-symmetric) 2-tensor from real frame components.
    pub fn rank2_from_frame(
        grid: &GridRef,
        t11: &[f64],
        t12: &[f64],
        t21: &[f64],
        t22: &[f64],
    ) -> Self {
        let mut f = Self::zeros(grid, 2);
        for i in 0..grid.n_nodes() {
            // T_mm = (T11 - T22)/2 + i (T12 + T21)/2,
            // T_mmbar = (T11 + T22)/2 + i (T21 - T12)/2.
            let tmm = Complex64::new(0.5 * (t11[i] - t22[i]), 0.5 * (t12[i] + t21[i]));
            let tmmb = Complex64::new(0.5 * (t11[i] + t22[i]), 0.5 * (t21[i] - t12[i]));
            f.comps[0b00][i] = tmm;
            f.comps[0b11][i] = tmm.conj();
            f.comps[0b01][i] = tmmb;
            f.comps[0b10][i] = tmmb.conj();
        }
        f
    }

    /// Symmetric 2-tensor from real frame components per node.
    pub fn sym2_from_frame(grid: &GridRef, t11: &[f64], t12: &[f64], t22: &[f64]) -> Self {
        let mut f = Self::zeros(grid, 2);
        for i in 0..grid.n_nodes() {
            // T_mm = (T11 - T22)/2 + i T12, T_mmbar = (T11 + T22)/2.
            let tmm = Complex64::new(0.5 * (t11[i] - t22[i]), t12[i]);
            let tmmb = Complex64::new(0.5 * (t11[i] + t22[i]), 0.0);
            f.comps[0b00][i] = tmm;
            f.comps[0b11][i] = tmm.conj();
            f.comps[0b01][i] = tmmb;
            f.comps[0b10][i] = tmmb;
        }
        f
    }

    /// The round metric delta_ab as a rank-2 field (unit radius scale).
    pub fn round_metric(grid: &GridRef) -> Self {
        let ones = vec![1.0; grid.n_nodes()];
        let zeros = vec![0.0; grid.n_nodes()];
        Self::sym2_from_frame(grid, &ones, &zeros, &ones)
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n_comps(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, mask: usize) -> &[Complex64] {
        &self.comps[mask]
    }

    pub fn comp_mut(&mut self, mask: usize) -> &mut [Complex64] {
        &mut self.comps[mask]
    }

    pub fn spin(&self, mask: usize) -> i32 {
        component_spin(self.rank, mask)
    }

    /// Real frame components of a scalar / 1-form / rank-2 field at a node.
    pub fn frame_components(&self, node: usize) -> Vec<f64> {
        let s2 = 2f64.sqrt();
        match self.rank {
            0 => vec![self.comps[0][node].re],
            1 => {
                let m = self.comps[0][node];
                vec![s2 * m.re, s2 * m.im]
            }
            2 => {
                let tmm = self.comps[0b00][node];
                let tmmb = self.comps[0b01][node];
                let tmbm = self.comps[0b10][node];
                // T11 = Re(Tmm) + Re(Tmmbar+Tmbarm)/2 etc.
                let tr = (tmmb + tmbm).re;
                let anti = (tmmb - tmbm).im; // T21 - T12
                let t11 = tmm.re + 0.5 * tr;
                let t22 = -tmm.re + 0.5 * tr;
                let t12 = tmm.im - 0.5 * anti;
                let t21 = tmm.im + 0.5 * anti;
                vec![t11, t12, t21, t22]
            }
            _ => panic!("frame_components supports rank <= 2"),
        }
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.grid, &other.grid)
            && self.grid.band_limit() != other.grid.band_limit()
        {
            return Err(Error::GridMismatch);
        }
        if self.rank != other.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: other.rank });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_shape(other).expect("field shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_same_shape(other).expect("field shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x -= y;
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for a in out.comps.iter_mut() {
            for x in a.iter_mut() {
                *x *= factor;
            }
        }
        out
    }

    /// Pointwise product with a scalar field.
    pub fn mul_scalar_field(&self, scalar: &Self) -> Self {
        assert_eq!(scalar.rank, 0);
        let mut out = self.clone();
        for a in out.comps.iter_mut() {
            for (x, s) in a.iter_mut().zip(&scalar.comps[0]) {
                *x *= s;
            }
        }
        out
    }

    /// Tensor product: slots of `self` first.
    pub fn outer(&self, other: &Self) -> Self {
        let rank = self.rank + other.rank;
        assert!(rank <= MAX_RANK);
        let mut out = Self::zeros(&self.grid, rank);
        let other_bits = other.rank;
        for mask in 0..(1usize << rank) {
            let self_mask = mask >> other_bits;
            let other_mask = mask & ((1 << other_bits) - 1);
            let (a, b) = (&self.comps[self_mask], &other.comps[other_mask]);
            for (i, x) in out.comps[mask].iter_mut().enumerate() {
                *x = a[i] * b[i];
            }
        }
        out
    }

    /// Reorders slots by `perm`: output evaluated on `(v_1, ..., v_k)`
    /// equals input evaluated on `(v_{perm^-1(1)}, ...)`, i.e. output slot
    /// `i` carries what input slot `perm[i]` carried.
    pub fn permute_slots(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank);
        let mut out = Self::zeros(&self.grid, self.rank);
        for mask in 0..self.comps.len() {
            // Slot i letter lives in bit (rank-1-i).
            let mut input_mask = 0usize;
            for (i, &p) in perm.iter().enumerate() {
                let letter = (mask >> (self.rank - 1 - i)) & 1;
                if letter == 1 {
                    input_mask |= 1 << (self.rank - 1 - p);
                }
            }
            out.comps[mask].copy_from_slice(&self.comps[input_mask]);
        }
        out
    }

    /// Complex conjugate of every component: equals the field itself when
    /// the stored tensor is real, after swapping m and mbar slots.
    pub fn reality_defect(&self) -> f64 {
        let full = self.comps.len() - 1;
        let mut worst = 0.0f64;
        for mask in 0..self.comps.len() {
            let flip = full ^ mask;
            for (a, b) in self.comps[mask].iter().zip(&self.comps[flip]) {
                worst = worst.max((a.conj() - b).norm());
            }
        }
        worst
    }

    /// Enforces the reality relation by averaging conjugate pairs.
    pub fn symmetrize_reality(&mut self) {
        let full = self.comps.len() - 1;
        for mask in 0..self.comps.len() {
            let flip = full ^ mask;
            if flip < mask {
                continue;
            }
            for i in 0..self.comps[mask].len() {
                let a = self.comps[mask][i];
                let b = self.comps[flip][i];
                let avg = 0.5 * (a + b.conj());
                self.comps[mask][i] = avg;
                self.comps[flip][i] = avg.conj();
            }
        }
    }

    /// Max absolute value over all components and nodes (frame norm, not
    /// metric-aware; exact on the round sphere).
    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn grid_ref(&self) -> GridRef {
        Arc::clone(&self.grid)
    }

    pub fn same_grid(&self, g: &SphereGrid) -> bool {
        std::ptr::eq(self.grid.as_ref(), g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::grid::SphereGrid;

    #[test]
    fn frame_round_trip_rank2() {
        let grid = SphereGrid::new(4);
        let n = grid.n_nodes();
        let t11: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let t12: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let t22: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin() + 2.0).collect();
        let f = SphereField::sym2_from_frame(&grid, &t11, &t12, &t22);
        for i in [0usize, 5, n - 1] {
            let c = f.frame_components(i);
            assert!((c[0] - t11[i]).abs() < 1e-14);
            assert!((c[1] - t12[i]).abs() < 1e-14);
            assert!((c[2] - t12[i]).abs() < 1e-14);
            assert!((c[3] - t22[i]).abs() < 1e-14);
        }
        assert!(f.reality_defect() < 1e-15);
    }

    #[test]
    fn outer_product_spins_add() {
        let grid = SphereGrid::new(4);
        let u = SphereField::one_form_from_frame(
            &grid,
            &vec![1.0; grid.n_nodes()],
            &vec![0.5; grid.n_nodes()],
        );
        let t = u.outer(&u);
        assert_eq!(t.rank(), 2);
        assert_eq!(t.spin(0b00), 2);
        assert_eq!(t.spin(0b01), 0);
        assert_eq!(t.spin(0b11), -2);
    }
}
