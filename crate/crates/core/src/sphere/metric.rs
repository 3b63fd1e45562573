//! Riemannian metric on the discretized sphere.
//!
//! A metric is stored as `gh = r^2 (gamma + h)` with `gamma` the unit
//! round metric and `h` a small symmetric rank-2 field. All tensor
//! components live against the fixed round orthonormal dyad, all slots
//! covariant; the metric components in that frame are `delta + h` with no
//! residual powers of `r`. Index contractions therefore use the pointwise
//! inverse of `delta + h`, while `r` enters only through derivatives and
//! the area element.

use num_complex::Complex64;

use super::field::SphereField;
use super::grid::GridRef;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SphereMetric {
    grid: GridRef,
    /// Decomposition scale: `gh = scale_radius^2 (gamma + h)`. Drives all
    /// derivative and measure bookkeeping.
    scale_radius: f64,
    /// Area radius defined by `4 pi r^2 = |S|`; equals `scale_radius` for
    /// round metrics, differs at `O(h^2)` otherwise.
    area_radius: f64,
    h: SphereField,
    /// Inverse-metric dyad weights per node: contraction of two covariant
    /// slots is `Q T_m S_m + conj(Q) T_mb S_mb + P (T_m S_mb + T_mb S_m)`.
    inv_p: Vec<f64>,
    inv_q: Vec<Complex64>,
    /// `sqrt(det(delta + h))` per node.
    sqrt_det: Vec<f64>,
    round: bool,
}

impl SphereMetric {
    pub fn round(grid: &GridRef, area_radius: f64) -> Self {
        let h = SphereField::zeros(grid, 2);
        Self::perturbed(area_radius, &h).expect("round metric is positive definite")
    }

    /// `gh = scale_radius^2 (gamma + h)`. The stored area radius is
    /// recomputed from the actual area so `4 pi r^2 = |S|` exactly.
    pub fn perturbed(scale_radius: f64, h: &SphereField) -> Result<Self> {
        assert_eq!(h.rank(), 2);
        let grid = h.grid_ref();
        let n = grid.n_nodes();
        let mut inv_p = vec![0.0; n];
        let mut inv_q = vec![Complex64::new(0.0, 0.0); n];
        let mut sqrt_det = vec![0.0; n];
        let mut area_unit = 0.0;
        for i in 0..n {
            let c = h.frame_components(i);
            let g11 = 1.0 + c[0];
            let g12 = 0.5 * (c[1] + c[2]);
            let g22 = 1.0 + c[3];
            let det = g11 * g22 - g12 * g12;
            if det <= 0.0 || g11 <= 0.0 {
                return Err(Error::MetricNotPositiveDefinite { node: i });
            }
            let (i11, i12, i22) = (g22 / det, -g12 / det, g11 / det);
            inv_p[i] = 0.5 * (i11 + i22);
            inv_q[i] = Complex64::new(0.5 * (i11 - i22), -i12);
            sqrt_det[i] = det.sqrt();
            area_unit += grid.node_weight(i) * sqrt_det[i];
        }
        let area = scale_radius * scale_radius * area_unit;
        let area_radius = (area / (4.0 * std::f64::consts::PI)).sqrt();
        let round = h.max_abs() == 0.0;
        Ok(Self { grid, scale_radius, area_radius, h: h.clone(), inv_p, inv_q, sqrt_det, round })
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    pub fn area_radius(&self) -> f64 {
        self.area_radius
    }

    pub fn scale_radius(&self) -> f64 {
        self.scale_radius
    }

    pub fn is_round(&self) -> bool {
        self.round
    }

    pub fn perturbation(&self) -> &SphereField {
        &self.h
    }

    /// Metric components `delta + h` as a rank-2 field.
    pub fn tensor(&self) -> SphereField {
        SphereField::round_metric(&self.grid).add(&self.h)
    }

    /// Inverse metric components `(delta + h)^{-1}` as a rank-2 field.
    pub fn inverse_tensor(&self) -> SphereField {
        let n = self.grid.n_nodes();
        let mut f = SphereField::zeros(&self.grid, 2);
        for i in 0..n {
            let p = self.inv_p[i];
            let q = self.inv_q[i];
            // gi_mm = Q has frame (gi11-gi22)/2 - i gi12; as a *tensor
            // component* gi(m, m) = (gi11 - gi22)/2 + i gi12 = conj(Q).
            f.comp_mut(0b00)[i] = q.conj();
            f.comp_mut(0b11)[i] = q;
            f.comp_mut(0b01)[i] = Complex64::new(p, 0.0);
            f.comp_mut(0b10)[i] = Complex64::new(p, 0.0);
        }
        f
    }

    /// Area element weight of one node: integrates scalars over `gh`.
    pub fn area_element(&self, node: usize) -> f64 {
        self.scale_radius * self.scale_radius * self.sqrt_det[node] * self.grid.node_weight(node)
    }

    pub fn area(&self) -> f64 {
        (0..self.grid.n_nodes()).map(|i| self.area_element(i)).sum()
    }

    /// Volume 2-form `eps_ab` (`eps_12 = sqrt det` in the round frame).
    pub fn epsilon(&self) -> SphereField {
        let n = self.grid.n_nodes();
        let mut f = SphereField::zeros(&self.grid, 2);
        for i in 0..n {
            let e = self.sqrt_det[i];
            f.comp_mut(0b01)[i] = Complex64::new(0.0, -e);
            f.comp_mut(0b10)[i] = Complex64::new(0.0, e);
        }
        f
    }

    /// Contraction of covariant slots via the inverse metric. Output
    /// slots: remaining slots of `a`, then remaining slots of `b`.
    pub fn contract(
        &self,
        a: &SphereField,
        slot_a: usize,
        b: &SphereField,
        slot_b: usize,
    ) -> SphereField {
        let ra = a.rank();
        let rb = b.rank();
        assert!(slot_a < ra && slot_b < rb);
        let rank = ra + rb - 2;
        let mut out = SphereField::zeros(&self.grid, rank);
        let n = self.grid.n_nodes();
        let b_keep = rb - 1;
        for out_mask in 0..(1usize << rank) {
            let a_part = out_mask >> b_keep;
            let b_part = out_mask & ((1usize << b_keep) - 1);
            let mut acc = vec![Complex64::new(0.0, 0.0); n];
            for da in 0..2usize {
                for db in 0..2usize {
                    let mask_a = insert_letter(a_part, ra, slot_a, da);
                    let mask_b = insert_letter(b_part, rb, slot_b, db);
                    let ca = a.comp(mask_a);
                    let cb = b.comp(mask_b);
                    match (da, db) {
                        (0, 0) => {
                            for i in 0..n {
                                acc[i] += self.inv_q[i] * ca[i] * cb[i];
                            }
                        }
                        (1, 1) => {
                            for i in 0..n {
                                acc[i] += self.inv_q[i].conj() * ca[i] * cb[i];
                            }
                        }
                        _ => {
                            for i in 0..n {
                                acc[i] += self.inv_p[i] * ca[i] * cb[i];
                            }
                        }
                    }
                }
            }
            out.comp_mut(out_mask).copy_from_slice(&acc);
        }
        out
    }

    /// Metric trace over two covariant slots of one field.
    pub fn trace(&self, a: &SphereField, slot_1: usize, slot_2: usize) -> SphereField {
        assert!(slot_1 != slot_2);
        let ra = a.rank();
        let rank = ra - 2;
        let mut out = SphereField::zeros(&self.grid, rank);
        let n = self.grid.n_nodes();
        let (lo, hi) = if slot_1 < slot_2 { (slot_1, slot_2) } else { (slot_2, slot_1) };
        for out_mask in 0..(1usize << rank) {
            let mut acc = vec![Complex64::new(0.0, 0.0); n];
            for dlo in 0..2usize {
                for dhi in 0..2usize {
                    let tmp = insert_letter(out_mask, ra - 1, lo, dlo);
                    let mask = insert_letter(tmp, ra, hi, dhi);
                    let ca = a.comp(mask);
                    match (dlo, dhi) {
                        (0, 0) => {
                            for i in 0..n {
                                acc[i] += self.inv_q[i] * ca[i];
                            }
                        }
                        (1, 1) => {
                            for i in 0..n {
                                acc[i] += self.inv_q[i].conj() * ca[i];
                            }
                        }
                        _ => {
                            for i in 0..n {
                                acc[i] += self.inv_p[i] * ca[i];
                            }
                        }
                    }
                }
            }
            out.comp_mut(out_mask).copy_from_slice(&acc);
        }
        out
    }

    /// Pointwise `|T|^2_gh` per node, as the Hermitian extension of the
    /// real tensor norm (so complex-packed scalars give `|f|^2`).
    pub fn norm_sqr_at_nodes(&self, a: &SphereField) -> Vec<f64> {
        let rank = a.rank();
        let n = self.grid.n_nodes();
        let mut out = vec![0.0; n];
        for mask_1 in 0..(1usize << rank) {
            for mask_2 in 0..(1usize << rank) {
                let c1 = a.comp(mask_1);
                let c2 = a.comp(mask_2);
                for i in 0..n {
                    let mut w = Complex64::new(1.0, 0.0);
                    for slot in 0..rank {
                        let bit = rank - 1 - slot;
                        let d1 = (mask_1 >> bit) & 1;
                        let d2 = (mask_2 >> bit) & 1;
                        // Hermitian pairing: conjugation flips the second
                        // tensor's dyad letters.
                        w *= match (d1, d2) {
                            (0, 1) => self.inv_q[i],
                            (1, 0) => self.inv_q[i].conj(),
                            _ => Complex64::new(self.inv_p[i], 0.0),
                        };
                    }
                    out[i] += (w * c1[i] * c2[i].conj()).re;
                }
            }
        }
        out
    }

    /// Lowered connection difference `C_{cab} = Gamma(gh) - Gamma(round)`:
    /// `C_{cab} = (1/2)(Dr_a h_bc + Dr_b h_ac - Dr_c h_ab)` with `Dr` the
    /// round covariant derivative at this radius.
    pub fn connection_correction(&self) -> Result<SphereField> {
        if self.round {
            return Ok(SphereField::zeros(&self.grid, 3));
        }
        // dh slots: (d, x, y) = Dr_d h_{xy}.
        let dh = self.h.round_derivative(self.scale_radius)?;
        // A_{cab} = Dr_a h_{bc}: out slot0 = c <- input y(2), slot1 = a <-
        // input d(0), slot2 = b <- input x(1): perm[i] = input slot feeding
        // output slot i: [2, 0, 1].
        let a_term = dh.permute_slots(&[2, 0, 1]);
        // B_{cab} = Dr_b h_{ac}: c <- y(2), a <- x(1), b <- d(0).
        let b_term = dh.permute_slots(&[2, 1, 0]);
        Ok(a_term.add(&b_term).sub(&dh).scale(0.5))
    }

    /// Connection difference with the first slot raised by the full
    /// inverse metric: `C^d_{ab}`, slots `(d_up, a, b)`; the up slot pairs
    /// flatly (m against mbar) in later contractions.
    pub fn connection_correction_raised(&self) -> Result<SphereField> {
        let c = self.connection_correction()?;
        if self.round {
            return Ok(c);
        }
        let gi = self.inverse_tensor();
        // flat-contract gi slot 1 with C slot 0: (d) + (a, b).
        Ok(flat_contract(&gi, 1, &c, 0))
    }

    /// Covariant derivative of `a` for this metric (derivative slot
    /// first): round spectral derivative plus connection correction.
    pub fn covariant_derivative(&self, a: &SphereField) -> Result<SphereField> {
        let base = a.round_derivative(self.scale_radius)?;
        if self.round || a.rank() == 0 {
            return Ok(base);
        }
        let cup = self.connection_correction_raised()?; // (d_up, c, x)
        let mut out = base;
        for slot in 0..a.rank() {
            // (grad a)_{c A..} -= C^d_{c A_slot} a_{A.. d ..}:
            // flat-contract cup slot 0 (up) with a slot `slot`; result
            // slots: (c, x, A-without-slot...) -> reorder so the corrected
            // slot returns to its place and c leads.
            let corr = flat_contract(&cup, 0, a, slot); // (c, x, rest...)
            // rest slots are a's slots with `slot` removed, in order.
            // Desired output order: (c, A_0, ..., A_{slot-1}, x, A_{slot+1}, ...).
            let ra = a.rank();
            let mut perm = Vec::with_capacity(ra + 1);
            perm.push(0); // c
            let mut rest_idx = 2; // first remaining-slot position in corr
            for i in 0..ra {
                if i == slot {
                    perm.push(1); // x replaces the contracted slot
                } else {
                    perm.push(rest_idx);
                    rest_idx += 1;
                }
            }
            let corr = corr.permute_slots(&perm);
            out = out.sub(&corr);
        }
        Ok(out)
    }

    /// Gauss curvature of `gh` as a scalar field.
    pub fn gauss_curvature(&self) -> Result<SphereField> {
        let r2 = self.scale_radius * self.scale_radius;
        if self.round {
            return Ok(SphereField::constant(&self.grid, 1.0 / r2));
        }
        let cup = self.connection_correction_raised()?; // (c_up, a, b)
        let dcup = cup.round_derivative(self.scale_radius)?; // (e, c_up, a, b)
        let term1 = flat_trace(&dcup, 0, 1); // Dr_c C^c_{ab}
        let v = flat_trace(&cup, 0, 1); // v_b = C^c_{cb}
        let term2 = v.round_derivative(self.scale_radius)?; // Dr_a v_b
        let term3 = flat_contract(&v, 0, &cup, 0); // v_d C^d_{ab}
        let term4 = {
            // C^c_{ad} C^d_{cb}: pair (cup1 slot2 down d) with (cup2 slot0
            // up d), then (cup1 slot0 up c) with (cup2 slot1 down c).
            let t = flat_contract(&cup, 2, &cup, 0); // (c_up, a, c', b)
            flat_trace(&t, 0, 2)
        };
        let ric_round = SphereField::round_metric(&self.grid).scale(1.0 / r2);
        let ric = ric_round.add(&term1).sub(&term2).add(&term3).sub(&term4);
        Ok(self.trace(&ric, 0, 1).scale(0.5))
    }

    /// Integral of a scalar field over `(S, gh)`.
    pub fn integrate(&self, f: &SphereField) -> f64 {
        assert_eq!(f.rank(), 0);
        (0..self.grid.n_nodes()).map(|i| f.comp(0)[i].re * self.area_element(i)).sum()
    }

    /// Mean value `(4 pi r^2)^{-1} int f`.
    pub fn average(&self, f: &SphereField) -> f64 {
        self.integrate(f) / self.area()
    }
}

/// Flat dual-pairing contraction (one slot conceptually up): sums opposite
/// dyad letters with unit weight, i.e. plain `sum_a X_a Y_a` in the round
/// real frame.
pub fn flat_contract(a: &SphereField, slot_a: usize, b: &SphereField, slot_b: usize) -> SphereField {
    let ra = a.rank();
    let rb = b.rank();
    let rank = ra + rb - 2;
    let grid = a.grid_ref();
    let n = grid.n_nodes();
    let mut out = SphereField::zeros(&grid, rank);
    let b_keep = rb - 1;
    for out_mask in 0..(1usize << rank) {
        let a_part = out_mask >> b_keep;
        let b_part = out_mask & ((1usize << b_keep) - 1);
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        for d in 0..2usize {
            let mask_a = insert_letter(a_part, ra, slot_a, d);
            let mask_b = insert_letter(b_part, rb, slot_b, 1 - d);
            let ca = a.comp(mask_a);
            let cb = b.comp(mask_b);
            for i in 0..n {
                acc[i] += ca[i] * cb[i];
            }
        }
        out.comp_mut(out_mask).copy_from_slice(&acc);
    }
    out
}

/// Flat dual-pairing trace over two slots of one field.
pub fn flat_trace(a: &SphereField, slot_1: usize, slot_2: usize) -> SphereField {
    assert!(slot_1 != slot_2);
    let ra = a.rank();
    let rank = ra - 2;
    let grid = a.grid_ref();
    let n = grid.n_nodes();
    let mut out = SphereField::zeros(&grid, rank);
    let (lo, hi) = if slot_1 < slot_2 { (slot_1, slot_2) } else { (slot_2, slot_1) };
    for out_mask in 0..(1usize << rank) {
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        for d in 0..2usize {
            let tmp = insert_letter(out_mask, ra - 1, lo, d);
            let mask = insert_letter(tmp, ra, hi, 1 - d);
            let ca = a.comp(mask);
            for i in 0..n {
                acc[i] += ca[i];
            }
        }
        out.comp_mut(out_mask).copy_from_slice(&acc);
    }
    out
}

/// Inserts a dyad letter into `partial` (mask over `rank - 1` slots) at
/// position `slot`, producing a rank-`rank` mask. Slot `i` occupies bit
/// `rank - 1 - i`.
#[inline]
fn insert_letter(partial: usize, rank: usize, slot: usize, letter: usize) -> usize {
    let tail_bits = rank - 1 - slot;
    let head = partial >> tail_bits;
    let tail = partial & ((1usize << tail_bits) - 1);
    (head << (tail_bits + 1)) | (letter << tail_bits) | tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::grid::SphereGrid;
    use approx::assert_relative_eq;

    fn conformal_metric(grid: &GridRef, radius: f64, lambda: &SphereField) -> SphereMetric {
        // h = (e^{2 lambda} - 1) delta
        let n = grid.n_nodes();
        let mut t11 = vec![0.0; n];
        let mut t22 = vec![0.0; n];
        let t12 = vec![0.0; n];
        for i in 0..n {
            let f = (2.0 * lambda.comp(0)[i].re).exp() - 1.0;
            t11[i] = f;
            t22[i] = f;
        }
        let h = SphereField::sym2_from_frame(grid, &t11, &t12, &t22);
        SphereMetric::perturbed(radius, &h).unwrap()
    }

    #[test]
    fn round_area_and_curvature() {
        let grid = SphereGrid::new(8);
        let g = SphereMetric::round(&grid, 3.0);
        assert_relative_eq!(g.area(), 4.0 * std::f64::consts::PI * 9.0, max_relative = 1e-13);
        let k = g.gauss_curvature().unwrap();
        assert_relative_eq!(k.comp(0)[5].re, 1.0 / 9.0, max_relative = 1e-13);
    }

    #[test]
    fn gauss_bonnet_on_perturbed_metric() {
        let grid = SphereGrid::new(16);
        let y20 = grid.harmonic(0, 2, 0).unwrap();
        let mut lam = SphereField::zeros(&grid, 0);
        for (dst, v) in lam.comp_mut(0).iter_mut().zip(&y20) {
            *dst = Complex64::new(0.05 * v.re, 0.0);
        }
        let g = conformal_metric(&grid, 2.0, &lam);
        let k = g.gauss_curvature().unwrap();
        let total = g.integrate(&k);
        assert_relative_eq!(total, 4.0 * std::f64::consts::PI, max_relative = 1e-8);
    }

    #[test]
    fn conformal_curvature_matches_closed_form() {
        // K = e^{-2 lam} (1 - Lap_round lam) / r^2 for gh = r^2 e^{2 lam} gamma.
        let grid = SphereGrid::new(20);
        let y = grid.harmonic(0, 3, 1).unwrap();
        let mut lam = SphereField::zeros(&grid, 0);
        for (dst, v) in lam.comp_mut(0).iter_mut().zip(&y) {
            *dst = Complex64::new(0.02 * v.re, 0.0);
        }
        let r = 1.5;
        let g = conformal_metric(&grid, r, &lam);
        let k = g.gauss_curvature().unwrap();
        // Laplacian of lambda on the *unit* round sphere.
        let grad = lam.round_derivative(1.0).unwrap();
        let hess = grad.round_derivative(1.0).unwrap();
        for i in 0..grid.n_nodes() {
            let lap = (hess.comp(0b01)[i] + hess.comp(0b10)[i]).re;
            let lam_v = lam.comp(0)[i].re;
            let exact = (-2.0 * lam_v).exp() * (1.0 - lap) / (r * r);
            assert!(
                (k.comp(0)[i].re - exact).abs() < 2e-7,
                "node {i}: K = {} vs {}",
                k.comp(0)[i].re,
                exact
            );
        }
    }

    #[test]
    fn metric_is_covariantly_constant() {
        let grid = SphereGrid::new(16);
        let y = grid.harmonic(0, 2, 1).unwrap();
        let n = grid.n_nodes();
        let mut t11 = vec![0.0; n];
        let mut t12 = vec![0.0; n];
        let mut t22 = vec![0.0; n];
        for i in 0..n {
            t11[i] = 0.03 * y[i].re;
            t12[i] = 0.02 * y[i].im;
            t22[i] = -0.01 * y[i].re;
        }
        let h = SphereField::sym2_from_frame(&grid, &t11, &t12, &t22);
        let g = SphereMetric::perturbed(1.0, &h).unwrap();
        let dg = g.covariant_derivative(&g.tensor()).unwrap();
        assert!(dg.max_abs() < 1e-9, "grad g = {}", dg.max_abs());
    }

    #[test]
    fn contract_against_double_flat_raise() {
        let grid = SphereGrid::new(8);
        let n = grid.n_nodes();
        let y = grid.harmonic(0, 2, 0).unwrap();
        let mut t11 = vec![0.0; n];
        let t12 = vec![0.0; n];
        let mut t22 = vec![0.0; n];
        for i in 0..n {
            t11[i] = 0.1 * y[i].re;
            t22[i] = -0.05 * y[i].re;
        }
        let h = SphereField::sym2_from_frame(&grid, &t11, &t12, &t22);
        let g = SphereMetric::perturbed(1.0, &h).unwrap();
        let u = SphereField::one_form_from_frame(&grid, &vec![0.7; n], &vec![-0.2; n]);
        let w = SphereField::one_form_from_frame(&grid, &vec![0.1; n], &vec![0.9; n]);
        let direct = g.contract(&u, 0, &w, 0);
        let gi = g.inverse_tensor();
        let via_flat = flat_contract(&flat_contract(&gi, 0, &u, 0), 0, &w, 0);
        let diff = direct.sub(&via_flat);
        assert!(diff.max_abs() < 1e-13);
    }

    #[test]
    fn epsilon_squares_to_minus_identity_rotation() {
        // eps_a^c eps_c^b = -delta_a^b; check |eps|^2 = 2.
        let grid = SphereGrid::new(8);
        let g = SphereMetric::round(&grid, 1.0);
        let eps = g.epsilon();
        let n2 = g.norm_sqr_at_nodes(&eps);
        for v in n2 {
            assert_relative_eq!(v, 2.0, epsilon = 1e-12);
        }
    }
}
