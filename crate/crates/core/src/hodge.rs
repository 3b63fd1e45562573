//! Hodge-type operators on 2-spheres and their inversion.
//!
//! The operators are
//!
//! ```text
//!   D1 U      = (div U, curl U)          1-forms -> scalar pairs
//!   D1* (f,g) = -grad f + *grad g        scalar pairs -> 1-forms
//!   D2 F      = div F                    sym traceless 2-tensors -> 1-forms
//!   D2* U     = -(1/2) grad-hat U        1-forms -> sym traceless 2-tensors
//! ```
//!
//! plus the scalar Laplacian. On the round sphere all five are diagonal in
//! the spin-weighted basis; on near-round metrics the inverse is computed
//! by a round-preconditioned fixed-point iteration on the metric
//! perturbation remainder.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::calculus;
use crate::sphere::grid::{mode_count, mode_index};
use crate::sphere::norms::{self, NormKind};
use crate::sphere::{SphereField, SphereMetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HodgeOperator {
    D1,
    D1Star,
    D2,
    D2Star,
    Laplacian,
}

/// Operand/image of a Hodge operator.
#[derive(Debug, Clone)]
pub enum HodgeField {
    /// Scalar pair `(f, g)`.
    Pair(SphereField, SphereField),
    OneForm(SphereField),
    SymTraceless(SphereField),
    Scalar(SphereField),
}

impl HodgeField {
    pub fn rank_tag(&self) -> &'static str {
        match self {
            HodgeField::Pair(..) => "pair",
            HodgeField::OneForm(_) => "one_form",
            HodgeField::SymTraceless(_) => "sym_traceless",
            HodgeField::Scalar(_) => "scalar",
        }
    }

    fn sub(&self, other: &HodgeField) -> HodgeField {
        match (self, other) {
            (HodgeField::Pair(a, b), HodgeField::Pair(c, d)) => {
                HodgeField::Pair(a.sub(c), b.sub(d))
            }
            (HodgeField::OneForm(a), HodgeField::OneForm(b)) => HodgeField::OneForm(a.sub(b)),
            (HodgeField::SymTraceless(a), HodgeField::SymTraceless(b)) => {
                HodgeField::SymTraceless(a.sub(b))
            }
            (HodgeField::Scalar(a), HodgeField::Scalar(b)) => HodgeField::Scalar(a.sub(b)),
            _ => panic!("mismatched Hodge operands"),
        }
    }

    fn add(&self, other: &HodgeField) -> HodgeField {
        match (self, other) {
            (HodgeField::Pair(a, b), HodgeField::Pair(c, d)) => {
                HodgeField::Pair(a.add(c), b.add(d))
            }
            (HodgeField::OneForm(a), HodgeField::OneForm(b)) => HodgeField::OneForm(a.add(b)),
            (HodgeField::SymTraceless(a), HodgeField::SymTraceless(b)) => {
                HodgeField::SymTraceless(a.add(b))
            }
            (HodgeField::Scalar(a), HodgeField::Scalar(b)) => HodgeField::Scalar(a.add(b)),
            _ => panic!("mismatched Hodge operands"),
        }
    }

    pub fn l2_norm(&self, metric: &SphereMetric) -> Result<f64> {
        Ok(match self {
            HodgeField::Pair(a, b) => {
                let na = norms::norm(a, metric, NormKind::L2)?;
                let nb = norms::norm(b, metric, NormKind::L2)?;
                (na * na + nb * nb).sqrt()
            }
            HodgeField::OneForm(a) | HodgeField::SymTraceless(a) | HodgeField::Scalar(a) => {
                norms::norm(a, metric, NormKind::L2)?
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSettings {
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Tolerance on the cokernel projection of the source before the
    /// system is declared non-solvable.
    pub cokernel_tolerance: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { max_iterations: 60, tolerance: 1e-11, cokernel_tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub operator: HodgeOperator,
    pub iterations: usize,
    pub residual: f64,
    /// Norm of the cokernel projection removed from the source, when a
    /// cokernel exists (constants for D1, conformal Killing forms for D2).
    pub cokernel_projection: f64,
}

#[derive(Debug, Clone)]
pub struct HodgeSystem {
    pub metric: SphereMetric,
    pub operator: HodgeOperator,
    pub settings: SolverSettings,
}

impl HodgeSystem {
    pub fn new(metric: SphereMetric, operator: HodgeOperator) -> Self {
        Self { metric, operator, settings: SolverSettings::default() }
    }

    /// Forward application on the system metric.
    pub fn apply(&self, input: &HodgeField) -> Result<HodgeField> {
        apply_operator(&self.metric, self.operator, input)
    }

    /// Inverts the operator: finds `x` with `apply(x) = source`, mean-zero
    /// / kernel-orthogonal representative, after projecting the source on
    /// the operator range.
    pub fn solve(&self, source: &HodgeField) -> Result<(HodgeField, SolveReport)> {
        let metric = &self.metric;
        let (projected, coker) = project_on_range(metric, self.operator, source)?;
        if coker > self.settings.cokernel_tolerance {
            return Err(Error::NonSolvableSource {
                magnitude: coker,
                tolerance: self.settings.cokernel_tolerance,
            });
        }
        let source_norm = projected.l2_norm(metric)?.max(1e-300);

        let mut x = round_inverse(metric, self.operator, &projected)?;
        if metric.is_round() {
            let res = self.apply(&x)?.sub(&projected).l2_norm(metric)? / source_norm;
            return Ok((
                x,
                SolveReport {
                    operator: self.operator,
                    iterations: 1,
                    residual: res,
                    cokernel_projection: coker,
                },
            ));
        }

        let mut last_residual = f64::INFINITY;
        for it in 1..=self.settings.max_iterations {
            let residual_field = projected.sub(&self.apply(&x)?);
            let res = residual_field.l2_norm(metric)? / source_norm;
            if res < self.settings.tolerance {
                return Ok((
                    x,
                    SolveReport {
                        operator: self.operator,
                        iterations: it,
                        residual: res,
                        cokernel_projection: coker,
                    },
                ));
            }
            if res > 2.0 * last_residual {
                return Err(Error::NonConvergence { iterations: it, residual: res });
            }
            last_residual = res;
            let update = round_inverse(metric, self.operator, &residual_field)?;
            x = x.add(&update);
            x = kernel_orthogonalize(metric, self.operator, x)?;
        }
        Err(Error::NonConvergence {
            iterations: self.settings.max_iterations,
            residual: last_residual,
        })
    }

    /// Measured ratios of the elliptic estimates: for each catalog entry,
    /// `|| r^-1 (r grad)^{<= l+1} x ||_L2 / || (r grad)^{<= l} A x ||_L2`
    /// for derivative orders `l = 0..=max_order`.
    pub fn verify_elliptic_estimate(
        &self,
        catalog: &[HodgeField],
        max_order: usize,
    ) -> Result<EstimateReport> {
        assert!(!catalog.is_empty(), "catalog must be nonempty");
        let metric = &self.metric;
        let r = metric.area_radius();
        let mut ratios = Vec::new();
        for entry in catalog {
            // Remove the operator kernel first so 0/0 never occurs; a pure
            // kernel entry reports ratio 0.
            let entry = kernel_orthogonalize(metric, self.operator, entry.clone())?;
            let image = self.apply(&entry)?;
            for l in 0..=max_order {
                let lhs = match &entry {
                    HodgeField::Pair(f, g) => {
                        let a = norms::sobolev_l2(f, metric, l + 1)?;
                        let b = norms::sobolev_l2(g, metric, l + 1)?;
                        (a * a + b * b).sqrt() / r
                    }
                    HodgeField::OneForm(u) | HodgeField::SymTraceless(u)
                    | HodgeField::Scalar(u) => norms::sobolev_l2(u, metric, l + 1)? / r,
                };
                let rhs = match &image {
                    HodgeField::Pair(f, g) => {
                        let a = norms::sobolev_l2(f, metric, l)?;
                        let b = norms::sobolev_l2(g, metric, l)?;
                        (a * a + b * b).sqrt()
                    }
                    HodgeField::OneForm(u) | HodgeField::SymTraceless(u)
                    | HodgeField::Scalar(u) => norms::sobolev_l2(u, metric, l)?,
                };
                let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
                ratios.push(EstimateRatio { order: l, ratio });
            }
        }
        let max_ratio = ratios.iter().map(|r| r.ratio).fold(0.0, f64::max);
        Ok(EstimateReport { operator: self.operator, ratios, max_ratio })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateRatio {
    pub order: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateReport {
    pub operator: HodgeOperator,
    pub ratios: Vec<EstimateRatio>,
    pub max_ratio: f64,
}

/// Forward operator application on an arbitrary metric.
pub fn apply_operator(
    metric: &SphereMetric,
    op: HodgeOperator,
    input: &HodgeField,
) -> Result<HodgeField> {
    match (op, input) {
        (HodgeOperator::D1, HodgeField::OneForm(u)) => {
            let d = calculus::div(metric, u)?;
            let c = calculus::curl(metric, u)?;
            Ok(HodgeField::Pair(d, c))
        }
        (HodgeOperator::D1Star, HodgeField::Pair(f, g)) => {
            let gf = calculus::grad(metric, f)?;
            let gg = calculus::grad(metric, g)?;
            Ok(HodgeField::OneForm(calculus::dual_one_form(metric, &gg).sub(&gf)))
        }
        (HodgeOperator::D2, HodgeField::SymTraceless(f)) => {
            Ok(HodgeField::OneForm(calculus::div(metric, f)?))
        }
        (HodgeOperator::D2Star, HodgeField::OneForm(u)) => {
            Ok(HodgeField::SymTraceless(calculus::grad_hat(metric, u)?.scale(-0.5)))
        }
        (HodgeOperator::Laplacian, HodgeField::Scalar(f)) => {
            Ok(HodgeField::Scalar(calculus::laplacian(metric, f)?))
        }
        _ => Err(Error::RankMismatch { expected: operand_rank(op), got: 99 }),
    }
}

fn operand_rank(op: HodgeOperator) -> usize {
    match op {
        HodgeOperator::D1 | HodgeOperator::D2Star => 1,
        HodgeOperator::D1Star | HodgeOperator::Laplacian => 0,
        HodgeOperator::D2 => 2,
    }
}

/// Removes the cokernel component of a source and reports its norm.
fn project_on_range(
    metric: &SphereMetric,
    op: HodgeOperator,
    source: &HodgeField,
) -> Result<(HodgeField, f64)> {
    match (op, source) {
        (HodgeOperator::D1, HodgeField::Pair(f, g)) => {
            // cokernel: constants in each slot
            let mf = norms::average(f, metric);
            let mg = norms::average(g, metric);
            let area = metric.area();
            let mag = ((mf * mf + mg * mg) * area).sqrt();
            let pf = f.sub(&SphereField::constant(f.grid(), mf));
            let pg = g.sub(&SphereField::constant(g.grid(), mg));
            Ok((HodgeField::Pair(pf, pg), mag))
        }
        (HodgeOperator::Laplacian, HodgeField::Scalar(f)) => {
            let mf = norms::average(f, metric);
            let mag = (mf * mf * metric.area()).sqrt();
            Ok((HodgeField::Scalar(f.sub(&SphereField::constant(f.grid(), mf))), mag))
        }
        (HodgeOperator::D2, HodgeField::OneForm(u)) => {
            // cokernel: conformal Killing 1-forms = kernel of D2*, spanned
            // on the round sphere by the l = 1 spin-1 modes.
            let (p, mag) = remove_l1_modes(u)?;
            Ok((HodgeField::OneForm(p), mag * metric.area_radius()))
        }
        _ => Ok((source.clone(), 0.0)),
    }
}

/// Removes operator-kernel components of a candidate solution.
fn kernel_orthogonalize(
    metric: &SphereMetric,
    op: HodgeOperator,
    x: HodgeField,
) -> Result<HodgeField> {
    match (op, x) {
        (HodgeOperator::D1Star, HodgeField::Pair(f, g)) => {
            let mf = norms::average(&f, metric);
            let mg = norms::average(&g, metric);
            Ok(HodgeField::Pair(
                f.sub(&SphereField::constant(f.grid(), mf)),
                g.sub(&SphereField::constant(g.grid(), mg)),
            ))
        }
        (HodgeOperator::Laplacian, HodgeField::Scalar(f)) => {
            let mf = norms::average(&f, metric);
            Ok(HodgeField::Scalar(f.sub(&SphereField::constant(f.grid(), mf))))
        }
        (HodgeOperator::D2Star, HodgeField::OneForm(u)) => {
            let (p, _) = remove_l1_modes(&u)?;
            Ok(HodgeField::OneForm(p))
        }
        (_, x) => Ok(x),
    }
}

/// Projects out the l = 1 part of a 1-form (round-basis projection).
fn remove_l1_modes(u: &SphereField) -> Result<(SphereField, f64)> {
    let mut spec = u.to_spectral()?;
    let mut mag2 = 0.0;
    for (coeffs, &spin) in spec.coeffs.iter_mut().zip(&spec.spins) {
        if spin.abs() > 1 {
            continue;
        }
        for m in -1i64..=1 {
            let c = coeffs[mode_index(1, m)];
            mag2 += c.norm_sqr();
            coeffs[mode_index(1, m)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((spec.to_grid(u.grid())?, mag2.sqrt()))
}

/// Diagonal inverse on the round sphere of the same area radius; also the
/// preconditioner for perturbed metrics.
fn round_inverse(metric: &SphereMetric, op: HodgeOperator, src: &HodgeField) -> Result<HodgeField> {
    let r = metric.area_radius();
    let grid = metric.grid();
    let l_max = grid.band_limit();
    match (op, src) {
        (HodgeOperator::D1, HodgeField::Pair(f, g)) => {
            // div U + i curl U = -(sqrt2/r) ethbar U_m; ethbar on spin 1
            // carries -sqrt(l(l+1)).
            let cf = grid.analyze(0, pack_complex(f, g).as_slice())?;
            let mut um = vec![Complex64::new(0.0, 0.0); mode_count(l_max)];
            for l in 1..=l_max {
                let factor = r / (2f64.sqrt() * ((l * (l + 1)) as f64).sqrt());
                for m in -(l as i64)..=(l as i64) {
                    um[mode_index(l, m)] = cf[mode_index(l, m)] * factor;
                }
            }
            Ok(HodgeField::OneForm(one_form_from_m_coeffs(grid, &um)?))
        }
        (HodgeOperator::D1Star, HodgeField::OneForm(u)) => {
            // D1 D1* = (-Lap, -Lap): recover (f, g) from D1 U.
            let round = SphereMetric::round(grid, r);
            let d = calculus::div(&round, u)?;
            let c = calculus::curl(&round, u)?;
            let inv = |x: &SphereField| -> Result<SphereField> {
                let mut spec = x.to_spectral()?;
                spec.apply_multiplier(|l, _| {
                    if l == 0 {
                        0.0
                    } else {
                        -(r * r) / ((l * (l + 1)) as f64)
                    }
                });
                spec.to_grid(grid)
            };
            // D1*(f,g) = U => f = -Lap^-1 div U, g = -Lap^-1 ... signs:
            // D1 D1* (f,g) = (-Lap f, -Lap g) = (div U, curl U).
            Ok(HodgeField::Pair(inv(&d.scale(-1.0))?, inv(&c.scale(-1.0))?))
        }
        (HodgeOperator::D2, HodgeField::OneForm(u)) => {
            // (div F)_m = -(1/(r sqrt2)) ethbar F_mm, ethbar on spin 2:
            // -sqrt((l+2)(l-1)).
            let um = u.to_spectral()?;
            let mut fmm = vec![Complex64::new(0.0, 0.0); mode_count(l_max)];
            for l in 2..=l_max {
                let factor = 2f64.sqrt() * r / (((l + 2) * (l - 1)) as f64).sqrt();
                for m in -(l as i64)..=(l as i64) {
                    fmm[mode_index(l, m)] = um.coeffs[0][mode_index(l, m)] * factor;
                }
            }
            Ok(HodgeField::SymTraceless(sym_traceless_from_mm_coeffs(grid, &fmm)?))
        }
        (HodgeOperator::D2Star, HodgeField::SymTraceless(f)) => {
            // (D2* U)_mm = (1/(r sqrt2)) eth U_m, eth on spin 1:
            // +sqrt((l-1)(l+2)).
            let fs = f.to_spectral()?;
            let mut um = vec![Complex64::new(0.0, 0.0); mode_count(l_max)];
            for l in 2..=l_max {
                let factor = 2f64.sqrt() * r / (((l - 1) * (l + 2)) as f64).sqrt();
                for m in -(l as i64)..=(l as i64) {
                    um[mode_index(l, m)] = fs.coeffs[0][mode_index(l, m)] * factor;
                }
            }
            Ok(HodgeField::OneForm(one_form_from_m_coeffs(grid, &um)?))
        }
        (HodgeOperator::Laplacian, HodgeField::Scalar(f)) => {
            let mut spec = f.to_spectral()?;
            spec.apply_multiplier(|l, _| {
                if l == 0 {
                    0.0
                } else {
                    -(r * r) / ((l * (l + 1)) as f64)
                }
            });
            Ok(HodgeField::Scalar(spec.to_grid(grid)?))
        }
        _ => Err(Error::RankMismatch { expected: operand_rank(op), got: 98 }),
    }
}

fn pack_complex(f: &SphereField, g: &SphereField) -> Vec<Complex64> {
    f.comp(0)
        .iter()
        .zip(g.comp(0))
        .map(|(a, b)| Complex64::new(a.re, b.re))
        .collect()
}

fn one_form_from_m_coeffs(
    grid: &crate::sphere::GridRef,
    um: &[Complex64],
) -> Result<SphereField> {
    let vals = grid.synthesize(1, um)?;
    let mut u = SphereField::zeros(grid, 1);
    for (i, v) in vals.iter().enumerate() {
        u.comp_mut(0)[i] = *v;
        u.comp_mut(1)[i] = v.conj();
    }
    Ok(u)
}

fn sym_traceless_from_mm_coeffs(
    grid: &crate::sphere::GridRef,
    fmm: &[Complex64],
) -> Result<SphereField> {
    let vals = grid.synthesize(2, fmm)?;
    let mut f = SphereField::zeros(grid, 2);
    for (i, v) in vals.iter().enumerate() {
        f.comp_mut(0b00)[i] = *v;
        f.comp_mut(0b11)[i] = v.conj();
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::SphereGrid;

    fn real_scalar_from(grid: &crate::sphere::GridRef, vals: &[Complex64]) -> SphereField {
        let mut f = SphereField::zeros(grid, 0);
        for (dst, v) in f.comp_mut(0).iter_mut().zip(vals) {
            *dst = Complex64::new(v.re, 0.0);
        }
        f
    }

    #[test]
    fn d1_of_d1star_is_minus_laplacian() {
        let grid = SphereGrid::new(10);
        let metric = SphereMetric::round(&grid, 1.0);
        let y10 = real_scalar_from(&grid, &grid.harmonic(0, 1, 0).unwrap());
        let zero = SphereField::constant(&grid, 0.0);
        let d1s = HodgeSystem::new(metric.clone(), HodgeOperator::D1Star);
        let u = d1s.apply(&HodgeField::Pair(y10.clone(), zero.clone())).unwrap();
        let d1 = HodgeSystem::new(metric, HodgeOperator::D1);
        let HodgeField::Pair(f, g) = d1.apply(&u).unwrap() else { panic!() };
        // -Lap Y10 = 2 Y10
        assert!(f.sub(&y10.scale(2.0)).max_abs() < 1e-11);
        assert!(g.max_abs() < 1e-11);
        // D1*(0,0) = 0
        let HodgeField::OneForm(z) =
            d1s.apply(&HodgeField::Pair(zero.clone(), zero)).unwrap()
        else {
            panic!()
        };
        assert!(z.max_abs() < 1e-14);
    }

    #[test]
    fn laplacian_solve_recovers_harmonic() {
        let grid = SphereGrid::new(8);
        let metric = SphereMetric::round(&grid, 1.0);
        let y10 = real_scalar_from(&grid, &grid.harmonic(0, 1, 0).unwrap());
        let sys = HodgeSystem::new(metric, HodgeOperator::Laplacian);
        let (sol, rep) = sys.solve(&HodgeField::Scalar(y10.scale(-2.0))).unwrap();
        let HodgeField::Scalar(s) = sol else { panic!() };
        assert!(s.sub(&y10).max_abs() < 1e-11, "residual {}", rep.residual);
    }

    #[test]
    fn adjointness_of_d1_and_d1star() {
        use crate::sphere::norms::integrate;
        let grid = SphereGrid::new(10);
        let metric = SphereMetric::round(&grid, 1.3);
        let f = real_scalar_from(&grid, &grid.harmonic(0, 2, 1).unwrap());
        let g = real_scalar_from(&grid, &grid.harmonic(0, 3, -1).unwrap());
        let p = real_scalar_from(&grid, &grid.harmonic(0, 1, 0).unwrap());
        let u = calculus::grad(&metric, &p)
            .unwrap()
            .add(&calculus::dual_one_form(&metric, &calculus::grad(&metric, &g).unwrap()));
        let d1u = apply_operator(&metric, HodgeOperator::D1, &HodgeField::OneForm(u.clone()))
            .unwrap();
        let HodgeField::Pair(du, cu) = d1u else { panic!() };
        let lhs = integrate(&du.mul_scalar_field(&f), &metric)
            + integrate(&cu.mul_scalar_field(&g), &metric);
        let HodgeField::OneForm(d1s) = apply_operator(
            &metric,
            HodgeOperator::D1Star,
            &HodgeField::Pair(f.clone(), g.clone()),
        )
        .unwrap() else {
            panic!()
        };
        let rhs = integrate(&calculus::dot(&metric, &u, &d1s), &metric);
        assert!(
            (lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()),
            "<D1 U, (f,g)> = {lhs} vs <U, D1*(f,g)> = {rhs}"
        );
    }

    #[test]
    fn d2_solve_round_trip_up_to_kernel() {
        use rand::{Rng, SeedableRng};
        let grid = SphereGrid::new(12);
        let metric = SphereMetric::round(&grid, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        // random traceless F with l <= 4 built through D2* (kernel-free image)
        let mut um = vec![Complex64::new(0.0, 0.0); mode_count(12)];
        for l in 2..=4usize {
            for m in -(l as i64)..=(l as i64) {
                um[mode_index(l, m)] =
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let u = one_form_from_m_coeffs(&grid, &um).unwrap();
        let mut f_field = calculus::grad_hat(&metric, &u).unwrap().scale(-0.5);
        f_field.symmetrize_reality();
        let d2 = HodgeSystem::new(metric.clone(), HodgeOperator::D2);
        let HodgeField::OneForm(src) =
            d2.apply(&HodgeField::SymTraceless(f_field.clone())).unwrap()
        else {
            panic!()
        };
        let (sol, _) = d2.solve(&HodgeField::OneForm(src)).unwrap();
        let HodgeField::SymTraceless(back) = sol else { panic!() };
        assert!(
            back.sub(&f_field).max_abs() < 1e-8,
            "D2 apply-then-solve defect {}",
            back.sub(&f_field).max_abs()
        );
    }

    #[test]
    fn perturbed_metric_solve_converges_quickly() {
        let grid = SphereGrid::new(12);
        // h = 0.01 Y20 gamma (conformal perturbation)
        let y20 = grid.harmonic(0, 2, 0).unwrap();
        let n = grid.n_nodes();
        let mut t11 = vec![0.0; n];
        let t12 = vec![0.0; n];
        let mut t22 = vec![0.0; n];
        for i in 0..n {
            t11[i] = 0.01 * y20[i].re;
            t22[i] = 0.01 * y20[i].re;
        }
        let h = SphereField::sym2_from_frame(&grid, &t11, &t12, &t22);
        let metric = SphereMetric::perturbed(1.0, &h).unwrap();
        let mut sys = HodgeSystem::new(metric.clone(), HodgeOperator::Laplacian);
        sys.settings.tolerance = 1e-10;
        // mean-zero source
        let src = real_scalar_from(&grid, &grid.harmonic(0, 3, 2).unwrap());
        let (sol, rep) = sys.solve(&HodgeField::Scalar(src.clone())).unwrap();
        assert!(rep.iterations <= 20, "took {} iterations", rep.iterations);
        assert!(rep.residual < 1e-10);
        let HodgeField::Scalar(x) = sol else { panic!() };
        let back = calculus::laplacian(&metric, &x).unwrap();
        let mz = norms::average(&src, &metric);
        let target = src.sub(&SphereField::constant(&grid, mz));
        assert!(back.sub(&target).max_abs() < 1e-8);
    }

    #[test]
    fn elliptic_estimate_ratios_are_modest() {
        let grid = SphereGrid::new(12);
        let metric = SphereMetric::round(&grid, 1.0);
        let f = real_scalar_from(&grid, &grid.harmonic(0, 1, 0).unwrap());
        let zero = SphereField::constant(&grid, 0.0);
        let d1s = HodgeSystem::new(metric.clone(), HodgeOperator::D1Star);
        let HodgeField::OneForm(u) =
            d1s.apply(&HodgeField::Pair(f, zero.clone())).unwrap()
        else {
            panic!()
        };
        let d1 = HodgeSystem::new(metric.clone(), HodgeOperator::D1);
        let report = d1
            .verify_elliptic_estimate(&[HodgeField::OneForm(u)], 0)
            .unwrap();
        assert!(report.max_ratio <= 1.5, "ratio {}", report.max_ratio);
        // constant pair: kernel removed, ratio reported 0
        let cpair = HodgeField::Pair(SphereField::constant(&grid, 2.0), zero);
        let report = d1s.verify_elliptic_estimate(&[cpair], 0).unwrap();
        assert_eq!(report.max_ratio, 0.0);
    }
}
