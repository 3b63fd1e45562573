//! Spacelike-slice snapshots: induced metric, lapse, second fundamental
//! form, electric/magnetic curvature parts, and the constraint-type
//! residuals (Gauss relation, div-curl system for `k`).
//!
//! Slices are coordinate level sets `x^0 = t0` of the adapter chart; the
//! intrinsic 3-curvature is computed by Richardson finite differences of
//! the induced metric, independent of the 4D curvature path.

use nalgebra::{Matrix3, Matrix4};
use serde::{Deserialize, Serialize};

use super::adapter::{MetricAdapter, Point};
use crate::error::{Error, Result};

/// Pointwise slice data at one spatial sample.
#[derive(Debug, Clone)]
pub struct SlicePointData {
    pub position: Point,
    pub induced_metric: Matrix3<f64>,
    pub lapse: f64,
    pub second_fundamental: Matrix3<f64>,
    pub electric: Matrix3<f64>,
    pub magnetic: Matrix3<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceReport {
    pub tr_k_max: f64,
    pub gauss_residual_max: f64,
    pub div_k_max: f64,
    pub magnetic_max: f64,
    pub vacuum_flag: bool,
}

pub struct SliceState {
    pub points: Vec<SlicePointData>,
    pub report: SliceReport,
}

/// Checks the slice is spacelike and the chart is orthogonal (`g_0i = 0`),
/// which all builtin slice charts satisfy.
fn normal_data(adapter: &dyn MetricAdapter, x: &Point) -> Result<(f64, Matrix4<f64>)> {
    let g = adapter.metric(x);
    if g[(0, 0)] >= 0.0 {
        return Err(Error::NonSpacelikeSlice);
    }
    for i in 1..4 {
        if g[(0, i)].abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "slice extraction needs an orthogonal chart (g_0i = 0)".into(),
            ));
        }
    }
    Ok(((-g[(0, 0)]).sqrt(), g))
}

/// Extracts pointwise slice data at a spatial sample.
pub fn extract_point(adapter: &dyn MetricAdapter, x: &Point) -> Result<SlicePointData> {
    let (lapse, g) = normal_data(adapter, x)?;
    let dg = adapter.dmetric(x);
    // k_ij = -(1/2n) d_t g_ij for zero shift.
    let mut k = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            k[(i, j)] = -0.5 / lapse * dg[0][(i + 1, j + 1)];
        }
    }
    let riem = adapter.riemann(x);
    // T = n^-1 d_t
    let tfac = 1.0 / lapse;
    let mut e = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            e[(i, j)] = tfac * tfac * riem[0][i + 1][0][j + 1];
        }
    }
    // H_ij = *R(T, i, T, j), *R_abcd = (1/2) eps_ab^{ef} R_{efcd}
    let ginv = g.try_inverse().expect("invertible metric");
    let sqrt_det = (-g.determinant()).sqrt();
    let eps4 = |a: usize, b: usize, c: usize, d: usize| -> f64 {
        levi_civita([a, b, c, d]) * sqrt_det
    };
    let mut h = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let mut val = 0.0;
            for e1 in 0..4 {
                for f1 in 0..4 {
                    let mut eps_up = 0.0;
                    for p in 0..4 {
                        for q in 0..4 {
                            eps_up += eps4(0, i + 1, p, q) * ginv[(p, e1)] * ginv[(q, f1)];
                        }
                    }
                    val += 0.5 * eps_up * riem[e1][f1][0][j + 1];
                }
            }
            h[(i, j)] = tfac * tfac * val;
        }
    }
    Ok(SlicePointData {
        position: *x,
        induced_metric: spatial_block(&g),
        lapse,
        second_fundamental: k,
        electric: e,
        magnetic: h,
    })
}

fn spatial_block(g: &Matrix4<f64>) -> Matrix3<f64> {
    let mut out = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            out[(i, j)] = g[(i + 1, j + 1)];
        }
    }
    out
}

fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut seen = [false; 4];
    for &i in &idx {
        if i > 3 || seen[i] {
            return 0.0;
        }
        seen[i] = true;
    }
    let mut sign = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Intrinsic 3D Ricci of the induced metric at `x`, by Richardson FD of
/// the slice metric in the spatial chart directions.
pub fn intrinsic_ricci_fd(adapter: &dyn MetricAdapter, x: &Point, step: f64) -> Matrix3<f64> {
    let g3 = |y: &[f64; 3]| -> Matrix3<f64> {
        spatial_block(&adapter.metric(&[x[0], y[0], y[1], y[2]]))
    };
    let base = [x[1], x[2], x[3]];
    let dg3 = |y: &[f64; 3]| -> [Matrix3<f64>; 3] {
        let mut out = [Matrix3::zeros(); 3];
        for m in 0..3 {
            let f = |t: f64| {
                let mut z = *y;
                z[m] += t;
                g3(&z)
            };
            let coarse = (f(step) - f(-step)) / (2.0 * step);
            let fine = (f(step / 2.0) - f(-step / 2.0)) / step;
            out[m] = (fine * 4.0 - coarse) / 3.0;
        }
        out
    };
    let d2g3 = {
        let mut out = [[Matrix3::<f64>::zeros(); 3]; 3];
        for m in 0..3 {
            for n in m..3 {
                let f = |a: f64, b: f64| {
                    let mut z = base;
                    z[m] += a;
                    z[n] += b;
                    g3(&z)
                };
                let val = if m == n {
                    let d2 = |h: f64| (f(h, 0.0) - f(0.0, 0.0) * 2.0 + f(-h, 0.0)) / (h * h);
                    (d2(step / 2.0) * 4.0 - d2(step)) / 3.0
                } else {
                    let dm =
                        |h: f64| (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
                    (dm(step / 2.0) * 4.0 - dm(step)) / 3.0
                };
                out[m][n] = val;
                out[n][m] = val;
            }
        }
        out
    };
    let g = g3(&base);
    let ginv = g.try_inverse().expect("induced metric invertible");
    let dgv = dg3(&base);
    // Christoffels
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for l in 0..3 {
        for m in 0..3 {
            for n in 0..3 {
                let mut acc = 0.0;
                for s in 0..3 {
                    acc += ginv[(l, s)] * (dgv[m][(s, n)] + dgv[n][(s, m)] - dgv[s][(m, n)]);
                }
                gamma[l][m][n] = 0.5 * acc;
            }
        }
    }
    let mut dginv = [Matrix3::<f64>::zeros(); 3];
    for m in 0..3 {
        dginv[m] = -ginv * dgv[m] * ginv;
    }
    let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3];
    for m in 0..3 {
        for l in 0..3 {
            for n in 0..3 {
                for s in 0..3 {
                    let mut acc = 0.0;
                    for t in 0..3 {
                        acc += dginv[m][(l, t)]
                            * (dgv[n][(t, s)] + dgv[s][(t, n)] - dgv[t][(n, s)])
                            + ginv[(l, t)]
                                * (d2g3[m][n][(t, s)] + d2g3[m][s][(t, n)]
                                    - d2g3[m][t][(n, s)]);
                    }
                    dgamma[m][l][n][s] = 0.5 * acc;
                }
            }
        }
    }
    let mut ric = Matrix3::zeros();
    for b in 0..3 {
        for n in 0..3 {
            let mut acc = 0.0;
            for a in 0..3 {
                acc += dgamma[a][a][n][b] - dgamma[n][a][a][b];
                for t in 0..3 {
                    acc += gamma[a][a][t] * gamma[t][n][b] - gamma[a][n][t] * gamma[t][a][b];
                }
            }
            ric[(b, n)] = acc;
        }
    }
    ric
}

/// Covariant 3-divergence of `k` at `x`, by FD of the pointwise extraction.
pub fn div_k_fd(adapter: &dyn MetricAdapter, x: &Point, step: f64) -> [f64; 3] {
    let k_at = |y: &[f64; 3]| -> Matrix3<f64> {
        extract_point(adapter, &[x[0], y[0], y[1], y[2]])
            .map(|p| p.second_fundamental)
            .unwrap_or_else(|_| Matrix3::zeros())
    };
    let base = [x[1], x[2], x[3]];
    let g3 = spatial_block(&adapter.metric(x));
    let ginv = g3.try_inverse().unwrap();
    // Christoffels from FD
    let mut dg = [Matrix3::<f64>::zeros(); 3];
    for m in 0..3 {
        let f = |t: f64| {
            let mut z = base;
            z[m] += t;
            spatial_block(&adapter.metric(&[x[0], z[0], z[1], z[2]]))
        };
        dg[m] = (f(step) - f(-step)) / (2.0 * step);
    }
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for l in 0..3 {
        for m in 0..3 {
            for n in 0..3 {
                let mut acc = 0.0;
                for s in 0..3 {
                    acc += ginv[(l, s)] * (dg[m][(s, n)] + dg[n][(s, m)] - dg[s][(m, n)]);
                }
                gamma[l][m][n] = 0.5 * acc;
            }
        }
    }
    let k0 = k_at(&base);
    let mut out = [0.0; 3];
    for j in 0..3 {
        let mut acc = 0.0;
        for m in 0..3 {
            let dk = {
                let f = |t: f64| {
                    let mut z = base;
                    z[m] += t;
                    k_at(&z)
                };
                (f(step) - f(-step)) / (2.0 * step)
            };
            for i in 0..3 {
                let mut grad = dk[(i, j)];
                for l in 0..3 {
                    grad -= gamma[l][m][i] * k0[(l, j)] + gamma[l][m][j] * k0[(i, l)];
                }
                acc += ginv[(m, i)] * grad;
            }
        }
        out[j] = acc;
    }
    out
}

/// Extracts slice data over a sample of points and assembles the report.
pub fn extract_slice_state(
    adapter: &dyn MetricAdapter,
    samples: &[Point],
    fd_step: f64,
    maximal_expected: bool,
) -> Result<SliceState> {
    let mut points = Vec::with_capacity(samples.len());
    let mut tr_k_max = 0.0f64;
    let mut gauss_max = 0.0f64;
    let mut div_k_max = 0.0f64;
    let mut magnetic_max = 0.0f64;
    for x in samples {
        let p = extract_point(adapter, x)?;
        let ginv = p.induced_metric.try_inverse().expect("invertible");
        let tr_k = (ginv * p.second_fundamental).trace();
        tr_k_max = tr_k_max.max(tr_k.abs());
        // Gauss relation (vacuum): Ric3_ij = E_ij + k_ia k^a_j - (tr k) k_ij
        let ric3 = intrinsic_ricci_fd(adapter, x, fd_step);
        let k_mixed = ginv * p.second_fundamental;
        let kk = p.second_fundamental * k_mixed;
        let gauss = ric3 - p.electric - kk + p.second_fundamental * tr_k;
        gauss_max = gauss_max.max(gauss.abs().max());
        let dk = div_k_fd(adapter, x, fd_step);
        div_k_max = div_k_max.max(dk.iter().fold(0.0f64, |a, b| a.max(b.abs())));
        magnetic_max = magnetic_max.max(p.magnetic.abs().max());
        points.push(p);
    }
    if maximal_expected && tr_k_max > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "slice flagged maximal but tr k = {tr_k_max:.3e}"
        )));
    }
    let vacuum_flag = adapter.is_vacuum();
    Ok(SliceState {
        points,
        report: SliceReport {
            tr_k_max,
            gauss_residual_max: gauss_max,
            div_k_max,
            magnetic_max,
            vacuum_flag,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::adapter::{
        Minkowski, Schwarzschild, SchwarzschildChart, SyntheticBump,
    };

    #[test]
    fn minkowski_slice_is_trivial() {
        let samples = [[0.0, 1.0, 0.5, -0.7], [0.0, -2.0, 0.1, 0.4]];
        let s = extract_slice_state(&Minkowski, &samples, 1e-2, true).unwrap();
        assert!(s.report.tr_k_max < 1e-14);
        assert!(s.report.gauss_residual_max < 1e-10);
        assert!(s.report.magnetic_max < 1e-14);
        for p in &s.points {
            assert!((p.lapse - 1.0).abs() < 1e-14);
            assert!(p.electric.abs().max() < 1e-14);
        }
    }

    #[test]
    fn schwarzschild_static_slice_matches_closed_forms() {
        let adapter = Schwarzschild::new(1.0, SchwarzschildChart::Static).unwrap();
        // spherical chart point at r = 6
        let x = [0.0, 6.0, 1.3, 0.4];
        let p = extract_point(&adapter, &x).unwrap();
        assert!(p.second_fundamental.abs().max() < 1e-14); // static => k = 0
        assert!(p.magnetic.abs().max() < 1e-12);
        // orthonormal radial electric component: E_rr / g_rr = -2M/r^3
        let e_rr = p.electric[(0, 0)] / p.induced_metric[(0, 0)];
        let expect = -2.0 / 216.0;
        assert!(
            (e_rr - expect).abs() < 1e-10,
            "E_rr normalized {e_rr} vs {expect}"
        );
        let s = extract_slice_state(&adapter, &[x], 2e-3, true).unwrap();
        assert!(
            s.report.gauss_residual_max < 1e-8,
            "Gauss residual {:.3e}",
            s.report.gauss_residual_max
        );
        assert!(s.report.div_k_max < 1e-10);
    }

    #[test]
    fn bump_slice_reports_constraint_violation() {
        let adapter = SyntheticBump::new(0.01, 2.0, [0.0; 3], 1.0).unwrap();
        // t chosen so that d_t g != 0 (k nonzero) and constraints fail.
        let x = [0.3, 0.5, 0.2, -0.4];
        let s = extract_slice_state(&adapter, &[x], 1e-2, false).unwrap();
        assert!(!s.report.vacuum_flag);
        assert!(s.report.div_k_max > 1e-6, "div k = {:.3e}", s.report.div_k_max);
        assert!(s.report.tr_k_max > 1e-6);
    }
}
