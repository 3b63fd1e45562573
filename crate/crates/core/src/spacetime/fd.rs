//! Finite-difference differential-geometry oracle.
//!
//! Computes Christoffel, Riemann and Ricci tensors from metric values
//! alone, by Richardson-extrapolated central differences. This path never
//! touches the adapters' analytic derivatives, so it can certify them.

use nalgebra::Matrix4;

use super::adapter::{christoffel_from, ricci_from, riemann_from, MetricAdapter, Point};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct FdOracle {
    pub step: f64,
}

impl FdOracle {
    pub fn new(step: f64) -> Result<Self> {
        if step <= 1e-8 {
            return Err(Error::InvalidParameter(format!("fd step {step} underflows")));
        }
        Ok(Self { step })
    }

    fn dmetric_fd(&self, adapter: &dyn MetricAdapter, x: &Point) -> [Matrix4<f64>; 4] {
        let h = self.step;
        let mut out = [Matrix4::zeros(); 4];
        for mu in 0..4 {
            let g = |t: f64| {
                let mut y = *x;
                y[mu] += t;
                adapter.metric(&y)
            };
            let coarse = (g(h) - g(-h)) / (2.0 * h);
            let fine = (g(h / 2.0) - g(-h / 2.0)) / h;
            out[mu] = (fine * 4.0 - coarse) / 3.0;
        }
        out
    }

    fn d2metric_fd(&self, adapter: &dyn MetricAdapter, x: &Point) -> [[Matrix4<f64>; 4]; 4] {
        let h = self.step;
        let mut out = [[Matrix4::zeros(); 4]; 4];
        for mu in 0..4 {
            for nu in mu..4 {
                let g = |a: f64, b: f64| {
                    let mut y = *x;
                    y[mu] += a;
                    y[nu] += b;
                    adapter.metric(&y)
                };
                let val = if mu == nu {
                    let d2 = |h: f64| (g(h, 0.0) - g(0.0, 0.0) * 2.0 + g(-h, 0.0)) / (h * h);
                    (d2(h / 2.0) * 4.0 - d2(h)) / 3.0
                } else {
                    let dm = |h: f64| {
                        (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4.0 * h * h)
                    };
                    (dm(h / 2.0) * 4.0 - dm(h)) / 3.0
                };
                out[mu][nu] = val;
                out[nu][mu] = val;
            }
        }
        out
    }

    pub fn christoffel(&self, adapter: &dyn MetricAdapter, x: &Point) -> [[[f64; 4]; 4]; 4] {
        let ginv = adapter.metric(x).try_inverse().expect("metric invertible");
        christoffel_from(&ginv, &self.dmetric_fd(adapter, x))
    }

    pub fn riemann(&self, adapter: &dyn MetricAdapter, x: &Point) -> [[[[f64; 4]; 4]; 4]; 4] {
        let g = adapter.metric(x);
        let ginv = g.try_inverse().expect("metric invertible");
        riemann_from(&g, &ginv, &self.dmetric_fd(adapter, x), &self.d2metric_fd(adapter, x))
    }

    pub fn ricci(&self, adapter: &dyn MetricAdapter, x: &Point) -> Matrix4<f64> {
        let ginv = adapter.metric(x).try_inverse().expect("metric invertible");
        ricci_from(&self.riemann(adapter, x), &ginv)
    }

    /// Covariant divergence of a pointwise-defined, fully covariant
    /// 4-tensor field `t(x)` over its first slot:
    /// `(DIV T)_{bcd} = g^{ae} Grad_e T_{abcd}`.
    pub fn divergence4(
        &self,
        adapter: &dyn MetricAdapter,
        x: &Point,
        t: &dyn Fn(&Point) -> [[[[f64; 4]; 4]; 4]; 4],
    ) -> [[[f64; 4]; 4]; 4] {
        let h = self.step;
        let gamma = self.christoffel(adapter, x);
        let ginv = adapter.metric(x).try_inverse().expect("metric invertible");
        let t0 = t(x);
        // partial derivatives of T
        let mut dt = vec![[[[[0.0; 4]; 4]; 4]; 4]; 4];
        for mu in 0..4 {
            let f = |s: f64| {
                let mut y = *x;
                y[mu] += s;
                t(&y)
            };
            let (tp, tm) = (f(h), f(-h));
            let (tp2, tm2) = (f(h / 2.0), f(-h / 2.0));
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            let coarse = (tp[a][b][c][d] - tm[a][b][c][d]) / (2.0 * h);
                            let fine = (tp2[a][b][c][d] - tm2[a][b][c][d]) / h;
                            dt[mu][a][b][c][d] = (4.0 * fine - coarse) / 3.0;
                        }
                    }
                }
            }
        }
        // Grad_e T_{abcd} = d_e T - Gamma^l_{ea} T_{lbcd} - ... (4 terms)
        let mut out = [[[0.0; 4]; 4]; 4];
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut acc = 0.0;
                    for e in 0..4 {
                        for a in 0..4 {
                            let mut grad = dt[e][a][b][c][d];
                            for l in 0..4 {
                                grad -= gamma[l][e][a] * t0[l][b][c][d]
                                    + gamma[l][e][b] * t0[a][l][c][d]
                                    + gamma[l][e][c] * t0[a][b][l][d]
                                    + gamma[l][e][d] * t0[a][b][c][l];
                            }
                            acc += ginv[(a, e)] * grad;
                        }
                    }
                    out[b][c][d] = acc;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::adapter::{
        kretschmann, LinearWave, Minkowski, Schwarzschild, SchwarzschildChart,
    };
    use approx::assert_relative_eq;

    #[test]
    fn minkowski_christoffels_vanish() {
        let oracle = FdOracle::new(1e-2).unwrap();
        let gamma = oracle.christoffel(&Minkowski, &[0.0, 1.0, 2.0, 3.0]);
        for l in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    assert!(gamma[l][m][n].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn kretschmann_at_r2_matches_48m2_over_r6() {
        let s = Schwarzschild::new(1.0, SchwarzschildChart::EfIngoing).unwrap();
        let oracle = FdOracle::new(2e-3).unwrap();
        let x = [0.0, 2.0, 1.3, 0.2];
        let riem = oracle.riemann(&s, &x);
        let ginv = s.metric(&x).try_inverse().unwrap();
        let k = kretschmann(&riem, &ginv);
        assert_relative_eq!(k, 0.75, max_relative = 1e-6);
    }

    #[test]
    fn fd_error_drops_at_fourth_order() {
        let s = Schwarzschild::new(1.0, SchwarzschildChart::Static).unwrap();
        let x = [0.0, 4.0, 1.0, 0.5];
        let exact = s.ricci(&x); // analytic derivatives; Ricci ~ 0
        let err = |step: f64| -> f64 {
            let oracle = FdOracle::new(step).unwrap();
            let r = oracle.ricci(&s, &x);
            let mut m = 0.0f64;
            for a in 0..4 {
                for b in 0..4 {
                    m = m.max((r[(a, b)] - exact[(a, b)]).abs());
                }
            }
            m
        };
        let e1 = err(4e-2);
        let e2 = err(2e-2);
        let ratio = e1 / e2;
        assert!(
            ratio > 8.0,
            "expected ~16x error reduction at half step, got {ratio} ({e1} -> {e2})"
        );
    }

    #[test]
    fn schwarzschild_vacuum_residual_under_oracle() {
        let s = Schwarzschild::new(1.0, SchwarzschildChart::EfIngoing).unwrap();
        let oracle = FdOracle::new(2e-3).unwrap();
        let ric = oracle.ricci(&s, &[0.0, 10.0, 1.1, 0.3]);
        for a in 0..4 {
            for b in 0..4 {
                assert!(ric[(a, b)].abs() < 1e-8, "residual {}", ric[(a, b)]);
            }
        }
    }

    #[test]
    fn linear_wave_vacuum_to_second_order_via_oracle() {
        let eps = 1e-3;
        let w = LinearWave::new(eps, 1.0, 1.0, 0.5).unwrap();
        let oracle = FdOracle::new(1e-2).unwrap();
        let ric = oracle.ricci(&w, &[0.7, 0.1, -0.4, 0.2]);
        for a in 0..4 {
            for b in 0..4 {
                assert!(ric[(a, b)].abs() < 1e-5, "Ric[{a}{b}] = {}", ric[(a, b)]);
            }
        }
    }
}
