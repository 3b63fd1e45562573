//! Analytic spacetime metric adapters: evaluation of `g`, `dg`, `d2g` at
//! spacetime points, plus derived Christoffel and curvature tensors.
//!
//! Adapters own their coordinate system. The Schwarzschild adapter exists
//! in outgoing/ingoing Eddington-Finkelstein and static charts; Minkowski,
//! the linearized plane wave and the synthetic bump are Cartesian.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 4];

/// Lorentzian metric with derivatives, signature (-,+,+,+).
pub trait MetricAdapter: Send + Sync {
    fn name(&self) -> &'static str;
    fn metric(&self, x: &Point) -> Matrix4<f64>;

    /// `dg[mu] = d g / d x^mu`. Closed form for every builtin.
    fn dmetric(&self, x: &Point) -> [Matrix4<f64>; 4];

    /// `d2g[mu][nu] = d^2 g / dx^mu dx^nu`.
    fn d2metric(&self, x: &Point) -> [[Matrix4<f64>; 4]; 4];

    /// Whether the exact metric solves the vacuum equations (the linear
    /// wave is vacuum only to second order in its amplitude).
    fn is_vacuum(&self) -> bool;

    fn inverse_metric(&self, x: &Point) -> Matrix4<f64> {
        self.metric(x).try_inverse().expect("metric must be invertible")
    }

    /// Christoffel symbols from the adapter's own derivatives.
    fn christoffel(&self, x: &Point) -> [[[f64; 4]; 4]; 4] {
        christoffel_from(&self.inverse_metric(x), &self.dmetric(x))
    }

    /// Riemann tensor, all indices down, from the adapter's derivatives.
    fn riemann(&self, x: &Point) -> [[[[f64; 4]; 4]; 4]; 4] {
        let g = self.metric(x);
        let ginv = self.inverse_metric(x);
        let dg = self.dmetric(x);
        let d2g = self.d2metric(x);
        riemann_from(&g, &ginv, &dg, &d2g)
    }

    fn ricci(&self, x: &Point) -> Matrix4<f64> {
        let riem = self.riemann(x);
        let ginv = self.inverse_metric(x);
        ricci_from(&riem, &ginv)
    }
}

pub fn christoffel_from(ginv: &Matrix4<f64>, dg: &[Matrix4<f64>; 4]) -> [[[f64; 4]; 4]; 4] {
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for l in 0..4 {
        for m in 0..4 {
            for n in m..4 {
                let mut acc = 0.0;
                for s in 0..4 {
                    acc += ginv[(l, s)] * (dg[m][(s, n)] + dg[n][(s, m)] - dg[s][(m, n)]);
                }
                gamma[l][m][n] = 0.5 * acc;
                gamma[l][n][m] = gamma[l][m][n];
            }
        }
    }
    gamma
}

/// Riemann tensor all-down: `R_{a b m n} = g_{a l} R^l_{b m n}`.
pub fn riemann_from(
    g: &Matrix4<f64>,
    ginv: &Matrix4<f64>,
    dg: &[Matrix4<f64>; 4],
    d2g: &[[Matrix4<f64>; 4]; 4],
) -> [[[[f64; 4]; 4]; 4]; 4] {
    let gamma = christoffel_from(ginv, dg);
    // dGamma[m][l][n][s] = d_m Gamma^l_{n s}
    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 4];
    // d_m ginv = -ginv dg[m] ginv
    let mut dginv = [Matrix4::<f64>::zeros(); 4];
    for m in 0..4 {
        dginv[m] = -ginv * dg[m] * ginv;
    }
    for m in 0..4 {
        for l in 0..4 {
            for n in 0..4 {
                for s in 0..4 {
                    let mut acc = 0.0;
                    for t in 0..4 {
                        acc += dginv[m][(l, t)]
                            * (dg[n][(t, s)] + dg[s][(t, n)] - dg[t][(n, s)])
                            + ginv[(l, t)]
                                * (d2g[m][n][(t, s)] + d2g[m][s][(t, n)] - d2g[m][t][(n, s)]);
                    }
                    dgamma[m][l][n][s] = 0.5 * acc;
                }
            }
        }
    }
    // R^l_{s m n} = d_m Gamma^l_{n s} - d_n Gamma^l_{m s}
    //              + Gamma^l_{m t} Gamma^t_{n s} - Gamma^l_{n t} Gamma^t_{m s}
    let mut riem_up = [[[[0.0; 4]; 4]; 4]; 4];
    for l in 0..4 {
        for s in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    let mut acc = dgamma[m][l][n][s] - dgamma[n][l][m][s];
                    for t in 0..4 {
                        acc += gamma[l][m][t] * gamma[t][n][s] - gamma[l][n][t] * gamma[t][m][s];
                    }
                    riem_up[l][s][m][n] = acc;
                }
            }
        }
    }
    let mut riem = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    let mut acc = 0.0;
                    for l in 0..4 {
                        acc += g[(a, l)] * riem_up[l][b][m][n];
                    }
                    riem[a][b][m][n] = acc;
                }
            }
        }
    }
    riem
}

pub fn ricci_from(riem: &[[[[f64; 4]; 4]; 4]; 4], ginv: &Matrix4<f64>) -> Matrix4<f64> {
    // Ric_{b n} = g^{a m} R_{a b m n}
    let mut ric = Matrix4::zeros();
    for b in 0..4 {
        for n in 0..4 {
            let mut acc = 0.0;
            for a in 0..4 {
                for m in 0..4 {
                    acc += ginv[(a, m)] * riem[a][b][m][n];
                }
            }
            ric[(b, n)] = acc;
        }
    }
    ric
}

pub fn kretschmann(riem: &[[[[f64; 4]; 4]; 4]; 4], ginv: &Matrix4<f64>) -> f64 {
    // R_{abcd} R^{abcd}
    let mut acc = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut up = 0.0;
                    for (p, q, r, s) in itertools_4() {
                        up += ginv[(a, p)] * ginv[(b, q)] * ginv[(c, r)] * ginv[(d, s)]
                            * riem[p][q][r][s];
                    }
                    acc += riem[a][b][c][d] * up;
                }
            }
        }
    }
    acc
}

fn itertools_4() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..4).flat_map(|p| (0..4).flat_map(move |q| (0..4).flat_map(move |r| (0..4).map(move |s| (p, q, r, s)))))
}

/// Schwarzschild chart selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchwarzschildChart {
    /// `(u, r, theta, phi)`, `g = -W du^2 - 2 du dr + r^2 dOmega`.
    EfOutgoing,
    /// `(v, r, theta, phi)`, `g = -W dv^2 + 2 dv dr + r^2 dOmega`.
    EfIngoing,
    /// `(t, r, theta, phi)`, `g = -W dt^2 + W^-1 dr^2 + r^2 dOmega`.
    Static,
}

pub struct Minkowski;

impl MetricAdapter for Minkowski {
    fn name(&self) -> &'static str {
        "minkowski"
    }
    fn metric(&self, _x: &Point) -> Matrix4<f64> {
        Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0))
    }
    fn dmetric(&self, _x: &Point) -> [Matrix4<f64>; 4] {
        [Matrix4::zeros(); 4]
    }
    fn d2metric(&self, _x: &Point) -> [[Matrix4<f64>; 4]; 4] {
        [[Matrix4::zeros(); 4]; 4]
    }
    fn is_vacuum(&self) -> bool {
        true
    }
}

pub struct Schwarzschild {
    pub mass: f64,
    pub chart: SchwarzschildChart,
}

impl Schwarzschild {
    pub fn new(mass: f64, chart: SchwarzschildChart) -> Result<Self> {
        if mass < 0.0 {
            return Err(Error::InvalidParameter(format!("mass {mass} must be >= 0")));
        }
        Ok(Self { mass, chart })
    }

    fn w(&self, r: f64) -> f64 {
        1.0 - 2.0 * self.mass / r
    }
}

impl MetricAdapter for Schwarzschild {
    fn name(&self) -> &'static str {
        "schwarzschild"
    }

    fn metric(&self, x: &Point) -> Matrix4<f64> {
        let (r, th) = (x[1], x[2]);
        let w = self.w(r);
        let mut g = Matrix4::zeros();
        match self.chart {
            SchwarzschildChart::EfOutgoing => {
                g[(0, 0)] = -w;
                g[(0, 1)] = -1.0;
                g[(1, 0)] = -1.0;
            }
            SchwarzschildChart::EfIngoing => {
                g[(0, 0)] = -w;
                g[(0, 1)] = 1.0;
                g[(1, 0)] = 1.0;
            }
            SchwarzschildChart::Static => {
                g[(0, 0)] = -w;
                g[(1, 1)] = 1.0 / w;
            }
        }
        g[(2, 2)] = r * r;
        g[(3, 3)] = r * r * th.sin() * th.sin();
        g
    }

    fn dmetric(&self, x: &Point) -> [Matrix4<f64>; 4] {
        let (r, th) = (x[1], x[2]);
        let wp = 2.0 * self.mass / (r * r); // dW/dr
        let mut out = [Matrix4::zeros(); 4];
        // d/dr
        out[1][(0, 0)] = -wp;
        if self.chart == SchwarzschildChart::Static {
            let w = self.w(r);
            out[1][(1, 1)] = -wp / (w * w);
        }
        out[1][(2, 2)] = 2.0 * r;
        out[1][(3, 3)] = 2.0 * r * th.sin() * th.sin();
        // d/dtheta
        out[2][(3, 3)] = 2.0 * r * r * th.sin() * th.cos();
        out
    }

    fn d2metric(&self, x: &Point) -> [[Matrix4<f64>; 4]; 4] {
        let (r, th) = (x[1], x[2]);
        let m = self.mass;
        let wp = 2.0 * m / (r * r);
        let wpp = -4.0 * m / (r * r * r);
        let mut out = [[Matrix4::zeros(); 4]; 4];
        out[1][1][(0, 0)] = -wpp;
        if self.chart == SchwarzschildChart::Static {
            let w = self.w(r);
            out[1][1][(1, 1)] = -wpp / (w * w) + 2.0 * wp * wp / (w * w * w);
        }
        out[1][1][(2, 2)] = 2.0;
        out[1][1][(3, 3)] = 2.0 * th.sin() * th.sin();
        out[1][2][(3, 3)] = 4.0 * r * th.sin() * th.cos();
        out[2][1][(3, 3)] = 4.0 * r * th.sin() * th.cos();
        out[2][2][(3, 3)] = 2.0 * r * r * (2.0 * th.cos() * th.cos() - 1.0);
        out
    }

    fn is_vacuum(&self) -> bool {
        true
    }
}

/// Linearized TT plane wave moving in `+z`: `g = eta + eps h cos(k(t - z))`
/// with `h_xx = -h_yy = a_plus`, `h_xy = a_cross`.
pub struct LinearWave {
    pub amplitude: f64,
    pub wavenumber: f64,
    pub a_plus: f64,
    pub a_cross: f64,
}

impl LinearWave {
    pub fn new(amplitude: f64, wavenumber: f64, a_plus: f64, a_cross: f64) -> Result<Self> {
        if !(0.0..=0.1).contains(&amplitude) {
            return Err(Error::InvalidParameter(format!(
                "wave amplitude {amplitude} outside [0, 0.1]"
            )));
        }
        Ok(Self { amplitude, wavenumber, a_plus, a_cross })
    }

    fn phase(&self, x: &Point) -> f64 {
        self.wavenumber * (x[0] - x[3])
    }

    fn polarization(&self) -> Matrix4<f64> {
        let mut h = Matrix4::zeros();
        h[(1, 1)] = self.a_plus;
        h[(2, 2)] = -self.a_plus;
        h[(1, 2)] = self.a_cross;
        h[(2, 1)] = self.a_cross;
        h
    }
}

impl MetricAdapter for LinearWave {
    fn name(&self) -> &'static str {
        "linear_wave"
    }

    fn metric(&self, x: &Point) -> Matrix4<f64> {
        let eta = Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0));
        eta + self.polarization() * (self.amplitude * self.phase(x).cos())
    }

    fn dmetric(&self, x: &Point) -> [Matrix4<f64>; 4] {
        let dphase = [self.wavenumber, 0.0, 0.0, -self.wavenumber];
        let s = -self.amplitude * self.phase(x).sin();
        let pol = self.polarization();
        let mut out = [Matrix4::zeros(); 4];
        for mu in 0..4 {
            out[mu] = pol * (s * dphase[mu]);
        }
        out
    }

    fn d2metric(&self, x: &Point) -> [[Matrix4<f64>; 4]; 4] {
        let dphase = [self.wavenumber, 0.0, 0.0, -self.wavenumber];
        let c = -self.amplitude * self.phase(x).cos();
        let pol = self.polarization();
        let mut out = [[Matrix4::zeros(); 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                out[mu][nu] = pol * (c * dphase[mu] * dphase[nu]);
            }
        }
        out
    }

    fn is_vacuum(&self) -> bool {
        false // vacuum only to O(amplitude^2)
    }
}

/// Non-vacuum control case: time-dependent conformally flat spatial slices,
/// `g = -dt^2 + (1 + eps psi(t, x))^4 delta`, `psi` a Gaussian bump times a
/// temporal cosine.
pub struct SyntheticBump {
    pub amplitude: f64,
    pub width: f64,
    pub center: [f64; 3],
    pub frequency: f64,
}

impl SyntheticBump {
    pub fn new(amplitude: f64, width: f64, center: [f64; 3], frequency: f64) -> Result<Self> {
        if !(0.0..=0.1).contains(&amplitude) {
            return Err(Error::InvalidParameter(format!(
                "bump amplitude {amplitude} outside [0, 0.1]"
            )));
        }
        Ok(Self { amplitude, width, center, frequency })
    }

    fn psi(&self, x: &Point) -> f64 {
        let r2 = (x[1] - self.center[0]).powi(2)
            + (x[2] - self.center[1]).powi(2)
            + (x[3] - self.center[2]).powi(2);
        (-r2 / (self.width * self.width)).exp() * (self.frequency * x[0]).cos()
    }

    fn dpsi(&self, x: &Point) -> [f64; 4] {
        let p = self.psi(x);
        let r2 = (x[1] - self.center[0]).powi(2)
            + (x[2] - self.center[1]).powi(2)
            + (x[3] - self.center[2]).powi(2);
        let spatial = (-r2 / (self.width * self.width)).exp();
        let mut out = [0.0; 4];
        out[0] = -self.frequency * spatial * (self.frequency * x[0]).sin();
        for i in 0..3 {
            out[i + 1] = p * (-2.0 * (x[i + 1] - self.center[i]) / (self.width * self.width));
        }
        out
    }
}

impl MetricAdapter for SyntheticBump {
    fn name(&self) -> &'static str {
        "synthetic_bump"
    }

    fn metric(&self, x: &Point) -> Matrix4<f64> {
        let a = 1.0 + self.amplitude * self.psi(x);
        let a4 = a.powi(4);
        Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, a4, a4, a4))
    }

    fn dmetric(&self, x: &Point) -> [Matrix4<f64>; 4] {
        let a = 1.0 + self.amplitude * self.psi(x);
        let dp = self.dpsi(x);
        let mut out = [Matrix4::zeros(); 4];
        for mu in 0..4 {
            let da4 = 4.0 * a.powi(3) * self.amplitude * dp[mu];
            out[mu] = Matrix4::from_diagonal(&nalgebra::Vector4::new(0.0, da4, da4, da4));
        }
        out
    }

    fn d2metric(&self, x: &Point) -> [[Matrix4<f64>; 4]; 4] {
        // second derivatives by Richardson on the closed-form dmetric
        let h = 1e-4 * self.width.max(1.0);
        let mut out = [[Matrix4::zeros(); 4]; 4];
        for mu in 0..4 {
            let d = |t: f64| {
                let mut y = *x;
                y[mu] += t;
                self.dmetric(&y)
            };
            for nu in 0..4 {
                let coarse = (d(h)[nu] - d(-h)[nu]) / (2.0 * h);
                let fine = (d(h / 2.0)[nu] - d(-h / 2.0)[nu]) / h;
                out[mu][nu] = (fine * 4.0 - coarse) / 3.0;
            }
        }
        out
    }

    fn is_vacuum(&self) -> bool {
        false
    }
}

/// Catalog constructor used by the CLI layer.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum AdapterSpec {
    Minkowski,
    Schwarzschild {
        mass: f64,
        #[serde(default = "default_chart")]
        chart: SchwarzschildChart,
    },
    LinearWave {
        amplitude: f64,
        #[serde(default = "default_wavenumber")]
        wavenumber: f64,
        #[serde(default = "default_plus")]
        a_plus: f64,
        #[serde(default)]
        a_cross: f64,
    },
    SyntheticBump {
        amplitude: f64,
        #[serde(default = "default_width")]
        width: f64,
        #[serde(default)]
        center: [f64; 3],
        #[serde(default = "default_frequency")]
        frequency: f64,
    },
}

fn default_chart() -> SchwarzschildChart {
    SchwarzschildChart::EfOutgoing
}
fn default_wavenumber() -> f64 {
    1.0
}
fn default_plus() -> f64 {
    1.0
}
fn default_width() -> f64 {
    2.0
}
fn default_frequency() -> f64 {
    1.0
}

impl AdapterSpec {
    pub fn build(&self) -> Result<Box<dyn MetricAdapter>> {
        Ok(match self {
            AdapterSpec::Minkowski => Box::new(Minkowski),
            AdapterSpec::Schwarzschild { mass, chart } => {
                Box::new(Schwarzschild::new(*mass, *chart)?)
            }
            AdapterSpec::LinearWave { amplitude, wavenumber, a_plus, a_cross } => {
                Box::new(LinearWave::new(*amplitude, *wavenumber, *a_plus, *a_cross)?)
            }
            AdapterSpec::SyntheticBump { amplitude, width, center, frequency } => {
                Box::new(SyntheticBump::new(*amplitude, *width, *center, *frequency)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn minkowski_is_flat_diag() {
        let g = Minkowski.metric(&[0.3, 1.0, -2.0, 0.5]);
        assert_eq!(g[(0, 0)], -1.0);
        assert_eq!(g[(1, 1)], 1.0);
        let gamma = Minkowski.christoffel(&[0.0, 1.0, 2.0, 3.0]);
        for l in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    assert_eq!(gamma[l][m][n], 0.0);
                }
            }
        }
    }

    #[test]
    fn schwarzschild_static_is_ricci_flat() {
        let s = Schwarzschild::new(1.0, SchwarzschildChart::Static).unwrap();
        let x = [0.0, 5.0, 1.2, 0.4];
        let ric = s.ricci(&x);
        for a in 0..4 {
            for b in 0..4 {
                assert!(ric[(a, b)].abs() < 1e-11, "Ric[{a}{b}] = {}", ric[(a, b)]);
            }
        }
    }

    #[test]
    fn schwarzschild_ef_charts_are_ricci_flat() {
        for chart in [SchwarzschildChart::EfOutgoing, SchwarzschildChart::EfIngoing] {
            let s = Schwarzschild::new(1.0, chart).unwrap();
            let x = [1.0, 4.0, 0.9, 2.0];
            let ric = s.ricci(&x);
            for a in 0..4 {
                for b in 0..4 {
                    assert!(ric[(a, b)].abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn kretschmann_matches_closed_form() {
        // K = 48 M^2 / r^6 at the horizon radius; needs the regular chart.
        let s = Schwarzschild::new(1.0, SchwarzschildChart::EfIngoing).unwrap();
        let x = [0.0, 2.0, 1.3, 0.2];
        let riem = s.riemann(&x);
        let k = kretschmann(&riem, &s.inverse_metric(&x));
        assert_relative_eq!(k, 48.0 / 64.0, max_relative = 1e-10);
    }

    #[test]
    fn linear_wave_ricci_is_second_order_small() {
        let eps = 1e-3;
        let w = LinearWave::new(eps, 1.0, 1.0, 0.3).unwrap();
        let x = [0.4, 0.3, -0.2, 0.9];
        let ric = w.ricci(&x);
        for a in 0..4 {
            for b in 0..4 {
                assert!(
                    ric[(a, b)].abs() < 10.0 * eps * eps,
                    "Ric[{a}{b}] = {} not O(eps^2)",
                    ric[(a, b)]
                );
            }
        }
    }

    #[test]
    fn bump_is_not_vacuum() {
        let b = SyntheticBump::new(0.01, 2.0, [0.0; 3], 1.0).unwrap();
        let x = [0.2, 0.5, 0.1, -0.3];
        let ric = b.ricci(&x);
        let mut max = 0.0f64;
        for a in 0..4 {
            for bb in 0..4 {
                max = max.max(ric[(a, bb)].abs());
            }
        }
        assert!(max > 1e-5, "bump Ricci unexpectedly small: {max}");
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(Schwarzschild::new(-1.0, SchwarzschildChart::Static).is_err());
        assert!(LinearWave::new(0.5, 1.0, 1.0, 0.0).is_err());
    }
}
