//! Small numerical kernels shared across the crate: Gauss-Legendre
//! quadrature, Wigner-d evaluation, Richardson-extrapolated finite
//! differences and log-log slope fits.

pub mod wigner;

#[cfg(test)]
mod tests_fornberg;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Exact for polynomials of degree `2n - 1`. Nodes are returned in
/// increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "quadrature order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Chebyshev-Gauss-Lobatto points on `[-1, 1]`, increasing.
pub fn chebyshev_lobatto(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|j| -(std::f64::consts::PI * j as f64 / (n - 1) as f64).cos())
        .collect()
}

/// Dense Chebyshev differentiation matrix on the Lobatto points of
/// [`chebyshev_lobatto`] (Trefethen's construction).
pub fn chebyshev_diff_matrix(n: usize) -> nalgebra::DMatrix<f64> {
    let x = chebyshev_lobatto(n);
    let c = |i: usize| -> f64 {
        let edge = if i == 0 || i == n - 1 { 2.0 } else { 1.0 };
        edge * if i % 2 == 0 { 1.0 } else { -1.0 }
    };
    let mut d = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            if i != j {
                s += d[(i, j)];
            }
        }
        d[(i, i)] = -s;
    }
    d
}

/// Finite-difference weights on arbitrary nodes (Fornberg's algorithm):
/// returns `w` such that `f^(m)(x0) ~= sum_i w[i] f(x[i])`.
pub fn fd_weights(x0: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    assert!(n > m);
    let mut c = vec![vec![0.0f64; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - x0;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Least-squares slope of `log(y)` against `log(x)`.
///
/// Points with non-positive `y` are skipped; returns `None` when fewer
/// than two usable points remain.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Central difference stencils with one Richardson extrapolation step,
/// giving fourth-order accuracy from second-order central differences.
pub struct Richardson {
    pub step: f64,
}

impl Richardson {
    pub fn new(step: f64) -> Self {
        Self { step }
    }

    /// d/dx of `f` at 0 along a 1-parameter probe.
    pub fn first<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let h = self.step;
        let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    /// d^2/dx^2 of `f` at 0.
    pub fn second<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let h = self.step;
        let d = |h: f64| (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    /// Mixed second derivative d^2/dxdy at (0, 0).
    pub fn mixed<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let h = self.step;
        let d = |h: f64| (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // degree 15 polynomial: x^14
        let quad: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert_relative_eq!(quad, 2.0 / 15.0, max_relative = 1e-14);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn slope_fit_recovers_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(2.5)).collect();
        assert_relative_eq!(loglog_slope(&xs, &ys).unwrap(), 2.5, epsilon = 1e-12);
    }

    #[test]
    fn richardson_first_derivative_is_fourth_order() {
        let f = |x: f64| (1.3 * x).sin();
        let coarse = (Richardson::new(1e-1).first(f) - 1.3).abs();
        let fine = (Richardson::new(5e-2).first(f) - 1.3).abs();
        assert!(coarse / fine > 10.0, "expected ~16x error drop, got {}", coarse / fine);
    }

    #[test]
    fn chebyshev_diff_matrix_differentiates_cubic() {
        let n = 12;
        let x = chebyshev_lobatto(n);
        let d = chebyshev_diff_matrix(n);
        let f = nalgebra::DVector::from_iterator(n, x.iter().map(|x| x.powi(3)));
        let df = d * f;
        for (i, xi) in x.iter().enumerate() {
            assert_relative_eq!(df[i], 3.0 * xi * xi, epsilon = 1e-10);
        }
    }
}
