//! Wigner small-d matrix elements `d^l_{m,mp}(beta)`.
//!
//! Evaluated by the stable three-term upward recursion in `l` with
//! closed-form seeds at `l = max(|m|, |mp|)`. This is the only basis
//! kernel needed for spin-weighted spherical harmonics.

/// ln(n!) by direct summation (n stays below a few hundred here).
fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Seed value `d^j_{j, mp}(beta)` for the top row `m = j`:
/// `sqrt( (2j)! / ((j+mp)!(j-mp)!) ) cos^{j+mp}(b/2) (-sin(b/2))^{j-mp}`.
fn seed_top_row(j: i32, mp: i32, cos_half: f64, sin_half: f64) -> f64 {
    debug_assert!(mp.abs() <= j);
    let ln_norm = 0.5
        * (ln_factorial(2 * j as u32)
            - ln_factorial((j + mp) as u32)
            - ln_factorial((j - mp) as u32));
    ln_norm.exp() * cos_half.powi(j + mp) * (-sin_half).powi(j - mp)
}

/// `d^l_{m,mp}(beta)` for `l = l_min..=l_max` where `l_min = max(|m|,|mp|)`.
///
/// Returns the values in a Vec indexed by `l - l_min`.
pub fn wigner_d_column(l_max: u32, m: i32, mp: i32, beta: f64) -> Vec<f64> {
    let l_min = m.abs().max(mp.abs());
    if l_min as u32 > l_max {
        return Vec::new();
    }
    let cos_b = beta.cos();
    let cos_half = (beta / 2.0).cos();
    let sin_half = (beta / 2.0).sin();

    // Reduce to a top-row seed using d^j_{m,mp} = (-1)^{m-mp} d^j_{mp,m}
    // = d^j_{-mp,-m}.
    let seed = if m == l_min {
        seed_top_row(l_min, mp, cos_half, sin_half)
    } else if m == -l_min {
        // d^j_{-j,mp} = d^j_{-mp,j} = (-1)^{(-mp)-j} d^j_{j,-mp}
        let sign = if ((-mp - l_min) % 2 + 2) % 2 == 0 { 1.0 } else { -1.0 };
        sign * seed_top_row(l_min, -mp, cos_half, sin_half)
    } else if mp == l_min {
        // d^j_{m,j} = (-1)^{m-j} d^j_{j,m}
        let sign = if ((m - l_min) % 2 + 2) % 2 == 0 { 1.0 } else { -1.0 };
        sign * seed_top_row(l_min, m, cos_half, sin_half)
    } else {
        // mp == -l_min: d^j_{m,-j} = d^j_{j,-m}
        seed_top_row(l_min, -m, cos_half, sin_half)
    };

    let n = (l_max as i32 - l_min + 1) as usize;
    let mut out = Vec::with_capacity(n);
    out.push(seed);
    if n == 1 {
        return out;
    }

    let mf = m as f64;
    let mpf = mp as f64;
    let mut d_prev = 0.0f64;
    let mut d_curr = seed;
    for l in l_min..(l_max as i32) {
        let d_next = if l == 0 {
            // Only reached for m = mp = 0, where d^l_{00} = P_l(cos b).
            cos_b
        } else {
            let lf = l as f64;
            let lp = lf + 1.0;
            let c_next = lf * ((lp * lp - mf * mf) * (lp * lp - mpf * mpf)).sqrt();
            let c_mid = (2.0 * lf + 1.0) * (lf * lp * cos_b - mf * mpf);
            let c_prev = lp * ((lf * lf - mf * mf) * (lf * lf - mpf * mpf)).sqrt();
            (c_mid * d_curr - c_prev * d_prev) / c_next
        };
        d_prev = d_curr;
        d_curr = d_next;
        out.push(d_curr);
    }
    out
}

/// Pointwise spin-weighted harmonic with the same convention as the grid
/// transforms: `sYlm = (-1)^s sqrt((2l+1)/4pi) d^l_{m,-s}(theta) e^{im phi}`.
pub fn sylm_point(s: i32, l: usize, m: i64, theta: f64, phi: f64) -> num_complex::Complex64 {
    let l_min = (m.unsigned_abs() as usize).max(s.unsigned_abs() as usize);
    if l < l_min {
        return num_complex::Complex64::new(0.0, 0.0);
    }
    let col = wigner_d_column(l as u32, m as i32, -s, theta);
    let d = col[l - l_min];
    let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
    let norm = sign * ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt();
    norm * d * num_complex::Complex64::new((m as f64 * phi).cos(), (m as f64 * phi).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn matches_analytic_d1() {
        let b = 0.7f64;
        let col = wigner_d_column(1, 0, 0, b);
        assert_relative_eq!(col[1], b.cos(), epsilon = 1e-13);
        let col = wigner_d_column(1, 1, 0, b);
        assert_relative_eq!(col[0], -b.sin() / 2f64.sqrt(), epsilon = 1e-13);
        let col = wigner_d_column(1, 1, 1, b);
        assert_relative_eq!(col[0], (1.0 + b.cos()) / 2.0, epsilon = 1e-13);
        let col = wigner_d_column(1, 1, -1, b);
        assert_relative_eq!(col[0], (1.0 - b.cos()) / 2.0, epsilon = 1e-13);
    }

    #[test]
    fn matches_analytic_d2_via_recursion() {
        let b = 1.1f64;
        // d^2_{1,1} = (1+cos b)/2 * (2 cos b - 1)
        let col = wigner_d_column(2, 1, 1, b);
        assert_relative_eq!(
            col[1],
            (1.0 + b.cos()) / 2.0 * (2.0 * b.cos() - 1.0),
            epsilon = 1e-12
        );
        // d^2_{2,-2} = sin^4(b/2)
        let col = wigner_d_column(2, 2, -2, b);
        assert_relative_eq!(col[0], (b / 2.0).sin().powi(4), epsilon = 1e-12);
    }

    #[test]
    fn orthogonality_under_gauss_legendre() {
        // integral d^l_{m,s} d^l'_{m,s} sin(b) db = 2/(2l+1) delta_{ll'}
        let (x, w) = crate::num::gauss_legendre(24);
        let m = 2;
        let s = -1;
        for l1 in 2..6u32 {
            for l2 in 2..6u32 {
                let mut acc = 0.0;
                for (xi, wi) in x.iter().zip(&w) {
                    let beta = xi.acos();
                    let c1 = wigner_d_column(l1, m, s, beta);
                    let c2 = wigner_d_column(l2, m, s, beta);
                    acc += wi * c1[(l1 as i32 - m.abs().max(s.abs())) as usize]
                        * c2[(l2 as i32 - m.abs().max(s.abs())) as usize];
                }
                let expect = if l1 == l2 { 2.0 / (2.0 * l1 as f64 + 1.0) } else { 0.0 };
                assert_relative_eq!(acc, expect, epsilon = 1e-12);
            }
        }
    }
}
