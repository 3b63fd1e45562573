use super::*;
use approx::assert_relative_eq;

#[test]
fn fornberg_reproduces_central_stencil() {
    let x = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let w = fd_weights(0.0, &x, 1);
    let expect = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
    for (a, b) in w.iter().zip(&expect) {
        assert_relative_eq!(a, b, epsilon = 1e-13);
    }
    let w2 = fd_weights(0.0, &x, 2);
    let expect2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
    for (a, b) in w2.iter().zip(&expect2) {
        assert_relative_eq!(a, b, epsilon = 1e-12);
    }
}

#[test]
fn fornberg_on_irregular_nodes() {
    let x = [0.0, 0.13, 0.31, 0.42, 0.78, 0.9];
    let f = |t: f64| (2.2 * t).sin();
    let fv: Vec<f64> = x.iter().map(|&t| f(t)).collect();
    let w = fd_weights(0.42, &x, 1);
    let d: f64 = w.iter().zip(&fv).map(|(w, f)| w * f).sum();
    assert_relative_eq!(d, 2.2 * (2.2f64 * 0.42).cos(), epsilon = 1e-3);
}
