//! Classical Hessian of the generalized variance
//! `S(ρ) = Var_ρ(X) Var_ρ(Y) − Cov_ρ(X, Y)²` for a probability vector `ρ`
//! and two random variables `X`, `Y` taking values `x_i`, `y_i`.

use crate::error::{Error, Result};
use crate::RMatrix;

const PROBABILITY_TOL: f64 = 1e-12;

fn moments(p: &[f64], x: &[f64], y: &[f64]) -> (f64, f64, f64, f64, f64) {
    let dot = |u: &dyn Fn(usize) -> f64| (0..p.len()).map(|i| p[i] * u(i)).sum::<f64>();
    let ex = dot(&|i| x[i]);
    let ey = dot(&|i| y[i]);
    let var_x = dot(&|i| x[i] * x[i]) - ex * ex;
    let var_y = dot(&|i| y[i] * y[i]) - ey * ey;
    let cov = dot(&|i| x[i] * y[i]) - ex * ey;
    (ex, ey, var_x, var_y, cov)
}

/// `S(ρ)` with `ρ` read as an unconstrained weight vector.
pub fn generalized_variance(p: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let (_, _, vx, vy, c) = moments(p, x, y);
    vx * vy - c * c
}

/// Full Hessian `H_ij = ∂²S/∂ρ_i∂ρ_j`:
///
/// ```text
/// H_ij = −2 x_i x_j Var(Y) + (x_i² − 2x_i E X)(y_j² − 2y_j E Y)
///        −2 y_i y_j Var(X) + (y_i² − 2y_i E Y)(x_j² − 2x_j E X)
///        −2 C_i C_j + 2 Cov(X,Y)(x_i y_j + y_i x_j)
/// ```
///
/// with `C_i = x_i y_i − x_i E Y − y_i E X`.
pub fn hessian_generalized_variance(p: &[f64], x: &[f64], y: &[f64]) -> Result<RMatrix> {
    let n = p.len();
    if n == 0 || x.len() != n || y.len() != n {
        return Err(Error::InvalidParameter(format!(
            "probability vector and variables need equal positive lengths, got {}, {}, {}",
            n,
            x.len(),
            y.len()
        )));
    }
    if p.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter("probabilities must be strictly positive".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::InvalidParameter(format!("probabilities sum to {total}")));
    }
    let (ex, ey, vx, vy, cov) = moments(p, x, y);
    let dx: Vec<f64> = x.iter().map(|v| v * v - 2.0 * v * ex).collect();
    let dy: Vec<f64> = y.iter().map(|v| v * v - 2.0 * v * ey).collect();
    let c: Vec<f64> = (0..n).map(|i| x[i] * y[i] - x[i] * ey - y[i] * ex).collect();
    Ok(RMatrix::from_fn(n, n, |i, j| {
        -2.0 * x[i] * x[j] * vy + dx[i] * dy[j] - 2.0 * y[i] * y[j] * vx + dy[i] * dx[j] - 2.0 * c[i] * c[j]
            + 2.0 * cov * (x[i] * y[j] + y[i] * x[j])
    }))
}

/// `αᵀ H α`.
pub fn quadratic_form(h: &RMatrix, alpha: &[f64]) -> Result<f64> {
    if h.nrows() != alpha.len() || h.ncols() != alpha.len() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: alpha.len(),
        });
    }
    let mut acc = 0.0;
    for i in 0..alpha.len() {
        for j in 0..alpha.len() {
            acc += alpha[i] * h[(i, j)] * alpha[j];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const P: [f64; 3] = [1.0 / 3.0; 3];
    const X: [f64; 3] = [1.0, 0.0, -1.0];
    const Y: [f64; 3] = [1.0, -2.0, 1.0];

    #[test]
    fn indefinite_example() {
        let h = hessian_generalized_variance(&P, &X, &Y).unwrap();
        assert_abs_diff_eq!(quadratic_form(&h, &P).unwrap(), 8.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(quadratic_form(&h, &[0.0, 1.0, 0.0]).unwrap(), -16.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn radial_form() {
        // S(tρ) = t²(ab − c²) − t³(an² + bm² − 2cmn) with a = Σρx², b = Σρy²,
        // c = Σρxy, m = Σρx, n = Σρy, so ρᵀHρ is its second t-derivative at 1
        let p = [0.1, 0.2, 0.3, 0.4];
        let x = [0.3, -1.0, 2.0, 0.5];
        let y = [1.5, 0.0, -0.7, 2.0];
        let s = |f: &dyn Fn(usize) -> f64| (0..4).map(|i| p[i] * f(i)).sum::<f64>();
        let (a, b, c) = (s(&|i| x[i] * x[i]), s(&|i| y[i] * y[i]), s(&|i| x[i] * y[i]));
        let (m, n) = (s(&|i| x[i]), s(&|i| y[i]));
        let expected = 2.0 * (a * b - c * c) - 6.0 * (a * n * n + b * m * m - 2.0 * c * m * n);
        let h = hessian_generalized_variance(&p, &x, &y).unwrap();
        assert_abs_diff_eq!(quadratic_form(&h, &p).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn radial_form_with_centered_variables() {
        let h = hessian_generalized_variance(&P, &X, &Y).unwrap();
        let (_, _, vx, vy, cov) = moments(&P, &X, &Y);
        assert_eq!(cov, 0.0);
        assert_abs_diff_eq!(quadratic_form(&h, &P).unwrap(), 2.0 * vx * vy, epsilon = 1e-12);
    }

    #[test]
    fn zero_x_gives_zero_hessian() {
        let h = hessian_generalized_variance(&P, &[0.0; 3], &Y).unwrap();
        assert!(h.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn symmetric() {
        let p = [0.25, 0.5, 0.25];
        let h = hessian_generalized_variance(&p, &[2.0, -1.0, 0.3], &[0.1, 0.4, -2.0]).unwrap();
        assert_abs_diff_eq!(h.clone(), h.transpose(), epsilon = 1e-14);
    }

    #[test]
    fn invalid_probabilities() {
        assert!(hessian_generalized_variance(&[0.5, 0.6], &[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(hessian_generalized_variance(&[1.0, 0.0], &[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(hessian_generalized_variance(&[0.5, 0.5], &[1.0], &[1.0, 2.0]).is_err());
        assert!(quadratic_form(&RMatrix::zeros(2, 2), &[1.0]).is_err());
    }
}
