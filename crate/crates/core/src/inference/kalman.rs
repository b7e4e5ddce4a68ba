//! Prediction-error (Kalman) Gaussian log-likelihood of an ARMA(2,1) model.
//!
//! State space: `s_t = (X_t, theta X_{t-1} + nu e_t)` with
//!
//! ```text
//! s_{t+1} = T s_t + R e_{t+1},  T = [psi 1; theta 0],  R = (mu, nu)
//! X_t = s_t[0]
//! ```
//!
//! Stationary AR parts use the exact stationary state covariance; unit-root
//! or explosive AR parts fall back to conditioning on the first two
//! observations, which leaves the estimator unchanged asymptotically.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

#[allow(clippy::excessive_precision)]
const LN_2PI: f64 = 1.837877066409345483560659472811;

/// Gaussian log-likelihood of the (demeaned) series under the ARMA(2,1)
/// model with AR part `(psi, theta)` and MA pair `(mu, nu)`.
///
/// Returns `None` when the filter degenerates (non-positive prediction
/// variance).
pub(crate) fn arma21_loglik(psi: f64, theta: f64, mu: f64, nu: f64, xs: &[f64]) -> Option<f64> {
    if xs.len() < 3 || !mu.is_finite() || mu <= 0.0 {
        return None;
    }
    let t = Matrix2::new(psi, 1.0, theta, 0.0);
    let r = Vector2::new(mu, nu);
    let rrt = r * r.transpose();

    // Schur-Cohn conditions for z^2 - psi z - theta with a small margin.
    let margin = 1e-6;
    let stationary =
        theta.abs() < 1.0 - margin && 1.0 - psi - theta > margin && 1.0 + psi - theta > margin;

    let (mut a, mut p, start) = if stationary {
        let p0 = stationary_state_covariance(psi, theta, mu, nu)?;
        (Vector2::zeros(), p0, 0)
    } else {
        // Condition on (X_0, X_1): only the unobserved nu e_1 part of the
        // second state component is uncertain.
        let a0 = Vector2::new(xs[1], theta * xs[0]);
        let p0 = Matrix2::new(0.0, 0.0, 0.0, nu * nu + 1e-12 * mu * mu);
        (a0, p0, 2)
    };

    let mut loglik = 0.0;
    for &x in &xs[start..] {
        let a_pred = t * a;
        let p_pred = t * p * t.transpose() + rrt;
        let f = p_pred[(0, 0)];
        if !(f > 1e-300) || !f.is_finite() {
            return None;
        }
        let v = x - a_pred[0];
        loglik -= 0.5 * (LN_2PI + f.ln() + v * v / f);
        let gain = p_pred.column(0) / f;
        a = a_pred + gain * v;
        p = p_pred - gain * p_pred.row(0);
    }
    loglik.is_finite().then_some(loglik)
}

/// Stationary covariance of the state, solving `P = T P T' + R R'` in the
/// three symmetric unknowns.
fn stationary_state_covariance(psi: f64, theta: f64, mu: f64, nu: f64) -> Option<Matrix2<f64>> {
    let a = Matrix3::new(
        1.0 - psi * psi,
        -2.0 * psi,
        -1.0,
        -theta * psi,
        1.0 - theta,
        0.0,
        -theta * theta,
        0.0,
        1.0,
    );
    let rhs = Vector3::new(mu * mu, mu * nu, nu * nu);
    let sol = a.lu().solve(&rhs)?;
    let p = Matrix2::new(sol[0], sol[1], sol[1], sol[2]);
    (p[(0, 0)].is_finite() && p[(0, 0)] > 0.0).then_some(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn white_noise_loglik_is_gaussian() {
        let xs = [0.3, -1.2, 0.7, 0.1, -0.4];
        let mu = 1.5;
        let got = arma21_loglik(0.0, 0.0, mu, 0.0, &xs).unwrap();
        let want: f64 = xs
            .iter()
            .map(|x| -0.5 * (LN_2PI + (mu * mu).ln() + x * x / (mu * mu)))
            .sum();
        assert_abs_diff_eq!(got, want, epsilon = 1e-10);
    }

    #[test]
    fn ar1_loglik_matches_direct_factorization() {
        // X_t = c X_{t-1} + mu e_t: exact density is N(0, m0) for X_0 and
        // N(c X_{t-1}, mu^2) transitions.
        let (c, mu) = (0.6, 0.9);
        let xs = [0.5, 0.2, -0.3, 0.8, 0.0, -0.6];
        let got = arma21_loglik(c, 0.0, mu, 0.0, &xs).unwrap();
        let m0 = mu * mu / (1.0 - c * c);
        let mut want = -0.5 * (LN_2PI + m0.ln() + xs[0] * xs[0] / m0);
        for w in xs.windows(2) {
            let v = w[1] - c * w[0];
            want += -0.5 * (LN_2PI + (mu * mu).ln() + v * v / (mu * mu));
        }
        assert_abs_diff_eq!(got, want, epsilon = 1e-10);
    }

    #[test]
    fn unit_root_path_is_finite() {
        let xs: Vec<f64> = (0..50).map(|i| (i as f64 * 0.1).sin() + i as f64).collect();
        let ll = arma21_loglik(1.9, -0.9, 0.5, 0.1, &xs);
        assert!(ll.is_some());
    }
}
