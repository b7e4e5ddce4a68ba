//! Coarse-graining of ARMA processes by trimming every other time point.
//!
//! Decimation applies the linear combination
//! `Eqn(X_n) + sum_i (-1)^{i+1} phi_i Eqn(X_{n-i})` to the update equations,
//! which cancels the odd-lag states and leaves an ARMA(p, floor((p+q)/2))
//! model on the doubled time step. The specialized ARMA(2,1) map
//! [`decimate_arma21`] is the workhorse of the RG flow; [`decimate_general`]
//! implements the operator for arbitrary orders.
//!
//! Only the 1-in-2 trimming ratio is implemented. Other ratios define
//! different coarse-graining maps with different invariant families (the
//! three-branched oscillatory class, for one, is specific to halving).

use serde::{Deserialize, Serialize};

use crate::arma::{ArmaModel, IncrementCovariance};
use crate::error::{Error, Result};
use crate::linalg::poly_mul;

/// Convergence tolerance of the innovations factorization.
pub const FACTOR_TOL: f64 = 1e-12;

/// Iteration cap of the innovations factorization.
pub const FACTOR_MAX_ITER: usize = 10_000;

/// ARMA(2,1) parameters in increment-covariance form: AR coefficients
/// `psi` (lag 1) and `theta` (lag 2), increment variance `alpha` and lag-1
/// increment covariance `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arma21Params {
    pub psi: f64,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Arma21Params {
    pub fn new(psi: f64, theta: f64, alpha: f64, beta: f64) -> Self {
        Self {
            psi,
            theta,
            alpha,
            beta,
        }
    }

    /// Positive semidefiniteness of the tridiagonal noise covariance:
    /// `alpha >= 2 |beta|` (up to a small relative slack).
    pub fn is_psd(&self) -> bool {
        let scale = self.alpha.abs().max(self.beta.abs());
        self.alpha >= 2.0 * self.beta.abs() - 1e-12 * scale.max(1e-300)
    }

    pub fn increment_covariance(&self) -> IncrementCovariance {
        IncrementCovariance::new(vec![self.alpha, self.beta])
    }

    /// Materializes the generative ARMA(2,1) model, factoring the noise
    /// covariance into MA coefficients.
    pub fn to_model(&self) -> Result<ArmaModel> {
        let (mu, nu) = ma_from_covariance(&self.increment_covariance())?;
        ArmaModel::new(vec![self.psi, self.theta], nu, mu)
    }
}

/// One decimation step of an ARMA(2,1) model:
///
/// ```text
/// psi'   = psi^2 + 2 theta
/// theta' = -theta^2
/// alpha' = (1 + psi^2 + theta^2) alpha + 2 psi (1 - theta) beta
/// beta'  = psi (1 - theta) beta - theta alpha
/// ```
///
/// ```
/// use rgarma::{decimate_arma21, Arma21Params};
///
/// let coarse = decimate_arma21(&Arma21Params::new(2.0, -1.0, 1.0, 0.0)).unwrap();
/// assert_eq!((coarse.psi, coarse.theta), (2.0, -1.0));
/// assert_eq!((coarse.alpha, coarse.beta), (6.0, 1.0));
/// ```
pub fn decimate_arma21(params: &Arma21Params) -> Result<Arma21Params> {
    if !params.is_psd() {
        return Err(Error::InvalidCovariance(format!(
            "alpha = {} < 2 |beta| = {}",
            params.alpha,
            2.0 * params.beta.abs()
        )));
    }
    let Arma21Params {
        psi,
        theta,
        alpha,
        beta,
    } = *params;
    Ok(Arma21Params {
        psi: psi * psi + 2.0 * theta,
        theta: -theta * theta,
        alpha: (1.0 + psi * psi + theta * theta) * alpha + 2.0 * psi * (1.0 - theta) * beta,
        beta: psi * (1.0 - theta) * beta - theta * alpha,
    })
}

/// MA order of the decimated process: `floor((p + q) / 2)`.
pub fn q_rule(p: usize, q: usize) -> usize {
    (p + q) / 2
}

/// Recovers MA coefficients `(mu, nu_1..nu_q)` reproducing a given increment
/// covariance, choosing the invertible (minimum-phase) factor.
///
/// For `q <= 1` the factorization is the closed-form root of
/// `mu^4 - alpha mu^2 + beta^2 = 0` with `|nu| <= |mu|`; for larger `q` the
/// innovations algorithm is iterated to convergence.
pub fn ma_from_covariance(cov: &IncrementCovariance) -> Result<(f64, Vec<f64>)> {
    if !cov.is_psd() {
        return Err(Error::InvalidCovariance(format!(
            "increment covariance {:?} is not positive semidefinite",
            cov.gamma
        )));
    }
    let q = cov.q();
    let gamma0 = cov.alpha();
    if gamma0 == 0.0 {
        return Ok((0.0, vec![0.0; q]));
    }
    match q {
        0 => Ok((gamma0.sqrt(), vec![])),
        1 => {
            let beta = cov.beta();
            let disc = (gamma0 * gamma0 - 4.0 * beta * beta).max(0.0);
            let mu2 = 0.5 * (gamma0 + disc.sqrt());
            let mu = mu2.sqrt();
            Ok((mu, vec![beta / mu]))
        }
        _ => innovations_factorization(&cov.gamma),
    }
}

/// Innovations-algorithm factorization of an MA(q) covariance sequence.
///
/// The one-step prediction coefficients of the process with autocovariance
/// `gamma(|i-j|)` converge to the ratios `nu_m / mu` of the invertible
/// factor, and the prediction variance converges to `mu^2`.
fn innovations_factorization(gamma: &[f64]) -> Result<(f64, Vec<f64>)> {
    let q = gamma.len() - 1;
    let cov = |d: usize| -> f64 {
        if d <= q {
            gamma[d]
        } else {
            0.0
        }
    };
    let scale = gamma[0];
    let mut v: Vec<f64> = vec![gamma[0]];
    // rows[n][m] = theta_{n,m} for m = 1..=q (banded; other entries vanish)
    let mut rows: Vec<Vec<f64>> = vec![vec![0.0; q + 1]];
    for n in 1..=FACTOR_MAX_ITER {
        let mut row = vec![0.0; q + 1];
        let k_lo = n.saturating_sub(q);
        for k in k_lo..n {
            let mut acc = cov(n - k);
            let j_lo = k.saturating_sub(q).max(k_lo);
            for j in j_lo..k {
                acc -= rows[k][k - j] * row[n - j] * v[j];
            }
            if v[k] <= 0.0 {
                return Err(Error::FactorizationFailed(
                    "non-positive prediction variance".into(),
                ));
            }
            row[n - k] = acc / v[k];
        }
        let mut vn = cov(0);
        for j in k_lo..n {
            vn -= row[n - j] * row[n - j] * v[j];
        }
        if !vn.is_finite() || vn <= 0.0 {
            return Err(Error::FactorizationFailed(format!(
                "prediction variance became {vn} at iteration {n}"
            )));
        }
        let converged = n > q
            && (vn - v[n - 1]).abs() <= FACTOR_TOL * scale
            && (1..=q).all(|m| (row[m] - rows[n - 1][m]).abs() <= FACTOR_TOL);
        v.push(vn);
        rows.push(row);
        if converged {
            let mu = vn.sqrt();
            let nu = (1..=q).map(|m| rows[n][m] * mu).collect();
            return Ok((mu, nu));
        }
    }
    Err(Error::FactorizationFailed(format!(
        "no convergence within {FACTOR_MAX_ITER} iterations"
    )))
}

/// Coarse AR coefficients from the polynomial expansion of the decimating
/// combination.
///
/// With `Phi(L) = 1 - sum_i phi_i L^i`, the combination multiplies the model
/// by `Phi(-L)`; the product `Phi(-L) Phi(L)` is even in `L` and its
/// coefficient of `L^{2m}` gives `-phi~_m`. The characteristic roots square
/// in the process.
pub(crate) fn coarse_ar_poly(phi: &[f64]) -> Vec<f64> {
    let p = phi.len();
    let mut a = vec![1.0];
    a.extend(phi.iter().map(|c| -c));
    let a_alt: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 0 { *c } else { -*c })
        .collect();
    let prod = poly_mul(&a, &a_alt);
    debug_assert!(prod
        .iter()
        .skip(1)
        .step_by(2)
        .all(|c| c.abs() < 1e-12 * (1.0 + prod[0].abs())));
    (1..=p).map(|m| -prod[2 * m]).collect()
}

/// Coarse AR coefficients written term by term:
///
/// ```text
/// phi~_m = 2 phi_{2m} + (-1)^{m+1} phi_m^2
///          + 2 sum_{i=1}^{m-1} (-1)^{i+1} phi_i phi_{2m-i}
/// ```
///
/// with out-of-range coefficients read as zero. Kept as an independent route
/// for cross-validation against [`coarse_ar_poly`]; the cross-product sum
/// must run over all pairs `i + j = 2m`, not only the `phi_{2m-1}` column.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn coarse_ar_termwise(phi: &[f64]) -> Vec<f64> {
    let p = phi.len();
    let at = |i: usize| -> f64 {
        if (1..=p).contains(&i) {
            phi[i - 1]
        } else {
            0.0
        }
    };
    (1..=p)
        .map(|m| {
            let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
            let cross: f64 = (1..m)
                .map(|i| {
                    let s = if i % 2 == 0 { -1.0 } else { 1.0 };
                    s * at(i) * at(2 * m - i)
                })
                .sum();
            2.0 * at(2 * m) + sign * at(m) * at(m) + 2.0 * cross
        })
        .collect()
}

/// Increment covariance of the decimated process, `gamma~_0..gamma~_{k_max}`.
///
/// The combined increment is `r~_n = sum_{i=0}^p c_i r_{n-i}` with `c_0 = 1`,
/// `c_i = (-1)^{i+1} phi_i`, sampled on even steps:
/// `gamma~_k = sum_{i,j} c_i c_j gamma(|2k + j - i|)`.
pub(crate) fn coarse_increment_covariance(model: &ArmaModel, k_max: usize) -> Vec<f64> {
    let gamma = model.increment_covariance().gamma;
    let g = |d: i64| -> f64 {
        let d = d.unsigned_abs() as usize;
        if d < gamma.len() {
            gamma[d]
        } else {
            0.0
        }
    };
    let mut c = vec![1.0];
    c.extend(
        model
            .phi()
            .iter()
            .enumerate()
            .map(|(i, &f)| if i % 2 == 0 { f } else { -f }),
    );
    (0..=k_max)
        .map(|k| {
            let mut acc = 0.0;
            for (i, &ci) in c.iter().enumerate() {
                for (j, &cj) in c.iter().enumerate() {
                    acc += ci * cj * g(2 * k as i64 + j as i64 - i as i64);
                }
            }
            acc
        })
        .collect()
}

/// Decimates an arbitrary ARMA(p,q) model to the ARMA(p, floor((p+q)/2))
/// model of the even sub-series on the doubled time step.
///
/// For `p = 0` the even innovations pass through directly. Stationary inputs
/// keep `gamma~(k) = gamma(2k)` for the process autocovariance.
pub fn decimate_general(model: &ArmaModel) -> Result<ArmaModel> {
    let p = model.p();
    let q = model.q();
    let q_new = q_rule(p, q);
    if p == 0 {
        let gamma = model.increment_covariance().gamma;
        let sub: Vec<f64> = (0..=q_new).map(|k| gamma[2 * k]).collect();
        let (mu, nu) = ma_from_covariance(&IncrementCovariance::new(sub))?;
        return ArmaModel::new(vec![], nu, mu);
    }
    let phi_new = coarse_ar_poly(model.phi());
    let gamma_new = coarse_increment_covariance(model, q_new);
    let (mu, nu) = ma_from_covariance(&IncrementCovariance::new(gamma_new))?;
    ArmaModel::new(phi_new, nu, mu)
}
