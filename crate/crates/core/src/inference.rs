//! Estimators and bias experiments for partially observed second-order
//! dynamics: first-order (finite-difference) maximum likelihood, the exact
//! ARMA(2,1) likelihood, reconstructed-velocity statistics, the effective
//! memoryless model built from the Einstein relation, and the nonlinear
//! quartic-potential check.

mod kalman;
mod simplex;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::arma::{replica_rng, ArmaModel, TimeSeries};
use crate::decimation::Arma21Params;
use crate::error::{Error, Result};
use crate::sde::LinearSde2D;

/// Which likelihood produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LikelihoodScheme {
    Euler,
    Arma21,
    Effective,
}

/// Point estimates with standard errors for the damped-oscillator family.
///
/// `kappa_hat` / `lambda_hat` are present only when the corresponding
/// regressors were included; `force_params_diagnostic_only` marks reports
/// whose force-term estimates are known to be inconsistent and are carried
/// for diagnostics, and `conjecture_check` marks runs that probe the
/// damping-rescaling conjecture on a nonlinear process rather than a proven
/// statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub scheme: LikelihoodScheme,
    pub n_used: usize,
    pub tau: f64,
    pub eta_hat: f64,
    pub eta_se: f64,
    pub kappa_hat: Option<f64>,
    pub kappa_se: Option<f64>,
    pub lambda_hat: Option<f64>,
    pub lambda_se: Option<f64>,
    pub sigma2_hat: f64,
    pub sigma2_se: f64,
    pub temperature_hat: f64,
    pub temperature_se: f64,
    #[serde(default)]
    pub force_params_diagnostic_only: bool,
    #[serde(default)]
    pub conjecture_check: bool,
}

/// Lag-0 / lag-1 moments of the reconstructed velocities
/// `V_n = (X_{n+1} - X_n) / tau` with jackknife standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityStats {
    pub v2: f64,
    pub v1v2: f64,
    pub n_used: usize,
    pub stderr2: f64,
    pub stderr12: f64,
}

/// Exact-likelihood ARMA(2,1) fit with observed-information standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arma21Fit {
    pub params: Arma21Params,
    pub se_psi: f64,
    pub se_theta: f64,
    pub se_alpha: f64,
    pub se_beta: f64,
    pub log_likelihood: f64,
    pub iterations: usize,
}

/// Biased-normalization (1/N) sample autocovariance of the mean-removed
/// series at lags `0..=max_lag`.
pub fn sample_autocovariance(series: &TimeSeries, max_lag: usize) -> Result<Vec<f64>> {
    let xs = &series.values;
    let n = xs.len();
    if n <= max_lag {
        return Err(Error::InvalidParameter(format!(
            "series length {n} must exceed max_lag {max_lag}"
        )));
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    Ok((0..=max_lag)
        .map(|k| {
            xs.iter()
                .zip(&xs[k..])
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum::<f64>()
                / n as f64
        })
        .collect())
}

/// Jackknife standard error (over `blocks` contiguous blocks) of the mean
/// of `items`.
fn jackknife_se(items: &[f64], blocks: usize) -> f64 {
    let n = items.len();
    let b = blocks.min(n).max(2);
    let total: f64 = items.iter().sum();
    let mut leave_out = Vec::with_capacity(b);
    let mut start = 0;
    for i in 0..b {
        let end = (n * (i + 1)) / b;
        let block_sum: f64 = items[start..end].iter().sum();
        let block_len = end - start;
        leave_out.push((total - block_sum) / (n - block_len) as f64);
        start = end;
    }
    let mean = leave_out.iter().sum::<f64>() / b as f64;
    let var = leave_out.iter().map(|x| (x - mean).powi(2)).sum::<f64>() * (b - 1) as f64
        / b as f64;
    var.sqrt()
}

/// Number of jackknife blocks used for moment statistics.
const JACKKNIFE_BLOCKS: usize = 20;

/// Computes the reconstructed-velocity series and its lag-0 / lag-1
/// moments.
pub fn reconstructed_velocity_stats(series: &TimeSeries) -> Result<VelocityStats> {
    let xs = &series.values;
    if xs.len() < 3 {
        return Err(Error::InvalidParameter(
            "need at least 3 observations to form velocity moments".into(),
        ));
    }
    let tau = series.tau;
    let v: Vec<f64> = xs.windows(2).map(|w| (w[1] - w[0]) / tau).collect();
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let cross: Vec<f64> = v.windows(2).map(|w| w[0] * w[1]).collect();
    let v2 = sq.iter().sum::<f64>() / sq.len() as f64;
    let v1v2 = cross.iter().sum::<f64>() / cross.len() as f64;
    Ok(VelocityStats {
        v2,
        v1v2,
        n_used: v.len(),
        stderr2: jackknife_se(&sq, JACKKNIFE_BLOCKS),
        stderr12: jackknife_se(&cross, JACKKNIFE_BLOCKS),
    })
}

/// Design of the finite-difference regression used by [`euler_mle`]: the
/// discrete acceleration `(X_{n+1} - 2 X_n + X_{n-1}) / tau^2` is regressed
/// on the reconstructed velocity and, optionally, position and cubed
/// position.
fn euler_regression(
    series: &TimeSeries,
    with_kappa: bool,
    with_cubic: bool,
    scheme: LikelihoodScheme,
) -> Result<EstimateReport> {
    let xs = &series.values;
    if xs.len() < 10 {
        return Err(Error::InvalidParameter(format!(
            "series length {} < 10",
            xs.len()
        )));
    }
    let tau = series.tau;
    let dim = 1 + usize::from(with_kappa) + usize::from(with_cubic);
    let mut xtx = [[0.0_f64; 3]; 3];
    let mut xty = [0.0_f64; 3];
    let mut yty = 0.0_f64;
    let mut n_used = 0usize;
    for w in xs.windows(3) {
        let y = (w[2] - 2.0 * w[1] + w[0]) / (tau * tau);
        let vbar = (w[1] - w[0]) / tau;
        let mut reg = [vbar, 0.0, 0.0];
        let mut idx = 1;
        if with_kappa {
            reg[idx] = w[0];
            idx += 1;
        }
        if with_cubic {
            reg[idx] = w[0] * w[0] * w[0];
        }
        for i in 0..dim {
            for j in 0..dim {
                xtx[i][j] += reg[i] * reg[j];
            }
            xty[i] += reg[i] * y;
        }
        yty += y * y;
        n_used += 1;
    }
    let xtx_m = nalgebra::DMatrix::from_fn(dim, dim, |i, j| xtx[i][j]);
    let xty_v = nalgebra::DMatrix::from_fn(dim, 1, |i, _| xty[i]);
    let lu = xtx_m.clone().lu();
    let coef = lu.solve(&xty_v).ok_or_else(|| Error::EstimationFailed {
        reason: "singular regression design".into(),
        best: None,
    })?;
    let mut rss = yty;
    for i in 0..dim {
        rss -= coef[(i, 0)] * xty[i];
    }
    rss = rss.max(0.0);
    let resid_var = rss / n_used as f64;
    if !(resid_var > 0.0) {
        return Err(Error::EstimationFailed {
            reason: "singular likelihood: zero residual variance".into(),
            best: None,
        });
    }
    let cov = lu
        .try_inverse()
        .ok_or_else(|| Error::EstimationFailed {
            reason: "singular regression design".into(),
            best: None,
        })?
        * resid_var;

    let eta_hat = -coef[(0, 0)];
    let eta_se = cov[(0, 0)].max(0.0).sqrt();
    let mut idx = 1;
    let (kappa_hat, kappa_se) = if with_kappa {
        let r = (Some(-coef[(idx, 0)]), Some(cov[(idx, idx)].max(0.0).sqrt()));
        idx += 1;
        r
    } else {
        (None, None)
    };
    let (lambda_hat, lambda_se) = if with_cubic {
        (Some(-coef[(idx, 0)]), Some(cov[(idx, idx)].max(0.0).sqrt()))
    } else {
        (None, None)
    };

    // Residual variance estimates sigma^2 / tau.
    let sigma2_hat = resid_var * tau;
    let sigma2_se = sigma2_hat * (2.0 / n_used as f64).sqrt();
    let temperature_hat = sigma2_hat / (2.0 * eta_hat);
    let temperature_se = if eta_hat != 0.0 {
        ((sigma2_se / (2.0 * eta_hat)).powi(2)
            + (sigma2_hat * eta_se / (2.0 * eta_hat * eta_hat)).powi(2))
        .sqrt()
    } else {
        f64::INFINITY
    };
    Ok(EstimateReport {
        scheme,
        n_used,
        tau,
        eta_hat,
        eta_se,
        kappa_hat,
        kappa_se,
        lambda_hat,
        lambda_se,
        sigma2_hat,
        sigma2_se,
        temperature_hat,
        temperature_se,
        force_params_diagnostic_only: false,
        conjecture_check: false,
    })
}

/// Closed-form Gaussian MLE of `(eta, kappa, sigma^2)` under the
/// first-order finite-difference likelihood; `temperature_hat` is
/// `sigma2_hat / (2 eta_hat)`.
pub fn euler_mle(series: &TimeSeries, with_kappa: bool) -> Result<EstimateReport> {
    euler_regression(series, with_kappa, false, LikelihoodScheme::Euler)
}

/// Exact Gaussian likelihood fit of an ARMA(2,1) model via prediction-error
/// decomposition, maximized by a simplex search over
/// `(psi, theta, ln alpha, atanh(2 beta / alpha))`.
pub fn arma21_mle(series: &TimeSeries) -> Result<Arma21Fit> {
    const MAX_ITER: usize = 2000;
    const LL_TOL: f64 = 1e-10;
    let xs = &series.values;
    if xs.len() < 50 {
        return Err(Error::InvalidParameter(format!(
            "series length {} < 50",
            xs.len()
        )));
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let xs: Vec<f64> = xs.iter().map(|x| x - mean).collect();

    let start = initial_guess(&xs)?;
    let objective = |p: &[f64]| -> f64 {
        let (psi, theta, alpha, beta) = decode(p);
        if psi.abs() > 10.0 || theta.abs() > 10.0 || !alpha.is_finite() {
            return 1e120;
        }
        let (mu, nu) = factor_pair(alpha, beta);
        match kalman::arma21_loglik(psi, theta, mu, nu, &xs) {
            Some(ll) => -ll,
            None => 1e120,
        }
    };
    let steps = [0.05, 0.05, 0.3, 0.3];
    let result = simplex::nelder_mead(objective, &start, &steps, LL_TOL, MAX_ITER);
    let (psi, theta, alpha, beta) = decode(&result.x);
    let params = Arma21Params::new(psi, theta, alpha, beta);
    let loglik = -result.value;
    if !loglik.is_finite() {
        return Err(Error::EstimationFailed {
            reason: "likelihood is degenerate at the optimum".into(),
            best: None,
        });
    }
    let se = observed_information_se(&params, &xs);
    let fit = Arma21Fit {
        params,
        se_psi: se[0],
        se_theta: se[1],
        se_alpha: se[2],
        se_beta: se[3],
        log_likelihood: loglik,
        iterations: result.iterations,
    };
    if !result.converged {
        return Err(Error::EstimationFailed {
            reason: format!("no convergence within {MAX_ITER} simplex iterations"),
            best: Some(Box::new(fit)),
        });
    }
    Ok(fit)
}

/// Transformed coordinates keep the noise constraint `alpha >= 2 |beta|`
/// interior: `p = (psi, theta, ln alpha, atanh(2 beta / alpha))`.
fn decode(p: &[f64]) -> (f64, f64, f64, f64) {
    let alpha = p[2].exp();
    let beta = 0.5 * alpha * p[3].tanh();
    (p[0], p[1], alpha, beta)
}

fn factor_pair(alpha: f64, beta: f64) -> (f64, f64) {
    let disc = (alpha * alpha - 4.0 * beta * beta).max(0.0);
    let mu2 = 0.5 * (alpha + disc.sqrt());
    let mu = mu2.sqrt();
    (mu, if mu > 0.0 { beta / mu } else { 0.0 })
}

fn initial_guess(xs: &[f64]) -> Result<Vec<f64>> {
    let n = xs.len();
    let acov = |k: usize| -> f64 {
        xs.iter().zip(&xs[k..]).map(|(a, b)| a * b).sum::<f64>() / n as f64
    };
    let (g0, g1, g2) = (acov(0), acov(1), acov(2));
    if !(g0 > 0.0) {
        return Err(Error::EstimationFailed {
            reason: "singular likelihood: constant series".into(),
            best: None,
        });
    }
    let det = g0 * g0 - g1 * g1;
    let (psi0, theta0) = if det.abs() > 1e-12 * g0 * g0 {
        (
            (g1 * g0 - g1 * g2) / det,
            (g2 * g0 - g1 * g1) / det,
        )
    } else {
        (0.5, 0.0)
    };
    let psi0 = psi0.clamp(-2.5, 2.5);
    let theta0 = theta0.clamp(-1.5, 1.5);
    // moment residuals of the AR part seed the noise scale
    let mut resid2 = 0.0;
    let mut resid_cross = 0.0;
    let mut prev = 0.0;
    let mut count = 0.0;
    for w in xs.windows(3) {
        let e = w[2] - psi0 * w[1] - theta0 * w[0];
        resid2 += e * e;
        resid_cross += e * prev;
        prev = e;
        count += 1.0;
    }
    let alpha0 = (resid2 / count).max(1e-12 * g0);
    if !(alpha0 > 0.0) {
        return Err(Error::EstimationFailed {
            reason: "singular likelihood: zero innovation variance".into(),
            best: None,
        });
    }
    let beta0 = (resid_cross / count).clamp(-0.45 * alpha0, 0.45 * alpha0);
    Ok(vec![
        psi0,
        theta0,
        alpha0.ln(),
        (2.0 * beta0 / alpha0).atanh(),
    ])
}

/// Standard errors from the observed information (numerical Hessian of the
/// negative log-likelihood).
///
/// The Hessian is measured in the rotated AR basis `(psi + theta,
/// psi - theta, alpha, beta)`: near a unit root the curvature along
/// `psi + theta` dwarfs the one along `psi - theta` by many orders of
/// magnitude, and axis-aligned differences would lose the soft direction to
/// finite-difference noise. Step sizes shrink until the likelihood change
/// stays in the quadratic regime (the explosive side of the AR constraint
/// grows much faster).
fn observed_information_se(params: &Arma21Params, xs: &[f64]) -> [f64; 4] {
    let x0 = [params.psi, params.theta, params.alpha, params.beta];
    // rotated coordinates u: psi = psi0 + u0 + u1, theta = theta0 + u0 - u1
    let nll_rot = |u: &[f64; 4]| -> Option<f64> {
        let psi = x0[0] + u[0] + u[1];
        let theta = x0[1] + u[0] - u[1];
        let alpha = x0[2] + u[2];
        let beta = x0[3] + u[3];
        if alpha <= 0.0 || 2.0 * beta.abs() >= alpha {
            return None;
        }
        let (mu, nu) = factor_pair(alpha, beta);
        kalman::arma21_loglik(psi, theta, mu, nu, xs).map(|ll| -ll)
    };
    let origin = [0.0; 4];
    let base = match nll_rot(&origin) {
        Some(v) => v,
        None => return [f64::NAN; 4],
    };
    let scale = [
        1e-3 * x0[0].abs().max(1e-3),
        1e-3 * x0[0].abs().max(1e-3),
        1e-3 * x0[2].abs().max(1e-12),
        1e-3 * x0[2].abs().max(1e-12),
    ];
    let mut h = [0.0_f64; 4];
    for i in 0..4 {
        let mut step = scale[i];
        for _ in 0..60 {
            let probe = |sign: f64| -> f64 {
                let mut u = origin;
                u[i] = sign * step;
                nll_rot(&u).map_or(f64::INFINITY, |v| (v - base).abs())
            };
            if probe(1.0).max(probe(-1.0)) <= 20.0 {
                break;
            }
            step *= 0.5;
        }
        h[i] = step;
    }
    let eval = |di: i32, i: usize, dj: i32, j: usize| -> Option<f64> {
        let mut u = origin;
        u[i] += di as f64 * h[i];
        u[j] += dj as f64 * h[j];
        nll_rot(&u)
    };
    let mut hess = nalgebra::Matrix4::zeros();
    for i in 0..4 {
        let (Some(fp), Some(fm)) = (eval(1, i, 0, i), eval(-1, i, 0, i)) else {
            return [f64::NAN; 4];
        };
        hess[(i, i)] = (fp - 2.0 * base + fm) / (h[i] * h[i]);
        for j in 0..i {
            let (Some(pp), Some(pm), Some(mp), Some(mm)) = (
                eval(1, i, 1, j),
                eval(1, i, -1, j),
                eval(-1, i, 1, j),
                eval(-1, i, -1, j),
            ) else {
                return [f64::NAN; 4];
            };
            let v = (pp - pm - mp + mm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    let Some(cov_rot) = hess.try_inverse() else {
        return [f64::NAN; 4];
    };
    // back to natural coordinates: (psi, theta, alpha, beta) = J u
    let j = nalgebra::Matrix4::new(
        1.0, 1.0, 0.0, 0.0, //
        1.0, -1.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    );
    let cov = j * cov_rot * j.transpose();
    [
        cov[(0, 0)].max(0.0).sqrt(),
        cov[(1, 1)].max(0.0).sqrt(),
        cov[(2, 2)].max(0.0).sqrt(),
        cov[(3, 3)].max(0.0).sqrt(),
    ]
}

/// Effective memoryless AR(2) for equilibrium data at temperature `T`:
/// the damping enters rescaled by 2/3 and the noise follows from the
/// (exact) Einstein relation,
///
/// ```text
/// a = (2/3) eta tau,
/// phi = [2 - a, -(1 - a)],
/// mu^2 = tau^2 T [1 - (1 - a)^2]   (~ (4/3) T eta tau^3 as tau -> 0)
/// ```
pub fn effective_ar2(eta: f64, temperature: f64, tau: f64) -> Result<ArmaModel> {
    if !(eta > 0.0) || !(temperature > 0.0) {
        return Err(Error::InvalidParameter(
            "effective model needs eta > 0 and temperature > 0".into(),
        ));
    }
    let a = 2.0 / 3.0 * eta * tau;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "effective damping (2/3) eta tau = {a} must lie in (0, 1)"
        )));
    }
    let mu2 = tau * tau * temperature * (1.0 - (1.0 - a) * (1.0 - a));
    ArmaModel::new(vec![2.0 - a, -(1.0 - a)], vec![], mu2.sqrt())
}

/// Analytic lag-0 moment and lag-1/lag-0 ratio of the reconstructed
/// velocities implied by [`effective_ar2`], computed through the induced
/// AR(1) velocity model and its exact stationary autocovariance.
pub fn effective_velocity_moments(eta: f64, temperature: f64, tau: f64) -> Result<(f64, f64)> {
    let model = effective_ar2(eta, temperature, tau)?;
    // phi = [2 - a, -(1 - a)] has the unit root factored out: the velocity
    // series V = (1 - L) X / tau is AR(1) with coefficient 1 - a.
    let a = 2.0 - model.phi()[0];
    let v_model = ArmaModel::new(vec![1.0 - a], vec![], model.mu() / tau)?;
    let g = v_model.autocovariance(1)?;
    Ok((g[0], g[1] / g[0]))
}

/// Configuration of the nonlinear conjecture check
/// `dx = v dt; dv = -eta v dt - kappa x dt - lambda4 x^3 dt + sigma dW`
/// with `sigma^2 = 2 T eta`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuarticConfig {
    pub eta: f64,
    pub kappa: f64,
    pub lambda4: f64,
    pub temperature: f64,
    pub tau_sim: f64,
    pub subsample: usize,
    pub n: usize,
}

impl QuarticConfig {
    /// Largest fine step accepted by the stability budget
    /// `tau_sim <= 1e-3 min(1/eta, 1/sqrt(kappa_eff))`.
    pub fn tau_sim_bound(&self) -> f64 {
        let x_scale2 = if self.lambda4 > 0.0 && self.kappa < 0.0 {
            self.temperature.max(-self.kappa / self.lambda4)
        } else {
            self.temperature
        };
        let kappa_eff = self.kappa.abs() + 3.0 * self.lambda4.abs() * x_scale2;
        1e-3 * (1.0 / self.eta).min(1.0 / kappa_eff.sqrt().max(1e-12))
    }
}

/// Simulates the quartic-potential process with a fine-step first-order
/// scheme, subsamples to the observation scale, and fits the
/// finite-difference likelihood with the cubic-force regressor included.
///
/// The returned force-term estimates are flagged diagnostic-only and the
/// report is labelled a conjecture check.
pub fn quartic_experiment(cfg: &QuarticConfig, seed: u64) -> Result<EstimateReport> {
    let series = quartic_series(cfg, seed)?;
    let mut report = euler_regression(&series, true, true, LikelihoodScheme::Euler)?;
    report.force_params_diagnostic_only = true;
    report.conjecture_check = true;
    Ok(report)
}

/// Fine-step simulation and subsampling for [`quartic_experiment`].
pub fn quartic_series(cfg: &QuarticConfig, seed: u64) -> Result<TimeSeries> {
    if !(cfg.temperature > 0.0) {
        return Err(Error::InvalidParameter(
            "temperature must be > 0 (the zero-noise likelihood is singular)".into(),
        ));
    }
    if !(cfg.eta > 0.0) {
        return Err(Error::InvalidParameter("eta must be > 0".into()));
    }
    if cfg.subsample == 0 {
        return Err(Error::InvalidParameter("subsample must be >= 1".into()));
    }
    if cfg.n < 10 {
        return Err(Error::InvalidParameter("need at least 10 observations".into()));
    }
    let bound = cfg.tau_sim_bound();
    if !(cfg.tau_sim > 0.0) || cfg.tau_sim > bound {
        return Err(Error::InvalidParameter(format!(
            "tau_sim = {} violates the stability budget {bound:.3e}",
            cfg.tau_sim
        )));
    }
    let sigma = (2.0 * cfg.temperature * cfg.eta).sqrt();
    let sqrt_tau = cfg.tau_sim.sqrt();
    let mut rng = replica_rng(seed, 0);
    let normal = StandardNormal;
    let relax = (1.0 / cfg.eta).max(cfg.tau_sim * 100.0);
    let burn_fine = ((20.0 * relax / cfg.tau_sim).ceil() as usize).min(2_000_000);
    let (mut x, mut v) = (0.0_f64, 0.0_f64);
    let mut values = Vec::with_capacity(cfg.n);
    let total = burn_fine + cfg.n * cfg.subsample;
    for step in 0..total {
        let xi: f64 = normal.sample(&mut rng);
        let force = -cfg.eta * v - cfg.kappa * x - cfg.lambda4 * x * x * x;
        let x_next = x + v * cfg.tau_sim;
        let v_next = v + force * cfg.tau_sim + sigma * sqrt_tau * xi;
        x = x_next;
        v = v_next;
        if step >= burn_fine && (step - burn_fine + 1).is_multiple_of(cfg.subsample) {
            values.push(x);
        }
    }
    values.truncate(cfg.n);
    TimeSeries::new(
        cfg.tau_sim * cfg.subsample as f64,
        values,
        seed,
        crate::arma::Scheme::Euler,
    )
}

/// Exactly simulated integrated Ornstein-Uhlenbeck data
/// (`sigma^2 = 2 T eta`) fitted per replica with the finite-difference
/// likelihood (no position regressor).
pub fn integrated_ou_bias(
    eta: f64,
    temperature: f64,
    tau: f64,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    let sde = LinearSde2D::inertial(eta, 0.0, 2.0 * temperature * eta)?;
    let reports = crate::par::try_map_indexed(replicas, |i| {
        let mut rng = replica_rng(seed, i as u64);
        let series = sde.simulate_exact_with(tau, n, seed, 0.0, 0.0, &mut rng)?;
        euler_mle(&series, false)
    })?;
    Ok(reports)
}

/// Mean and standard error of the mean.
pub fn mean_sem(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::INFINITY);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
