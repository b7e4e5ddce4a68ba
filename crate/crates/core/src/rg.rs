//! The coarse-graining map on truncated Taylor-coefficient space, its fixed
//! points, and orbit classification.
//!
//! Model parameters are expanded as power series in the sampling interval,
//! `psi(tau) = sum_k psi_k tau^k` and likewise for `theta`, `alpha`, `beta`.
//! One step of the map decimates (see [`crate::decimation`]) and then
//! rescales each order-`k` coefficient by `2^{-k}`:
//!
//! ```text
//! psi_k   <- 2^{-k} [ 2 theta_k + (psi * psi)_k ]
//! theta_k <- -2^{-k} (theta * theta)_k
//! alpha_k <- 2^{-k} [ (1 + psi^2 + theta^2) * alpha + 2 psi (1 - theta) * beta ]_k
//! beta_k  <- 2^{-k} [ psi (1 - theta) * beta - theta * alpha ]_k
//! ```
//!
//! where `*` is the truncated Cauchy product. The recursion at order `k`
//! only involves orders `<= k`, so truncation at any `K` is closed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::series_mul;

/// Coefficient magnitude beyond which an orbit is declared divergent.
pub const OVERFLOW_GUARD: f64 = 1e12;

/// Template residual threshold used by [`classify`].
pub const TEMPLATE_RESIDUAL: f64 = 1e-6;

/// Truncated Taylor coefficients of the four ARMA(2,1) parameter functions.
///
/// All four lists have length `order + 1`; entry `k` carries time dimension
/// `-k` relative to the dimensionless parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorParams {
    pub psi: Vec<f64>,
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl TaylorParams {
    /// All-zero parameters truncated at `order`.
    pub fn zeros(order: usize) -> Self {
        Self {
            psi: vec![0.0; order + 1],
            theta: vec![0.0; order + 1],
            alpha: vec![0.0; order + 1],
            beta: vec![0.0; order + 1],
        }
    }

    /// Builds from the four coefficient lists, which must share one length.
    pub fn new(psi: Vec<f64>, theta: Vec<f64>, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let n = psi.len();
        if n == 0 || theta.len() != n || alpha.len() != n || beta.len() != n {
            return Err(Error::InvalidParameter(
                "coefficient lists must share one non-zero length".into(),
            ));
        }
        Ok(Self {
            psi,
            theta,
            alpha,
            beta,
        })
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.psi.len() - 1
    }

    /// Largest coefficient magnitude across the four lists.
    pub fn max_abs(&self) -> f64 {
        self.iter_all().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Sup-distance to another parameter point of the same order.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.iter_all()
            .zip(other.iter_all())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    fn iter_all(&self) -> impl Iterator<Item = f64> + '_ {
        self.psi
            .iter()
            .chain(&self.theta)
            .chain(&self.alpha)
            .chain(&self.beta)
            .copied()
    }
}

/// One RG step: order-by-order decimation recursions followed by the
/// `2^{-k}` rescaling.
pub fn rg_step(tp: &TaylorParams) -> TaylorParams {
    let k_max = tp.order();
    let psi2 = series_mul(&tp.psi, &tp.psi, k_max);
    let theta2 = series_mul(&tp.theta, &tp.theta, k_max);

    let mut psi_new: Vec<f64> = (0..=k_max).map(|k| 2.0 * tp.theta[k] + psi2[k]).collect();
    let mut theta_new: Vec<f64> = theta2.iter().map(|x| -x).collect();

    // 1 + psi^2 + theta^2
    let mut weight = vec![0.0; k_max + 1];
    weight[0] = 1.0;
    for k in 0..=k_max {
        weight[k] += psi2[k] + theta2[k];
    }
    // psi (1 - theta)
    let mut one_minus_theta: Vec<f64> = tp.theta.iter().map(|x| -x).collect();
    one_minus_theta[0] += 1.0;
    let psi_omt = series_mul(&tp.psi, &one_minus_theta, k_max);

    let wa = series_mul(&weight, &tp.alpha, k_max);
    let pb = series_mul(&psi_omt, &tp.beta, k_max);
    let ta = series_mul(&tp.theta, &tp.alpha, k_max);

    let mut alpha_new: Vec<f64> = (0..=k_max).map(|k| wa[k] + 2.0 * pb[k]).collect();
    let mut beta_new: Vec<f64> = (0..=k_max).map(|k| pb[k] - ta[k]).collect();

    let mut scale = 1.0;
    for k in 0..=k_max {
        psi_new[k] *= scale;
        theta_new[k] *= scale;
        alpha_new[k] *= scale;
        beta_new[k] *= scale;
        scale *= 0.5;
    }
    TaylorParams {
        psi: psi_new,
        theta: theta_new,
        alpha: alpha_new,
        beta: beta_new,
    }
}

/// An RG orbit, possibly truncated by the overflow guard.
#[derive(Debug, Clone, Serialize)]
pub struct FlowResult {
    pub orbit: Vec<TaylorParams>,
    pub diverged: bool,
}

/// Iterates [`rg_step`] from `tp`, returning the orbit `[tp, step(tp), ...]`.
///
/// The orbit is cut short (and flagged) as soon as any coefficient magnitude
/// exceeds [`OVERFLOW_GUARD`]; divergence is a legitimate outcome, not an
/// error.
pub fn flow(tp: &TaylorParams, iterations: usize) -> FlowResult {
    let mut orbit = Vec::with_capacity(iterations + 1);
    orbit.push(tp.clone());
    let mut diverged = false;
    for _ in 0..iterations {
        let cur = orbit.last().expect("orbit is non-empty");
        if !(cur.max_abs() <= OVERFLOW_GUARD) {
            diverged = true;
            break;
        }
        orbit.push(rg_step(cur));
    }
    if let Some(last) = orbit.last() {
        if !(last.max_abs() <= OVERFLOW_GUARD) {
            diverged = true;
        }
    }
    FlowResult { orbit, diverged }
}

/// Closed-form solution of the order-3 noise recursion for purely inertial
/// initial data (`alpha`, `beta` vanishing below order 3).
///
/// The step matrix `[[3/4, 1], [1/8, 1/2]]` has eigenpairs
/// `1 -> (4, 1)` (the fixed line `alpha_3 = 4 beta_3`) and
/// `1/4 -> (2, -1)`, so
///
/// ```text
/// alpha_3^l = 4^{-l} (alpha_3^0 - 4 beta_3^0) / 3 + 2 (alpha_3^0 + 2 beta_3^0) / 3
/// beta_3^l  = -4^{-l} (alpha_3^0 - 4 beta_3^0) / 6 + (alpha_3^0 + 2 beta_3^0) / 6
/// ```
///
/// Orbits run along the lines `alpha_3 + 2 beta_3 = const`, with the
/// transient shrinking by a factor 4 per step.
pub fn inertial_flow_closed_form(alpha3_0: f64, beta3_0: f64, l: u32) -> (f64, f64) {
    let decay = if l >= 1600 { 0.0 } else { 0.25_f64.powi(l as i32) };
    let transient = alpha3_0 - 4.0 * beta3_0;
    let conserved = alpha3_0 + 2.0 * beta3_0;
    (
        decay * transient / 3.0 + 2.0 / 3.0 * conserved,
        -decay * transient / 6.0 + conserved / 6.0,
    )
}

/// A point on one of the four fixed-point manifolds.
///
/// `u` is the linear-drift parameter, `s` the order-1 noise parameter,
/// `z` the order-2 AR parameter and `b` the order-3 noise parameter; the
/// latter two exist only for class D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum FixedPointSpec {
    A { s: f64 },
    B { u: f64, s: f64 },
    C { u: f64, s: f64 },
    D { u: f64, s: f64, z: f64, b: f64 },
}

impl FixedPointSpec {
    pub fn class(&self) -> char {
        match self {
            FixedPointSpec::A { .. } => 'A',
            FixedPointSpec::B { .. } => 'B',
            FixedPointSpec::C { .. } => 'C',
            FixedPointSpec::D { .. } => 'D',
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Materializes a fixed-point template as Taylor coefficients through
/// order `K`.
///
/// Classes A and B extend to any order through their closed forms
/// (`psi(tau) = e^{u tau}`, `alpha(tau) = s (e^{2u tau} - 1) / 2u` for B);
/// the noise coefficients of classes C and D are tabulated only through
/// order 3, so larger `K` is an error rather than an extrapolation.
pub fn make_fixed_point(spec: &FixedPointSpec, order: usize) -> Result<TaylorParams> {
    let mut tp = TaylorParams::zeros(order);
    match *spec {
        FixedPointSpec::A { s } => {
            tp.alpha[0] = s;
        }
        FixedPointSpec::B { u, s } => {
            for k in 0..=order {
                tp.psi[k] = u.powi(k as i32) / factorial(k);
                if k >= 1 {
                    tp.alpha[k] = s * (2.0 * u).powi(k as i32 - 1) / factorial(k);
                }
            }
        }
        FixedPointSpec::C { u, s } => {
            if order > 3 {
                return Err(Error::UnsupportedOrder {
                    class: 'C',
                    requested: order,
                });
            }
            let psi = [-1.0, u, -u * u / 2.0, u * u * u / 6.0];
            let theta = [
                -1.0,
                2.0 * u,
                -2.0 * u * u,
                8.0 * u * u * u / 6.0,
            ];
            let alpha = [0.0, 4.0 * s, -8.0 * u * s, 32.0 * u * u * s / 3.0];
            let beta = [0.0, s, -2.0 * u * s, 13.0 * u * u * s / 6.0];
            tp.psi.copy_from_slice(&psi[..=order]);
            tp.theta.copy_from_slice(&theta[..=order]);
            tp.alpha.copy_from_slice(&alpha[..=order]);
            tp.beta.copy_from_slice(&beta[..=order]);
        }
        FixedPointSpec::D { u, s, z, b } => {
            if order > 3 {
                return Err(Error::UnsupportedOrder {
                    class: 'D',
                    requested: order,
                });
            }
            let psi = [2.0, u, z, u * (6.0 * z - u * u) / 12.0];
            let theta = [-1.0, -u, -u * u / 2.0, -u * u * u / 6.0];
            let alpha = [
                0.0,
                -2.0 * s,
                -2.0 * u * s,
                4.0 * b - (2.0 * z + 3.0 * u * u) * s,
            ];
            let beta = [0.0, s, u * s, b];
            tp.psi.copy_from_slice(&psi[..=order]);
            tp.theta.copy_from_slice(&theta[..=order]);
            tp.alpha.copy_from_slice(&alpha[..=order]);
            tp.beta.copy_from_slice(&beta[..=order]);
        }
    }
    Ok(tp)
}

/// Taylor coefficients of the first-order scheme for the damped linear
/// second-order equation: `psi = 2 - eta tau - kappa tau^2`,
/// `theta = -1 + eta tau`, noise entering at order 3 with weight `sigma2`.
pub fn euler_initial_condition(
    eta: f64,
    kappa: f64,
    sigma2: f64,
    order: usize,
) -> Result<TaylorParams> {
    if order < 3 {
        return Err(Error::InvalidParameter(format!(
            "truncation order must be >= 3 to hold the noise coefficient, got {order}"
        )));
    }
    let mut tp = TaylorParams::zeros(order);
    tp.psi[0] = 2.0;
    tp.psi[1] = -eta;
    tp.psi[2] = -kappa;
    tp.theta[0] = -1.0;
    tp.theta[1] = eta;
    tp.alpha[3] = sigma2;
    Ok(tp)
}

/// True for order-0 AR pairs strictly inside the stability triangle
/// `|theta_0| < 1`, `|psi_0| < 1 - theta_0` (the attraction basin of the
/// trivial fixed point).
pub fn inside_stability_triangle(psi0: f64, theta0: f64) -> bool {
    theta0.abs() < 1.0 && psi0.abs() < 1.0 - theta0
}

/// Outcome label of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    A,
    B,
    C,
    D,
    #[serde(rename = "divergent")]
    Divergent,
    #[serde(rename = "unresolved")]
    Unresolved,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::A => "A",
            Verdict::B => "B",
            Verdict::C => "C",
            Verdict::D => "D",
            Verdict::Divergent => "divergent",
            Verdict::Unresolved => "unresolved",
        };
        f.write_str(s)
    }
}

/// Result of [`classify`]: the verdict, fitted template parameters when a
/// template matched, the normalized template residual, and the number of
/// RG iterations consumed.
#[derive(Debug, Clone, Serialize)]
pub struct ClassifyOutcome {
    pub verdict: Verdict,
    pub fitted: Option<FixedPointSpec>,
    pub residual: f64,
    pub iterations: usize,
}

/// Flows `tp` to stabilization and matches the limit against the
/// fixed-point templates.
///
/// Convergence means the normalized sup-distance between successive orbit
/// points stays below `tol` for three consecutive steps. Template
/// parameters are read off designated coefficients (`u` from `psi_1`, `s`
/// from `alpha_1` with the class sign pattern, `z` from `psi_2`, `b` from
/// `beta_3`); a candidate is accepted when the normalized sup-residual is
/// below [`TEMPLATE_RESIDUAL`] and the fitted noise parameters keep the
/// increment covariance positive semidefinite. `Unresolved` is a valid
/// verdict for boundary orbits.
pub fn classify(tp: &TaylorParams, tol: f64) -> ClassifyOutcome {
    const MAX_ITER: usize = 2000;
    let mut cur = tp.clone();
    let mut consecutive = 0;
    let mut iterations = 0;
    let mut stabilized = false;
    for l in 0..MAX_ITER {
        if !(cur.max_abs() <= OVERFLOW_GUARD) {
            return ClassifyOutcome {
                verdict: Verdict::Divergent,
                fitted: None,
                residual: f64::INFINITY,
                iterations: l,
            };
        }
        let next = rg_step(&cur);
        let d = next.sup_distance(&cur) / cur.max_abs().max(1.0);
        cur = next;
        iterations = l + 1;
        if d < tol {
            consecutive += 1;
            if consecutive >= 3 {
                stabilized = true;
                break;
            }
        } else {
            consecutive = 0;
        }
    }
    if !stabilized {
        return ClassifyOutcome {
            verdict: Verdict::Unresolved,
            fitted: None,
            residual: f64::INFINITY,
            iterations,
        };
    }
    best_template(&cur, iterations)
}

fn best_template(cur: &TaylorParams, iterations: usize) -> ClassifyOutcome {
    let order = cur.order();
    let get = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
    let u = get(&cur.psi, 1);
    let z = get(&cur.psi, 2);
    let b = get(&cur.beta, 3);
    let a1 = get(&cur.alpha, 1);
    let candidates = [
        FixedPointSpec::A { s: cur.alpha[0] },
        FixedPointSpec::B { u, s: a1 },
        FixedPointSpec::C { u, s: a1 / 4.0 },
        FixedPointSpec::D {
            u,
            s: -a1 / 2.0,
            z,
            b,
        },
    ];
    let scale = cur.max_abs().max(1.0);
    let mut best: Option<(FixedPointSpec, f64)> = None;
    for cand in candidates {
        // C/D templates are tabulated through order 3 only.
        let template_order = match cand {
            FixedPointSpec::C { .. } | FixedPointSpec::D { .. } => order.min(3),
            _ => order,
        };
        let Ok(template) = make_fixed_point(&cand, template_order) else {
            continue;
        };
        let mut truncated = cur.clone();
        truncated.psi.truncate(template_order + 1);
        truncated.theta.truncate(template_order + 1);
        truncated.alpha.truncate(template_order + 1);
        truncated.beta.truncate(template_order + 1);
        let residual = truncated.sup_distance(&template) / scale;
        let psd_slack = 1e-9 * scale;
        let psd_ok = match cand {
            FixedPointSpec::A { s } | FixedPointSpec::B { u: _, s } => s >= -psd_slack,
            FixedPointSpec::C { s, .. } => s >= -psd_slack,
            FixedPointSpec::D { s, .. } => s <= psd_slack,
        };
        if !psd_ok {
            continue;
        }
        if best.as_ref().is_none_or(|(_, r)| residual < *r) {
            best = Some((cand, residual));
        }
    }
    match best {
        Some((spec, residual)) if residual < TEMPLATE_RESIDUAL => ClassifyOutcome {
            verdict: match spec.class() {
                'A' => Verdict::A,
                'B' => Verdict::B,
                'C' => Verdict::C,
                _ => Verdict::D,
            },
            fitted: Some(spec),
            residual,
            iterations,
        },
        Some((_, residual)) => ClassifyOutcome {
            verdict: Verdict::Unresolved,
            fitted: None,
            residual,
            iterations,
        },
        None => ClassifyOutcome {
            verdict: Verdict::Unresolved,
            fitted: None,
            residual: f64::INFINITY,
            iterations,
        },
    }
}
