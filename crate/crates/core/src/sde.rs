//! Partially observed 2D linear SDEs: closed-form propagators, exact
//! ARMA(2,1) discretization, small-interval expansions, first-order schemes,
//! and exact Gaussian simulation.
//!
//! The model is
//!
//! ```text
//! dy = A y dt + B dW,    y = (x, v),
//! A = [ -lambda  1    ]      B B' = [ sxx2  sxv2 ]
//!     [ -kappa  -eta  ]             [ sxv2  svv2 ]
//! ```
//!
//! with only the `x` coordinate observed at sampling interval `tau`. The
//! observed series satisfies an exact ARMA(2,1) update whose AR
//! coefficients come from entries of `exp(A tau)` and whose increment
//! covariance comes from the Ito isometry.

use nalgebra::{Matrix2, Matrix3, RowVector2, Vector2, Vector3};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::arma::{seeded_rng, ArmaModel, Scheme, TimeSeries};
use crate::decimation::{ma_from_covariance, Arma21Params};
use crate::error::{Error, Result};
use crate::quad::integrate_matrix;
use crate::rg::FixedPointSpec;

/// Eigenvalue-gap threshold below which the propagator switches to the
/// confluent (repeated-eigenvalue) formula.
pub const DEG_TOL: f64 = 1e-7;

/// Separation `|lambda_1 - lambda_2| * tau` below which the increment
/// covariance falls back to quadrature: the closed forms difference nearly
/// equal exponentials and lose roughly a digit per decade of separation.
const COV_SEPARATION: f64 = 0.1;

/// Absolute tolerance of the quadrature fallback / cross-check path.
const QUAD_TOL: f64 = 1e-13;

/// A 2D linear SDE with drift `A = [[-lambda, 1], [-kappa, -eta]]` and
/// diffusion `B B'` given by the three `s**2` entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSde2D {
    pub lambda: f64,
    pub kappa: f64,
    pub eta: f64,
    pub sxx2: f64,
    pub sxv2: f64,
    pub svv2: f64,
}

impl LinearSde2D {
    /// Validates the diffusion matrix (positive semidefinite) and builds
    /// the model.
    pub fn new(
        lambda: f64,
        kappa: f64,
        eta: f64,
        sxx2: f64,
        sxv2: f64,
        svv2: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("lambda", lambda),
            ("kappa", kappa),
            ("eta", eta),
            ("sxx2", sxx2),
            ("sxv2", sxv2),
            ("svv2", svv2),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        let scale = sxx2.abs().max(svv2.abs()).max(sxv2.abs()).max(1e-300);
        if sxx2 < 0.0 || svv2 < 0.0 || sxx2 * svv2 - sxv2 * sxv2 < -1e-12 * scale * scale {
            return Err(Error::InvalidParameter(
                "diffusion matrix must be positive semidefinite".into(),
            ));
        }
        Ok(Self {
            lambda,
            kappa,
            eta,
            sxx2,
            sxv2,
            svv2,
        })
    }

    /// Convenience constructor for the inertial oscillator
    /// `dx = v dt, dv = -eta v dt - kappa x dt + sigma dW`.
    pub fn inertial(eta: f64, kappa: f64, sigma2: f64) -> Result<Self> {
        Self::new(0.0, kappa, eta, 0.0, 0.0, sigma2)
    }

    pub fn drift_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(-self.lambda, 1.0, -self.kappa, -self.eta)
    }

    pub fn diffusion_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.sxx2, self.sxv2, self.sxv2, self.svv2)
    }

    /// Mean eigenvalue `m = tr(A)/2` and the squared half-gap
    /// `Delta = m^2 - det(A)`; the eigenvalues are `m +- sqrt(Delta)`.
    fn eigen_split(&self) -> (f64, f64) {
        let m = -(self.lambda + self.eta) / 2.0;
        let det = self.lambda * self.eta + self.kappa;
        (m, m * m - det)
    }

    /// True when both eigenvalues of the drift matrix have non-positive
    /// real part.
    pub fn is_stable(&self) -> bool {
        let (m, delta) = self.eigen_split();
        if delta <= 0.0 {
            m <= 1e-12
        } else {
            m + delta.sqrt() <= 1e-12
        }
    }

    /// True when both eigenvalue real parts are strictly negative.
    pub fn is_strictly_stable(&self) -> bool {
        let (m, delta) = self.eigen_split();
        if delta <= 0.0 {
            m < 0.0
        } else {
            m + delta.sqrt() < 0.0
        }
    }

    /// Propagator `exp(A t)` in closed form.
    ///
    /// With `N = A - m I` (which satisfies `N^2 = Delta I`),
    ///
    /// ```text
    /// exp(A t) = e^{m t} [ cosh(d t) I + sinh(d t)/d N ],   d = sqrt(Delta)
    /// ```
    ///
    /// using the trigonometric form for `Delta < 0` and the confluent limit
    /// `e^{m t} (I + t N)` (with second-order corrections) when the
    /// eigenvalue gap is below [`DEG_TOL`].
    pub fn mat_exp(&self, t: f64) -> Matrix2<f64> {
        let (m, delta) = self.eigen_split();
        let n = self.drift_matrix() - Matrix2::identity() * m;
        let gap = 2.0 * delta.abs().sqrt();
        let (c, s) = if gap < DEG_TOL {
            let d2 = delta * t * t;
            (1.0 + d2 / 2.0, t * (1.0 + d2 / 6.0))
        } else if delta > 0.0 {
            let d = delta.sqrt();
            ((d * t).cosh(), (d * t).sinh() / d)
        } else {
            let w = (-delta).sqrt();
            ((w * t).cos(), (w * t).sin() / w)
        };
        (m * t).exp() * (Matrix2::identity() * c + n * s)
    }

    /// Covariance of the exact one-step transition noise,
    /// `Sigma(tau) = int_0^tau exp(A s) B B' exp(A' s) ds`.
    ///
    /// Dispatches to the eigendecomposition closed form when the eigenvalue
    /// gap is resolvable at scale `tau`, and to adaptive quadrature
    /// otherwise.
    pub fn noise_covariance(&self, tau: f64) -> Matrix2<f64> {
        let (_, delta) = self.eigen_split();
        let gap_tau = 2.0 * delta.abs().sqrt() * tau;
        if gap_tau >= COV_SEPARATION {
            self.noise_covariance_closed(tau)
        } else {
            self.noise_covariance_quadrature(tau)
        }
    }

    /// Closed-form `Sigma(tau)`.
    ///
    /// Writing `exp(A s) = e^{m s} (c(s) I + g(s) N)`, the integrand expands
    /// into three scalar integrals:
    ///
    /// ```text
    /// Sigma = I0 BB' + I1 (N BB' + BB' N') + I2 N BB' N'
    /// I0 = int e^{2ms} c^2,  I1 = int e^{2ms} c g,  I2 = int e^{2ms} g^2
    /// ```
    fn noise_covariance_closed(&self, tau: f64) -> Matrix2<f64> {
        let (m, delta) = self.eigen_split();
        let n = self.drift_matrix() - Matrix2::identity() * m;
        let bbt = self.diffusion_matrix();
        let a = 2.0 * m;
        let (i0, i1, i2) = if delta > 0.0 {
            let d = delta.sqrt();
            let ep = exp_integral(a + 2.0 * d, tau);
            let e0 = exp_integral(a, tau);
            let em = exp_integral(a - 2.0 * d, tau);
            (
                (ep + 2.0 * e0 + em) / 4.0,
                (ep - em) / (4.0 * d),
                (ep - 2.0 * e0 + em) / (4.0 * delta),
            )
        } else {
            let w = (-delta).sqrt();
            let e0 = exp_integral(a, tau);
            let ca = exp_cos_integral(a, 2.0 * w, tau);
            let sa = exp_sin_integral(a, 2.0 * w, tau);
            (
                (e0 + ca) / 2.0,
                sa / (2.0 * w),
                (e0 - ca) / (2.0 * w * w),
            )
        };
        let cross = n * bbt + bbt * n.transpose();
        bbt * i0 + cross * i1 + n * bbt * n.transpose() * i2
    }

    /// Quadrature evaluation of `Sigma(tau)`; also serves as the reference
    /// path for validating the closed form.
    pub fn noise_covariance_quadrature(&self, tau: f64) -> Matrix2<f64> {
        let bbt = self.diffusion_matrix();
        let scale = bbt.abs().max().max(1.0) * tau.max(1.0);
        let f = |s: f64| {
            let e = self.mat_exp(s);
            e * bbt * e.transpose()
        };
        integrate_matrix(&f, 0.0, tau, QUAD_TOL * scale)
    }

    /// Exact ARMA(2,1) parameters of the observed `x` series at sampling
    /// interval `tau`:
    ///
    /// ```text
    /// psi   = (e^{2 A tau})_12 / (e^{A tau})_12
    /// theta = (e^{2 A tau})_11 - psi (e^{A tau})_11
    /// ```
    ///
    /// with the increment written as `r_n = (w_n)_1 + c . w_{n-1}`,
    /// `c = [(e^{A tau})_11 - psi, (e^{A tau})_12]`, so that
    /// `alpha = Sigma_11 + c Sigma c'` and `beta = (c Sigma)_1`.
    pub fn exact_arma_params(&self, tau: f64) -> Result<Arma21Params> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sampling interval tau must be > 0, got {tau}"
            )));
        }
        let f1 = self.mat_exp(tau);
        let f2 = self.mat_exp(2.0 * tau);
        let denom = f1[(0, 1)];
        if denom.abs() <= 1e-9 * tau * f1.norm().max(1e-300) {
            return Err(Error::DegenerateSampling(format!(
                "(exp(A tau))_12 = {denom:.3e} vanishes at tau = {tau}; \
                 the sampling interval sits on an oscillation node"
            )));
        }
        let psi = f2[(0, 1)] / denom;
        let theta = f2[(0, 0)] - psi * f1[(0, 0)];
        let sigma = self.noise_covariance(tau);
        let c = RowVector2::new(f1[(0, 0)] - psi, f1[(0, 1)]);
        let alpha = sigma[(0, 0)] + (c * sigma * c.transpose())[(0, 0)];
        let beta = (c * sigma)[(0, 0)];
        Ok(Arma21Params::new(psi, theta, alpha, beta))
    }

    /// Cubic small-`tau` expansion of the exact ARMA(2,1) parameters.
    pub fn small_tau_expansion(&self, tau: f64) -> Arma21Params {
        let (l, k, e) = (self.lambda, self.kappa, self.eta);
        let el = e + l;
        let noise3 = self.svv2 + 2.0 * e * self.sxv2
            + self.sxx2 * (-k + 3.0 * e * e + 3.0 * e * l + 2.0 * l * l);
        let color3 = self.svv2 + 2.0 * e * self.sxv2
            + self.sxx2 * (2.0 * k - 3.0 * e * e - 6.0 * e * l - 4.0 * l * l);
        let psi = 2.0 - el * tau + 0.5 * (-2.0 * k + e * e + l * l) * tau * tau
            + (3.0 * k * el - e * e * e - l * l * l) / 6.0 * tau.powi(3);
        let theta =
            -1.0 + el * tau - 0.5 * el * el * tau * tau + el * el * el / 6.0 * tau.powi(3);
        let alpha = 2.0 * self.sxx2 * tau - 2.0 * self.sxx2 * el * tau * tau
            + 2.0 / 3.0 * noise3 * tau.powi(3);
        let beta =
            -self.sxx2 * tau + self.sxx2 * el * tau * tau + color3 / 6.0 * tau.powi(3);
        Arma21Params::new(psi, theta, alpha, beta)
    }

    /// Fixed-point coordinates of the exact discretization:
    ///
    /// ```text
    /// u = -(lambda + eta)          s = -sxx2
    /// z = -kappa + (eta^2 + lambda^2)/2
    /// b = [svv2 + 2 eta sxv2 + sxx2 (2 kappa - 3 eta^2 - 6 eta lambda - 4 lambda^2)] / 6
    /// ```
    pub fn continuum_to_fixed_point(&self) -> FixedPointSpec {
        let (l, k, e) = (self.lambda, self.kappa, self.eta);
        FixedPointSpec::D {
            u: -(l + e),
            s: -self.sxx2,
            z: -k + (e * e + l * l) / 2.0,
            b: (self.svv2
                + 2.0 * e * self.sxv2
                + self.sxx2 * (2.0 * k - 3.0 * e * e - 6.0 * e * l - 4.0 * l * l))
                / 6.0,
        }
    }

    /// First-order (strong order 1/2) discretization of the observed series.
    ///
    /// Purely inertial models (`lambda = sxx2 = sxv2 = 0`) reduce to the
    /// AR(2) `phi = [2 - eta tau - kappa tau^2, -1 + eta tau]` with
    /// `mu = sqrt(svv2) tau^{3/2}`; position noise promotes the scheme to an
    /// ARMA(2,1) whose increment covariance starts at
    /// `alpha = 2 sxx2 tau`, `beta = -sxx2 tau`.
    pub fn euler_discretize(&self, tau: f64) -> Result<ArmaModel> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sampling interval tau must be > 0, got {tau}"
            )));
        }
        let (l, k, e) = (self.lambda, self.kappa, self.eta);
        if l == 0.0 && self.sxx2 == 0.0 && self.sxv2 == 0.0 {
            let phi = vec![2.0 - e * tau - k * tau * tau, -1.0 + e * tau];
            return ArmaModel::new(phi, vec![], (self.svv2 * tau.powi(3)).sqrt());
        }
        let el = e + l;
        let psi = 2.0 - el * tau - k * tau * tau;
        let theta = -1.0 + el * tau - e * l * tau * tau;
        let damp = 1.0 - e * tau;
        let alpha = tau * self.sxx2 * (1.0 + damp * damp) + tau.powi(3) * self.svv2
            - 2.0 * tau * tau * damp * self.sxv2;
        let beta = tau * (tau * self.sxv2 - damp * self.sxx2);
        let (mu, nu) = ma_from_covariance(&crate::arma::IncrementCovariance::new(vec![
            alpha, beta,
        ]))?;
        ArmaModel::new(vec![psi, theta], nu, mu)
    }

    /// Stationary state covariance (solves `A P + P A' + BB' = 0`), defined
    /// only for strictly stable drift.
    pub fn stationary_covariance(&self) -> Result<Matrix2<f64>> {
        if !self.is_strictly_stable() {
            return Err(Error::NonStationary(
                "drift matrix is not strictly stable".into(),
            ));
        }
        let (l, k, e) = (self.lambda, self.kappa, self.eta);
        // unknowns (p11, p12, p22)
        let a = Matrix3::new(
            -2.0 * l, 2.0, 0.0, //
            -k, -(l + e), 1.0, //
            0.0, -2.0 * k, -2.0 * e,
        );
        let rhs = Vector3::new(-self.sxx2, -self.sxv2, -self.svv2);
        let sol = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NonStationary("singular stationary system".into()))?;
        Ok(Matrix2::new(sol[0], sol[1], sol[1], sol[2]))
    }

    /// Simulates the exact Gaussian transition: `y <- exp(A tau) y + w`,
    /// `w ~ N(0, Sigma(tau))`, returning the `x` components.
    pub fn simulate_exact(
        &self,
        tau: f64,
        n: usize,
        seed: u64,
        x0: f64,
        v0: f64,
    ) -> Result<TimeSeries> {
        let mut rng = seeded_rng(seed);
        self.simulate_exact_with(tau, n, seed, x0, v0, &mut rng)
    }

    /// Same as [`LinearSde2D::simulate_exact`] but drawing from a caller
    /// supplied generator (used for replica substreams).
    pub fn simulate_exact_with(
        &self,
        tau: f64,
        n: usize,
        seed: u64,
        x0: f64,
        v0: f64,
        rng: &mut impl rand::Rng,
    ) -> Result<TimeSeries> {
        if n == 0 {
            return Err(Error::InvalidParameter("step count n must be > 0".into()));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sampling interval tau must be > 0, got {tau}"
            )));
        }
        let f = self.mat_exp(tau);
        let chol = cholesky_psd(&self.noise_covariance(tau));
        let normal = StandardNormal;
        let mut y = Vector2::new(x0, v0);
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            let xi = Vector2::new(normal.sample(rng), normal.sample(rng));
            y = f * y + chol * xi;
            values.push(y[0]);
        }
        Ok(TimeSeries {
            tau,
            values,
            seed,
            scheme: Scheme::Exact,
        })
    }
}

/// `int_0^T e^{a s} ds`, stable for small `|a T|`.
fn exp_integral(a: f64, t: f64) -> f64 {
    if a == 0.0 {
        t
    } else {
        (a * t).exp_m1() / a
    }
}

/// `int_0^T e^{a s} cos(b s) ds`.
fn exp_cos_integral(a: f64, b: f64, t: f64) -> f64 {
    let den = a * a + b * b;
    if den == 0.0 {
        return t;
    }
    ((a * t).exp() * (a * (b * t).cos() + b * (b * t).sin()) - a) / den
}

/// `int_0^T e^{a s} sin(b s) ds`.
fn exp_sin_integral(a: f64, b: f64, t: f64) -> f64 {
    let den = a * a + b * b;
    if den == 0.0 {
        return 0.0;
    }
    ((a * t).exp() * (a * (b * t).sin() - b * (b * t).cos()) + b) / den
}

/// Lower Cholesky factor of a (possibly singular) PSD 2x2 matrix.
fn cholesky_psd(sigma: &Matrix2<f64>) -> Matrix2<f64> {
    let a = sigma[(0, 0)].max(0.0);
    let b = sigma[(1, 0)];
    let c = sigma[(1, 1)].max(0.0);
    if a <= 1e-300 * c.max(1.0) {
        return Matrix2::new(0.0, 0.0, 0.0, c.sqrt());
    }
    let l11 = a.sqrt();
    let l21 = b / l11;
    let l22 = (c - l21 * l21).max(0.0).sqrt();
    Matrix2::new(l11, 0.0, l21, l22)
}
