//! Coarse-graining of Gaussian time-series models and its consequences for
//! simulation and inference.
//!
//! The crate connects discrete ARMA(p,q) models to continuous-time linear
//! SDEs through decimation: trimming every other time point of an ARMA
//! process yields another ARMA process on a doubled step, and iterating
//! this map (with a dimensional rescaling of the Taylor coefficients of the
//! parameters) flows every model toward a small family of fixed points.
//! Exact discretizations of partially observed 2D linear SDEs sit at those
//! fixed points; the first-order (Euler) scheme does not, and the flow
//! quantifies exactly what maximum-likelihood inference under the Euler
//! likelihood gets wrong - most visibly a 2/3 rescaling of the damping
//! coefficient.
//!
//! Module map:
//! - [`arma`]: ARMA models, seeded simulation, exact autocovariances;
//! - [`decimation`]: the coarse-graining operator and noise factorization;
//! - [`rg`]: the flow on Taylor-coefficient space, fixed points,
//!   classification;
//! - [`sde`]: exact and first-order discretizations of 2D linear SDEs;
//! - [`inference`]: estimators and the discretization-bias experiments;
//! - [`par`]: data-parallel dispatch for ensembles and sweeps.
//!
//! The one-screen version of the story:
//!
//! ```
//! use rgarma::{euler_initial_condition, flow, LinearSde2D};
//!
//! // first-order coefficients of the damped oscillator, noise at order 3
//! let ic = euler_initial_condition(1.0, 0.5, 1.0, 3).unwrap();
//! let orbit = flow(&ic, 25).orbit;
//! let end = orbit.last().unwrap();
//! // the flow repairs the noise pair to (2/3, 1/6) sigma^2 ...
//! assert!((end.alpha[3] - 2.0 / 3.0).abs() < 1e-9);
//! assert!((end.beta[3] - 1.0 / 6.0).abs() < 1e-9);
//!
//! // ... which is where the exact discretization already sits
//! let sde = LinearSde2D::inertial(1.0, 0.5, 1.0).unwrap();
//! let tau = 1e-3;
//! let exact = sde.exact_arma_params(tau).unwrap();
//! assert!((exact.alpha / tau.powi(3) - 2.0 / 3.0).abs() < 5e-3);
//! ```

// Validations use `!(x > 0.0)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arma;
pub mod decimation;
pub mod error;
pub mod inference;
mod linalg;
pub mod par;
mod quad;
pub mod rg;
pub mod sde;

pub use arma::{ArmaModel, IncrementCovariance, Scheme, TimeSeries};
pub use decimation::{decimate_arma21, decimate_general, ma_from_covariance, q_rule, Arma21Params};
pub use error::{Error, Result};
pub use inference::{
    arma21_mle, effective_ar2, euler_mle, quartic_experiment, reconstructed_velocity_stats,
    sample_autocovariance, Arma21Fit, EstimateReport, QuarticConfig, VelocityStats,
};
pub use rg::{
    classify, euler_initial_condition, flow, inertial_flow_closed_form, make_fixed_point, rg_step,
    ClassifyOutcome, FixedPointSpec, FlowResult, TaylorParams, Verdict,
};
pub use sde::LinearSde2D;
