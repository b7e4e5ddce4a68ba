//! ARMA(p,q) generative models: construction, stationarity, seeded
//! simulation, and exact stationary autocovariances.
//!
//! The update equation is
//!
//! ```text
//! X_n = phi_1 X_{n-1} + ... + phi_p X_{n-p}
//!       + mu e_n + nu_1 e_{n-1} + ... + nu_q e_{n-q},     e_n ~ N(0,1) i.i.d.
//! ```
//!
//! The random increment `r_n = mu e_n + sum_i nu_i e_{n-i}` is the object
//! that carries the noise structure; its autocovariance `gamma_0..gamma_q`
//! is held by [`IncrementCovariance`].

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{discrete_lyapunov, max_root_modulus};

/// Roots closer than this to the unit circle are treated as non-stationary.
pub const RHO_TOL: f64 = 1e-12;

/// Burn-in cap applied by [`ArmaModel::default_burn_in`].
pub const BURN_IN_CAP: usize = 1_000_000;

/// An ARMA(p,q) model with AR coefficients `phi`, MA coefficients `nu`
/// and innovation amplitude `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaModel {
    phi: Vec<f64>,
    nu: Vec<f64>,
    mu: f64,
}

impl ArmaModel {
    /// Validates and builds a model. `mu` must be non-negative and all
    /// coefficients finite.
    pub fn new(phi: Vec<f64>, nu: Vec<f64>, mu: f64) -> Result<Self> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "innovation amplitude mu must be finite and >= 0, got {mu}"
            )));
        }
        if phi.iter().chain(nu.iter()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "model coefficients must be finite".into(),
            ));
        }
        Ok(Self { phi, nu, mu })
    }

    /// AR order `p`.
    pub fn p(&self) -> usize {
        self.phi.len()
    }

    /// MA order `q`.
    pub fn q(&self) -> usize {
        self.nu.len()
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Largest modulus among the AR characteristic roots.
    pub fn max_root_modulus(&self) -> f64 {
        max_root_modulus(&self.phi)
    }

    /// True iff every AR characteristic root has modulus below `1 - RHO_TOL`.
    ///
    /// Unit-root models (integrated processes) are classified non-stationary,
    /// which keeps the stationary-covariance solve away from singularity.
    pub fn is_stationary(&self) -> bool {
        self.p() == 0 || self.max_root_modulus() < 1.0 - RHO_TOL
    }

    /// Default burn-in: ten times the slowest AR timescale, capped.
    ///
    /// Returns 0 for non-stationary models, which are simulated from a zero
    /// initial state instead.
    pub fn default_burn_in(&self) -> usize {
        if !self.is_stationary() {
            return 0;
        }
        let rho = self.max_root_modulus();
        if rho == 0.0 {
            return 0;
        }
        let timescale = (1.0 / (1.0 - rho)).ceil() as usize;
        (10 * timescale).min(BURN_IN_CAP)
    }

    /// Autocovariance `gamma_0..gamma_q` of the random increment, with the
    /// convention `nu_0 = mu`:
    ///
    /// ```text
    /// gamma_k = sum_{i=0}^{q-k} nu_i nu_{i+k}
    /// ```
    pub fn increment_covariance(&self) -> IncrementCovariance {
        let q = self.q();
        let mut coef = Vec::with_capacity(q + 1);
        coef.push(self.mu);
        coef.extend_from_slice(&self.nu);
        let gamma = (0..=q)
            .map(|k| (0..=q - k).map(|i| coef[i] * coef[i + k]).sum())
            .collect();
        IncrementCovariance { gamma }
    }

    /// Exact stationary autocovariance `gamma(0..=max_lag)` of the process.
    ///
    /// Solves the stationary state covariance of the companion-form
    /// state-space representation (a discrete Lyapunov equation), then
    /// propagates lags through the transition matrix; for lags beyond `q`
    /// this reduces to the AR recursion.
    pub fn autocovariance(&self, max_lag: usize) -> Result<Vec<f64>> {
        if !self.is_stationary() {
            return Err(Error::NonStationary(format!(
                "max AR root modulus {:.6} >= 1",
                self.max_root_modulus()
            )));
        }
        let (t, r) = self.state_space();
        let rrt = &r * r.transpose();
        let p = discrete_lyapunov(&t, &rrt).ok_or_else(|| {
            Error::NonStationary("singular stationary covariance system".into())
        })?;
        let mut out = Vec::with_capacity(max_lag + 1);
        // gamma(k) = (T^k P)[0,0]; iterate v <- T v from v = P e_1.
        let mut v = p.column(0).clone_owned();
        out.push(v[0]);
        for _ in 1..=max_lag {
            v = &t * v;
            out.push(v[0]);
        }
        Ok(out)
    }

    /// Companion-form state space `s_{t+1} = T s_t + R e_{t+1}`, `X_t = s_t[0]`,
    /// with state dimension `max(p, q+1)`.
    pub(crate) fn state_space(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let m = self.p().max(self.q() + 1).max(1);
        let mut t = DMatrix::zeros(m, m);
        for (i, &c) in self.phi.iter().enumerate() {
            t[(i, 0)] = c;
        }
        for i in 0..m - 1 {
            t[(i, i + 1)] = 1.0;
        }
        let mut r = DMatrix::zeros(m, 1);
        r[(0, 0)] = self.mu;
        for (j, &c) in self.nu.iter().enumerate() {
            r[(j + 1, 0)] = c;
        }
        (t, r)
    }

    /// Simulates `n` steps of the update equation with standard-normal
    /// innovations from a ChaCha generator seeded by `seed`.
    ///
    /// Stationary models may request a `burn_in` (see
    /// [`ArmaModel::default_burn_in`]); non-stationary models must pass
    /// `burn_in = 0` and start from a zero state.
    ///
    /// ```
    /// use rgarma::ArmaModel;
    ///
    /// let model = ArmaModel::new(vec![0.9], vec![], 1.0).unwrap();
    /// let ts = model.simulate(200, 0.1, 42, model.default_burn_in()).unwrap();
    /// assert_eq!(ts.len(), 200);
    /// // same seed, same path
    /// assert_eq!(ts, model.simulate(200, 0.1, 42, model.default_burn_in()).unwrap());
    /// ```
    pub fn simulate(
        &self,
        n: usize,
        tau: f64,
        seed: u64,
        burn_in: usize,
    ) -> Result<TimeSeries> {
        if n == 0 {
            return Err(Error::InvalidParameter("step count n must be > 0".into()));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sampling interval tau must be > 0, got {tau}"
            )));
        }
        if burn_in > 0 && !self.is_stationary() {
            return Err(Error::InvalidParameter(
                "non-stationary models must be simulated with burn_in = 0".into(),
            ));
        }
        let mut rng = seeded_rng(seed);
        let values = self.run(n, burn_in, &mut rng);
        Ok(TimeSeries {
            tau,
            values,
            seed,
            scheme: Scheme::Arma,
        })
    }

    fn run(&self, n: usize, burn_in: usize, rng: &mut ChaCha12Rng) -> Vec<f64> {
        let p = self.p();
        let q = self.q();
        let normal = StandardNormal;
        let mut x_hist = vec![0.0_f64; p.max(1)];
        let mut e_hist = vec![0.0_f64; q.max(1)];
        let mut out = Vec::with_capacity(n);
        for step in 0..burn_in + n {
            let e: f64 = normal.sample(rng);
            let mut x = self.mu * e;
            // x_hist[i] / e_hist[j] hold the values at lag i+1 / j+1
            for (c, past) in self.phi.iter().zip(&x_hist) {
                x += c * past;
            }
            for (c, past) in self.nu.iter().zip(&e_hist) {
                x += c * past;
            }
            if p > 0 {
                x_hist.rotate_right(1);
                x_hist[0] = x;
            }
            if q > 0 {
                e_hist.rotate_right(1);
                e_hist[0] = e;
            }
            if step >= burn_in {
                out.push(x);
            }
        }
        out
    }
}

/// Autocovariance `gamma_0..gamma_q` of the random increment `r_n`.
///
/// For the ARMA(2,1) specialization, `alpha = gamma_0` and `beta = gamma_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementCovariance {
    pub gamma: Vec<f64>,
}

impl IncrementCovariance {
    pub fn new(gamma: Vec<f64>) -> Self {
        Self { gamma }
    }

    /// MA order implied by the length of the lag list.
    pub fn q(&self) -> usize {
        self.gamma.len().saturating_sub(1)
    }

    /// Lag-0 value `alpha`.
    pub fn alpha(&self) -> f64 {
        self.gamma.first().copied().unwrap_or(0.0)
    }

    /// Lag-1 value `beta` (0 when `q = 0`).
    pub fn beta(&self) -> f64 {
        self.gamma.get(1).copied().unwrap_or(0.0)
    }

    /// Minimum of the spectral density `f(w) = gamma_0 + 2 sum_k gamma_k cos(k w)`
    /// over a dense frequency grid. Non-negativity of `f` is equivalent to
    /// positive semidefiniteness of the banded Toeplitz covariance.
    pub fn spectral_density_min(&self) -> f64 {
        let grid = 2048;
        (0..=grid)
            .map(|i| {
                let w = std::f64::consts::PI * i as f64 / grid as f64;
                self.gamma[0]
                    + 2.0
                        * self.gamma[1..]
                            .iter()
                            .enumerate()
                            .map(|(k, g)| g * ((k + 1) as f64 * w).cos())
                            .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks positive semidefiniteness (within a small relative slack).
    pub fn is_psd(&self) -> bool {
        if self.gamma.is_empty() || self.gamma[0] < 0.0 {
            return false;
        }
        let scale = self.gamma.iter().map(|g| g.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return true;
        }
        if self.q() == 1 {
            return self.gamma[0] >= 2.0 * self.gamma[1].abs() - 1e-12 * scale;
        }
        self.spectral_density_min() >= -1e-10 * scale
    }
}

/// Provenance label of a sampled series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Euler,
    Exact,
    Arma,
    External,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Scheme::Euler => "euler",
            Scheme::Exact => "exact",
            Scheme::Arma => "arma",
            Scheme::External => "external",
        };
        f.write_str(s)
    }
}

/// A sampled trajectory together with its sampling interval and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub tau: f64,
    pub values: Vec<f64>,
    pub seed: u64,
    pub scheme: Scheme,
}

impl TimeSeries {
    pub fn new(tau: f64, values: Vec<f64>, seed: u64, scheme: Scheme) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("series must be non-empty".into()));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sampling interval tau must be > 0, got {tau}"
            )));
        }
        Ok(Self {
            tau,
            values,
            seed,
            scheme,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Writes the data payload as CSV with header `n,x`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(b"n,x\n")?;
        for (i, x) in self.values.iter().enumerate() {
            writeln!(w, "{i},{x}")?;
        }
        Ok(())
    }

    /// Reads a series from `n,x` CSV produced by [`TimeSeries::write_csv`].
    /// `tau` and provenance are supplied by the caller.
    pub fn read_csv<R: std::io::BufRead>(r: R, tau: f64, seed: u64) -> Result<Self> {
        let mut values = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line =
                line.map_err(|e| Error::InvalidParameter(format!("csv read: {e}")))?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with(|c: char| c.is_alphabetic())) {
                continue;
            }
            let field = line.rsplit(',').next().unwrap_or(line);
            let x: f64 = field.trim().parse().map_err(|e| {
                Error::InvalidParameter(format!("csv line {}: {e}", lineno + 1))
            })?;
            values.push(x);
        }
        Self::new(tau, values, seed, Scheme::External)
    }
}

/// ChaCha generator for a base seed; replica substreams use
/// [`replica_rng`].
pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Independent substream for replica `index` of a seeded ensemble.
pub fn replica_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Derived per-replica seed for interfaces that take a plain `u64`.
pub fn replica_seed(seed: u64, index: u64) -> u64 {
    // SplitMix64 step keeps replicas decorrelated under sequential seeds.
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
