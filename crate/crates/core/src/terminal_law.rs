//! Law of the terminal price under mixed fractional Brownian motion with
//! lognormal Poisson jumps.
//!
//! Conditioning on the jump count N(T) = n makes log(S_T/S0) Gaussian with
//! mean m_n and variance s_n^2, so the terminal law is a Poisson-weighted
//! mixture of lognormals. [`build_law`] truncates the Poisson series at a
//! tail-mass threshold and precomputes the per-component moments; every
//! query afterwards is a pure function of the frozen mixture.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, normal_cdf, normal_quantile, poisson_weights};

/// Hurst range on which the mixed driving process is arbitrage-free.
pub const ARBITRAGE_FREE_HURST_MIN: f64 = 0.75;

/// Diffusion-leg parameters: spot, rate, the two volatilities, Hurst index
/// and maturity.
///
/// `sigma` multiplies the Brownian leg and `epsilon` the fractional leg, so
/// the no-jump log-return variance over maturity T is
/// `sigma^2 T + epsilon^2 T^{2H}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub s0: f64,
    pub r: f64,
    pub sigma: f64,
    pub epsilon: f64,
    pub hurst: f64,
    pub maturity: f64,
}

/// Non-fatal findings from parameter validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationWarning {
    /// Hurst index outside (0.75, 1]: the driving process admits arbitrage.
    HurstOutsideArbitrageFreeRegime,
}

impl fmt::Display for ValidationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationWarning::HurstOutsideArbitrageFreeRegime => {
                write!(f, "hurst outside the arbitrage-free regime (0.75, 1]")
            }
        }
    }
}

impl ModelParams {
    /// Check hard invariants; returns the list of non-fatal warnings.
    ///
    /// The library accepts any hurst in (0, 1] and only warns outside the
    /// arbitrage-free regime; front ends are expected to enforce the gate.
    pub fn validate(&self) -> Result<Vec<ValidationWarning>> {
        if !(self.s0 > 0.0) {
            return Err(Error::InvalidParams(format!(
                "s0 must be > 0, got {}",
                self.s0
            )));
        }
        if !(self.maturity > 0.0) {
            return Err(Error::InvalidParams(format!(
                "maturity must be > 0, got {}",
                self.maturity
            )));
        }
        if !self.r.is_finite() {
            return Err(Error::InvalidParams(format!(
                "r must be finite, got {}",
                self.r
            )));
        }
        if !(self.sigma >= 0.0) || !(self.epsilon >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "volatilities must be >= 0, got sigma {} epsilon {}",
                self.sigma, self.epsilon
            )));
        }
        if self.sigma == 0.0 && self.epsilon == 0.0 {
            return Err(Error::InvalidParams(
                "(sigma, epsilon) = (0, 0): the continuous leg is degenerate".into(),
            ));
        }
        if !(self.hurst > 0.0 && self.hurst <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "hurst must lie in (0, 1], got {}",
                self.hurst
            )));
        }
        let mut warnings = Vec::new();
        if self.hurst <= ARBITRAGE_FREE_HURST_MIN {
            warnings.push(ValidationWarning::HurstOutsideArbitrageFreeRegime);
        }
        Ok(warnings)
    }

    /// No-jump log-return variance sigma^2 T + epsilon^2 T^{2H}.
    pub fn base_log_variance(&self) -> f64 {
        self.sigma * self.sigma * self.maturity
            + self.epsilon * self.epsilon * self.maturity.powf(2.0 * self.hurst)
    }
}

/// Jump parameters: Poisson intensity and the lognormal law of a single
/// multiplicative jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpParams {
    pub lambda: f64,
    pub mu1: f64,
    pub sigma1_sq: f64,
}

impl JumpParams {
    /// No jumps at all; handy in tests.
    pub fn none() -> Self {
        Self {
            lambda: 0.0,
            mu1: 0.0,
            sigma1_sq: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !(self.sigma1_sq >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "sigma1_sq must be >= 0, got {}",
                self.sigma1_sq
            )));
        }
        if !self.mu1.is_finite() {
            return Err(Error::InvalidParams(format!(
                "mu1 must be finite, got {}",
                self.mu1
            )));
        }
        Ok(())
    }

    /// E[J_1] = exp(mu1 + sigma1_sq / 2).
    pub fn mean_jump(&self) -> f64 {
        (self.mu1 + 0.5 * self.sigma1_sq).exp()
    }

    /// E[J_1^2] = exp(2 mu1 + 2 sigma1_sq).
    pub fn mean_jump_sq(&self) -> f64 {
        (2.0 * self.mu1 + 2.0 * self.sigma1_sq).exp()
    }
}

/// Whether the drift carries the jump compensator lambda T (1 - E[J_1]).
///
/// `Compensated` restores the forward-price identity E[S_T] = S0 e^{rT};
/// `Uncompensated` drops the compensator and prices the continuous leg
/// risk-neutral on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DriftConvention {
    #[default]
    Compensated,
    Uncompensated,
}

impl fmt::Display for DriftConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriftConvention::Compensated => write!(f, "compensated"),
            DriftConvention::Uncompensated => write!(f, "uncompensated"),
        }
    }
}

impl FromStr for DriftConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "compensated" => Ok(DriftConvention::Compensated),
            "uncompensated" => Ok(DriftConvention::Uncompensated),
            other => Err(Error::InvalidParams(format!(
                "drift must be \"compensated\" or \"uncompensated\", got \"{other}\""
            ))),
        }
    }
}

/// Per-component Gaussian moments of log(S_T/S0), shared by the law builder
/// and the Monte Carlo sampler.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MixtureMoments {
    pub base_drift: f64,
    pub base_var: f64,
    pub mu1: f64,
    pub sigma1_sq: f64,
}

impl MixtureMoments {
    pub fn new(model: &ModelParams, jumps: &JumpParams, conv: DriftConvention) -> Result<Self> {
        model.validate()?;
        jumps.validate()?;
        let t = model.maturity;
        let base_var = model.base_log_variance();
        if !(base_var > 0.0) {
            return Err(Error::InvalidParams(
                "sigma^2 T + epsilon^2 T^{2H} must be positive".into(),
            ));
        }
        let mut base_drift = model.r * t - 0.5 * base_var;
        if conv == DriftConvention::Compensated {
            base_drift += jumps.lambda * t * (1.0 - jumps.mean_jump());
        }
        Ok(Self {
            base_drift,
            base_var,
            mu1: jumps.mu1,
            sigma1_sq: jumps.sigma1_sq,
        })
    }

    pub fn log_mean(&self, n: usize) -> f64 {
        self.base_drift + n as f64 * self.mu1
    }

    pub fn log_sd(&self, n: usize) -> f64 {
        (self.base_var + n as f64 * self.sigma1_sq).sqrt()
    }
}

/// The truncated Poisson-mixture law of S_T.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalLaw {
    weights: Vec<f64>,
    log_means: Vec<f64>,
    log_sds: Vec<f64>,
    s0: f64,
    discount_rt: f64,
    tail_tol_used: f64,
}

/// Build the terminal law: Poisson weights truncated at `tail_tol`, and the
/// per-component moments m_n, s_n.
pub fn build_law(
    model: &ModelParams,
    jumps: &JumpParams,
    conv: DriftConvention,
    tail_tol: f64,
) -> Result<TerminalLaw> {
    let moments = MixtureMoments::new(model, jumps, conv)?;
    let pw = poisson_weights(jumps.lambda * model.maturity, tail_tol)?;
    let n_terms = pw.n_max() + 1;
    let log_means = (0..n_terms).map(|n| moments.log_mean(n)).collect();
    let log_sds = (0..n_terms).map(|n| moments.log_sd(n)).collect();
    Ok(TerminalLaw {
        weights: pw.weights().to_vec(),
        log_means,
        log_sds,
        s0: model.s0,
        discount_rt: model.r * model.maturity,
        tail_tol_used: tail_tol,
    })
}

impl TerminalLaw {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn log_means(&self) -> &[f64] {
        &self.log_means
    }

    pub fn log_sds(&self) -> &[f64] {
        &self.log_sds
    }

    pub fn n_max(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    /// r * T, the log of the discount factor's reciprocal.
    pub fn discount_rt(&self) -> f64 {
        self.discount_rt
    }

    pub fn tail_tol_used(&self) -> f64 {
        self.tail_tol_used
    }

    /// Discount factor e^{-rT}.
    pub fn discount_factor(&self) -> f64 {
        (-self.discount_rt).exp()
    }

    /// F_{S_T}(x): zero for x <= 0, otherwise the weighted sum of the
    /// per-component lognormal CDFs.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let log_m = (x / self.s0).ln();
        let mut acc = 0.0;
        for n in 0..self.weights.len() {
            acc += self.weights[n] * normal_cdf((log_m - self.log_means[n]) / self.log_sds[n]);
        }
        acc.clamp(0.0, 1.0)
    }

    /// CDF of the n-th mixture component, Phi((ln(x/S0) - m_n) / s_n).
    pub fn g_n_cdf(&self, n: usize, x: f64) -> Result<f64> {
        if n >= self.weights.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                n_max: self.n_max(),
            });
        }
        if !(x > 0.0) {
            return Err(Error::Domain(format!("g_n_cdf requires x > 0, got {x}")));
        }
        let log_m = (x / self.s0).ln();
        Ok(normal_cdf((log_m - self.log_means[n]) / self.log_sds[n]))
    }

    /// Inverse CDF by bisection, bracketed by the per-component Gaussian
    /// quantiles of the extreme mixture components.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!(
                "quantile requires p in (0,1), got {p}"
            )));
        }
        let z = normal_quantile(p)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for n in 0..self.weights.len() {
            let q = self.s0 * (self.log_means[n] + self.log_sds[n] * z).exp();
            lo = lo.min(q);
            hi = hi.max(q);
        }
        // the bracket is exact in real arithmetic; pad for roundoff
        lo *= 1.0 - 1e-12;
        hi *= 1.0 + 1e-12;

        const TOL: f64 = 1e-10;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let diff = self.cdf(mid) - p;
            if diff.abs() <= TOL {
                return Ok(mid);
            }
            if diff < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mid = 0.5 * (lo + hi);
        if (self.cdf(mid) - p).abs() <= TOL {
            Ok(mid)
        } else {
            Err(Error::NonConvergence(format!(
                "quantile bisection stalled at p = {p} (law invariant violated?)"
            )))
        }
    }

    /// E[S_T] = sum_n w_n S0 exp(m_n + s_n^2 / 2); equals S0 e^{rT} up to
    /// truncation error under the compensated drift.
    pub fn expected_terminal_price(&self) -> f64 {
        let terms = (0..self.weights.len()).map(|n| {
            self.weights[n]
                * self.s0
                * (self.log_means[n] + 0.5 * self.log_sds[n] * self.log_sds[n]).exp()
        });
        compensated_sum(terms)
    }
}

/// Mean and variance of the multiplicative jump factor J(t): the paper's
/// moment identities E[J(t)] = exp(-lambda t (1 - E[J_1])) and
/// Var[J(t)] = exp(-lambda t (1 - E[J_1^2])) - E[J(t)]^2.
pub fn jump_factor_moments(jumps: &JumpParams, t: f64) -> (f64, f64) {
    debug_assert!(t >= 0.0);
    let mean = (-jumps.lambda * t * (1.0 - jumps.mean_jump())).exp();
    let variance = (-jumps.lambda * t * (1.0 - jumps.mean_jump_sq())).exp() - mean * mean;
    (mean, variance)
}
