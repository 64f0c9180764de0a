//! Monte Carlo verification: samples the terminal price from its exact
//! mixture law and estimates distorted expectations by the L-statistic,
//! with batch-means standard errors.
//!
//! No path discretization is involved; the payoff only sees S_T, so each
//! draw is one Poisson count (CDF inversion) and one standard normal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::distortion::{distorted_expectation_sorted, DistortionSpec};
use crate::error::{Error, Result};
use crate::pricing::{OptionKind, OptionSpec};
use crate::terminal_law::{DriftConvention, JumpParams, MixtureMoments, ModelParams};

/// Sample count, seed, and the number of equal-size batches used both as
/// independent RNG substreams and for the batch-means error bars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub n_batches: usize,
}

impl McConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            n_batches: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_batches < 2 {
            return Err(Error::InvalidParams(format!(
                "n_batches must be >= 2, got {}",
                self.n_batches
            )));
        }
        if self.n_samples < self.n_batches {
            return Err(Error::InvalidParams(format!(
                "n_samples ({}) must be >= n_batches ({})",
                self.n_samples, self.n_batches
            )));
        }
        Ok(())
    }
}

/// Monte Carlo bid/ask with batch-means standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McQuote {
    pub bid: f64,
    pub ask: f64,
    pub se_bid: f64,
    pub se_ask: f64,
}

/// Poisson draw by walking the CDF with the stable weight recurrence.
fn poisson_inverse(u: f64, rate: f64) -> usize {
    let cap = (rate + 60.0 * rate.sqrt() + 60.0) as usize;
    let mut k = 0usize;
    let mut p = (-rate).exp();
    let mut cum = p;
    while u > cum && k < cap {
        k += 1;
        p *= rate / k as f64;
        cum += p;
    }
    k
}

/// Terminal-price samples, batch by batch. Batch b draws from stream b of
/// the seeded generator, so the sample set is a pure function of
/// (params, seed) regardless of how batches are scheduled.
fn sample_batches(
    model: &ModelParams,
    jumps: &JumpParams,
    conv: DriftConvention,
    cfg: &McConfig,
) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let moments = MixtureMoments::new(model, jumps, conv)?;
    let rate = jumps.lambda * model.maturity;
    let base = cfg.n_samples / cfg.n_batches;
    let remainder = cfg.n_samples % cfg.n_batches;

    let mut batches = Vec::with_capacity(cfg.n_batches);
    for b in 0..cfg.n_batches {
        let size = base + usize::from(b < remainder);
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        rng.set_stream(b as u64);
        let mut batch = Vec::with_capacity(size);
        for _ in 0..size {
            let n = poisson_inverse(rng.random::<f64>(), rate);
            let z: f64 = rng.sample(StandardNormal);
            batch.push(model.s0 * (moments.log_mean(n) + moments.log_sd(n) * z).exp());
        }
        batches.push(batch);
    }
    Ok(batches)
}

/// Draws of S_T from the exact jump-mixture law; reproducible per seed.
pub fn sample_terminal(
    model: &ModelParams,
    jumps: &JumpParams,
    conv: DriftConvention,
    cfg: &McConfig,
) -> Result<Vec<f64>> {
    Ok(sample_batches(model, jumps, conv, cfg)?.concat())
}

fn payoff(kind: OptionKind, strike: f64, s: f64) -> f64 {
    match kind {
        OptionKind::Call => (s - strike).max(0.0),
        OptionKind::Put => (strike - s).max(0.0),
    }
}

/// Empirical bid and ask: the discounted L-statistic over the sorted payoff
/// sample under the distortion (bid) and its dual (ask), with standard
/// errors from the batch-wise estimates.
pub fn mc_quote(
    opt: &OptionSpec,
    model: &ModelParams,
    jumps: &JumpParams,
    conv: DriftConvention,
    d: &DistortionSpec,
    cfg: &McConfig,
) -> Result<McQuote> {
    opt.validate()?;
    let batches = sample_batches(model, jumps, conv, cfg)?;
    let disc = (-model.r * model.maturity).exp();
    let dual = d.dual();

    let mut batch_bids = Vec::with_capacity(batches.len());
    let mut batch_asks = Vec::with_capacity(batches.len());
    let mut all = Vec::with_capacity(cfg.n_samples);
    for batch in &batches {
        let mut payoffs: Vec<f64> = batch
            .iter()
            .map(|&s| payoff(opt.kind, opt.strike, s))
            .collect();
        all.extend_from_slice(&payoffs);
        payoffs.sort_unstable_by(f64::total_cmp);
        batch_bids.push(disc * distorted_expectation_sorted(&payoffs, d)?);
        batch_asks.push(disc * distorted_expectation_sorted(&payoffs, &dual)?);
    }
    all.sort_unstable_by(f64::total_cmp);
    let bid = disc * distorted_expectation_sorted(&all, d)?;
    let ask = disc * distorted_expectation_sorted(&all, &dual)?;

    let se = |estimates: &[f64]| -> f64 {
        let b = estimates.len() as f64;
        let mean = estimates.iter().sum::<f64>() / b;
        let var = estimates
            .iter()
            .map(|e| (e - mean) * (e - mean))
            .sum::<f64>()
            / (b - 1.0);
        (var / b).sqrt()
    };

    Ok(McQuote {
        bid,
        ask,
        se_bid: se(&batch_bids),
        se_ask: se(&batch_asks),
    })
}
