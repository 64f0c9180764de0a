//! Two-price valuation of European options under a mixed fractional
//! Brownian driving process with superimposed Poisson jumps.
//!
//! The market quotes two prices, not one: the bid is the discounted
//! distorted expectation of the payoff and the ask is the negative of the
//! discounted distorted expectation of the negated payoff. With the Wang
//! transform as the distortion family, a single stress level controls the
//! width of the spread, and gamma = 0 recovers the classical one-price
//! valuation.
//!
//! The crate is organised around a precomputed [`TerminalLaw`] — the law of
//! the terminal price as a Poisson-weighted lognormal mixture — plus three
//! independent numerical routes over it:
//!
//! * [`pricing::bid`] / [`pricing::ask`]: adaptive quadrature of the
//!   survival-integral form (the production route),
//! * [`pricing::stieltjes_quote`]: direct first-order discretization of the
//!   defining Stieltjes integrals,
//! * [`mc::mc_quote`]: seeded Monte Carlo with L-statistic estimators and
//!   batch-means error bars.

// frozen reference constants keep their full published precision; the
// negated-comparison form in validations also rejects NaN
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod distortion;
pub mod error;
pub mod mc;
pub mod numerics;
pub mod pricing;
pub mod terminal_law;

pub use distortion::{distorted_expectation_sorted, DistortionSpec};
pub use error::{Error, Result};
pub use mc::{mc_quote, sample_terminal, McConfig, McQuote};
pub use numerics::{integrate_adaptive, normal_cdf, normal_quantile, poisson_weights, Tolerance};
pub use pricing::{
    ask, bid, closed_form_price, quote, series_price_gamma0, stieltjes_ask, stieltjes_bid,
    stieltjes_quote, OptionKind, OptionSpec, Quote, QuoteMethod,
};
pub use terminal_law::{
    build_law, jump_factor_moments, DriftConvention, JumpParams, ModelParams, TerminalLaw,
    ValidationWarning, ARBITRAGE_FREE_HURST_MIN,
};
