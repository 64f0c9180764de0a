//! Bid and ask prices of European calls and puts by distorted expectation.
//!
//! The primary route rewrites the distorted expectations through survival
//! functions (integration by parts), which puts the payoff kink at an
//! integration endpoint and leaves a smooth integrand inside:
//!
//!   call bid:  e^{-rT} int_K^inf  1 - f(F(x))      dx
//!   put  bid:  e^{-rT} int_0^K    1 - f(1 - F(x))  dx
//!
//! and the ask is the bid under the dual distortion. A direct midpoint
//! discretization of the Stieltjes integrals in their original form is kept
//! as an independent cross-check route, as is the exact lognormal-mixture
//! series for the undistorted price.

use std::fmt;
use std::str::FromStr;

use crate::distortion::DistortionSpec;
use crate::error::{Error, Result};
use crate::numerics::{integrate_adaptive, normal_cdf, Tolerance};
use crate::terminal_law::TerminalLaw;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptionKind {
    Call,
    Put,
}

impl fmt::Display for OptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptionKind::Call => write!(f, "call"),
            OptionKind::Put => write!(f, "put"),
        }
    }
}

impl FromStr for OptionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "call" => Ok(OptionKind::Call),
            "put" => Ok(OptionKind::Put),
            other => Err(Error::InvalidParams(format!(
                "kind must be \"call\" or \"put\", got \"{other}\""
            ))),
        }
    }
}

/// A European option: strike and payoff direction. Maturity lives in the
/// model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionSpec {
    pub strike: f64,
    pub kind: OptionKind,
}

impl OptionSpec {
    pub fn call(strike: f64) -> Self {
        Self {
            strike,
            kind: OptionKind::Call,
        }
    }

    pub fn put(strike: f64) -> Self {
        Self {
            strike,
            kind: OptionKind::Put,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strike > 0.0) {
            return Err(Error::InvalidParams(format!(
                "strike must be > 0, got {}",
                self.strike
            )));
        }
        Ok(())
    }
}

/// Which numerical route produced a quote.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuoteMethod {
    Quadrature,
    Stieltjes,
    MonteCarlo,
}

/// A two-price quote: bid, ask, their midpoint and the spread, together with
/// the stress level and route that produced them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quote {
    pub bid: f64,
    pub ask: f64,
    pub mid: f64,
    pub spread: f64,
    pub gamma: f64,
    pub method: QuoteMethod,
}

impl Quote {
    fn from_bid_ask(bid: f64, ask: f64, gamma: f64, method: QuoteMethod) -> Self {
        Self {
            bid,
            ask,
            mid: 0.5 * (bid + ask),
            spread: ask - bid,
            gamma,
            method,
        }
    }
}

/// Cheap guard against a non-monotone distortion being handed in.
fn check_distortion(d: &DistortionSpec) -> Result<()> {
    let mut prev = -f64::INFINITY;
    for i in 0..=4 {
        let v = d.apply(i as f64 / 4.0)?;
        if v < prev {
            return Err(Error::InvalidParams(
                "distortion function is not nondecreasing".into(),
            ));
        }
        prev = v;
    }
    Ok(())
}

/// Upper integration bound for call integrals: the quantile past which the
/// distorted survival 1 - f(F(x)) stays below `tol / (scale * e^{-rT})`.
///
/// 1 - f(p) is the dual distortion evaluated at 1 - p, so the cut level in
/// the undistorted law is p* = 1 - f(delta).
fn call_upper_bound(
    law: &TerminalLaw,
    d: &DistortionSpec,
    strike: f64,
    abs_tol: f64,
) -> Result<f64> {
    let scale = law.s0().max(strike);
    let delta = (abs_tol / (scale * law.discount_factor())).clamp(1e-15, 0.1);
    let p_star = (1.0 - d.apply_unit(delta)).clamp(0.5, 1.0 - 1e-15);
    law.quantile(p_star)
}

/// Bid price: the discounted distorted expectation of the payoff, evaluated
/// in survival-integral form.
pub fn bid(
    opt: &OptionSpec,
    law: &TerminalLaw,
    d: &DistortionSpec,
    tol: &Tolerance,
) -> Result<f64> {
    opt.validate()?;
    check_distortion(d)?;
    let strike = opt.strike;
    let integral = match opt.kind {
        OptionKind::Call => {
            let hi = call_upper_bound(law, d, strike, tol.abs_tol)?;
            if hi <= strike {
                // the distorted survival is already below threshold at the
                // strike; the remaining mass is beneath tolerance
                0.0
            } else {
                integrate_adaptive(|x| 1.0 - d.apply_unit(law.cdf(x)), strike, hi, tol)?
            }
        }
        OptionKind::Put => {
            integrate_adaptive(|x| 1.0 - d.apply_unit(1.0 - law.cdf(x)), 0.0, strike, tol)?
        }
    };
    Ok((law.discount_factor() * integral).max(0.0))
}

/// Ask price: minus the discounted distorted expectation of the negated
/// payoff, which equals the bid under the dual distortion.
pub fn ask(
    opt: &OptionSpec,
    law: &TerminalLaw,
    d: &DistortionSpec,
    tol: &Tolerance,
) -> Result<f64> {
    bid(opt, law, &d.dual(), tol)
}

/// Bid and ask bundled into a [`Quote`].
pub fn quote(
    opt: &OptionSpec,
    law: &TerminalLaw,
    d: &DistortionSpec,
    tol: &Tolerance,
) -> Result<Quote> {
    let b = bid(opt, law, d, tol)?;
    let a = ask(opt, law, d, tol)?;
    Ok(Quote::from_bid_ask(
        b,
        a,
        d.gamma(),
        QuoteMethod::Quadrature,
    ))
}

/// Closed-form undistorted price from the total log-variance of the
/// terminal law: C = s0 Phi(d1) - K e^{-rT} Phi(d2) with
/// d1 = (ln(s0/K) + rT + v^2/2) / v and d2 = d1 - v; the put follows from
/// parity.
///
/// For the mixed driving process v^2 = sigma^2 T + epsilon^2 T^{2H}.
pub fn closed_form_price(
    s0: f64,
    strike: f64,
    r: f64,
    maturity: f64,
    total_log_variance: f64,
    kind: OptionKind,
) -> Result<f64> {
    if !(total_log_variance > 0.0) {
        return Err(Error::Domain(format!(
            "total log-variance must be > 0, got {total_log_variance}"
        )));
    }
    if !(s0 > 0.0) || !(strike > 0.0) {
        return Err(Error::InvalidParams(format!(
            "prices must be positive, got s0 {s0} strike {strike}"
        )));
    }
    let v = total_log_variance.sqrt();
    let disc = (-r * maturity).exp();
    let d1 = ((s0 / strike).ln() + r * maturity + 0.5 * total_log_variance) / v;
    let d2 = d1 - v;
    let call = s0 * normal_cdf(d1) - strike * disc * normal_cdf(d2);
    Ok(match kind {
        OptionKind::Call => call,
        OptionKind::Put => call - s0 + strike * disc,
    })
}

/// Exact undistorted price of the truncated mixture: the Poisson-weighted
/// sum of per-component lognormal option values. Reference route for
/// gamma = 0.
pub fn series_price_gamma0(opt: &OptionSpec, law: &TerminalLaw) -> Result<f64> {
    opt.validate()?;
    let disc = law.discount_factor();
    let strike = opt.strike;
    let log_moneyness = (law.s0() / strike).ln();
    let mut acc = 0.0;
    for n in 0..=law.n_max() {
        let (m, s) = (law.log_means()[n], law.log_sds()[n]);
        let forward = law.s0() * (m + 0.5 * s * s).exp();
        let d2 = (log_moneyness + m) / s;
        let d1 = d2 + s;
        let term = match opt.kind {
            OptionKind::Call => forward * normal_cdf(d1) - strike * normal_cdf(d2),
            OptionKind::Put => strike * normal_cdf(-d2) - forward * normal_cdf(-d1),
        };
        acc += law.weights()[n] * term;
    }
    Ok(disc * acc)
}

/// Quantile-spaced support grid shared by the Stieltjes assemblies: the
/// p-grid is uniform on [1e-10, 1 - 1e-10] and each x_j = F^{-1}(p_j),
/// found by bisection warm-started from the previous point.
fn stieltjes_grid(law: &TerminalLaw, n_grid: usize) -> Result<Vec<f64>> {
    const P_LO: f64 = 1e-10;
    const P_HI: f64 = 1.0 - 1e-10;
    let mut xs = Vec::with_capacity(n_grid + 1);
    let hi_global = law.quantile(P_HI)?;
    let mut lo = 0.0;
    for j in 0..=n_grid {
        let p = P_LO + (P_HI - P_LO) * j as f64 / n_grid as f64;
        let mut a = lo;
        let mut b = hi_global * (1.0 + 1e-12);
        let mut x = 0.5 * (a + b);
        for _ in 0..200 {
            let diff = law.cdf(x) - p;
            if diff.abs() <= 1e-10 {
                break;
            }
            if diff < 0.0 {
                a = x;
            } else {
                b = x;
            }
            x = 0.5 * (a + b);
        }
        xs.push(x);
        lo = x;
    }
    Ok(xs)
}

/// Cell walls of the sub-grid covering [a, b]: a, the grid points strictly
/// inside, then b.
fn clip_grid(xs: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut walls = Vec::with_capacity(xs.len() + 2);
    walls.push(a);
    for &x in xs {
        if x > a && x < b {
            walls.push(x);
        }
    }
    walls.push(b);
    walls
}

/// Midpoint Stieltjes sum of x against g over the cells of `walls`.
fn midpoint_stieltjes(walls: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    let mut g_prev = g(walls[0]);
    for w in walls.windows(2) {
        let g_next = g(w[1]);
        acc += 0.5 * (w[0] + w[1]) * (g_next - g_prev);
        g_prev = g_next;
    }
    acc
}

fn stieltjes_bid_ask(
    opt: &OptionSpec,
    law: &TerminalLaw,
    d: &DistortionSpec,
    xs: &[f64],
) -> Result<(f64, f64)> {
    opt.validate()?;
    check_distortion(d)?;
    let strike = opt.strike;
    let disc = law.discount_factor();
    let x_top = *xs.last().expect("grid is nonempty");

    let f_of_cdf = |x: f64| d.apply_unit(law.cdf(x));
    let f_of_survival = |x: f64| d.apply_unit(1.0 - law.cdf(x));

    Ok(match opt.kind {
        OptionKind::Call => {
            let walls = clip_grid(xs, strike, x_top.max(strike * (1.0 + 1e-12)));
            // bid:  e^{-rT} [ int_K^inf x df(F(x)) - K (1 - f(F(K))) ]
            let bid_x_part = midpoint_stieltjes(&walls, f_of_cdf);
            let bid = disc * (bid_x_part - strike * (1.0 - f_of_cdf(strike)));
            // ask: -e^{-rT} int_K^inf x df(1-F(x)) + e^{-rT} K (0 - f(1-F(K)))
            let ask_x_part = midpoint_stieltjes(&walls, f_of_survival);
            let ask = disc * (-ask_x_part - strike * f_of_survival(strike));
            (bid.max(0.0), ask.max(0.0))
        }
        OptionKind::Put => {
            let walls = clip_grid(xs, 0.0, strike);
            // bid: -e^{-rT} K [f(1-F(K)) - f(1)] + e^{-rT} int_0^K x df(1-F(x))
            let bid_x_part = midpoint_stieltjes(&walls, f_of_survival);
            let bid = disc * (strike * (1.0 - f_of_survival(strike)) + bid_x_part);
            // ask: e^{-rT} K f(F(K)) - e^{-rT} int_0^K x df(F(x))
            let ask_x_part = midpoint_stieltjes(&walls, f_of_cdf);
            let ask = disc * (strike * f_of_cdf(strike) - ask_x_part);
            (bid.max(0.0), ask.max(0.0))
        }
    })
}

/// Bid by direct midpoint discretization of the Stieltjes integrals in
/// their original (pre-integration-by-parts) form, on an `n_grid`-cell
/// quantile-spaced grid. First-order reference route.
pub fn stieltjes_bid(
    opt: &OptionSpec,
    law: &TerminalLaw,
    d: &DistortionSpec,
    n_grid: usize,
) -> Result<f64> {
    Ok(stieltjes_quote(opt, law, d, n_grid)?.bid)
}

/// Ask counterpart of [`stieltjes_bid`], assembled from the displayed ask
/// integrals directly rather than through the dual distortion.
pub fn stieltjes_ask(
    opt: &OptionSpec,
    law: &TerminalLaw,
    d: &DistortionSpec,
    n_grid: usize,
) -> Result<f64> {
    Ok(stieltjes_quote(opt, law, d, n_grid)?.ask)
}

/// Bid and ask from one shared quantile grid.
pub fn stieltjes_quote(
    opt: &OptionSpec,
    law: &TerminalLaw,
    d: &DistortionSpec,
    n_grid: usize,
) -> Result<Quote> {
    if n_grid < 100 {
        return Err(Error::InvalidParams(format!(
            "n_grid must be >= 100, got {n_grid}"
        )));
    }
    let xs = stieltjes_grid(law, n_grid)?;
    let (b, a) = stieltjes_bid_ask(opt, law, d, &xs)?;
    Ok(Quote::from_bid_ask(b, a, d.gamma(), QuoteMethod::Stieltjes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terminal_law::{build_law, DriftConvention, JumpParams, ModelParams};
    use approx::assert_relative_eq;

    fn standard_model() -> ModelParams {
        ModelParams {
            s0: 100.0,
            r: 0.05,
            sigma: 0.2,
            epsilon: 0.1,
            hurst: 0.8,
            maturity: 1.0,
        }
    }

    fn standard_jumps() -> JumpParams {
        JumpParams {
            lambda: 1.0,
            mu1: -0.05,
            sigma1_sq: 0.02,
        }
    }

    fn standard_law() -> TerminalLaw {
        build_law(
            &standard_model(),
            &standard_jumps(),
            DriftConvention::Compensated,
            1e-12,
        )
        .unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::new(1e-8, 400).unwrap()
    }

    #[test]
    fn closed_form_atm_zero_rate() {
        // 100 (Phi(0.1) - Phi(-0.1)), frozen 40-digit oracle
        let c = closed_form_price(100.0, 100.0, 0.0, 1.0, 0.04, OptionKind::Call).unwrap();
        assert_relative_eq!(c, 7.965567455405796, epsilon = 1e-12);
    }

    #[test]
    fn closed_form_tiny_variance_is_intrinsic_forward_value() {
        let c = closed_form_price(100.0, 80.0, 0.05, 1.0, 1e-18, OptionKind::Call).unwrap();
        let intrinsic = 100.0 - 80.0 * (-0.05f64).exp();
        assert_relative_eq!(c, intrinsic, max_relative = 1e-9);
    }

    #[test]
    fn closed_form_hurst_half_total_variance() {
        // H = 0.5 collapses T^{2H} = T, so (sigma, epsilon) = (0.2, 0.1)
        // carries v^2 = 0.05
        let m = ModelParams {
            hurst: 0.5,
            ..standard_model()
        };
        let a = closed_form_price(
            100.0,
            110.0,
            0.05,
            1.0,
            m.base_log_variance(),
            OptionKind::Call,
        )
        .unwrap();
        let b = closed_form_price(100.0, 110.0, 0.05, 1.0, 0.05, OptionKind::Call).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-14);
    }

    #[test]
    fn closed_form_rejects_degenerate_variance() {
        assert!(closed_form_price(100.0, 100.0, 0.0, 1.0, 0.0, OptionKind::Call).is_err());
        assert!(closed_form_price(100.0, 100.0, 0.0, 1.0, -0.1, OptionKind::Put).is_err());
    }

    #[test]
    fn identity_bid_matches_closed_form_without_jumps() {
        let model = standard_model();
        let law = build_law(
            &model,
            &JumpParams::none(),
            DriftConvention::Compensated,
            1e-12,
        )
        .unwrap();
        for strike in [80.0, 100.0, 120.0] {
            for kind in [OptionKind::Call, OptionKind::Put] {
                let opt = OptionSpec { strike, kind };
                let cf =
                    closed_form_price(100.0, strike, 0.05, 1.0, model.base_log_variance(), kind)
                        .unwrap();
                let b = bid(&opt, &law, &DistortionSpec::Identity, &tol()).unwrap();
                assert!(
                    (b - cf).abs() <= 1e-8 * 100.0,
                    "{kind} K={strike}: {b} vs {cf}"
                );
            }
        }
    }

    #[test]
    fn vanishing_strike_call_tends_to_spot() {
        let law = standard_law();
        let opt = OptionSpec::call(1e-6);
        let b = bid(&opt, &law, &DistortionSpec::Identity, &tol()).unwrap();
        assert!((b - 100.0).abs() <= 1e-6, "got {b}");
    }

    #[test]
    fn gamma_zero_collapses_to_one_price() {
        let law = standard_law();
        let q = quote(
            &OptionSpec::call(100.0),
            &law,
            &DistortionSpec::Identity,
            &tol(),
        )
        .unwrap();
        assert!(q.spread.abs() <= 2.0 * tol().abs_tol);
        assert_eq!(q.method, QuoteMethod::Quadrature);
    }

    #[test]
    fn ask_equals_bid_under_dual() {
        let law = standard_law();
        let d = DistortionSpec::wang(0.3);
        for opt in [OptionSpec::call(100.0), OptionSpec::put(95.0)] {
            let a = ask(&opt, &law, &d, &tol()).unwrap();
            let b_neg = bid(&opt, &law, &DistortionSpec::wang(-0.3), &tol()).unwrap();
            assert!((a - b_neg).abs() <= 1e-10);
        }
    }

    #[test]
    fn conic_ordering_around_the_series_price() {
        let law = standard_law();
        let d = DistortionSpec::wang(0.25);
        for opt in [OptionSpec::call(100.0), OptionSpec::put(100.0)] {
            let mid = series_price_gamma0(&opt, &law).unwrap();
            let b = bid(&opt, &law, &d, &tol()).unwrap();
            let a = ask(&opt, &law, &d, &tol()).unwrap();
            assert!(b <= mid + 1e-8 && mid <= a + 1e-8, "{b} <= {mid} <= {a}");
            assert!(a - b > 0.1, "spread should be material at gamma = 0.25");
        }
    }

    #[test]
    fn strike_monotonicity() {
        let law = standard_law();
        let d = DistortionSpec::wang(0.2);
        let strikes = [60.0, 80.0, 100.0, 120.0, 140.0];
        let mut prev_call = (f64::INFINITY, f64::INFINITY);
        let mut prev_put = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for k in strikes {
            let cb = bid(&OptionSpec::call(k), &law, &d, &tol()).unwrap();
            let ca = ask(&OptionSpec::call(k), &law, &d, &tol()).unwrap();
            assert!(cb <= prev_call.0 + 1e-9 && ca <= prev_call.1 + 1e-9);
            prev_call = (cb, ca);

            let pb = bid(&OptionSpec::put(k), &law, &d, &tol()).unwrap();
            let pa = ask(&OptionSpec::put(k), &law, &d, &tol()).unwrap();
            assert!(pb >= prev_put.0 - 1e-9 && pa >= prev_put.1 - 1e-9);
            prev_put = (pb, pa);
        }
    }

    #[test]
    fn series_price_no_jumps_equals_closed_form() {
        let model = standard_model();
        let law = build_law(
            &model,
            &JumpParams::none(),
            DriftConvention::Compensated,
            1e-12,
        )
        .unwrap();
        for kind in [OptionKind::Call, OptionKind::Put] {
            let opt = OptionSpec {
                strike: 105.0,
                kind,
            };
            let series = series_price_gamma0(&opt, &law).unwrap();
            let cf = closed_form_price(100.0, 105.0, 0.05, 1.0, model.base_log_variance(), kind)
                .unwrap();
            assert!((series - cf).abs() <= 1e-12, "{series} vs {cf}");
        }
    }

    #[test]
    fn series_price_put_call_parity() {
        let law = standard_law();
        for strike in [80.0, 100.0, 120.0] {
            let c = series_price_gamma0(&OptionSpec::call(strike), &law).unwrap();
            let p = series_price_gamma0(&OptionSpec::put(strike), &law).unwrap();
            let rhs = 100.0 - strike * (-0.05f64).exp();
            assert!((c - p - rhs).abs() <= 1e-9, "K = {strike}");
        }
    }

    #[test]
    fn quadrature_matches_series_at_identity() {
        let law = standard_law();
        for opt in [
            OptionSpec::call(80.0),
            OptionSpec::call(120.0),
            OptionSpec::put(100.0),
        ] {
            let series = series_price_gamma0(&opt, &law).unwrap();
            let b = bid(&opt, &law, &DistortionSpec::Identity, &tol()).unwrap();
            assert!((b - series).abs() <= 1e-6, "{b} vs {series}");
        }
    }

    #[test]
    fn stieltjes_converges_first_order_to_quadrature_bid() {
        let law = standard_law();
        let d = DistortionSpec::wang(0.25);
        let opt = OptionSpec::call(100.0);
        let reference = bid(&opt, &law, &d, &tol()).unwrap();
        let errs: Vec<f64> = [2_500usize, 5_000, 10_000]
            .iter()
            .map(|&n| (stieltjes_bid(&opt, &law, &d, n).unwrap() - reference).abs())
            .collect();
        assert!(
            errs[1] <= 0.75 * errs[0] && errs[2] <= 0.75 * errs[1],
            "errors not contracting: {errs:?}"
        );
        assert!(errs[2] <= 0.35 * errs[0], "overall rate too slow: {errs:?}");
    }

    #[test]
    fn stieltjes_identity_matches_series() {
        let law = standard_law();
        for opt in [OptionSpec::call(100.0), OptionSpec::put(100.0)] {
            let series = series_price_gamma0(&opt, &law).unwrap();
            let q = stieltjes_quote(&opt, &law, &DistortionSpec::Identity, 100_000).unwrap();
            assert!(
                (q.bid - series).abs() <= 1e-4 * 100.0,
                "{} vs {series}",
                q.bid
            );
            assert!(
                (q.ask - series).abs() <= 1e-4 * 100.0,
                "{} vs {series}",
                q.ask
            );
        }
    }

    #[test]
    fn stieltjes_rejects_tiny_grid() {
        let law = standard_law();
        assert!(stieltjes_bid(
            &OptionSpec::call(100.0),
            &law,
            &DistortionSpec::Identity,
            99
        )
        .is_err());
    }

    #[test]
    fn deep_otm_call_bid_is_negligible() {
        let law = standard_law();
        let opt = OptionSpec::call(1e6);
        let b = bid(&opt, &law, &DistortionSpec::wang(0.25), &tol()).unwrap();
        assert!((0.0..=1e-6).contains(&b), "got {b}");
    }

    #[test]
    fn rejects_invalid_option() {
        let law = standard_law();
        assert!(bid(
            &OptionSpec::call(0.0),
            &law,
            &DistortionSpec::Identity,
            &tol()
        )
        .is_err());
    }
}
