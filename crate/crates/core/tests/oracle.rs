// Cross-route and Monte Carlo oracle checks that span several modules.
// The samplers used as oracles here are written locally so they stay
// independent of the library's own Monte Carlo machinery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use twoprice::*;

fn model_grid() -> Vec<(ModelParams, JumpParams)> {
    // five mixed parameter sets, spanning moneyness of the jump leg,
    // Hurst index, maturity and intensity
    let mk = |sigma, epsilon, hurst, maturity, lambda, mu1, sigma1_sq| {
        (
            ModelParams {
                s0: 100.0,
                r: 0.05,
                sigma,
                epsilon,
                hurst,
                maturity,
            },
            JumpParams {
                lambda,
                mu1,
                sigma1_sq,
            },
        )
    };
    vec![
        mk(0.2, 0.1, 0.8, 1.0, 1.0, -0.05, 0.02),
        mk(0.15, 0.2, 0.9, 2.0, 0.5, 0.1, 0.05),
        mk(0.3, 0.05, 0.76, 0.5, 2.0, -0.1, 0.01),
        mk(0.1, 0.1, 0.95, 1.5, 3.0, 0.02, 0.03),
        mk(0.25, 0.15, 0.85, 0.25, 4.0, -0.02, 0.04),
    ]
}

#[test]
fn series_route_matches_quadrature_on_mixed_sets() {
    let tol = Tolerance::new(1e-8, 400).unwrap();
    for (model, jumps) in model_grid() {
        let law = build_law(&model, &jumps, DriftConvention::Compensated, 1e-12).unwrap();
        for opt in [
            OptionSpec::call(90.0),
            OptionSpec::call(110.0),
            OptionSpec::put(100.0),
        ] {
            let series = series_price_gamma0(&opt, &law).unwrap();
            let quad = bid(&opt, &law, &DistortionSpec::Identity, &tol).unwrap();
            assert!(
                (series - quad).abs() <= 1e-6,
                "sigma={} lambda={} {:?}: series {series} vs quadrature {quad}",
                model.sigma,
                jumps.lambda,
                opt
            );
        }
    }
}

#[test]
fn quantile_matches_large_sample_order_statistic() {
    let model = ModelParams {
        s0: 100.0,
        r: 0.05,
        sigma: 0.2,
        epsilon: 0.1,
        hurst: 0.8,
        maturity: 1.0,
    };
    let jumps = JumpParams {
        lambda: 1.0,
        mu1: -0.05,
        sigma1_sq: 0.02,
    };
    let law = build_law(&model, &jumps, DriftConvention::Compensated, 1e-12).unwrap();

    let p = 0.999;
    let n = 10_000_000usize;
    let mut samples = sample_terminal(
        &model,
        &jumps,
        DriftConvention::Compensated,
        &McConfig::new(n, 42),
    )
    .unwrap();
    let idx = (n as f64 * p) as usize;
    let (_, &mut emp_q, _) = samples.select_nth_unstable_by(idx, f64::total_cmp);

    let q = law.quantile(p).unwrap();
    // asymptotic error of the order statistic: sqrt(p(1-p)/n) / density(q)
    let density: f64 = (0..=law.n_max())
        .map(|k| {
            let z = ((q / 100.0).ln() - law.log_means()[k]) / law.log_sds()[k];
            law.weights()[k] * (-0.5 * z * z).exp()
                / ((2.0 * std::f64::consts::PI).sqrt() * q * law.log_sds()[k])
        })
        .sum();
    let se = (p * (1.0 - p) / n as f64).sqrt() / density;
    assert!(
        (q - emp_q).abs() <= 3.0 * se,
        "quantile {q} vs empirical {emp_q} (se {se})"
    );
}

#[test]
fn jump_factor_moments_match_independent_product_sampler() {
    // E and Var of prod J_i over 10^6 draws, sampled with a local
    // Poisson-times-lognormal generator that shares nothing with mc::
    let jumps = JumpParams {
        lambda: 1.0,
        mu1: 0.1,
        sigma1_sq: 0.04,
    };
    let t = 2.0;
    let (mean, variance) = jump_factor_moments(&jumps, t);

    let n = 1_000_000usize;
    let n_batches = 20usize;
    let mut rng = ChaCha12Rng::seed_from_u64(777);
    let rate = jumps.lambda * t;
    let sd1 = jumps.sigma1_sq.sqrt();
    let mut batch_means = Vec::with_capacity(n_batches);
    let mut batch_vars = Vec::with_capacity(n_batches);
    for _ in 0..n_batches {
        let m = n / n_batches;
        let mut acc = 0.0;
        let mut acc_sq = 0.0;
        for _ in 0..m {
            // naive Poisson by multiplying uniforms (Knuth), nothing shared
            // with the library's CDF-inversion sampler
            let threshold = (-rate).exp();
            let mut k = 0usize;
            let mut prod_u: f64 = rng.random();
            while prod_u > threshold {
                k += 1;
                prod_u *= rng.random::<f64>();
            }
            let mut j = 1.0f64;
            for _ in 0..k {
                let z: f64 = rng.sample(StandardNormal);
                j *= (jumps.mu1 + sd1 * z).exp();
            }
            acc += j;
            acc_sq += j * j;
        }
        let bm = acc / m as f64;
        batch_means.push(bm);
        batch_vars.push(acc_sq / m as f64 - bm * bm);
    }
    let se = |xs: &[f64]| {
        let b = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / b;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (b - 1.0);
        (m, (v / b).sqrt())
    };
    let (emp_mean, se_mean) = se(&batch_means);
    let (emp_var, se_var) = se(&batch_vars);
    assert!(
        (emp_mean - mean).abs() <= 3.0 * se_mean,
        "mean {mean} vs {emp_mean} (se {se_mean})"
    );
    assert!(
        (emp_var - variance).abs() <= 3.0 * se_var,
        "variance {variance} vs {emp_var} (se {se_var})"
    );
}

#[test]
fn distorted_quotes_match_mc_on_an_off_grid_set() {
    // an extra parameter point beyond the acceptance set
    let model = ModelParams {
        s0: 50.0,
        r: 0.02,
        sigma: 0.25,
        epsilon: 0.12,
        hurst: 0.9,
        maturity: 0.75,
    };
    let jumps = JumpParams {
        lambda: 2.0,
        mu1: 0.03,
        sigma1_sq: 0.015,
    };
    let law = build_law(&model, &jumps, DriftConvention::Compensated, 1e-12).unwrap();
    let tol = Tolerance::new(1e-8, 400).unwrap();
    let d = DistortionSpec::wang(0.4);
    let opt = OptionSpec::put(55.0);

    let q_bid = bid(&opt, &law, &d, &tol).unwrap();
    let q_ask = ask(&opt, &law, &d, &tol).unwrap();
    let mc = mc_quote(
        &opt,
        &model,
        &jumps,
        DriftConvention::Compensated,
        &d,
        &McConfig::new(1_000_000, 9),
    )
    .unwrap();
    assert!(
        (q_bid - mc.bid).abs() <= 3.0 * mc.se_bid,
        "bid {q_bid} vs mc {} (se {})",
        mc.bid,
        mc.se_bid
    );
    assert!(
        (q_ask - mc.ask).abs() <= 3.0 * mc.se_ask,
        "ask {q_ask} vs mc {} (se {})",
        mc.ask,
        mc.se_ask
    );
}
