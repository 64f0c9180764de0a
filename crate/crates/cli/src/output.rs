//! Quote serialization: one-line JSON objects and the fixed-schema CSV with
//! reals rendered to 10 significant digits.

use std::io::{self, Write};

use serde::Serialize;
use twoprice::Quote;

use crate::config::RunConfig;

pub const CSV_HEADER: &str =
    "gamma,hurst,sigma,epsilon,lambda,mu1,sigma1_sq,s0,strike,r,maturity,drift,kind,bid,ask,mid,spread";

/// One quote with its full parameter echo; field order matches the CSV
/// columns and the JSON key order.
#[derive(Debug, Clone, Serialize)]
pub struct QuoteRow {
    pub gamma: f64,
    pub hurst: f64,
    pub sigma: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub mu1: f64,
    pub sigma1_sq: f64,
    pub s0: f64,
    pub strike: f64,
    pub r: f64,
    pub maturity: f64,
    pub drift: String,
    pub kind: String,
    pub bid: f64,
    pub ask: f64,
    pub mid: f64,
    pub spread: f64,
}

impl QuoteRow {
    pub fn new(cfg: &RunConfig, quote: &Quote) -> Self {
        QuoteRow {
            gamma: cfg.gamma,
            hurst: cfg.model.hurst,
            sigma: cfg.model.sigma,
            epsilon: cfg.model.epsilon,
            lambda: cfg.jumps.lambda,
            mu1: cfg.jumps.mu1,
            sigma1_sq: cfg.jumps.sigma1_sq,
            s0: cfg.model.s0,
            strike: cfg.option.strike,
            r: cfg.model.r,
            maturity: cfg.model.maturity,
            drift: cfg.drift.to_string(),
            kind: cfg.option.kind.to_string(),
            bid: quote.bid,
            ask: quote.ask,
            mid: quote.mid,
            spread: quote.spread,
        }
    }
}

/// Render to 10 significant digits in the style of C's %.10g: positional
/// for exponents in [-4, 10), scientific outside, trailing zeros trimmed.
pub fn fmt_g10(x: f64) -> String {
    const SIG: usize = 10;
    if x == 0.0 {
        return "0".to_string();
    }
    let formatted = format!("{:.*e}", SIG - 1, x);
    let (mantissa, exp) = formatted
        .split_once('e')
        .expect("{:e} always contains an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    debug_assert_eq!(digits.len(), SIG);

    let trim = |s: &str| {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t.is_empty() {
            "0".to_string()
        } else {
            t.to_string()
        }
    };

    if exp >= -4 && exp < SIG as i32 {
        let body = if exp >= 0 {
            let split = (exp + 1) as usize;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        format!("{sign}{}", trim(&body))
    } else {
        let body = format!("{}.{}", &digits[..1], &digits[1..]);
        format!("{sign}{}e{}", trim(&body), exp)
    }
}

pub fn csv_line(row: &QuoteRow) -> String {
    let f = fmt_g10;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        f(row.gamma),
        f(row.hurst),
        f(row.sigma),
        f(row.epsilon),
        f(row.lambda),
        f(row.mu1),
        f(row.sigma1_sq),
        f(row.s0),
        f(row.strike),
        f(row.r),
        f(row.maturity),
        row.drift,
        row.kind,
        f(row.bid),
        f(row.ask),
        f(row.mid),
        f(row.spread),
    )
}

/// Header plus one line per row, LF endings.
pub fn write_csv(rows: &[QuoteRow], out: &mut impl Write) -> io::Result<()> {
    out.write_all(CSV_HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for row in rows {
        out.write_all(csv_line(row).as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
