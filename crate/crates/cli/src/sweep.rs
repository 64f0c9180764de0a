//! `--vary NAME=LO:HI:STEP` grids and their cartesian product.

use crate::config::RunConfig;
use crate::CliError;

pub const VARYABLE_FIELDS: &[&str] = &[
    "gamma",
    "hurst",
    "sigma",
    "epsilon",
    "lambda",
    "mu1",
    "sigma1_sq",
    "s0",
    "strike",
    "r",
    "maturity",
];

#[derive(Debug, Clone)]
pub struct VarySpec {
    pub name: String,
    pub values: Vec<f64>,
}

pub fn parse_vary(spec: &str) -> Result<VarySpec, CliError> {
    let err = || CliError::Input(format!("--vary expects NAME=LO:HI:STEP, got \"{spec}\""));
    let (name, range) = spec.split_once('=').ok_or_else(err)?;
    let name = name.trim().to_string();
    if !VARYABLE_FIELDS.contains(&name.as_str()) {
        return Err(CliError::Input(format!(
            "unknown sweep field \"{name}\"; expected one of {}",
            VARYABLE_FIELDS.join(", ")
        )));
    }
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(err());
    }
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| err());
    let (lo, hi, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if !(step > 0.0) || hi < lo {
        return Err(CliError::Input(format!(
            "--vary {name}: need step > 0 and hi >= lo, got {lo}:{hi}:{step}"
        )));
    }
    // inclusive upper bound with slack for accumulated rounding
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let values = (0..=n).map(|i| lo + i as f64 * step).collect();
    Ok(VarySpec { name, values })
}

fn with_field(cfg: &RunConfig, name: &str, value: f64) -> RunConfig {
    let mut out = *cfg;
    match name {
        "gamma" => out.gamma = value,
        "hurst" => out.model.hurst = value,
        "sigma" => out.model.sigma = value,
        "epsilon" => out.model.epsilon = value,
        "lambda" => out.jumps.lambda = value,
        "mu1" => out.jumps.mu1 = value,
        "sigma1_sq" => out.jumps.sigma1_sq = value,
        "s0" => out.model.s0 = value,
        "strike" => out.option.strike = value,
        "r" => out.model.r = value,
        "maturity" => out.model.maturity = value,
        other => unreachable!("field {other} rejected at parse time"),
    }
    out
}

/// Cartesian product in row-major order: the first `--vary` flag is the
/// outermost (slowest) loop.
pub fn grid(base: &RunConfig, varies: &[VarySpec]) -> Vec<RunConfig> {
    let mut points = vec![*base];
    for vary in varies {
        let mut next = Vec::with_capacity(points.len() * vary.values.len());
        for point in &points {
            for &v in &vary.values {
                next.push(with_field(point, &vary.name, v));
            }
        }
        points = next;
    }
    points
}
