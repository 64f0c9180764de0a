//! JSON run configuration: parsing, defaulting and the front-end parameter
//! gates that are stricter than the library's.

use serde::Deserialize;
use twoprice::{
    DriftConvention, JumpParams, ModelParams, OptionKind, OptionSpec, ValidationWarning,
    ARBITRAGE_FREE_HURST_MIN,
};

use crate::CliError;

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
pub const DEFAULT_QUAD_TOL: f64 = 1e-8;
pub const MAX_SUBDIVISIONS: usize = 400;

/// On-disk schema. Field names are the contract; anything unknown is an
/// error.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    s0: f64,
    r: f64,
    sigma: f64,
    epsilon: f64,
    hurst: f64,
    maturity: f64,
    lambda: f64,
    mu1: f64,
    sigma1_sq: f64,
    strike: f64,
    kind: String,
    gamma: f64,
    drift: Option<String>,
    tail_tol: Option<f64>,
    quad_tol: Option<f64>,
}

/// A fully-resolved pricing request.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub model: ModelParams,
    pub jumps: JumpParams,
    pub option: OptionSpec,
    pub gamma: f64,
    pub drift: DriftConvention,
    pub tail_tol: f64,
    pub quad_tol: f64,
}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        let file: ConfigFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;

        let kind: OptionKind = file
            .kind
            .parse()
            .map_err(|e| CliError::Input(format!("{e}")))?;
        let drift: DriftConvention = match &file.drift {
            Some(s) => s.parse().map_err(|e| CliError::Input(format!("{e}")))?,
            None => DriftConvention::Compensated,
        };

        Ok(RunConfig {
            model: ModelParams {
                s0: file.s0,
                r: file.r,
                sigma: file.sigma,
                epsilon: file.epsilon,
                hurst: file.hurst,
                maturity: file.maturity,
            },
            jumps: JumpParams {
                lambda: file.lambda,
                mu1: file.mu1,
                sigma1_sq: file.sigma1_sq,
            },
            option: OptionSpec {
                strike: file.strike,
                kind,
            },
            gamma: file.gamma,
            drift,
            tail_tol: file.tail_tol.unwrap_or(DEFAULT_TAIL_TOL),
            quad_tol: file.quad_tol.unwrap_or(DEFAULT_QUAD_TOL),
        })
    }

    /// Hard checks (exit-1 class) plus the warnings the caller should print.
    ///
    /// The hurst gate is stricter here than in the library: outside
    /// (0.75, 1] the driving process admits arbitrage, and the CLI refuses
    /// to price there.
    pub fn validate(&self) -> Result<Vec<String>, CliError> {
        let model_warnings = self
            .model
            .validate()
            .map_err(|e| CliError::Input(e.to_string()))?;
        if model_warnings.contains(&ValidationWarning::HurstOutsideArbitrageFreeRegime) {
            return Err(CliError::Input(format!(
                "hurst {} outside the arbitrage-free regime ({}, 1]",
                self.model.hurst, ARBITRAGE_FREE_HURST_MIN
            )));
        }
        self.jumps
            .validate()
            .map_err(|e| CliError::Input(e.to_string()))?;
        self.option
            .validate()
            .map_err(|e| CliError::Input(e.to_string()))?;
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(CliError::Input(format!(
                "tail_tol must lie in (0,1), got {}",
                self.tail_tol
            )));
        }
        if !(self.quad_tol > 0.0) {
            return Err(CliError::Input(format!(
                "quad_tol must be positive, got {}",
                self.quad_tol
            )));
        }

        let mut warnings = Vec::new();
        if !(0.0..=1.0).contains(&self.gamma) {
            warnings.push("gamma outside [0,1]".to_string());
        }
        Ok(warnings)
    }
}
