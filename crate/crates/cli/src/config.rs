//! Run configuration: TOML primary, JSON accepted. Unknown keys are
//! rejected; every field has a default so partial files work.

use std::path::Path;

use serde::{Deserialize, Serialize};

use reinvest::claims::ClaimSizeModel;
use reinvest::params::ModelParams;
use reinvest::premium::PremiumPrinciple;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelBlock,
    pub claims: ClaimsBlock,
    pub premium: PremiumBlock,
    pub numerics: NumericsBlock,
    pub output: OutputBlock,
}

/// Market, filter and preference parameters.
#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ModelBlock {
    pub b0: f64,
    pub mu0: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub rho: f64,
    pub r: f64,
    pub pi0: f64,
    pub p0: f64,
    pub horizon: f64,
    pub eta: f64,
    pub lambda: f64,
    pub initial_surplus: f64,
    pub s0: f64,
    pub epsilon: f64,
}

impl Default for ModelBlock {
    fn default() -> Self {
        let p = ModelParams::default();
        ModelBlock {
            b0: p.b0,
            mu0: p.mu0,
            sigma0: p.sigma0,
            sigma1: p.sigma1,
            rho: p.rho,
            r: p.r,
            pi0: p.pi0,
            p0: p.p0,
            horizon: p.horizon,
            eta: p.eta,
            lambda: p.lambda,
            initial_surplus: p.initial_surplus,
            s0: p.s0,
            epsilon: p.epsilon,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClaimsBlock {
    Deterministic { size: f64 },
    Uniform { max: f64 },
    TruncatedExponential { rate: f64, max: f64 },
}

impl Default for ClaimsBlock {
    fn default() -> Self {
        ClaimsBlock::Uniform { max: 2.0 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct PremiumBlock {
    /// `evp` or `vp`.
    pub principle: String,
    pub alpha_i: f64,
    pub alpha_r: f64,
}

impl Default for PremiumBlock {
    fn default() -> Self {
        PremiumBlock {
            principle: "evp".into(),
            alpha_i: 0.2,
            alpha_r: 0.3,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsBlock {
    pub n_steps: usize,
    pub n_paths: usize,
    pub seed: u64,
}

impl Default for NumericsBlock {
    fn default() -> Self {
        NumericsBlock {
            n_steps: 2_000,
            n_paths: 10_000,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: String,
    /// Subset of {"csv", "json"}.
    pub formats: Vec<String>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: "out".into(),
            formats: vec!["csv".into()],
        }
    }
}

impl RunConfig {
    /// Loads a config file; `.json` parses as JSON, anything else as TOML.
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Field-level validation of every block.
    pub fn validate(&self) -> Result<(), CliError> {
        self.model_params()?;
        self.claim_model()?;
        self.premium_principle()?;
        if self.numerics.n_steps < 200 {
            return Err(CliError::Config(format!(
                "numerics.n_steps: must be at least 200, got {}",
                self.numerics.n_steps
            )));
        }
        if self.numerics.n_paths == 0 {
            return Err(CliError::Config("numerics.n_paths: must be positive".into()));
        }
        for f in &self.output.formats {
            if f != "csv" && f != "json" {
                return Err(CliError::Config(format!(
                    "output.formats: expected \"csv\" or \"json\", got {f:?}"
                )));
            }
        }
        if self.output.formats.is_empty() {
            return Err(CliError::Config("output.formats: at least one format".into()));
        }
        Ok(())
    }

    pub fn model_params(&self) -> Result<ModelParams, CliError> {
        let m = &self.model;
        let params = ModelParams {
            b0: m.b0,
            mu0: m.mu0,
            sigma0: m.sigma0,
            sigma1: m.sigma1,
            rho: m.rho,
            r: m.r,
            pi0: m.pi0,
            p0: m.p0,
            horizon: m.horizon,
            eta: m.eta,
            lambda: m.lambda,
            initial_surplus: m.initial_surplus,
            s0: m.s0,
            epsilon: m.epsilon,
        };
        params
            .validate()
            .map_err(|e| CliError::Config(format!("model.{e}")))?;
        Ok(params)
    }

    pub fn claim_model(&self) -> Result<ClaimSizeModel, CliError> {
        let model = match self.claims {
            ClaimsBlock::Deterministic { size } => ClaimSizeModel::deterministic(size),
            ClaimsBlock::Uniform { max } => ClaimSizeModel::uniform(max),
            ClaimsBlock::TruncatedExponential { rate, max } => {
                ClaimSizeModel::truncated_exponential(rate, max)
            }
        };
        model.map_err(|e| CliError::Config(format!("claims.{e}")))
    }

    pub fn premium_principle(&self) -> Result<PremiumPrinciple, CliError> {
        let p = &self.premium;
        let pp = match p.principle.as_str() {
            "evp" => PremiumPrinciple::expected_value(p.alpha_i, p.alpha_r),
            "vp" => PremiumPrinciple::variance(p.alpha_i, p.alpha_r),
            other => {
                return Err(CliError::Config(format!(
                    "premium.principle: expected \"evp\" or \"vp\", got {other:?}"
                )))
            }
        };
        pp.map_err(|e| CliError::Config(format!("premium.{e}")))
    }

    /// One-line description of the claims block.
    pub fn claims_label(&self) -> String {
        match self.claims {
            ClaimsBlock::Deterministic { size } => format!("deterministic(size={size})"),
            ClaimsBlock::Uniform { max } => format!("uniform(0,{max})"),
            ClaimsBlock::TruncatedExponential { rate, max } => {
                format!("truncated_exponential(rate={rate},max={max})")
            }
        }
    }
}
