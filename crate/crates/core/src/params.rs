//! Model parameters and the explicit well-posedness checks.
//!
//! Two sufficient conditions are exposed: a Novikov-type bound
//! `P0 + sigma0^2/(2 b0) < 1/T` guaranteeing the market's change-of-measure
//! density is a true martingale, and the strategy-admissibility bound
//! `(Pbar + rho sigma0)^2 / (b0 + rho sigma0) < 1/(T K)` with
//! `K = 16 (1 + eps)^2 e^{2 r T}`. Failing either check does not invalidate
//! the closed-form expressions; it means optimality is no longer backed by
//! the verification argument, so the checks attach warnings instead of
//! aborting.

use crate::{Error, Result};

/// Scalar market, insurance and preference parameters.
///
/// `x` mean-reverts at speed `b0` toward `mu0` with volatility `sigma0`; the
/// asset has volatility `sigma1` and its driving noise has correlation `rho`
/// with the signal noise. The filter starts from a Gaussian prior with mean
/// `pi0` and variance `p0`. Claims arrive at rate `lambda`; `eta` is the
/// exponential risk aversion, `epsilon` the slack in the admissibility
/// constant `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Mean-reversion speed of the market price of risk (> 0).
    pub b0: f64,
    /// Long-run mean of the market price of risk.
    pub mu0: f64,
    /// Volatility of the market price of risk (>= 0).
    pub sigma0: f64,
    /// Asset volatility (>= 0; must be > 0 for the investment rule).
    pub sigma1: f64,
    /// Correlation of the signal and asset Brownian drivers, in [-1, 1].
    pub rho: f64,
    /// Riskless rate (>= 0).
    pub r: f64,
    /// Initial filter mean.
    pub pi0: f64,
    /// Initial filter variance (>= 0).
    pub p0: f64,
    /// Horizon T (> 0).
    pub horizon: f64,
    /// Exponential risk aversion (> 0).
    pub eta: f64,
    /// Claim arrival intensity (>= 0; 0 disables the claims book).
    pub lambda: f64,
    /// Initial surplus R0.
    pub initial_surplus: f64,
    /// Initial asset price (> 0).
    pub s0: f64,
    /// Slack parameter in the admissibility constant K (> 0).
    pub epsilon: f64,
}

impl Default for ModelParams {
    /// Baseline configuration of the numerical study: `b0=1`, `mu0=0.4`,
    /// `sigma0=0.18`, `sigma1=0.2`, `rho=0`, `r=0`, `pi0=0.4`, `p0=0.03`,
    /// `T=10`, `eta=0.5`, plus insurance-side defaults `lambda=1`, `R0=1`,
    /// `s0=1`, `epsilon=0.05`.
    fn default() -> Self {
        ModelParams {
            b0: 1.0,
            mu0: 0.4,
            sigma0: 0.18,
            sigma1: 0.2,
            rho: 0.0,
            r: 0.0,
            pi0: 0.4,
            p0: 0.03,
            horizon: 10.0,
            eta: 0.5,
            lambda: 1.0,
            initial_surplus: 1.0,
            s0: 1.0,
            epsilon: 0.05,
        }
    }
}

impl ModelParams {
    /// Checks the structural invariants, returning the first violation.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("b0", self.b0),
            ("mu0", self.mu0),
            ("sigma0", self.sigma0),
            ("sigma1", self.sigma1),
            ("rho", self.rho),
            ("r", self.r),
            ("pi0", self.pi0),
            ("p0", self.p0),
            ("horizon", self.horizon),
            ("eta", self.eta),
            ("lambda", self.lambda),
            ("initial_surplus", self.initial_surplus),
            ("s0", self.s0),
            ("epsilon", self.epsilon),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        let positive = [
            ("b0", self.b0),
            ("horizon", self.horizon),
            ("eta", self.eta),
            ("s0", self.s0),
            ("epsilon", self.epsilon),
        ];
        for (name, v) in positive {
            if v <= 0.0 {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        let nonnegative = [
            ("sigma0", self.sigma0),
            ("sigma1", self.sigma1),
            ("r", self.r),
            ("p0", self.p0),
            ("lambda", self.lambda),
        ];
        for (name, v) in nonnegative {
            if v < 0.0 {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(Error::invalid(
                "rho",
                format!("must lie in [-1, 1], got {}", self.rho),
            ));
        }
        Ok(())
    }

    /// `rho * sigma0`, the cross-covariation rate of signal and asset noise.
    #[inline]
    pub fn rho_sigma0(&self) -> f64 {
        self.rho * self.sigma0
    }

    /// Admissibility constant `K = 16 (1 + epsilon)^2 e^{2 r T}`.
    pub fn admissibility_constant(&self) -> f64 {
        16.0 * (1.0 + self.epsilon).powi(2) * (2.0 * self.r * self.horizon).exp()
    }
}

/// Novikov-type condition `P0 + sigma0^2/(2 b0) < 1/T`.
///
/// Returns `(holds, lhs, rhs)` with both sides evaluated.
pub fn check_novikov(params: &ModelParams) -> (bool, f64, f64) {
    let lhs = params.p0 + params.sigma0 * params.sigma0 / (2.0 * params.b0);
    let rhs = 1.0 / params.horizon;
    (lhs < rhs, lhs, rhs)
}

/// Strategy-admissibility bound `(Pbar + rho sigma0)^2/(b0 + rho sigma0) < 1/(T K)`.
///
/// `p_bar` is the supremum of the conditional variance over the horizon,
/// supplied by the solved variance curve. Errors when `b0 + rho sigma0 <= 0`,
/// where the bound does not apply.
pub fn check_strategy_admissibility(params: &ModelParams, p_bar: f64) -> Result<(bool, f64, f64)> {
    let denom = params.b0 + params.rho_sigma0();
    if denom <= 0.0 {
        return Err(Error::AdmissibilityBoundInapplicable { value: denom });
    }
    let num = p_bar + params.rho_sigma0();
    let lhs = num * num / denom;
    let rhs = 1.0 / (params.horizon * params.admissibility_constant());
    Ok((lhs < rhs, lhs, rhs))
}

/// Outcome of the parameter checks, with human-readable findings.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub novikov_ok: bool,
    pub novikov_lhs: f64,
    pub novikov_rhs: f64,
    pub admissibility_ok: bool,
    pub admissibility_lhs: f64,
    pub admissibility_rhs: f64,
    pub messages: Vec<String>,
}

impl ValidationReport {
    /// Runs both checks. `p_bar` comes from the solved variance curve.
    pub fn build(params: &ModelParams, p_bar: f64) -> ValidationReport {
        let (novikov_ok, novikov_lhs, novikov_rhs) = check_novikov(params);
        let mut messages = Vec::new();
        if novikov_ok {
            messages.push(format!(
                "novikov bound holds: {novikov_lhs:.6} < {novikov_rhs:.6}"
            ));
        } else {
            messages.push(format!(
                "novikov bound FAILS: {novikov_lhs:.6} >= {novikov_rhs:.6}; \
                 the pricing density is not guaranteed to be a martingale"
            ));
        }
        let (admissibility_ok, admissibility_lhs, admissibility_rhs) =
            match check_strategy_admissibility(params, p_bar) {
                Ok((ok, lhs, rhs)) => {
                    if ok {
                        messages.push(format!(
                            "admissibility bound holds: {lhs:.6} < {rhs:.6} (p_bar = {p_bar:.6})"
                        ));
                    } else {
                        messages.push(format!(
                            "admissibility bound FAILS: {lhs:.6} >= {rhs:.6} (p_bar = {p_bar:.6}); \
                             optimality of the candidate strategy is unproven"
                        ));
                    }
                    (ok, lhs, rhs)
                }
                Err(e) => {
                    messages.push(format!("admissibility bound not applicable: {e}"));
                    (false, f64::NAN, f64::NAN)
                }
            };
        ValidationReport {
            novikov_ok,
            novikov_lhs,
            novikov_rhs,
            admissibility_ok,
            admissibility_lhs,
            admissibility_rhs,
            messages,
        }
    }

    pub fn all_ok(&self) -> bool {
        self.novikov_ok && self.admissibility_ok
    }
}
