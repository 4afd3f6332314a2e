//! Insurance and reinsurance premium rates under the expected-value and
//! variance principles.
//!
//! Premiums are rates per unit time, matching the surplus dynamics
//! `dR = (c - q(u)) dt - dC^u`. Under the expected-value principle
//! `c = (1 + alpha_i) E[Z] lambda` and `q(u) = (1 + alpha_r)(1 - u) E[Z] lambda`;
//! under the variance principle the loading applies to `E[Z^2] lambda` with
//! `q` quadratic and convex in `1 - u`.

use crate::claims::ClaimSizeModel;
use crate::{Error, Result};

/// Premium calculation principle with insurer/reinsurer safety loadings.
/// Reinsurance must be more expensive than first-line insurance:
/// `alpha_r > alpha_i > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PremiumPrinciple {
    /// Expected-value principle: loading on the mean loss rate.
    ExpectedValue { alpha_i: f64, alpha_r: f64 },
    /// Variance principle: loading on the second-moment loss rate.
    Variance { alpha_i: f64, alpha_r: f64 },
}

impl PremiumPrinciple {
    pub fn expected_value(alpha_i: f64, alpha_r: f64) -> Result<Self> {
        Self::check(alpha_i, alpha_r)?;
        Ok(PremiumPrinciple::ExpectedValue { alpha_i, alpha_r })
    }

    pub fn variance(alpha_i: f64, alpha_r: f64) -> Result<Self> {
        Self::check(alpha_i, alpha_r)?;
        Ok(PremiumPrinciple::Variance { alpha_i, alpha_r })
    }

    fn check(alpha_i: f64, alpha_r: f64) -> Result<()> {
        if !(alpha_i > 0.0 && alpha_i.is_finite()) {
            return Err(Error::invalid("alpha_i", format!("must be > 0, got {alpha_i}")));
        }
        if !(alpha_r > alpha_i && alpha_r.is_finite()) {
            return Err(Error::invalid(
                "alpha_r",
                format!("must exceed alpha_i = {alpha_i}, got {alpha_r}"),
            ));
        }
        Ok(())
    }

    pub fn alpha_i(&self) -> f64 {
        match *self {
            PremiumPrinciple::ExpectedValue { alpha_i, .. } => alpha_i,
            PremiumPrinciple::Variance { alpha_i, .. } => alpha_i,
        }
    }

    pub fn alpha_r(&self) -> f64 {
        match *self {
            PremiumPrinciple::ExpectedValue { alpha_r, .. } => alpha_r,
            PremiumPrinciple::Variance { alpha_r, .. } => alpha_r,
        }
    }

    /// Insurance premium rate `c`.
    pub fn insurance_rate(&self, model: &ClaimSizeModel, lambda: f64) -> f64 {
        match *self {
            PremiumPrinciple::ExpectedValue { alpha_i, .. } => {
                (1.0 + alpha_i) * model.mean() * lambda
            }
            PremiumPrinciple::Variance { alpha_i, .. } => {
                model.mean() * lambda + alpha_i * model.second_moment() * lambda
            }
        }
    }

    /// Reinsurance premium rate `q(u)` for retention `u` in `[0, 1]`.
    /// `q(1) = 0` (full retention buys no reinsurance).
    pub fn reinsurance_rate(&self, model: &ClaimSizeModel, lambda: f64, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::RetentionOutOfRange(u));
        }
        Ok(self.reinsurance_rate_unchecked(model, lambda, u))
    }

    #[inline]
    pub(crate) fn reinsurance_rate_unchecked(
        &self,
        model: &ClaimSizeModel,
        lambda: f64,
        u: f64,
    ) -> f64 {
        let ceded = 1.0 - u;
        match *self {
            PremiumPrinciple::ExpectedValue { alpha_r, .. } => {
                (1.0 + alpha_r) * ceded * model.mean() * lambda
            }
            PremiumPrinciple::Variance { alpha_r, .. } => {
                ceded * model.mean() * lambda + alpha_r * ceded * ceded * model.second_moment() * lambda
            }
        }
    }
}
