//! Optimal investment and proportional reinsurance for an insurer that cannot
//! observe the market price of risk directly.
//!
//! The market price of risk `X` follows a mean-reverting diffusion
//! `dX = b0 (mu0 - X) dt + sigma0 dW0` and is estimated from asset prices
//! through a Kalman-Bucy filter: the conditional mean `Pi` solves a linear
//! SDE driven by the innovation process and the conditional variance `P`
//! solves a deterministic Riccati equation. On top of the filtered market the
//! insurer runs a Cramer-Lundberg claims book with proportional reinsurance
//! and maximizes expected exponential utility of terminal wealth.
//!
//! The crate provides the closed-form pieces of the solution (retention
//! level, investment rule, value functions, indifference value of the missing
//! information) together with a reproducible Monte Carlo engine used both for
//! figure data and as an independent check of the quadrature-based formulas.
//!
//! Parallelism: path simulation is data-parallel over paths and runs on rayon
//! when the `parallel` feature (default) is enabled. Results are bitwise
//! identical across thread counts and with the sequential fallback because
//! every path owns a counter-based RNG stream and reductions happen in fixed
//! chunk order.

pub mod claims;
pub mod exec;
pub mod filter;
pub mod investment;
pub mod mc;
pub mod numeric;
pub mod params;
pub mod premium;
pub mod reinsurance;
pub mod rng;
pub mod valuation;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
