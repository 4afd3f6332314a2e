//! The reinsurance half of the split optimization: the objective
//! `H^R(t, u) = (q(u) - c) eta e^{r(T-t)} + lambda (E[e^{eta u Z e^{r(T-t)}}] - 1)`,
//! its minimizer `u*(t)`, the cost threshold `alpha_bar(t)`, and the value
//! multiplier `h(t) = exp(int_t^T H^R(s, u*(s)) ds)` with `h(T) = 1`.
//!
//! Premium income reduces the objective (it enters through the wealth drift
//! against the utility exponent), claims raise it. Under the expected-value
//! principle `H^R(t, .)` is strictly convex and the minimizer is
//!
//! ```text
//! u*(t) = ubar(t)  if alpha_r < alpha_bar(t),   else 1,
//! alpha_bar(t) = E[Z e^{eta Z e^{r(T-t)}}]/E[Z] - 1,
//! ```
//!
//! where `ubar` solves `E[Z e^{eta u Z e^{r(T-t)}}] = (1 + alpha_r) E[Z]`:
//! expensive reinsurance (loading above the threshold) makes full retention
//! optimal; otherwise an interior level is retained.

use crate::claims::ClaimSizeModel;
use crate::numeric::{bisect_increasing, golden_min, hermite};
use crate::params::ModelParams;
use crate::premium::PremiumPrinciple;

/// Reinsurance objective `H^R(t, u)` for `u` in `[0, 1]`.
pub fn hr_objective(
    t: f64,
    u: f64,
    params: &ModelParams,
    model: &ClaimSizeModel,
    pp: &PremiumPrinciple,
) -> f64 {
    assert!((0.0..=1.0).contains(&u), "retention {u} outside [0, 1]");
    let growth = (params.r * (params.horizon - t)).exp();
    let c = pp.insurance_rate(model, params.lambda);
    let q = pp.reinsurance_rate_unchecked(model, params.lambda, u);
    (q - c) * params.eta * growth + params.lambda * (model.mgf(params.eta * u * growth) - 1.0)
}

/// Cost threshold `alpha_bar(t)`; reinsurance loadings above it make full
/// retention optimal. Decreasing in `t` when `r > 0`, constant when `r = 0`.
pub fn alpha_bar(t: f64, params: &ModelParams, model: &ClaimSizeModel) -> f64 {
    let growth = (params.r * (params.horizon - t)).exp();
    model.exp_tilted_mean(params.eta * growth) / model.mean() - 1.0
}

/// Optimal retention under the expected-value principle: the threshold rule
/// with the interior root found by bisection (absolute tolerance 1e-10).
pub fn optimal_retention_evp(
    t: f64,
    params: &ModelParams,
    model: &ClaimSizeModel,
    pp: &PremiumPrinciple,
) -> f64 {
    let alpha_r = match pp {
        PremiumPrinciple::ExpectedValue { alpha_r, .. } => *alpha_r,
        PremiumPrinciple::Variance { .. } => {
            panic!("optimal_retention_evp requires the expected-value principle")
        }
    };
    if alpha_r >= alpha_bar(t, params, model) {
        return 1.0;
    }
    let growth = (params.r * (params.horizon - t)).exp();
    let target = (1.0 + alpha_r) * model.mean();
    // E[Z e^{eta u Z e^{r tau}}] is strictly increasing in u with value
    // E[Z] < target at u = 0 and (1 + alpha_bar) E[Z] > target at u = 1.
    bisect_increasing(
        |u| model.exp_tilted_mean(params.eta * u * growth) - target,
        0.0,
        1.0,
        1e-10,
    )
}

/// Optimal retention for any continuous premium principle: a 1001-point grid
/// scan followed by golden-section refinement. Ties resolve to the smallest
/// minimizer so outputs are reproducible.
pub fn optimal_retention_generic(
    t: f64,
    params: &ModelParams,
    model: &ClaimSizeModel,
    pp: &PremiumPrinciple,
) -> f64 {
    let f = |u: f64| hr_objective(t, u, params, model, pp);
    const GRID: usize = 1000;
    let mut best_u = 0.0;
    let mut best_v = f(0.0);
    for i in 1..=GRID {
        let u = i as f64 / GRID as f64;
        let v = f(u);
        if v < best_v {
            best_v = v;
            best_u = u;
        }
    }
    let lo = (best_u - 1.0 / GRID as f64).max(0.0);
    let hi = (best_u + 1.0 / GRID as f64).min(1.0);
    let (u_ref, v_ref) = golden_min(f, lo, hi, 1e-10);
    if v_ref < best_v {
        u_ref
    } else {
        best_u
    }
}

/// Dispatches on the premium principle: closed-form-backed bisection under
/// EVP, grid-plus-golden search otherwise.
pub fn optimal_retention(
    t: f64,
    params: &ModelParams,
    model: &ClaimSizeModel,
    pp: &PremiumPrinciple,
) -> f64 {
    match pp {
        PremiumPrinciple::ExpectedValue { .. } => optimal_retention_evp(t, params, model, pp),
        PremiumPrinciple::Variance { .. } => optimal_retention_generic(t, params, model, pp),
    }
}

/// The solved retention schedule: `u*`, the threshold, and the multiplier
/// `h` on a uniform grid, with `h(T) = 1`.
#[derive(Debug, Clone)]
pub struct RetentionSchedule {
    grid: Vec<f64>,
    u_star: Vec<f64>,
    alpha_bar: Vec<f64>,
    h: Vec<f64>,
    /// `H^R(t_i, u*(t_i))`, kept for interpolation of `h`.
    hr: Vec<f64>,
    dt: f64,
    horizon: f64,
}

impl RetentionSchedule {
    /// Minimizes `H^R` along the grid and integrates it backward by Simpson
    /// quadrature (midpoint values included), so `h(T) = 1` exactly.
    pub fn solve(
        params: &ModelParams,
        model: &ClaimSizeModel,
        pp: &PremiumPrinciple,
        n_steps: usize,
    ) -> RetentionSchedule {
        assert!(n_steps >= 2, "schedule needs a real grid");
        let dt = params.horizon / n_steps as f64;
        let grid: Vec<f64> = (0..=n_steps).map(|i| i as f64 * dt).collect();
        let u_star: Vec<f64> = grid
            .iter()
            .map(|&t| optimal_retention(t, params, model, pp))
            .collect();
        let ab: Vec<f64> = grid
            .iter()
            .map(|&t| alpha_bar(t, params, model))
            .collect();
        let hr: Vec<f64> = grid
            .iter()
            .zip(&u_star)
            .map(|(&t, &u)| hr_objective(t, u, params, model, pp))
            .collect();
        let hr_mid: Vec<f64> = (0..n_steps)
            .map(|i| {
                let t = (i as f64 + 0.5) * dt;
                let u = optimal_retention(t, params, model, pp);
                hr_objective(t, u, params, model, pp)
            })
            .collect();
        let mut h = vec![1.0; n_steps + 1];
        let mut integral = 0.0;
        for i in (0..n_steps).rev() {
            integral += dt / 6.0 * (hr[i] + 4.0 * hr_mid[i] + hr[i + 1]);
            h[i] = integral.exp();
        }
        RetentionSchedule {
            grid,
            u_star,
            alpha_bar: ab,
            h,
            hr,
            dt,
            horizon: params.horizon,
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn u_star(&self) -> &[f64] {
        &self.u_star
    }

    pub fn alpha_bar(&self) -> &[f64] {
        &self.alpha_bar
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// `h(t)` between nodes, Hermite-interpolated with the exact derivative
    /// `h' = -H^R(t, u*(t)) h`.
    pub fn h_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.horizon);
        let i = ((t / self.dt) as usize).min(self.grid.len() - 2);
        hermite(
            t,
            self.grid[i],
            self.dt,
            self.h[i],
            self.h[i + 1],
            -self.hr[i] * self.h[i],
            -self.hr[i + 1] * self.h[i + 1],
        )
    }
}
