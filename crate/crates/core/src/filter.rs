//! Kalman-Bucy machinery: the deterministic Riccati equation for the
//! conditional variance, its cumulative integral, and the conditional-mean
//! update along simulated paths.
//!
//! The conditional variance solves
//! `dP/dt = sigma0^2 - 2 b0 P - (P + rho sigma0)^2`
//! and the filter mean follows
//! `dPi = b0 (mu0 - Pi) dt + (P_t + rho sigma0) dI`
//! where `dI = dW1 + (X - Pi) dt` is the innovation increment.

use crate::numeric::hermite;
use crate::params::ModelParams;
use crate::{Error, Result};

/// Right-hand side of the variance equation.
#[inline]
pub fn riccati_rhs(params: &ModelParams, p: f64) -> f64 {
    let s = p + params.rho_sigma0();
    params.sigma0 * params.sigma0 - 2.0 * params.b0 * p - s * s
}

/// Stationary point of the variance flow: the larger root of
/// `sigma0^2 - 2 b0 P - (P + rho sigma0)^2 = 0`, toward which the solution
/// converges.
pub fn stationary_variance(params: &ModelParams) -> Result<f64> {
    let s = params.b0 + params.rho_sigma0();
    let disc = s * s + params.sigma0 * params.sigma0 * (1.0 - params.rho * params.rho);
    if disc < 0.0 {
        return Err(Error::NoStationaryRoot);
    }
    Ok(-s + disc.sqrt())
}

/// The solved conditional-variance curve on a uniform grid, together with the
/// cumulative integral `A(t) = int_0^t (b0 + P_l + rho sigma0) dl`.
///
/// Immutable after construction; shared read-only across simulation threads.
#[derive(Debug, Clone)]
pub struct VarianceCurve {
    grid: Vec<f64>,
    p: Vec<f64>,
    dp: Vec<f64>,
    a_cum: Vec<f64>,
    p_bar: f64,
    dt: f64,
    horizon: f64,
    b0: f64,
    rho_sigma0: f64,
}

impl VarianceCurve {
    /// Grid points `0 = t_0 < ... < t_N = T`.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Values `P_{t_i}`.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Values `A(t_i)`.
    pub fn a_cum(&self) -> &[f64] {
        &self.a_cum
    }

    /// `sup_t P_t` over the solved horizon.
    pub fn p_bar(&self) -> f64 {
        self.p_bar
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.grid.len() - 1
    }

    /// `b0 + P_{t_i} + rho sigma0`, the integrand of `A`.
    #[inline]
    pub fn a_rate(&self, i: usize) -> f64 {
        self.b0 + self.p[i] + self.rho_sigma0
    }

    #[inline]
    fn locate(&self, t: f64) -> (usize, f64) {
        debug_assert!(
            (-1e-9..=self.horizon + 1e-9).contains(&t),
            "t = {t} outside [0, {}]",
            self.horizon
        );
        let clamped = t.clamp(0.0, self.horizon);
        let i = ((clamped / self.dt) as usize).min(self.grid.len() - 2);
        (i, clamped)
    }

    /// `P_t` at arbitrary `t` by cubic Hermite interpolation (the node
    /// derivatives are exact from the differential equation).
    pub fn p_at(&self, t: f64) -> f64 {
        let (i, t) = self.locate(t);
        hermite(
            t,
            self.grid[i],
            self.dt,
            self.p[i],
            self.p[i + 1],
            self.dp[i],
            self.dp[i + 1],
        )
    }

    /// `A(t)` at arbitrary `t` by cubic Hermite interpolation
    /// (`A'(t_i) = b0 + P_i + rho sigma0` is exact).
    pub fn a_at(&self, t: f64) -> f64 {
        let (i, t) = self.locate(t);
        hermite(
            t,
            self.grid[i],
            self.dt,
            self.a_cum[i],
            self.a_cum[i + 1],
            self.a_rate(i),
            self.a_rate(i + 1),
        )
    }

    /// Curve with the variance pinned to zero everywhere, keeping the same
    /// grid and the same `a` rate `b0 + rho sigma0`. Used to compare the
    /// partial-information formulas with their full-information counterparts.
    pub fn pinned_zero(params: &ModelParams, n_steps: usize) -> VarianceCurve {
        assert!(n_steps >= 100, "n_steps must be at least 100");
        let horizon = params.horizon;
        let dt = horizon / n_steps as f64;
        let a = params.b0 + params.rho_sigma0();
        let grid: Vec<f64> = (0..=n_steps).map(|i| i as f64 * dt).collect();
        let a_cum = grid.iter().map(|&t| a * t).collect();
        VarianceCurve {
            p: vec![0.0; n_steps + 1],
            dp: vec![0.0; n_steps + 1],
            a_cum,
            grid,
            p_bar: 0.0,
            dt,
            horizon,
            b0: params.b0,
            rho_sigma0: params.rho_sigma0(),
        }
    }
}

/// Solves the variance equation with classical fourth-order steps on a
/// uniform grid of `n_steps` intervals (internally at half steps), and builds
/// `A` by Simpson quadrature of `b0 + P + rho sigma0` on the same grid.
///
/// The variance is clamped at zero from below; a negative excursion can only
/// occur at coarse steps and nonnegativity is structural.
pub fn solve_riccati(params: &ModelParams, n_steps: usize) -> VarianceCurve {
    assert!(n_steps >= 100, "n_steps must be at least 100");
    let horizon = params.horizon;
    let dt = horizon / n_steps as f64;
    let hf = 0.5 * dt;

    let rhs = |p: f64| riccati_rhs(params, p);
    let rk4 = |p: f64, h: f64| -> f64 {
        let k1 = rhs(p);
        let k2 = rhs(p + 0.5 * h * k1);
        let k3 = rhs(p + 0.5 * h * k2);
        let k4 = rhs(p + h * k3);
        (p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).max(0.0)
    };

    let mut grid = Vec::with_capacity(n_steps + 1);
    let mut p = Vec::with_capacity(n_steps + 1);
    let mut a_cum = Vec::with_capacity(n_steps + 1);
    let mut p_bar = params.p0;

    let rs0 = params.rho_sigma0();
    let mut p_node = params.p0;
    let mut a = 0.0;
    grid.push(0.0);
    p.push(p_node);
    a_cum.push(0.0);
    for i in 0..n_steps {
        let p_mid = rk4(p_node, hf);
        let p_next = rk4(p_mid, hf);
        // Simpson for A over [t_i, t_{i+1}] using the half-step value
        let f0 = params.b0 + p_node + rs0;
        let fm = params.b0 + p_mid + rs0;
        let f1 = params.b0 + p_next + rs0;
        a += dt / 6.0 * (f0 + 4.0 * fm + f1);
        p_bar = p_bar.max(p_mid).max(p_next);
        p_node = p_next;
        grid.push((i + 1) as f64 * dt);
        p.push(p_node);
        a_cum.push(a);
    }
    let dp = p.iter().map(|&v| rhs(v)).collect();

    VarianceCurve {
        grid,
        p,
        dp,
        a_cum,
        p_bar,
        dt,
        horizon,
        b0: params.b0,
        rho_sigma0: rs0,
    }
}

/// Filter state along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterState {
    /// Conditional mean of the market price of risk.
    pub pi: f64,
    /// Conditional variance (from the curve).
    pub p: f64,
    pub t: f64,
}

/// Innovation increment `dI = dW1 + (X - Pi) dt`.
#[inline]
pub fn innovation_increment(x: f64, pi: f64, dw1: f64, dt: f64) -> f64 {
    dw1 + (x - pi) * dt
}

/// One Euler-Maruyama update of the conditional mean driven by an innovation
/// increment; the variance advances by curve lookup. `dt` must equal the
/// curve's grid spacing and the state must sit on the grid.
pub fn propagate_mean(
    params: &ModelParams,
    curve: &VarianceCurve,
    state: FilterState,
    dt: f64,
    di: f64,
) -> Result<FilterState> {
    if (dt - curve.dt()).abs() > 1e-12 * curve.dt() {
        return Err(Error::invalid(
            "dt",
            format!("must equal the curve spacing {}, got {dt}", curve.dt()),
        ));
    }
    let k = (state.t / curve.dt()).round() as usize;
    if k + 1 >= curve.grid().len() {
        return Err(Error::TimeOutOfRange {
            t: state.t + dt,
            horizon: curve.horizon(),
        });
    }
    debug_assert!((state.t - curve.grid()[k]).abs() < 1e-9);
    let gain = curve.p()[k] + params.rho_sigma0();
    Ok(FilterState {
        pi: state.pi + params.b0 * (params.mu0 - state.pi) * dt + gain * di,
        p: curve.p()[k + 1],
        t: curve.grid()[k + 1],
    })
}
