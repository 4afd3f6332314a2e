//! Closed-form investment layer.
//!
//! `psi(t, p)`, affine in `p`, is the exponent of the partial-information
//! value function:
//!
//! ```text
//! psi(t,p) = -1/2 int_t^T { p e^{-int_t^s a} + b0 mu0 int_t^s e^{-int_v^s a} dv } ds,
//! a(t) = b0 + P_t + rho sigma0
//! ```
//!
//! The optimal investment is `theta*(t, Pi) = e^{-r(T-t)}/(sigma1 eta) *
//! (Pi - 1/2 (P_t + rho sigma0) D(t))` with `D(t) = int_t^T e^{-(A(s)-A(t))} ds`,
//! a myopic term plus a hedging correction. Under full information the
//! analogue is `theta*F` with the constant rate `a = b0 + rho sigma0`, and the
//! value exponent is the affine `phi(t, x)`.
//!
//! `D` and the nested double integral are accumulated by backward recurrences
//! over the grid in O(N), with every intermediate of order one: no large
//! exponentials enter, so the evaluator stays accurate for long horizons.

use crate::filter::VarianceCurve;
use crate::numeric::{em1_ratio, em2_ratio};
use crate::params::ModelParams;

/// `(e^x - 1 - x)/x^2`, the cell kernel of the nested double integral.
#[inline]
fn w2(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        0.5 + x / 6.0 + x * x / 24.0 + x * x * x / 120.0
    } else {
        (x.exp_m1() - x) / (x * x)
    }
}

/// Evaluator for `psi`, `D` and the investment rule on a solved variance
/// curve. Immutable after construction; concurrent reads are safe.
#[derive(Debug, Clone)]
pub struct PsiEvaluator {
    curve: VarianceCurve,
    /// `D_i = int_{t_i}^T e^{-(A(s)-A(t_i))} ds`.
    d: Vec<f64>,
    /// `N_i = int_{t_i}^T int_{t_i}^s e^{-(A(s)-A(v))} dv ds`.
    n: Vec<f64>,
    b0mu0: f64,
    b0: f64,
    mu0: f64,
    rho_sigma0: f64,
    sigma1: f64,
    eta: f64,
    r: f64,
}

impl PsiEvaluator {
    pub fn new(params: &ModelParams, curve: &VarianceCurve) -> PsiEvaluator {
        let n_nodes = curve.grid().len();
        let dt = curve.dt();
        let mut d = vec![0.0; n_nodes];
        let mut n = vec![0.0; n_nodes];
        // Backward sweep: all cell quantities are O(dt) and the transfer
        // factor q = e^{-dA} is <= 1, so the recurrences are stable.
        for i in (0..n_nodes - 1).rev() {
            let da = curve.a_cum()[i + 1] - curve.a_cum()[i];
            let q = (-da).exp();
            let a0 = curve.a_rate(i);
            let a1 = curve.a_rate(i + 1);
            // int_{t_i}^{t_{i+1}} e^{-(A(s)-A(t_i))} ds, corrected trapezoid
            let cell_d = dt / 2.0 * (1.0 + q) + dt * dt / 12.0 * (-a0 + a1 * q);
            d[i] = q * d[i + 1] + cell_d;
            // int_{t_i}^{t_{i+1}} e^{-(A(t_{i+1})-A(v))} dv
            let cell_e = dt / 2.0 * (q + 1.0) + dt * dt / 12.0 * (a0 * q - a1);
            // double integral over the cell triangle
            let local = dt * dt * w2(-0.5 * (a0 + a1) * dt);
            n[i] = local + cell_e * d[i + 1] + n[i + 1];
        }
        PsiEvaluator {
            curve: curve.clone(),
            d,
            n,
            b0mu0: params.b0 * params.mu0,
            b0: params.b0,
            mu0: params.mu0,
            rho_sigma0: params.rho_sigma0(),
            sigma1: params.sigma1,
            eta: params.eta,
            r: params.r,
        }
    }

    pub fn curve(&self) -> &VarianceCurve {
        &self.curve
    }

    pub fn horizon(&self) -> f64 {
        self.curve.horizon()
    }

    /// `D(t_i)` on the grid.
    pub fn d_nodes(&self) -> &[f64] {
        &self.d
    }

    /// `(D(t), N(t))` at arbitrary `t`, splicing a partial cell onto the
    /// node recurrences.
    fn d_n_at(&self, t: f64) -> (f64, f64) {
        let dt = self.curve.dt();
        let t = t.clamp(0.0, self.curve.horizon());
        let i = ((t / dt) as usize).min(self.curve.grid().len() - 2);
        let t1 = self.curve.grid()[i + 1];
        let delta = t1 - t;
        if delta <= 0.0 {
            return (self.d[i + 1], self.n[i + 1]);
        }
        let da = self.curve.a_cum()[i + 1] - self.curve.a_at(t);
        let q = (-da).exp();
        let a_t = self.b0 + self.curve.p_at(t) + self.rho_sigma0;
        let a1 = self.curve.a_rate(i + 1);
        let cell_d = delta / 2.0 * (1.0 + q) + delta * delta / 12.0 * (-a_t + a1 * q);
        let d = q * self.d[i + 1] + cell_d;
        let cell_e = delta / 2.0 * (q + 1.0) + delta * delta / 12.0 * (a_t * q - a1);
        let local = delta * delta * w2(-0.5 * (a_t + a1) * delta);
        let n = local + cell_e * self.d[i + 1] + self.n[i + 1];
        (d, n)
    }

    /// `D(t) = int_t^T e^{-(A(s)-A(t))} ds`, the hedging kernel.
    pub fn d_at(&self, t: f64) -> f64 {
        self.d_n_at(t).0
    }

    /// `psi(t, p)`; `psi(T, p) = 0` and `psi(t, .)` is affine.
    pub fn psi(&self, t: f64, p: f64) -> f64 {
        let (d, n) = self.d_n_at(t);
        -0.5 * (p * d + self.b0mu0 * n)
    }

    /// `d psi / d p = -D(t)/2`.
    pub fn psi_dp(&self, t: f64) -> f64 {
        -0.5 * self.d_at(t)
    }

    /// Myopic demand `Pi e^{-r(T-t)} / (sigma1 eta)`.
    pub fn theta_myopic(&self, t: f64, pi: f64) -> f64 {
        let tau = self.curve.horizon() - t;
        pi * (-self.r * tau).exp() / (self.sigma1 * self.eta)
    }

    /// Hedging correction `-1/2 (P_t + rho sigma0) D(t) e^{-r(T-t)} / (sigma1 eta)`.
    pub fn theta_hedge(&self, t: f64) -> f64 {
        let tau = self.curve.horizon() - t;
        -0.5 * (self.curve.p_at(t) + self.rho_sigma0) * self.d_at(t) * (-self.r * tau).exp()
            / (self.sigma1 * self.eta)
    }

    /// Partial-information investment `theta*(t, Pi)`.
    pub fn theta_star(&self, t: f64, pi: f64) -> f64 {
        self.theta_myopic(t, pi) + self.theta_hedge(t)
    }

    /// Linear-in-`Pi` coefficients of `theta*(t, .)`: `(intercept, slope)`.
    pub fn theta_coeffs(&self, t: f64) -> (f64, f64) {
        let tau = self.curve.horizon() - t;
        let scale = (-self.r * tau).exp() / (self.sigma1 * self.eta);
        (self.theta_hedge(t), scale)
    }

    /// Residual of the partial-information exponent equation at `(t, p)`:
    ///
    /// ```text
    /// psi_t + [b0(mu0 - p) - p (P_t + rho sigma0)] psi_p
    ///       + 1/2 (P_t + rho sigma0)^2 psi_pp - p/2
    /// ```
    ///
    /// computed with central finite differences (steps 1e-4). The quadrature
    /// `psi` solves this equation, so the residual is finite-difference noise;
    /// a test utility, not a solver.
    pub fn pde_residual(&self, t: f64, p: f64) -> f64 {
        const H: f64 = 1e-4;
        assert!(
            t - H >= 0.0 && t + H <= self.curve.horizon(),
            "residual needs interior t"
        );
        let psi_t = (self.psi(t + H, p) - self.psi(t - H, p)) / (2.0 * H);
        let psi_p = (self.psi(t, p + H) - self.psi(t, p - H)) / (2.0 * H);
        let psi_pp =
            (self.psi(t, p + H) - 2.0 * self.psi(t, p) + self.psi(t, p - H)) / (H * H);
        let gain = self.curve.p_at(t) + self.rho_sigma0;
        let drift = self.b0 * (self.mu0 - p) - p * gain;
        psi_t + drift * psi_p + 0.5 * gain * gain * psi_pp - 0.5 * p
    }
}

/// Full-information investment rule
/// `theta*F(t, x) = x e^{-r(T-t)}/(sigma1 eta)
///  - 1/2 rho sigma0 e^{-r(T-t)} (1 - e^{-(b0+rho sigma0)(T-t)}) / (sigma1 eta (b0 + rho sigma0))`.
/// The hedging demand vanishes when signal and price noise are uncorrelated.
pub fn theta_star_full(t: f64, x: f64, params: &ModelParams) -> f64 {
    let tau = params.horizon - t;
    let a = params.b0 + params.rho_sigma0();
    let discount = (-params.r * tau).exp();
    let myopic = x * discount / (params.sigma1 * params.eta);
    let hedge =
        -0.5 * params.rho_sigma0() * discount * em1_ratio(a, tau) / (params.sigma1 * params.eta);
    myopic + hedge
}

/// Full-information value exponent
/// `phi(t,x) = -(b0 mu0 / (2a))(T-t) - (x - b0 mu0/a)(1 - e^{-a(T-t)})/(2a)`,
/// `a = b0 + rho sigma0`, continuous through `a = 0`.
pub fn phi(t: f64, x: f64, params: &ModelParams) -> f64 {
    let tau = params.horizon - t;
    let a = params.b0 + params.rho_sigma0();
    let b0mu0 = params.b0 * params.mu0;
    // -(b0 mu0/2) [(tau - C)/a] - x C / 2, with C = (1 - e^{-a tau})/a
    -0.5 * (b0mu0 * em2_ratio(a, tau) + x * em1_ratio(a, tau))
}

/// Slope of `phi(t, .)`: `-(1 - e^{-a(T-t)})/(2a)`.
pub fn phi_dx(t: f64, params: &ModelParams) -> f64 {
    let a = params.b0 + params.rho_sigma0();
    -0.5 * em1_ratio(a, params.horizon - t)
}

/// `C0 = (1 - e^{-(b0+rho sigma0) T}) / (2 (b0 + rho sigma0))`, the magnitude
/// of the slope of `phi(0, .)`.
pub fn c0(params: &ModelParams) -> f64 {
    let a = params.b0 + params.rho_sigma0();
    0.5 * em1_ratio(a, params.horizon)
}
