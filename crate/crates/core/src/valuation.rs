//! Value functions under partial and full information and the indifference
//! value of information.
//!
//! The optimization target (an infimum of expected exponential disutility)
//! has the product form `v(t, zeta, p) = e^{-eta zeta e^{r(T-t)}} h(t) e^{psi(t,p)}`
//! under partial information and `v_full(t, zeta, x) = e^{-eta zeta e^{r(T-t)}}
//! h(t) e^{phi(t,x)}` under full information; the achieved expected utility is
//! `1 - v(0, R0, Pi0)`.
//!
//! The indifference value is the initial-wealth reduction that makes a fully
//! informed insurer indifferent to staying partially informed:
//!
//! ```text
//! delta_zeta = (e^{-rT}/eta) (psi(0, Pi0) - ln E[e^{phi(0, X0)}]),  X0 ~ N(Pi0, P0)
//!            = (e^{-rT}/eta) (psi(0, Pi0) - phi(0, Pi0) - P0 C0^2 / 2)
//! ```
//!
//! since `phi(0, .)` is affine with slope `-C0`. The Monte Carlo route samples
//! `X0` directly and serves as the independent check of the Gaussian identity.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::filter::solve_riccati;
use crate::investment::{c0, phi, PsiEvaluator};
use crate::params::ModelParams;
use crate::reinsurance::RetentionSchedule;

/// Partial-information value `e^{-eta zeta e^{r(T-t)}} h(t) e^{psi(t, p)}`.
pub fn value_partial(
    t: f64,
    zeta: f64,
    p: f64,
    sched: &RetentionSchedule,
    eval: &PsiEvaluator,
    params: &ModelParams,
) -> f64 {
    let growth = (params.r * (params.horizon - t)).exp();
    (-params.eta * zeta * growth).exp() * sched.h_at(t) * eval.psi(t, p).exp()
}

/// Full-information value `e^{-eta zeta e^{r(T-t)}} h(t) e^{phi(t, x)}`.
pub fn value_full(
    t: f64,
    zeta: f64,
    x: f64,
    sched: &RetentionSchedule,
    params: &ModelParams,
) -> f64 {
    let growth = (params.r * (params.horizon - t)).exp();
    (-params.eta * zeta * growth).exp() * sched.h_at(t) * phi(t, x, params).exp()
}

/// Expected utility attained by the optimal strategy, `1 - v(0, R0, Pi0)`.
pub fn expected_utility(
    sched: &RetentionSchedule,
    eval: &PsiEvaluator,
    params: &ModelParams,
) -> f64 {
    1.0 - value_partial(0.0, params.initial_surplus, params.pi0, sched, eval, params)
}

/// Indifference value of information, closed form.
pub fn indifference_value(params: &ModelParams, eval: &PsiEvaluator) -> f64 {
    let c = c0(params);
    let discount = (-params.r * params.horizon).exp();
    discount / params.eta
        * (eval.psi(0.0, params.pi0) - phi(0.0, params.pi0, params) - params.p0 * c * c / 2.0)
}

/// The `P0 = 0` reduction: the value of complete knowledge of the market
/// price of risk when the current state is already known.
pub fn indifference_value_zero_p0(params: &ModelParams, eval: &PsiEvaluator) -> f64 {
    let discount = (-params.r * params.horizon).exp();
    discount / params.eta * (eval.psi(0.0, params.pi0) - phi(0.0, params.pi0, params))
}

/// Monte Carlo estimate of the indifference value sampling `X0 ~ N(Pi0, P0)`
/// directly: `(e^{-rT}/eta)(psi(0, Pi0) - ln mean(e^{phi(0, X0)}))`.
/// Returns `(estimate, standard_error)`; the error propagates through the
/// logarithm by the delta method.
pub fn indifference_value_mc(
    params: &ModelParams,
    eval: &PsiEvaluator,
    n_samples: u64,
    seed: u64,
) -> (f64, f64) {
    assert!(n_samples >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = params.p0.sqrt();
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for _ in 0..n_samples {
        let z: f64 = rng.sample(StandardNormal);
        let x0 = params.pi0 + sd * z;
        let v = phi(0.0, x0, params).exp();
        sum += v;
        sumsq += v * v;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0) * n / (n - 1.0);
    let se_mean = (var / n).sqrt();
    let discount = (-params.r * params.horizon).exp();
    let estimate = discount / params.eta * (eval.psi(0.0, params.pi0) - mean.ln());
    let se = discount / params.eta * se_mean / mean;
    (estimate, se)
}

/// One cell of an indifference-value table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    /// The varied parameter (initial variance or correlation).
    pub axis: f64,
    pub horizon: f64,
    pub delta_zeta: f64,
}

/// Indifference values on a grid of initial filter variances (correlation
/// held at zero) and of correlations (initial variance held at zero),
/// closed-form per cell.
pub fn table_delta_zeta(
    p0_list: &[f64],
    rho_list: &[f64],
    t_list: &[f64],
    params: &ModelParams,
    n_steps: usize,
) -> (Vec<TableRow>, Vec<TableRow>) {
    let cell = |p: &ModelParams| {
        let curve = solve_riccati(p, n_steps);
        let eval = PsiEvaluator::new(p, &curve);
        indifference_value(p, &eval)
    };
    let mut by_p0 = Vec::with_capacity(p0_list.len() * t_list.len());
    for &p0 in p0_list {
        for &horizon in t_list {
            let p = ModelParams {
                p0,
                rho: 0.0,
                horizon,
                ..params.clone()
            };
            by_p0.push(TableRow {
                axis: p0,
                horizon,
                delta_zeta: cell(&p),
            });
        }
    }
    let mut by_rho = Vec::with_capacity(rho_list.len() * t_list.len());
    for &rho in rho_list {
        for &horizon in t_list {
            let p = ModelParams {
                p0: 0.0,
                rho,
                horizon,
                ..params.clone()
            };
            by_rho.push(TableRow {
                axis: rho,
                horizon,
                delta_zeta: cell(&p),
            });
        }
    }
    (by_p0, by_rho)
}

/// Rounds a reported value to four decimals, ties to even.
pub fn round_reported(x: f64) -> f64 {
    (x * 1e4).round_ties_even() / 1e4
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::claims::ClaimSizeModel;
    use crate::investment::c0;
    use crate::premium::PremiumPrinciple;

    fn setup(params: &ModelParams) -> (RetentionSchedule, PsiEvaluator) {
        let model = ClaimSizeModel::uniform(2.0).unwrap();
        let pp = PremiumPrinciple::expected_value(0.2, 0.3).unwrap();
        let sched = RetentionSchedule::solve(params, &model, &pp, 400);
        let curve = solve_riccati(params, 2000);
        (sched, PsiEvaluator::new(params, &curve))
    }

    #[test]
    fn terminal_value_is_pure_disutility() {
        let params = ModelParams::default();
        let (sched, eval) = setup(&params);
        let t = params.horizon;
        for zeta in [0.0, 1.0, 3.0] {
            let v = value_partial(t, zeta, 0.2, &sched, &eval, &params);
            assert!((v - (-params.eta * zeta).exp()).abs() < 1e-12);
            let vf = value_full(t, zeta, 0.2, &sched, &params);
            assert!((vf - (-params.eta * zeta).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn value_positive_and_decreasing_in_wealth() {
        let params = ModelParams::default();
        let (sched, eval) = setup(&params);
        let mut prev = f64::INFINITY;
        for zeta in [-1.0, 0.0, 1.0, 2.0, 5.0] {
            let v = value_partial(2.0, zeta, 0.4, &sched, &eval, &params);
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn no_claims_reduces_to_pure_investment() {
        // lambda = 0 kills premiums and claims: h == 1 identically.
        let params = ModelParams {
            lambda: 0.0,
            ..ModelParams::default()
        };
        let (sched, eval) = setup(&params);
        for &h in sched.h() {
            assert!((h - 1.0).abs() < 1e-15);
        }
        let v = value_partial(0.0, 1.0, 0.4, &sched, &eval, &params);
        let pure = (-params.eta * 1.0).exp() * eval.psi(0.0, 0.4).exp();
        assert!((v - pure).abs() < 1e-14);
    }

    #[test]
    fn information_helps() {
        // value_full <= value_partial at (0, R0, Pi0): phi <= psi there.
        for rho in [0.0, 0.2, 0.7] {
            let params = ModelParams {
                rho,
                ..ModelParams::default()
            };
            let (sched, eval) = setup(&params);
            let vp = value_partial(0.0, 1.0, params.pi0, &sched, &eval, &params);
            let vf = value_full(0.0, 1.0, params.pi0, &sched, &params);
            assert!(vf <= vp + 1e-14, "rho={rho}: {vf} > {vp}");
        }
    }

    #[test]
    fn zero_p0_routes_agree() {
        let params = ModelParams {
            p0: 0.0,
            ..ModelParams::default()
        };
        let (_, eval) = setup(&params);
        let a = indifference_value(&params, &eval);
        let b = indifference_value_zero_p0(&params, &eval);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn degenerate_market_has_no_information_value() {
        // P0 = 0 and sigma0 = 0: the signal is already known exactly.
        let params = ModelParams {
            p0: 0.0,
            sigma0: 0.0,
            ..ModelParams::default()
        };
        let (_, eval) = setup(&params);
        assert!(indifference_value(&params, &eval).abs() < 1e-10);
    }

    #[test]
    fn closed_form_reference_values() {
        // Frozen from an independent high-order ODE solve.
        let check = |rho: f64, p0: f64, horizon: f64, expect: f64| {
            let params = ModelParams {
                rho,
                p0,
                horizon,
                ..ModelParams::default()
            };
            let curve = solve_riccati(&params, 2000);
            let eval = PsiEvaluator::new(&params, &curve);
            let dz = indifference_value(&params, &eval);
            assert!(
                (dz - expect).abs() < 5e-6,
                "rho={rho} p0={p0} T={horizon}: {dz} vs {expect}"
            );
        };
        check(0.0, 0.0, 10.0, 0.053923);
        check(0.0, 0.03, 10.0, 0.052210);
        check(0.2, 0.0, 10.0, 0.047067);
        check(0.7, 0.0, 3.0, 0.004114);
    }

    #[test]
    fn mc_degenerate_matches_closed_form() {
        let params = ModelParams {
            p0: 0.0,
            ..ModelParams::default()
        };
        let (_, eval) = setup(&params);
        let (mc, se) = indifference_value_mc(&params, &eval, 1000, 7);
        assert_eq!(se, 0.0);
        assert!((mc - indifference_value(&params, &eval)).abs() < 1e-12);
    }

    #[test]
    fn mc_agrees_with_gaussian_identity() {
        let params = ModelParams::default(); // p0 = 0.03
        let (_, eval) = setup(&params);
        let closed = indifference_value(&params, &eval);
        let (mc, se) = indifference_value_mc(&params, &eval, 200_000, 11);
        assert!(se > 0.0);
        assert!(
            (mc - closed).abs() < 4.0 * se,
            "MC {mc} vs closed {closed}, 4se = {}",
            4.0 * se
        );
    }

    #[test]
    fn gaussian_log_moment_identity() {
        // ln E[e^{phi(0, X0)}] = phi(0, Pi0) + P0 C0^2 / 2 for affine phi.
        let params = ModelParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sd = params.p0.sqrt();
        let n = 400_000;
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for _ in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            let v = phi(0.0, params.pi0 + sd * z, &params).exp();
            sum += v;
            sumsq += v * v;
        }
        let mean: f64 = sum / n as f64;
        let var = (sumsq / n as f64 - mean * mean).max(0.0);
        let se_log = (var / n as f64).sqrt() / mean;
        let c = c0(&params);
        let ident = phi(0.0, params.pi0, &params) + params.p0 * c * c / 2.0;
        assert!(
            (mean.ln() - ident).abs() < 4.0 * se_log,
            "{} vs {ident}",
            mean.ln()
        );
    }

    #[test]
    fn tables_shape_and_monotonicity() {
        let params = ModelParams::default();
        let (t1, t2) = table_delta_zeta(
            &[0.0, 0.01, 0.03],
            &[0.0, 0.2, 0.7],
            &[3.0, 5.0, 10.0],
            &params,
            800,
        );
        assert_eq!(t1.len(), 9);
        assert_eq!(t2.len(), 9);
        // nondecreasing in T within each row
        for rows in [&t1, &t2] {
            for chunk in rows.chunks(3) {
                assert!(chunk[0].delta_zeta <= chunk[1].delta_zeta);
                assert!(chunk[1].delta_zeta <= chunk[2].delta_zeta);
            }
        }
        // nonincreasing in rho at fixed horizon (less correlation = less
        // informative prices = information worth more)
        for k in 0..3 {
            assert!(t2[k].delta_zeta >= t2[3 + k].delta_zeta);
            assert!(t2[3 + k].delta_zeta >= t2[6 + k].delta_zeta);
        }
    }

    #[test]
    fn reported_rounding_is_half_even() {
        assert_eq!(round_reported(0.123450001), 0.1235);
        assert_eq!(round_reported(0.123449999), 0.1234);
        assert_eq!(round_reported(2.0), 2.0);
        // ties go to the even neighbor on the scaled integer
        assert_eq!((1234.5f64).round_ties_even(), 1234.0);
        assert_eq!((1235.5f64).round_ties_even(), 1236.0);
    }
}
