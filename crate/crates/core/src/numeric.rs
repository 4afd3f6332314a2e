//! Small numerical kernels shared across the crate: adaptive Simpson
//! quadrature, cubic Hermite interpolation, bisection and golden-section
//! minimization, and stable exponential ratios.

/// Adaptive Simpson quadrature of `f` on `[a, b]` with absolute tolerance `tol`.
pub fn simpson_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Cubic Hermite interpolation on `[x0, x0 + h]` from endpoint values and
/// derivatives. Fourth-order accurate for smooth data.
#[inline]
pub fn hermite(x: f64, x0: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Bisection for the root of an increasing function `f` on `[lo, hi]` with
/// absolute tolerance `tol` on the argument. Requires `f(lo) <= 0 <= f(hi)`.
pub fn bisect_increasing<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    debug_assert!(f(lo) <= 0.0 && f(hi) >= 0.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimization of `f` on `[a, b]` with argument tolerance `tol`.
/// Returns `(argmin, min)` for a unimodal `f`; for flat stretches the bracket
/// midpoint is reported.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `(1 - e^{-a t}) / a`, continuous through `a = 0` where it equals `t`.
#[inline]
pub fn em1_ratio(a: f64, t: f64) -> f64 {
    let x = a * t;
    if x.abs() < 1e-6 {
        // t (1 - x/2 + x^2/6 - x^3/24)
        t * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0)
    } else {
        -(-x).exp_m1() / a
    }
}

/// `(t - (1 - e^{-a t})/a) / a`, continuous through `a = 0` where it equals `t^2/2`.
#[inline]
pub fn em2_ratio(a: f64, t: f64) -> f64 {
    let x = a * t;
    if x.abs() < 1e-5 {
        // t^2 (1/2 - x/6 + x^2/24 - x^3/120)
        t * t * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0)
    } else {
        (t - em1_ratio(a, t)) / a
    }
}

/// `(e^x - 1) / x` with the removable singularity filled in.
#[inline]
pub fn expm1_over_x(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + x / 2.0 + x * x / 6.0
    } else {
        x.exp_m1() / x
    }
}

/// `(e^x (x - 1) + 1) / x^2 = sum_{k>=0} x^k (k+1)/(k+2)!`, the kernel of
/// `int_0^1 s e^{x s} ds`. Series branch keeps full precision near zero.
#[inline]
pub fn tilt_kernel(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let mut term = 0.5; // k = 0: 1/2!
        let mut sum = term;
        let mut k = 1.0f64;
        loop {
            // (k+1)/(k+2)! = previous * x * (k+1) / ((k+2) * k)
            term *= x * (k + 1.0) / ((k + 2.0) * k);
            sum += term;
            if term.abs() < 1e-18 {
                return sum;
            }
            k += 1.0;
        }
    } else {
        (x.exp() * (x - 1.0) + 1.0) / (x * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_matches_closed_forms() {
        let v = simpson_adaptive(|x| x.exp(), 0.0, 2.0, 1e-12);
        assert!((v - (2.0f64.exp() - 1.0)).abs() < 1e-11);
        let w = simpson_adaptive(|x| x * x, -1.0, 3.0, 1e-12);
        assert!((w - (27.0 + 1.0) / 3.0).abs() < 1e-11);
    }

    #[test]
    fn hermite_reproduces_cubics_exactly() {
        // y = x^3 - 2x on [1, 1.5]
        let y = |x: f64| x * x * x - 2.0 * x;
        let d = |x: f64| 3.0 * x * x - 2.0;
        let v = hermite(1.2, 1.0, 0.5, y(1.0), y(1.5), d(1.0), d(1.5));
        assert!((v - y(1.2)).abs() < 1e-14);
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect_increasing(|x| x * x * x - 2.0, 0.0, 2.0, 1e-12);
        assert!((r - 2.0f64.cbrt()).abs() < 1e-11);
    }

    #[test]
    fn golden_finds_quadratic_min() {
        let (x, _) = golden_min(|x| (x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-9);
    }

    #[test]
    fn exp_ratios_continuous_at_zero() {
        assert!((em1_ratio(0.0, 2.5) - 2.5).abs() < 1e-14);
        // series branch agrees with the expm1-based closed form
        for a in [1e-9, 1e-7, 4e-7, 1e-6, 1e-3, 1.0] {
            let closed = -(-a * 2.5f64).exp_m1() / a;
            assert!((em1_ratio(a, 2.5) - closed).abs() < 1e-13 * 2.5);
        }
        assert!((em2_ratio(0.0, 2.5) - 3.125).abs() < 1e-13);
        assert!((expm1_over_x(0.0) - 1.0).abs() < 1e-15);
        // tilt_kernel(0) = 1/2; tilt_kernel(2) = (e^2 + 1)/4
        assert!((tilt_kernel(0.0) - 0.5).abs() < 1e-15);
        assert!((tilt_kernel(2.0) - (2.0f64.exp() + 1.0) / 4.0).abs() < 1e-14);
        // series/closed-form agreement around the switch point
        for &x in &[0.49f64, 0.5, 0.51, -0.49, -0.51] {
            let closed = (x.exp() * (x - 1.0) + 1.0) / (x * x);
            assert!((tilt_kernel(x) - closed).abs() < 1e-13);
        }
    }
}
