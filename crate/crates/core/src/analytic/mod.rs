//! Closed-form limit objects: the dilogarithm on the negative axis, the
//! four-parameter law `G`, the CDF `F(x) = G(x, 1, 1, 1)` and the limiting
//! density `p(t)` of `F(a1, a2, a3) / sqrt(a1 a2 a3)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod quad;

pub use quad::{
    cdf_p, integrate, moment_p, DensityCdf, QuadratureResult, DENSITY_TAIL_START,
    QUADRATURE_TOLERANCE,
};

/// `zeta(2) = pi^2 / 6`.
pub const ZETA2: f64 = PI * PI / 6.0;

/// `8 / pi`, the mean of the limiting law of `t`.
pub const MEAN_T: f64 = 8.0 / PI;

/// Power series of `Li2` for `|z| <= 1/2`.
fn li2_series(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = z;
    let mut k = 1.0f64;
    loop {
        let term = pow / (k * k);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        pow *= z;
        k += 1.0;
    }
    sum
}

/// Dilogarithm `Li2(z)` for real `z <= 0`.
///
/// Series for `|z| <= 1/2`, the Landen identity
/// `Li2(z) = -Li2(z / (z - 1)) - ln^2(1 - z) / 2` on `[-1, -1/2)`, and the
/// inversion `Li2(z) = -pi^2/6 - ln^2(-z) / 2 - Li2(1/z)` below `-1`.
pub fn dilog(z: f64) -> Result<f64> {
    if z.is_nan() || z > 0.0 {
        return Err(Error::Domain(format!("dilog is evaluated only for z <= 0, got {z}")));
    }
    Ok(dilog_nonpositive(z))
}

fn dilog_nonpositive(z: f64) -> f64 {
    if z >= -0.5 {
        li2_series(z)
    } else if z >= -1.0 {
        let w = (-z).ln_1p();
        -li2_series(z / (z - 1.0)) - 0.5 * w * w
    } else {
        let l = (-z).ln();
        -ZETA2 - 0.5 * l * l - dilog_nonpositive(1.0 / z)
    }
}

/// Arguments of `G`, each in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GArgs {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
}

impl GArgs {
    pub fn new(x1: f64, x2: f64, y1: f64, y2: f64) -> Result<Self> {
        let args = GArgs { x1, x2, y1, y2 };
        args.validate()?;
        Ok(args)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("x1", self.x1), ("x2", self.x2), ("y1", self.y1), ("y2", self.y2)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Domain(format!("{name} = {v} outside (0, 1]")));
            }
        }
        Ok(())
    }

    /// `x2 <= y1 y2` selects the logarithmic branch.
    pub fn first_branch(&self) -> bool {
        self.x2 <= self.y1 * self.y2
    }
}

/// The limit law `G(x1, x2, y1, y2)`.
pub fn g_law(args: GArgs) -> Result<f64> {
    args.validate()?;
    let GArgs { x1, x2, y1, y2 } = args;
    let c = 2.0 / ZETA2;
    Ok(if args.first_branch() {
        c * ((x1 * x2).ln_1p() * (y1 * y2 / x2).ln() - dilog_nonpositive(-x1 * x2))
    } else {
        -c * dilog_nonpositive(-x1 * y1 * y2)
    })
}

/// `F(x) = -(2 / zeta(2)) Li2(-x)` on `[0, 1]`, equal to 1 beyond.
///
/// Near zero `F(x) ~ 2x / zeta(2)`.
pub fn limit_cdf(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("limit_cdf argument {x} < 0")));
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    Ok(-2.0 / ZETA2 * dilog_nonpositive(-x))
}

/// Limiting density of `t = F(a) / sqrt(a1 a2 a3)`:
///
/// * `0` on `[0, sqrt 3]`,
/// * `(12/pi) (t/sqrt3 - sqrt(4 - t^2))` on `[sqrt 3, 2]`,
/// * `(12/pi^2) (t sqrt3 arccos((t + 3 sqrt(t^2-4)) / (4 sqrt(t^2-3)))
///   + (3/2) sqrt(t^2-4) ln((t^2-4)/(t^2-3)))` on `[2, inf)`.
pub fn density_p(t: f64) -> f64 {
    let sqrt3 = 3f64.sqrt();
    if t.is_nan() || t <= sqrt3 {
        0.0
    } else if t <= 2.0 {
        12.0 / PI * (t / sqrt3 - (4.0 - t * t).sqrt())
    } else {
        12.0 / (PI * PI) * right_branch(t)
    }
}

/// One-sided limits of the density at `t`: the branch formulas that apply
/// just below and just above `t`, both evaluated at `t`.
pub fn density_branches(t: f64) -> (f64, f64) {
    let sqrt3 = 3f64.sqrt();
    let branch = |i: u8| match i {
        0 => 0.0,
        1 => 12.0 / PI * (t / sqrt3 - (4.0 - t * t).max(0.0).sqrt()),
        _ => 12.0 / (PI * PI) * right_branch(t),
    };
    let below = if t <= sqrt3 { 0 } else if t <= 2.0 { 1 } else { 2 };
    let above = if t < sqrt3 { 0 } else if t < 2.0 { 1 } else { 2 };
    (branch(below), branch(above))
}

/// Bracket of the right branch without the `12/pi^2` factor.
///
/// For large `t` the arccos argument is `1 - O(t^-4)`, so it is evaluated as
/// `2 asin(sqrt((1 - x) / 2))` with `1 - x` written free of cancellation:
/// `4 sqrt(t^2-3) - t - 3 sqrt(t^2-4)
///  = 12 / ((sqrt(t^2-3) + sqrt(t^2-4)) (t + sqrt(t^2-4)) (t + sqrt(t^2-3)))`.
/// The two terms of the bracket are each `+-3/(2t) + O(t^-3)` and cancel,
/// leaving `p(t) ~ 18 / (pi^2 t^3)`.
fn right_branch(t: f64) -> f64 {
    let s3 = (t * t - 3.0).sqrt();
    let s4 = (t * t - 4.0).max(0.0).sqrt();
    let numer_gap = 12.0 / ((s3 + s4) * (t + s4) * (t + s3));
    let one_minus_x = numer_gap / (4.0 * s3);
    let angle = 2.0 * (0.5 * one_minus_x).sqrt().min(1.0).asin();
    let log_term = if s4 == 0.0 {
        0.0
    } else {
        1.5 * s4 * (-1.0 / (t * t - 3.0)).ln_1p()
    };
    t * 3f64.sqrt() * angle + log_term
}

/// `psi(x)` for `x > 0`: upward recurrence then the asymptotic series.
pub fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // B2/2, B4/4, ... for the tail sum_k B_{2k} / (2k x^{2k}).
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    acc + x.ln() - 0.5 * inv - series
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
        fn rec<F: Fn(f64) -> f64>(
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
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    /// `Li2(z) = -int_0^1 ln(1 - z u) / u du`.
    fn dilog_by_quadrature(z: f64) -> f64 {
        let f = |u: f64| if u == 0.0 { -z } else { (-z * u).ln_1p() / u };
        -simpson_adaptive(&f, 0.0, 1.0, 1e-14)
    }

    #[test]
    fn dilog_special_values() {
        assert_eq!(dilog(0.0).unwrap(), 0.0);
        assert!((dilog(-1.0).unwrap() + PI * PI / 12.0).abs() < 1e-13);
        assert!(dilog(0.1).is_err());
        // Li2(-1/2) and Li2(-2) tie the three regions together through inversion.
        let l2 = 2f64.ln();
        assert!(
            (dilog(-2.0).unwrap() + dilog(-0.5).unwrap() + ZETA2 + 0.5 * l2 * l2).abs() < 1e-14
        );
    }

    #[test]
    fn dilog_matches_integral_definition() {
        let v = dilog(-0.3).unwrap();
        assert!((v - dilog_by_quadrature(-0.3)).abs() < 1e-10);
        // 100 deterministic pseudo-random points in [-50, 0].
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        for _ in 0..100 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let z = -50.0 * (state >> 11) as f64 / (1u64 << 53) as f64;
            let d = (dilog(z).unwrap() - dilog_by_quadrature(z)).abs();
            assert!(d < 1e-10, "z = {z}: diff {d}");
        }
    }

    #[test]
    fn g_examples() {
        let one = GArgs::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((g_law(one).unwrap() - 1.0).abs() < 1e-12);
        let a = GArgs::new(0.5, 0.9, 0.5, 0.5).unwrap();
        assert!(!a.first_branch());
        let expected = -2.0 / ZETA2 * dilog(-0.125).unwrap();
        assert_eq!(g_law(a).unwrap(), expected);
        assert!(GArgs::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(GArgs::new(1.0, 1.0, 1.1, 1.0).is_err());
    }

    #[test]
    fn g_branch_continuity() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 + 1.0) / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let (x1, y1, y2) = (next(), next(), next());
            let x2 = y1 * y2;
            let c = 2.0 / ZETA2;
            let first = c * ((x1 * x2).ln_1p() * (y1 * y2 / x2).ln() - dilog(-x1 * x2).unwrap());
            let second = -c * dilog(-x1 * y1 * y2).unwrap();
            assert!((first - second).abs() < 1e-12);
        }
    }

    #[test]
    fn limit_cdf_values() {
        assert_eq!(limit_cdf(0.0).unwrap(), 0.0);
        assert!((limit_cdf(1.0).unwrap() - 1.0).abs() < 1e-12);
        let x = 1e-6;
        let rel = (limit_cdf(x).unwrap() - 2.0 * x / ZETA2).abs() / (2.0 * x / ZETA2);
        assert!(rel < 1e-5);
        assert!(limit_cdf(-0.1).is_err());
        let mut prev = 0.0;
        for i in 1..=1000 {
            let v = limit_cdf(i as f64 / 1000.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn density_examples() {
        let sqrt3 = 3f64.sqrt();
        assert_eq!(density_p(1.0), 0.0);
        assert!(density_p(sqrt3).abs() < 1e-15);
        let (l, r) = density_branches(2.0);
        assert!((l - 8.0 * sqrt3 / PI).abs() < 1e-12);
        assert!((l - r).abs() < 1e-10);
        let (l, r) = density_branches(sqrt3);
        assert!((l - r).abs() < 1e-10);
    }

    #[test]
    fn density_stable_form_matches_direct_formula() {
        let direct = |t: f64| {
            let arg = (t + 3.0 * (t * t - 4.0).sqrt()) / (4.0 * (t * t - 3.0).sqrt());
            12.0 / (PI * PI)
                * (t * 3f64.sqrt() * arg.acos()
                    + 1.5 * (t * t - 4.0).sqrt() * ((t * t - 4.0) / (t * t - 3.0)).ln())
        };
        for &t in &[2.0001, 2.1, 2.5, 3.0, 4.0, 7.0] {
            assert!((density_p(t) - direct(t)).abs() < 1e-9, "t = {t}");
        }
        // Cubic tail: p(t) t^3 -> 18 / pi^2.
        let c = density_p(1e4) * 1e12;
        assert!((c - 18.0 / (PI * PI)).abs() < 1e-6);
    }

    #[test]
    fn density_non_negative_on_grid() {
        for i in 0..=100_000 {
            let t = i as f64 * 1e-3;
            assert!(density_p(t) >= 0.0, "t = {t}");
        }
    }

    #[test]
    fn digamma_values() {
        let euler_gamma = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + euler_gamma).abs() < 1e-14);
        assert!((digamma(0.5) + euler_gamma + 2.0 * 2f64.ln()).abs() < 1e-14);
        // psi(x + 1) - psi(x) = 1/x
        for &x in &[0.3, 2.7, 15.0, 1234.5] {
            assert!((digamma(x + 1.0) - digamma(x) - 1.0 / x).abs() < 1e-13);
        }
    }
}
