//! Two-parameter generalized weighted average (weighted power mean) of two
//! nonnegative values.
//!
//! ```text
//! mu(x, y | alpha, m) = ((1 - alpha) * x^m + alpha * y^m)^(1/m)
//! ```
//!
//! `m = 1` is the weighted arithmetic mean, `m = -1` the weighted harmonic
//! mean and the limit `m -> 0` the weighted geometric mean
//! `x^(1 - alpha) * y^alpha`.

use crate::error::{Error, Result};

/// Exponents with `|m|` at or below this value use the geometric-mean limit.
pub const GEOMETRIC_EPS: f64 = 1e-9;

/// Below this `|m|` the closed form loses precision through the `1/m`
/// exponent, so the mean is evaluated with `expm1`/`ln_1p` instead.
const SMALL_EXPONENT: f64 = 1e-2;

/// Default admissible range for the exponent `m`.
pub const DEFAULT_M_RANGE: (f64, f64) = (-2.0, 4.0);

/// Weight `alpha` and exponent `m` of the generalized weighted average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwaParams {
    alpha: f64,
    m: f64,
}

impl GwaParams {
    /// Validates `alpha ∈ [0, 1]` and a finite `m` inside [`DEFAULT_M_RANGE`].
    pub fn new(alpha: f64, m: f64) -> Result<Self> {
        Self::with_m_range(alpha, m, DEFAULT_M_RANGE)
    }

    /// Like [`GwaParams::new`] with a caller-chosen exponent range.
    pub fn with_m_range(alpha: f64, m: f64, (lo, hi): (f64, f64)) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if !m.is_finite() {
            return Err(Error::NonFiniteExponent(m));
        }
        if m < lo || m > hi {
            return Err(Error::ExponentOutOfRange { m, lo, hi });
        }
        Ok(Self { alpha, m })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> f64 {
        self.m
    }
}

/// Generalized weighted average of `x` and `y`.
///
/// Boundary cases:
/// * `alpha == 0` returns `x` and `alpha == 1` returns `y` exactly.
/// * `|m| <= GEOMETRIC_EPS` returns `x^(1 - alpha) * y^alpha`.
/// * for `m < 0`, a zero argument with nonzero weight yields `0`, the
///   continuous limit of the closed form.
pub fn gwa(x: f64, y: f64, params: GwaParams) -> Result<f64> {
    // `!(v >= 0)` also rejects NaN.
    if !(x >= 0.0) {
        return Err(Error::NegativeArgument(x));
    }
    if !(y >= 0.0) {
        return Err(Error::NegativeArgument(y));
    }
    let GwaParams { alpha, m } = params;
    if alpha == 0.0 {
        return Ok(x);
    }
    if alpha == 1.0 {
        return Ok(y);
    }

    let value = if m.abs() <= GEOMETRIC_EPS {
        x.powf(1.0 - alpha) * y.powf(alpha)
    } else if m < 0.0 && (x == 0.0 || y == 0.0) {
        0.0
    } else if m.abs() < SMALL_EXPONENT {
        small_exponent_mean(x, y, alpha, m)
    } else {
        ((1.0 - alpha) * x.powf(m) + alpha * y.powf(m)).powf(m.recip())
    };

    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow { x, y })
    }
}

/// `exp(ln(1 + (1-a)(x^m - 1) + a(y^m - 1)) / m)`, which keeps full relative
/// precision as `m` approaches zero.
fn small_exponent_mean(x: f64, y: f64, alpha: f64, m: f64) -> f64 {
    let dx = (m * x.ln()).exp_m1();
    let dy = (m * y.ln()).exp_m1();
    (((1.0 - alpha) * dx + alpha * dy).ln_1p() / m).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(alpha: f64, m: f64) -> GwaParams {
        GwaParams::new(alpha, m).unwrap()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn named_means() {
        assert!(rel_close(gwa(0.2, 0.8, p(0.5, 1.0)).unwrap(), 0.5, 1e-15));
        assert!(rel_close(gwa(0.25, 1.0, p(0.5, 0.0)).unwrap(), 0.5, 1e-15));
        assert!(rel_close(
            gwa(0.5, 0.25, p(0.5, -1.0)).unwrap(),
            1.0 / 3.0,
            1e-15
        ));
        assert!(rel_close(
            gwa(0.2, 0.8, p(0.21, 1.0)).unwrap(),
            0.326,
            1e-15
        ));
    }

    #[test]
    fn tuned_pair_matches_high_precision_value() {
        // 40-digit evaluation of the closed form.
        let v = gwa(0.5, 0.95970, p(0.21, 1.30)).unwrap();
        assert!(rel_close(v, 0.604_616_446_563_741_3, 1e-13), "{v}");
    }

    #[test]
    fn rejects_bad_params() {
        assert_eq!(GwaParams::new(1.5, 1.0), Err(Error::AlphaOutOfRange(1.5)));
        assert!(GwaParams::new(-0.1, 1.0).is_err());
        assert!(GwaParams::new(f64::NAN, 1.0).is_err());
        assert!(matches!(
            GwaParams::new(0.5, f64::INFINITY),
            Err(Error::NonFiniteExponent(_))
        ));
        assert!(GwaParams::new(0.5, f64::NAN).is_err());
        assert!(matches!(
            GwaParams::new(0.5, 4.5),
            Err(Error::ExponentOutOfRange { .. })
        ));
        assert!(GwaParams::with_m_range(0.5, 4.5, (-10.0, 10.0)).is_ok());
    }

    #[test]
    fn rejects_negative_and_nan_arguments() {
        assert_eq!(
            gwa(-0.1, 1.0, p(0.5, 1.0)),
            Err(Error::NegativeArgument(-0.1))
        );
        assert!(gwa(1.0, -1e-300, p(0.5, 1.0)).is_err());
        assert!(gwa(f64::NAN, 1.0, p(0.5, 1.0)).is_err());
    }

    #[test]
    fn zero_arguments() {
        // Negative exponents: the zero term dominates and drives the mean to 0.
        assert_eq!(gwa(0.0, 0.7, p(0.5, -1.0)).unwrap(), 0.0);
        assert_eq!(gwa(0.7, 0.0, p(0.5, -2.0)).unwrap(), 0.0);
        assert_eq!(gwa(0.0, 0.7, p(0.5, -1e-3)).unwrap(), 0.0);
        // Geometric limit.
        assert_eq!(gwa(0.0, 0.7, p(0.3, 0.0)).unwrap(), 0.0);
        // Positive exponents keep the other term.
        let v = gwa(0.0, 0.8, p(0.25, 2.0)).unwrap();
        assert!(rel_close(v, (0.25f64 * 0.64).sqrt(), 1e-15));
        let v = gwa(0.0, 0.8, p(0.25, 5e-3)).unwrap();
        assert!(rel_close(v, 0.8 * 0.25f64.powf(200.0), 1e-10));
        assert_eq!(gwa(0.0, 0.0, p(0.5, 1.3)).unwrap(), 0.0);
        // Zero-weight argument is ignored even when it is zero.
        assert_eq!(gwa(0.0, 0.4, p(1.0, -1.0)).unwrap(), 0.4);
    }

    #[test]
    fn overflow_is_an_error() {
        let params = GwaParams::with_m_range(0.5, 4.0, (-2.0, 4.0)).unwrap();
        assert!(matches!(
            gwa(1e300, 1.0, params),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn strictly_increasing_in_m() {
        let grid: Vec<f64> = (-8..=16).map(|i| i as f64 * 0.25).collect();
        for &(x, y, a) in &[(0.2, 0.9, 0.5), (1.7, 0.05, 0.21), (0.5, 0.51, 0.9)] {
            let vals: Vec<f64> = grid.iter().map(|&m| gwa(x, y, p(a, m)).unwrap()).collect();
            for w in vals.windows(2) {
                assert!(w[0] < w[1], "{x} {y} {a}: {vals:?}");
            }
        }
    }

    #[test]
    fn exponent_route_boundaries_are_continuous() {
        for &m in &[GEOMETRIC_EPS, SMALL_EXPONENT] {
            for &(x, y, a) in &[(0.3, 1.9, 0.4), (0.02, 0.6, 0.8)] {
                let below = gwa(x, y, p(a, m * (1.0 - 1e-9))).unwrap();
                let above = gwa(x, y, p(a, m * (1.0 + 1e-9))).unwrap();
                assert!(rel_close(below, above, 1e-8), "m={m}: {below} vs {above}");
            }
        }
    }

    fn arb_alpha() -> impl Strategy<Value = f64> {
        0.0..=1.0f64
    }

    fn arb_m() -> impl Strategy<Value = f64> {
        prop_oneof![-2.0..=4.0f64, -1e-6..=1e-6f64, -0.02..=0.02f64]
    }

    proptest! {
        #[test]
        fn idempotent(x in 1e-3..5.0f64, a in arb_alpha(), m in arb_m()) {
            let v = gwa(x, x, p(a, m)).unwrap();
            prop_assert!(rel_close(v, x, 1e-12), "{v} vs {x}");
        }

        #[test]
        fn boundary_weights(x in 1e-3..5.0f64, y in 1e-3..5.0f64, m in arb_m()) {
            prop_assert_eq!(gwa(x, y, p(0.0, m)).unwrap(), x);
            prop_assert_eq!(gwa(x, y, p(1.0, m)).unwrap(), y);
        }

        #[test]
        fn symmetric(x in 1e-3..5.0f64, y in 1e-3..5.0f64, a in arb_alpha(), m in arb_m()) {
            let l = gwa(x, y, p(a, m)).unwrap();
            let r = gwa(y, x, p(1.0 - a, m)).unwrap();
            prop_assert!(rel_close(l, r, 1e-12), "{l} vs {r}");
        }

        #[test]
        fn between_arguments(x in 1e-3..5.0f64, y in 1e-3..5.0f64, a in 1e-6..(1.0 - 1e-6), m in arb_m()) {
            let v = gwa(x, y, p(a, m)).unwrap();
            let (lo, hi) = (x.min(y), x.max(y));
            prop_assert!(v >= lo * (1.0 - 1e-14) && v <= hi * (1.0 + 1e-14), "{v} not in [{lo}, {hi}]");
        }

        #[test]
        fn geometric_limit(x in 0.01..2.0f64, y in 0.01..2.0f64, a in arb_alpha(), m in -1e-6..=1e-6f64) {
            let v = gwa(x, y, p(a, m)).unwrap();
            let g = x.powf(1.0 - a) * y.powf(a);
            prop_assert!((v - g).abs() <= 1e-4);
        }

        #[test]
        fn nondecreasing_in_arguments(
            x in 1e-3..5.0f64, y in 1e-3..5.0f64, dx in 0.0..1.0f64,
            a in arb_alpha(), m in arb_m(),
        ) {
            let params = p(a, m);
            let base = gwa(x, y, params).unwrap();
            prop_assert!(gwa(x + dx, y, params).unwrap() >= base * (1.0 - 1e-14));
            prop_assert!(gwa(x, y + dx, params).unwrap() >= base * (1.0 - 1e-14));
        }
    }
}
