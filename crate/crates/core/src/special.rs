//! Gamma-function helpers backed by MPFR.
//!
//! Every value returned as `f64` is correctly rounded from a 128-bit (or wider)
//! evaluation, so callers can treat these as exact up to half an ulp.

use rug::Float;
use std::cmp::Ordering;

/// Working precision for the scalar helpers.
const PREC: u32 = 192;

/// Exact MPFR representation of `eta + mu * n` for `f64` parameters.
pub(crate) fn affine_arg(prec: u32, eta: f64, mu: f64, n: i64) -> Float {
    let mut g = Float::with_val(prec.max(PREC), mu);
    g *= n;
    g += eta;
    g
}

fn is_pole(g: &Float) -> bool {
    g.is_integer() && *g <= 0
}

/// Γ(x) rounded to `f64`. Returns `f64::INFINITY` (signed per the side) at poles.
pub fn gamma(x: f64) -> f64 {
    let g = Float::with_val(PREC, x);
    if is_pole(&g) {
        return f64::INFINITY;
    }
    g.gamma().to_f64()
}

/// 1/Γ(x) rounded to `f64`; exactly zero at the poles of Γ.
pub fn recip_gamma(x: f64) -> f64 {
    recip_gamma_mp(&Float::with_val(PREC, x)).to_f64()
}

/// `(ln|Γ(x)|, sign Γ(x))`; at poles returns `(+inf, 0)`.
pub fn ln_abs_gamma(x: f64) -> (f64, i8) {
    ln_abs_gamma_mp(&Float::with_val(PREC, x))
}

pub(crate) fn recip_gamma_mp(g: &Float) -> Float {
    if is_pole(g) {
        return Float::with_val(g.prec(), 0);
    }
    g.clone().gamma().recip()
}

pub(crate) fn ln_abs_gamma_mp(g: &Float) -> (f64, i8) {
    if is_pole(g) {
        return (f64::INFINITY, 0);
    }
    let (ln, sign) = g.clone().ln_abs_gamma();
    let s = match sign {
        Ordering::Less => -1,
        _ => 1,
    };
    (ln.to_f64(), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gamma_known_values() {
        assert_eq!(gamma(1.0), 1.0);
        assert_eq!(gamma(5.0), 24.0);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma(1.5) - 0.5 * PI.sqrt()).abs() < 1e-15);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn reciprocal_gamma_vanishes_at_poles() {
        for n in 0..6 {
            assert_eq!(recip_gamma(-(n as f64)), 0.0);
        }
        assert!((recip_gamma(0.5) - 1.0 / PI.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn ln_abs_gamma_sign() {
        let (l, s) = ln_abs_gamma(-0.5);
        assert_eq!(s, -1);
        assert!((l - (2.0 * PI.sqrt()).ln()).abs() < 1e-15);
        assert_eq!(ln_abs_gamma(-2.0).1, 0);
    }

    #[test]
    fn affine_argument_is_exact() {
        // 1.9 * 7 + 2 rounded in f64 differs from the exact product of the
        // binary value of 1.9; the MPFR value must keep every bit.
        let g = affine_arg(256, 2.0, 1.9, 7);
        let mut exact = Float::with_val(256, 1.9f64);
        exact *= 7;
        exact += 2.0f64;
        assert_eq!(g, exact);
    }
}
