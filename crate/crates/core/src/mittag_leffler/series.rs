//! Power-series evaluation `Σ zⁿ / Γ(μn + η)`.
//!
//! On the negative axis the terms alternate and grow to roughly
//! `exp(|z|^{1/μ})` before decaying, so the working precision is chosen from
//! the log-magnitude profile of the terms before any summation happens.

use crate::special::{affine_arg, ln_abs_gamma_mp, recip_gamma_mp};
use rug::{Assign, Float};

/// Beyond this many terms the series is declared non-convergent.
pub(crate) const MAX_TERMS: usize = 200_000;

/// Largest working precision (bits) the extended path will use.
pub(crate) const MAX_PREC: u32 = 16_384;

/// Magnitude profile of the terms at a given |z|.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Plan {
    /// Terms `0..=last` are summed.
    pub last: usize,
    /// ln Σ|t_n|.
    pub ln_abs_sum: f64,
    /// ln Σ (n + 3)|t_n|, which bounds accumulated rounding.
    pub ln_weighted: f64,
    /// Bound on Σ_{n > last} |t_n|.
    pub tail: f64,
}

impl Plan {
    /// Bits needed to keep rounding below `budget`.
    pub fn precision_for(&self, budget: f64) -> u32 {
        let ln_err = log_add(self.ln_weighted, self.ln_abs_sum + ((self.last + 1) as f64).ln());
        let bits = (ln_err - budget.ln()) / std::f64::consts::LN_2 + 8.0;
        (bits.ceil().max(64.0)) as u32
    }

    /// A-priori rounding estimate for compensated `f64` summation.
    pub fn f64_error_estimate(&self) -> f64 {
        f64::EPSILON * (self.ln_weighted.exp() + 2.0 * self.ln_abs_sum.exp())
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Coefficient cache: `1/Γ(μn + η)` as `f64`, its log-magnitude, and MPFR
/// values at `prec` bits.
#[derive(Debug, Clone)]
pub(crate) struct SeriesTable {
    mu: f64,
    eta: f64,
    ln_abs: Vec<f64>,
    coeff: Vec<f64>,
    mp: Vec<Float>,
    prec: u32,
}

/// ln|1/Γ(μn + η)|, `-inf` at the poles of Γ.
pub(crate) fn ln_abs_coeff(mu: f64, eta: f64, n: usize) -> f64 {
    -ln_abs_gamma_mp(&affine_arg(192, eta, mu, n as i64)).0
}

fn mp_coeff(mu: f64, eta: f64, n: usize, prec: u32) -> Float {
    let g = affine_arg(prec + 64, eta, mu, n as i64);
    Float::with_val(prec, recip_gamma_mp(&g))
}

impl SeriesTable {
    pub(crate) fn empty(mu: f64, eta: f64) -> Self {
        Self {
            mu,
            eta,
            ln_abs: Vec::new(),
            coeff: Vec::new(),
            mp: Vec::new(),
            prec: 0,
        }
    }

    pub(crate) fn build(mu: f64, eta: f64, n_terms: usize, prec: u32) -> Self {
        let mut table = Self::empty(mu, eta);
        table.prec = prec;
        for n in 0..n_terms {
            let c = mp_coeff(mu, eta, n, prec.max(128));
            table.coeff.push(c.to_f64());
            table.mp.push(Float::with_val(prec, &c));
            table.ln_abs.push(ln_abs_coeff(mu, eta, n));
        }
        table
    }

    fn ln_coeff(&self, n: usize) -> f64 {
        match self.ln_abs.get(n) {
            Some(&v) => v,
            None => ln_abs_coeff(self.mu, self.eta, n),
        }
    }

    fn coeff_f64(&self, n: usize) -> f64 {
        match self.coeff.get(n) {
            Some(&v) => v,
            None => mp_coeff(self.mu, self.eta, n, 128).to_f64(),
        }
    }


    /// Profiles the terms at `x = |z| > 0` and picks the cut-off so that the
    /// dropped tail is below `tail_target`. The tail bound uses the fact that
    /// consecutive term ratios `x Γ(μn+η)/Γ(μn+μ+η)` decrease once μn + η > 0
    /// (log-convexity of Γ).
    pub(crate) fn plan(&self, x: f64, tail_target: f64) -> Option<Plan> {
        debug_assert!(x > 0.0);
        let ln_x = x.ln();
        let ln_term = |n: usize| self.ln_coeff(n) + n as f64 * ln_x;
        let mut ln_abs_sum = f64::NEG_INFINITY;
        let mut ln_weighted = f64::NEG_INFINITY;
        let mut next = ln_term(0);
        let mut after = ln_term(1);
        for n in 0..MAX_TERMS {
            let cur = next;
            next = after;
            after = ln_term(n + 2);
            ln_abs_sum = log_add(ln_abs_sum, cur);
            ln_weighted = log_add(ln_weighted, cur + ((n + 3) as f64).ln());
            let positive_args = self.mu * (n + 1) as f64 + self.eta > 0.0;
            if !positive_args || !next.is_finite() {
                continue;
            }
            let ratio = (after - next).exp();
            if ratio >= 0.5 {
                continue;
            }
            let tail = next.exp() / (1.0 - ratio);
            if tail <= tail_target {
                return Some(Plan {
                    last: n,
                    ln_abs_sum,
                    ln_weighted,
                    tail,
                });
            }
        }
        None
    }

    /// Compensated `f64` summation. Returns `(value, rounding bound)`, or
    /// `None` if intermediate powers or coefficients leave the `f64` range.
    pub(crate) fn sum_f64(&self, z: f64, plan: &Plan) -> Option<(f64, f64)> {
        if plan.last as f64 * z.abs().ln() > 700.0 {
            return None;
        }
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        let mut weighted = 0.0f64;
        let mut pow = 1.0f64;
        for n in 0..=plan.last {
            let c = self.coeff_f64(n);
            if c != 0.0 && c.abs() < f64::MIN_POSITIVE {
                return None;
            }
            let term = c * pow;
            weighted += (n as f64 + 3.0) * term.abs();
            // Neumaier
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            pow *= z;
        }
        let value = sum + comp;
        Some((value, f64::EPSILON * (weighted + 2.0 * value.abs())))
    }

    /// Extended-precision summation at `prec` bits.
    /// Returns `(value, rounding bound)` including the final rounding to `f64`.
    pub(crate) fn sum_mp(&self, z: f64, plan: &Plan, prec: u32) -> (f64, f64) {
        let mut sum = Float::with_val(prec, 0);
        let mut pow = Float::with_val(prec, 1);
        let mut term = Float::new(prec);
        let cached = prec <= self.prec;
        for n in 0..=plan.last {
            match self.mp.get(n) {
                Some(c) if cached => term.assign(&pow * c),
                _ => term.assign(&pow * &mp_coeff(self.mu, self.eta, n, prec)),
            }
            sum += &term;
            pow *= z;
        }
        let value = sum.to_f64();
        let unit = (-(prec as f64 - 1.0) * std::f64::consts::LN_2).exp();
        let ln_err = log_add(plan.ln_weighted, plan.ln_abs_sum + ((plan.last + 1) as f64).ln());
        let rounding = unit * ln_err.exp() + 0.5 * ulp(value);
        (value, rounding)
    }
}

/// Distance from `v` to the next larger-magnitude `f64`.
pub fn ulp(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return f64::MIN_POSITIVE;
    }
    let bits = v.abs().to_bits();
    f64::from_bits(bits + 1) - v.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_series_in_f64() {
        let t = SeriesTable::build(1.0, 1.0, 60, 128);
        let plan = t.plan(1.0, 1e-18).unwrap();
        let (v, err) = t.sum_f64(-1.0, &plan).unwrap();
        assert!((v - (-1f64).exp()).abs() <= err + plan.tail + 1e-17);
        assert!(err < 1e-14);
    }

    #[test]
    fn cancellation_needs_extra_bits() {
        let t = SeriesTable::empty(1.0, 1.0);
        let plan = t.plan(40.0, 1e-14).unwrap();
        // e^{40} ≈ 2.4e17 worth of alternating terms.
        assert!(plan.f64_error_estimate() > 1.0);
        let prec = plan.precision_for(1e-14);
        assert!(prec > 100, "{prec}");
        let (v, err) = t.sum_mp(-40.0, &plan, prec);
        assert!((v - (-40f64).exp()).abs() <= err + plan.tail);
        assert!(err < 1e-14);
    }

    #[test]
    fn ulp_of_one() {
        assert_eq!(ulp(1.0), f64::EPSILON);
    }
}
