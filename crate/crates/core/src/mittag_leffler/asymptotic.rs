//! Large-argument expansion of E_{μ,η}(−x) on the negative real axis.
//!
//! For x → ∞ the function splits into an algebraic part
//! `−Σ_{j≥1} (−x)^{−j} / Γ(η − μj)` and, when μ ≥ 1, exponential contributions
//! from the residues at `Z = x^{1/μ} e^{±iπ/μ}`. The algebraic part is only
//! asymptotic, so it is truncated at the smallest term of its envelope.

use crate::special::{affine_arg, ln_abs_gamma_mp, recip_gamma_mp};
use rug::Float;
use std::f64::consts::PI;

/// Hard cap on the number of tabulated coefficients.
const MAX_TERMS: usize = 600;

/// Coefficients are tabulated until the terms grow even at this argument, so
/// the optimal truncation point is available for every x up to it (subject
/// to the hard cap).
const TABLE_X_COVER: f64 = 1e6;

#[derive(Debug, Clone)]
pub(crate) struct AsymptoticTable {
    mu: f64,
    eta: f64,
    /// `recip[j - 1] = 1/Γ(η − μj)`.
    recip: Vec<f64>,
    /// `ln_env[j - 1]` is the log of an upper bound on `|1/Γ(η − μj)|`:
    /// exact for η − μj ≥ 1, `Γ(1 − g)/π` by reflection below that.
    ln_env: Vec<f64>,
    /// First index at which the reflection envelope applies.
    first_reflected: usize,
    /// All terms from this index on vanish identically (integer μ and η).
    exact_from: Option<usize>,
}

/// Algebraic sum and its error terms at a given truncation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Expansion {
    pub value: f64,
    pub truncation: f64,
    pub rounding: f64,
}

impl AsymptoticTable {
    pub(crate) fn new(mu: f64, eta: f64) -> Self {
        let ln_pi = PI.ln();
        let mut recip = Vec::new();
        let mut ln_env = Vec::new();
        let mut first_reflected = None;
        let min_increment = TABLE_X_COVER.ln();
        for j in 1..=MAX_TERMS {
            let g = affine_arg(192, eta, -mu, j as i64);
            recip.push(recip_gamma_mp(&g).to_f64());
            let env = if g >= 1 {
                -ln_abs_gamma_mp(&g).0
            } else {
                first_reflected.get_or_insert(j);
                let mut one_minus = Float::with_val(g.prec(), 1);
                one_minus -= &g;
                ln_abs_gamma_mp(&one_minus).0 - ln_pi
            };
            ln_env.push(env);
            if let Some(j0) = first_reflected {
                let n = ln_env.len();
                if j > j0 + 2 && ln_env[n - 1] - ln_env[n - 2] >= min_increment {
                    break;
                }
            }
        }
        let exact_from = if mu.fract() == 0.0 && eta.fract() == 0.0 {
            Some(((eta / mu).ceil() as usize).max(1))
        } else {
            None
        };
        Self {
            mu,
            eta,
            recip,
            ln_env,
            first_reflected: first_reflected.unwrap_or(MAX_TERMS),
            exact_from,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.recip.len()
    }

    /// Log of the envelope of term `j` at argument `x`.
    fn ln_term_env(&self, j: usize, ln_x: f64) -> f64 {
        self.ln_env[j - 1] - j as f64 * ln_x
    }

    fn vanishes_from(&self, j: usize) -> bool {
        self.exact_from.is_some_and(|e| j >= e)
    }

    /// Envelope magnitude of term `j` (zero when every term from `j` on vanishes).
    pub(crate) fn term_envelope(&self, j: usize, x: f64) -> f64 {
        if self.vanishes_from(j) || j > self.len() {
            return if self.vanishes_from(j) { 0.0 } else { f64::INFINITY };
        }
        self.ln_term_env(j, x.ln()).exp()
    }

    /// Number of algebraic terms to keep at `x`: the first count whose
    /// truncation bound is below `target`, or the optimal truncation if the
    /// envelope turns upward first. `None` when the table runs out.
    pub(crate) fn choose_terms(&self, x: f64, target: f64) -> Option<usize> {
        let ln_x = x.ln();
        let start = self.first_reflected.max(1);
        if let Some(e) = self.exact_from {
            if e <= start {
                return Some((e - 1).min(self.len() - 1));
            }
        }
        let ln_target = (0.5 * target).ln();
        for n in (start - 1)..(self.len() - 1) {
            let next = self.ln_term_env(n + 1, ln_x);
            if next <= ln_target {
                return Some(n);
            }
            if n >= start && next >= self.ln_term_env(n, ln_x) {
                return Some(n);
            }
        }
        None
    }

    /// Algebraic part with `n` terms. Truncation error is twice the envelope of
    /// the first omitted term (zero when the tail vanishes identically).
    pub(crate) fn algebraic(&self, x: f64, n: usize) -> Expansion {
        debug_assert!(n < self.len());
        let inv_x = 1.0 / x;
        let mut pow = 1.0;
        let mut sum = 0.0;
        let mut abs_weighted = 0.0;
        for j in 1..=n {
            pow *= -inv_x;
            let term = -pow * self.recip[j - 1];
            sum += term;
            abs_weighted += (j as f64 + 2.0) * term.abs();
        }
        let truncation = if self.vanishes_from(n + 1) {
            0.0
        } else {
            2.0 * self.term_envelope(n + 1, x)
        };
        Expansion {
            value: sum,
            truncation,
            rounding: f64::EPSILON * abs_weighted,
        }
    }

    /// Magnitude of the exponential residue contributions.
    pub(crate) fn exponential_amplitude(&self, x: f64) -> f64 {
        let (mu, eta) = (self.mu, self.eta);
        if mu < 1.0 {
            0.0
        } else if mu == 1.0 {
            ((1.0 - eta) * x.ln() - x).exp()
        } else {
            let r = x.powf(1.0 / mu);
            2.0 / mu * ((1.0 - eta) * r.ln() + r * (PI / mu).cos()).exp()
        }
    }

    /// Exponential residue contributions as `(value, error)`.
    ///
    /// For 1 < μ ≤ 2 both conjugate residues enter; for μ = 1 the single real
    /// residue enters when η is an integer and is otherwise charged to the
    /// error. For μ < 1 no residue lies on the principal sheet.
    pub(crate) fn exponential(&self, x: f64) -> (f64, f64) {
        let (mu, eta) = (self.mu, self.eta);
        if mu < 1.0 {
            return (0.0, 0.0);
        }
        if mu == 1.0 {
            let amp = ((1.0 - eta) * x.ln() - x).exp();
            if eta.fract() == 0.0 {
                let sign = if (1.0 - eta).rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
                return (sign * amp, 4.0 * f64::EPSILON * amp);
            }
            return (0.0, amp);
        }
        let r = x.powf(1.0 / mu);
        let theta = PI / mu;
        let amp = 2.0 / mu * ((1.0 - eta) * r.ln() + r * theta.cos()).exp();
        let phase = (1.0 - eta) * theta + r * theta.sin();
        let err = amp * f64::EPSILON * (8.0 + 4.0 * r + 4.0 * r.ln().abs());
        (amp * phase.cos(), err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    #[test]
    fn leading_term_matches_closed_form() {
        let t = AsymptoticTable::new(0.4, 1.0);
        let e = t.algebraic(1e4, 1);
        assert!((e.value - 1.0 / (1e4 * gamma(0.6))).abs() < 1e-20);
    }

    #[test]
    fn integer_parameters_have_exact_tail() {
        let t = AsymptoticTable::new(2.0, 1.0);
        assert_eq!(t.term_envelope(1, 10.0), 0.0);
        let t = AsymptoticTable::new(1.0, 2.0);
        let e = t.algebraic(5.0, 1);
        assert_eq!(e.truncation, 0.0);
        assert_eq!(e.value, 0.2);
    }

    #[test]
    fn optimal_truncation_moves_out_with_x() {
        let t = AsymptoticTable::new(0.5, 1.0);
        let p2 = t.choose_terms(2.0, 0.0).unwrap();
        let p3 = t.choose_terms(3.0, 0.0).unwrap();
        assert!(p3 > p2);
        // A loose target stops early.
        assert!(t.choose_terms(3.0, 1e-3).unwrap() < p3);
    }

    #[test]
    fn wave_limit_is_cosine() {
        let t = AsymptoticTable::new(2.0, 1.0);
        for &s in &[0.5, 3.0, 17.0] {
            let (v, _) = t.exponential(s * s);
            assert!((v - s.cos()).abs() < 1e-14, "{s}");
        }
        let t = AsymptoticTable::new(2.0, 2.0);
        let (v, _) = t.exponential(49.0);
        assert!((v - 7f64.sin() / 7.0).abs() < 1e-15);
    }
}
