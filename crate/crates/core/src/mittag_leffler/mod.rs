//! Two-parameter Mittag-Leffler function `E_{μ,η}(z) = Σ zⁿ / Γ(μn + η)` for
//! real arguments, with an emphasis on the negative real axis.
//!
//! Three evaluation routes are combined, each carrying an error bound:
//!
//! * the power series summed in `f64` with compensated summation, when the
//!   alternating terms stay small enough;
//! * the same series in MPFR at a precision sized from the term profile, for
//!   mid-range negative arguments where cancellation would swamp `f64`;
//! * the large-argument expansion (algebraic part plus, for μ ≥ 1, the
//!   exponential residues) past a crossover chosen per (μ, η, tol) so that
//!   the expansion bound is already below the tolerance.
//!
//! Tolerances are absolute. On the positive axis the function grows like
//! `exp(z^{1/μ})`, so once an ulp of the result exceeds the tolerance the
//! evaluator reports `NonConvergence` instead of an unjustified bound.

mod asymptotic;
mod series;
mod zeros;

pub use zeros::{
    ml_real_zeros, ml_real_zeros_with_step, zero_free_bound, ZeroScan, SCAN_EVAL_TOL, SCAN_TOLERANCE,
};

use crate::error::{Error, Result};
use asymptotic::AsymptoticTable;
use serde::{Deserialize, Serialize};
use series::{SeriesTable, MAX_PREC};
use std::sync::OnceLock;

pub use series::ulp;

/// Default absolute tolerance for evaluations.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Upper end of the negative-axis range covered by the cached series table.
const SERIES_COVER_MAX: f64 = 1e4;

/// One evaluation request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLQuery {
    pub mu: f64,
    pub eta: f64,
    pub z: f64,
}

impl MLQuery {
    pub fn new(mu: f64, eta: f64, z: f64) -> Result<Self> {
        check_params(mu, eta)?;
        if !z.is_finite() {
            return Err(Error::domain(format!("argument must be finite, got {z}")));
        }
        Ok(Self { mu, eta, z })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    Asymptotic,
    ExtendedPrecision,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLResult {
    pub value: f64,
    pub abs_error_bound: f64,
    pub method: Method,
}

fn check_params(mu: f64, eta: f64) -> Result<()> {
    if !(mu > 0.0 && mu <= 2.0) {
        return Err(Error::domain(format!("mu must lie in (0, 2], got {mu}")));
    }
    if !eta.is_finite() {
        return Err(Error::domain(format!("eta must be finite, got {eta}")));
    }
    Ok(())
}

/// Reusable evaluator for a fixed `(μ, η)` pair and tolerance.
///
/// Construction tabulates the expansion coefficients and locates the
/// crossover; the series coefficient table is built lazily on first use.
/// The evaluator is `Send + Sync` and every evaluation is a pure function of
/// its argument.
#[derive(Debug)]
pub struct MittagLeffler {
    mu: f64,
    eta: f64,
    tol: f64,
    asym: AsymptoticTable,
    crossover: f64,
    series: OnceLock<SeriesTable>,
}

impl MittagLeffler {
    pub fn new(mu: f64, eta: f64) -> Result<Self> {
        Self::with_tolerance(mu, eta, DEFAULT_TOL)
    }

    pub fn with_tolerance(mu: f64, eta: f64, tol: f64) -> Result<Self> {
        check_params(mu, eta)?;
        if !(tol > 0.0) {
            return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
        }
        let asym = AsymptoticTable::new(mu, eta);
        let crossover = find_crossover(&asym, tol);
        Ok(Self {
            mu,
            eta,
            tol,
            asym,
            crossover,
            series: OnceLock::new(),
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Smallest |z| on the negative axis at which the expansion is used.
    pub fn crossover(&self) -> f64 {
        self.crossover
    }

    fn series(&self) -> &SeriesTable {
        self.series.get_or_init(|| {
            let probe = SeriesTable::empty(self.mu, self.eta);
            let mut cover = self.crossover.min(SERIES_COVER_MAX);
            loop {
                match probe.plan(cover, self.tol / 8.0) {
                    Some(plan) => {
                        let prec = plan.precision_for(self.tol / 4.0);
                        if prec <= MAX_PREC || cover < 1.0 {
                            return SeriesTable::build(self.mu, self.eta, plan.last + 4, prec.min(MAX_PREC));
                        }
                    }
                    None if cover < 1.0 => return probe,
                    None => {}
                }
                cover /= 2.0;
            }
        })
    }

    /// Evaluates `E_{μ,η}(z)` with an absolute error bound not exceeding the
    /// evaluator's tolerance.
    pub fn eval(&self, z: f64) -> Result<MLResult> {
        if !z.is_finite() {
            return Err(Error::domain(format!("argument must be finite, got {z}")));
        }
        if z == 0.0 {
            let value = crate::special::recip_gamma(self.eta);
            return Ok(MLResult {
                value,
                abs_error_bound: 0.5 * ulp(value),
                method: Method::Series,
            });
        }
        let mut best = f64::INFINITY;
        if z < 0.0 && -z >= self.crossover {
            if let Some(r) = self.eval_asymptotic(-z) {
                if r.abs_error_bound <= self.tol {
                    return Ok(r);
                }
                best = best.min(r.abs_error_bound);
            }
        }
        match self.eval_series(z) {
            Ok(r) => return Ok(r),
            Err(Error::NonConvergence { best_bound, .. }) => best = best.min(best_bound),
            Err(e) => return Err(e),
        }
        Err(Error::NonConvergence {
            tol: self.tol,
            best_bound: best,
        })
    }

    /// Shorthand for `eval(z)?.value`.
    pub fn value(&self, z: f64) -> Result<f64> {
        Ok(self.eval(z)?.value)
    }

    fn eval_asymptotic(&self, x: f64) -> Option<MLResult> {
        let n = self.asym.choose_terms(x, self.tol / 2.0)?;
        let alg = self.asym.algebraic(x, n);
        let (exp_value, exp_err) = self.asym.exponential(x);
        let value = alg.value + exp_value;
        Some(MLResult {
            value,
            abs_error_bound: alg.truncation + alg.rounding + exp_err + ulp(value),
            method: Method::Asymptotic,
        })
    }

    fn eval_series(&self, z: f64) -> Result<MLResult> {
        let table = self.series();
        let fail = |best_bound| Error::NonConvergence {
            tol: self.tol,
            best_bound,
        };
        let plan = table.plan(z.abs(), self.tol / 8.0).ok_or_else(|| fail(f64::INFINITY))?;
        if plan.f64_error_estimate() <= self.tol / 4.0 {
            if let Some((value, rounding)) = table.sum_f64(z, &plan) {
                let bound = rounding + plan.tail + 0.5 * ulp(value);
                if bound <= self.tol {
                    return Ok(MLResult {
                        value,
                        abs_error_bound: bound,
                        method: Method::Series,
                    });
                }
            }
        }
        let prec = plan.precision_for(self.tol / 4.0);
        if prec > MAX_PREC {
            return Err(fail(f64::INFINITY));
        }
        let (value, rounding) = table.sum_mp(z, &plan, prec);
        let bound = rounding + plan.tail + 0.5 * ulp(value);
        if bound <= self.tol {
            Ok(MLResult {
                value,
                abs_error_bound: bound,
                method: Method::ExtendedPrecision,
            })
        } else {
            Err(fail(bound))
        }
    }

    /// Large-argument expansion at `E_{μ,η}(−x)` with exactly `n_terms`
    /// algebraic terms plus the exponential residues for μ ≥ 1.
    ///
    /// The bound is the (reflection-envelope) magnitude of term `n_terms + 1`
    /// plus the residue error. Fails with [`Error::AsymptoticRegime`] when that
    /// term is not smaller than the last one kept.
    pub fn asymptotic(&self, x: f64, n_terms: usize) -> Result<MLResult> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::domain(format!("x must be positive, got {x}")));
        }
        let regime = Error::AsymptoticRegime { x, n_terms };
        if n_terms + 1 >= self.asym.len() {
            return Err(regime);
        }
        let next = self.asym.term_envelope(n_terms + 1, x);
        let last = if n_terms == 0 {
            f64::INFINITY
        } else {
            self.asym.term_envelope(n_terms, x)
        };
        if next != 0.0 && next >= last {
            return Err(regime);
        }
        let alg = self.asym.algebraic(x, n_terms);
        let (exp_value, exp_err) = self.asym.exponential(x);
        let value = alg.value + exp_value;
        Ok(MLResult {
            value,
            abs_error_bound: next + alg.rounding + exp_err,
            method: Method::Asymptotic,
        })
    }
}

/// Split of the large-argument expansion at `−x` into its parts.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AsymptoticParts {
    pub algebraic: f64,
    pub oscillation: f64,
    pub error: f64,
}

impl MittagLeffler {
    pub(crate) fn asymptotic_parts(&self, x: f64) -> Result<AsymptoticParts> {
        let n = self
            .asym
            .choose_terms(x, self.tol / 2.0)
            .ok_or(Error::AsymptoticRegime { x, n_terms: 0 })?;
        let alg = self.asym.algebraic(x, n);
        let (_, exp_err) = self.asym.exponential(x);
        Ok(AsymptoticParts {
            algebraic: alg.value,
            oscillation: self.asym.exponential_amplitude(x),
            error: alg.truncation + alg.rounding + exp_err,
        })
    }
}

fn find_crossover(asym: &AsymptoticTable, tol: f64) -> f64 {
    // Geometric grid 2^{k/8}; require the bound to hold on a run of points so
    // that a lucky isolated dip does not set the crossover.
    const RUN: usize = 12;
    let mut run = 0;
    let mut first = None;
    for k in -16..=8 * 48 {
        let x = (k as f64 / 8.0).exp2();
        let ok = match asym.choose_terms(x, tol / 2.0) {
            Some(n) => {
                let alg = asym.algebraic(x, n);
                let (_, exp_err) = asym.exponential(x);
                alg.truncation + alg.rounding + exp_err <= tol / 2.0
            }
            None => false,
        };
        if ok {
            first.get_or_insert(x);
            run += 1;
            if run >= RUN {
                return first.unwrap();
            }
        } else {
            run = 0;
            first = None;
        }
    }
    f64::INFINITY
}

/// Evaluates `E_{μ,η}(z)` to absolute tolerance `tol`.
pub fn ml_eval(q: MLQuery, tol: f64) -> Result<MLResult> {
    MittagLeffler::with_tolerance(q.mu, q.eta, tol)?.eval(q.z)
}

/// The large-argument expansion of `E_{μ,η}(−x)` truncated after `n_terms`
/// algebraic terms. The `j = 1` term is `1/(x Γ(η − μ))`.
pub fn ml_asymptotic(mu: f64, eta: f64, x: f64, n_terms: usize) -> Result<MLResult> {
    if !(mu > 0.0 && mu < 2.0) {
        return Err(Error::domain(format!("mu must lie in (0, 2), got {mu}")));
    }
    MittagLeffler::new(mu, eta)?.asymptotic(x, n_terms)
}

/// Sufficient condition for `E_{μ,η}` to have no real zeros: η ≥ 3μ/2 for
/// 1 < μ < 2. `false` means "not guaranteed", not "has zeros".
pub fn no_real_zeros(mu: f64, eta: f64) -> Result<bool> {
    if !(mu > 1.0 && mu < 2.0) {
        return Err(Error::domain(format!("criterion needs 1 < mu < 2, got {mu}")));
    }
    Ok(eta >= 1.5 * mu)
}

/// Empirical envelope constant `M` in `|E_{μ,η}(−z)| ≤ M / (1 + z)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayEnvelope {
    /// `sup (1 + z)|E_{μ,η}(−z)|` over the whole grid.
    pub m: f64,
    /// Running supremum at the end of each decade `(z_end, sup so far)`.
    pub by_decade: Vec<(f64, f64)>,
}

/// Samples `(1 + z)|E_{μ,η}(−z)|` on a logarithmic grid of `[0, z_max]` with
/// `per_decade` points per decade starting at 10⁻³ (plus z = 0).
pub fn decay_envelope(ml: &MittagLeffler, z_max: f64, per_decade: usize) -> Result<DecayEnvelope> {
    if !(z_max > 1e-3) || per_decade == 0 {
        return Err(Error::domain("decay envelope needs z_max > 1e-3 and a nonempty grid"));
    }
    let mut m = ml.eval(0.0)?.value.abs();
    let mut by_decade = Vec::new();
    let decades = (z_max / 1e-3).log10().ceil() as usize;
    for d in 0..decades {
        for i in 0..per_decade {
            let z = (1e-3 * 10f64.powf(d as f64 + i as f64 / per_decade as f64)).min(z_max);
            m = m.max((1.0 + z) * ml.eval(-z)?.value.abs());
        }
        by_decade.push(((1e-3 * 10f64.powi(d as i32 + 1)).min(z_max), m));
    }
    m = m.max((1.0 + z_max) * ml.eval(-z_max)?.value.abs());
    if let Some(last) = by_decade.last_mut() {
        last.1 = m;
    }
    Ok(DecayEnvelope { m, by_decade })
}
