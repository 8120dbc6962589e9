//! Real zeros of `t ↦ E_{μ,η}(−t)` for 1 < μ < 2.

use super::MittagLeffler;
use crate::error::{Error, Result};
use crate::roots::bisect;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Bisection stops once the bracket is this narrow.
const ZERO_XTOL: f64 = 1e-12;

/// Evaluation tolerance used while scanning.
pub const SCAN_EVAL_TOL: f64 = 1e-13;

/// Accepted |E(−t)| at a reported zero.
pub const SCAN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroScan {
    pub mu: f64,
    pub eta: f64,
    pub t_max: f64,
    pub step: f64,
    /// Ascending zeros in (0, t_max].
    pub zeros: Vec<f64>,
    /// Final sign-change bracket around each zero.
    pub brackets: Vec<(f64, f64)>,
    /// The largest zero (h), absent when there are none.
    pub max_zero: Option<f64>,
    /// Largest |E(−t)| over the reported zeros.
    pub max_residual: f64,
}

/// Default scan step `min(1e-2, t_max/1e4)`.
pub fn default_step(t_max: f64) -> f64 {
    (t_max / 1e4).min(1e-2)
}

pub fn ml_real_zeros(mu: f64, eta: f64, t_max: f64) -> Result<ZeroScan> {
    ml_real_zeros_with_step(mu, eta, t_max, default_step(t_max))
}

/// Locates every sign change of `E_{μ,η}(−t)` on a uniform grid of
/// `(0, t_max]` and refines each by bisection.
pub fn ml_real_zeros_with_step(mu: f64, eta: f64, t_max: f64, step: f64) -> Result<ZeroScan> {
    if !(mu > 1.0 && mu < 2.0) {
        return Err(Error::domain(format!("zero scan needs 1 < mu < 2, got {mu}")));
    }
    if !(t_max > 0.0 && t_max.is_finite()) || !(step > 0.0) {
        return Err(Error::domain("zero scan needs t_max > 0 and step > 0"));
    }
    let ml = MittagLeffler::with_tolerance(mu, eta, SCAN_EVAL_TOL)?;
    let n = (t_max / step).ceil() as usize;
    let grid = |i: usize| (i as f64 * step).min(t_max);
    let values: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|i| ml.value(-grid(i)))
        .collect::<Result<_>>()?;

    let mut brackets = Vec::new();
    for i in 1..=n {
        let (a, b) = (values[i - 1], values[i]);
        if b == 0.0 {
            brackets.push((grid(i), grid(i)));
        } else if a != 0.0 && a.signum() != b.signum() {
            brackets.push((grid(i - 1), grid(i)));
        }
    }
    let refined: Vec<(f64, (f64, f64))> = brackets
        .into_par_iter()
        .map(|(lo, hi)| {
            if lo == hi {
                return Ok((lo, (lo, hi)));
            }
            let f = |t: f64| ml.value(-t);
            let (lo, hi) = bisect(f, lo, hi, ZERO_XTOL)?;
            Ok((0.5 * (lo + hi), (lo, hi)))
        })
        .collect::<Result<_>>()?;
    let zeros: Vec<f64> = refined.iter().map(|r| r.0).collect();
    let mut max_residual = 0.0f64;
    for &t in &zeros {
        max_residual = max_residual.max(ml.value(-t)?.abs());
    }
    if max_residual > SCAN_TOLERANCE {
        return Err(Error::NonConvergence {
            tol: SCAN_TOLERANCE,
            best_bound: max_residual,
        });
    }
    Ok(ZeroScan {
        max_residual,
        mu,
        eta,
        t_max,
        step,
        max_zero: zeros.last().copied(),
        brackets: refined.into_iter().map(|r| r.1).collect(),
        zeros,
    })
}

/// A point past which `E_{μ,η}(−t)` provably keeps the sign of its algebraic
/// part: the oscillating residue term plus the expansion error stays below
/// half the algebraic part on a long geometric run. Returns `None` if no
/// such point is found below 10¹².
pub fn zero_free_bound(ml: &MittagLeffler) -> Option<f64> {
    const RUN: usize = 24;
    let mut run = 0;
    let mut first = None;
    for k in 0..=8 * 40 {
        let x = (k as f64 / 8.0).exp2();
        let Ok(alg) = ml.asymptotic_parts(x) else {
            run = 0;
            first = None;
            continue;
        };
        if alg.algebraic.abs() > 2.0 * (alg.oscillation + alg.error) {
            first.get_or_insert(x);
            run += 1;
            if run >= RUN {
                return first;
            }
        } else {
            run = 0;
            first = None;
        }
    }
    None
}
