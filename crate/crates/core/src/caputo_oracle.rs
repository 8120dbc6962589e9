//! Finite-difference Caputo operators and time-stepped mode equations.
//!
//! These are deliberately independent of the Mittag-Leffler machinery: the
//! closed forms are only used as references to compare against.
//!
//! * order α ∈ (0, 1): the L1 scheme. On a uniform grid it is O(dt^{2−α})
//!   for C² data; the stepper uses the graded mesh `t_n = T (n/N)^r`,
//!   `r = (2−α)/α`, which restores that order for the `t^α`-singular
//!   solutions of `D^α v = −λv`.
//! * order β ∈ (1, 2): Grünwald–Letnikov applied to `v − v₀ − v₁t`
//!   (first order).

use crate::error::{Error, Result};
use crate::special::gamma;
use crate::mode_solver::{FieldSolution, ModeKernel};
use crate::MittagLeffler;
use serde::{Deserialize, Serialize};

/// Tolerance for the closed-form references.
const REFERENCE_TOL: f64 = 1e-13;

/// Errors below this are treated as rounding noise by [`observed_order`].
pub const ROUNDING_FLOOR: f64 = 1e-13;

fn check_alpha(alpha: f64, classical: bool) -> Result<()> {
    let ok = alpha > 0.0 && (alpha < 1.0 || (classical && alpha == 1.0));
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn check_beta(beta: f64, classical: bool) -> Result<()> {
    let ok = beta > 1.0 && (beta < 2.0 || (classical && beta == 2.0));
    if ok {
        Ok(())
    } else {
        Err(Error::domain(format!("beta must lie in (1, 2), got {beta}")))
    }
}

fn check_step(dt: f64, horizon: f64) -> Result<()> {
    if dt > 0.0 && horizon > 0.0 && dt.is_finite() && horizon.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("dt and horizon must be positive"))
    }
}

/// `((d + τ)^{1−α} − d^{1−α}) / τ` without cancellation when τ ≪ d.
fn l1_weight(d: f64, tau: f64, alpha: f64) -> f64 {
    let p = 1.0 - alpha;
    if d == 0.0 {
        return tau.powf(-alpha);
    }
    d.powf(p) * (p * (tau / d).ln_1p()).exp_m1() / tau
}

/// Uniform L1 weights `b_j = (j+1)^{1−α} − j^{1−α}`.
fn l1_uniform_weights(n: usize, alpha: f64) -> Vec<f64> {
    (0..n).map(|j| l1_weight(j as f64, 1.0, alpha)).collect()
}

/// L1 approximation of the Caputo derivative of order α ∈ (0, 1) at every
/// node of a uniform grid. Entry 0 (the initial node) is 0.
pub fn caputo_apply_alpha(samples: &[f64], alpha: f64, dt: f64) -> Result<Vec<f64>> {
    check_alpha(alpha, false)?;
    caputo_alpha_unchecked(samples, alpha, dt)
}

fn caputo_alpha_unchecked(samples: &[f64], alpha: f64, dt: f64) -> Result<Vec<f64>> {
    if samples.len() < 2 || !(dt > 0.0) {
        return Err(Error::domain("need at least 2 samples and dt > 0"));
    }
    let n = samples.len() - 1;
    let b = l1_uniform_weights(n, alpha);
    let scale = dt.powf(-alpha) / gamma(2.0 - alpha);
    let diffs: Vec<f64> = samples.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = vec![0.0; n + 1];
    for m in 1..=n {
        // Σ_{j=0}^{m−1} b_j (f_{m−j} − f_{m−j−1})
        let s: f64 = (0..m).map(|j| b[j] * diffs[m - j - 1]).sum();
        out[m] = scale * s;
    }
    Ok(out)
}

/// L1 value at node `m` only (used where only a few nodes are needed).
fn caputo_alpha_at(samples: &[f64], b: &[f64], scale: f64, m: usize) -> f64 {
    scale * (0..m).map(|j| b[j] * (samples[m - j] - samples[m - j - 1])).sum::<f64>()
}

/// Grünwald–Letnikov weights `w_0 = 1`, `w_j = w_{j−1}(1 − (β+1)/j)`.
pub fn gl_weights(n: usize, beta: f64) -> Vec<f64> {
    let mut w = Vec::with_capacity(n + 1);
    w.push(1.0);
    for j in 1..=n {
        let prev = w[j - 1];
        w.push(prev * (1.0 - (beta + 1.0) / j as f64));
    }
    w
}

/// Caputo derivative of order β ∈ (1, 2) on a uniform grid: GL applied to
/// the samples minus the linear part `v₀ + v₁t`. Entry 0 is 0.
pub fn caputo_apply_beta(samples: &[f64], beta: f64, dt: f64, v0: f64, v1: f64) -> Result<Vec<f64>> {
    check_beta(beta, false)?;
    caputo_beta_unchecked(samples, beta, dt, v0, v1)
}

fn caputo_beta_unchecked(samples: &[f64], beta: f64, dt: f64, v0: f64, v1: f64) -> Result<Vec<f64>> {
    if samples.len() < 2 || !(dt > 0.0) {
        return Err(Error::domain("need at least 2 samples and dt > 0"));
    }
    let n = samples.len() - 1;
    let w = gl_weights(n, beta);
    let g: Vec<f64> = samples
        .iter()
        .enumerate()
        .map(|(i, v)| v - v0 - v1 * (i as f64 * dt))
        .collect();
    let scale = dt.powf(-beta);
    let mut out = vec![0.0; n + 1];
    for m in 1..=n {
        out[m] = scale * (0..=m).map(|j| w[j] * g[m - j]).sum::<f64>();
    }
    Ok(out)
}

fn caputo_beta_at(g: &[f64], w: &[f64], scale: f64, m: usize) -> f64 {
    scale * (0..=m).map(|j| w[j] * g[m - j]).sum::<f64>()
}

/// One time-stepping run compared against its closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRun {
    /// α or β.
    pub order: f64,
    pub lambda: f64,
    /// Nominal step `horizon / N`.
    pub dt: f64,
    pub horizon: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub reference: Vec<f64>,
    pub error_max: f64,
    pub observed_rate: Option<f64>,
}

impl OracleRun {
    fn finish(order: f64, lambda: f64, dt: f64, horizon: f64, times: Vec<f64>, values: Vec<f64>, reference: Vec<f64>) -> Self {
        let error_max = values
            .iter()
            .zip(&reference)
            .fold(0.0f64, |m, (v, r)| m.max((v - r).abs()));
        Self {
            order,
            lambda,
            dt,
            horizon,
            times,
            values,
            reference,
            error_max,
            observed_rate: None,
        }
    }
}

fn steps(dt: f64, horizon: f64) -> usize {
    ((horizon / dt).round() as usize).max(1)
}

/// Mesh grading exponent that gives the L1 scheme its full order 2 − α.
pub fn grading_exponent(alpha: f64) -> f64 {
    ((2.0 - alpha) / alpha).max(1.0)
}

/// Implicit L1 stepping of `D^α v = −λv`, `v(0) = 1` on the graded mesh with
/// `N = horizon/dt` steps. Reference: `E_{α,1}(−λt^α)`.
///
/// `α = 1` is accepted as the classical limit, where the scheme is backward
/// Euler on a uniform mesh.
pub fn step_mode_alpha(lambda: f64, alpha: f64, dt: f64, horizon: f64) -> Result<OracleRun> {
    check_alpha(alpha, true)?;
    check_step(dt, horizon)?;
    if !(lambda >= 0.0) {
        return Err(Error::domain("lambda must be non-negative"));
    }
    let n = steps(dt, horizon);
    let r = grading_exponent(alpha);
    let times: Vec<f64> = (0..=n)
        .map(|i| if i == n { horizon } else { horizon * (i as f64 / n as f64).powf(r) })
        .collect();
    let g = gamma(2.0 - alpha);
    let mut v = vec![1.0; n + 1];
    for m in 1..=n {
        let tm = times[m];
        let mut history = 0.0;
        for k in 1..m {
            let tau = times[k] - times[k - 1];
            history += l1_weight(tm - times[k], tau, alpha) * (v[k] - v[k - 1]);
        }
        let a_mm = l1_weight(0.0, tm - times[m - 1], alpha);
        // a_mm (v_m − v_{m−1}) + history = −λ Γ(2−α) v_m
        v[m] = (a_mm * v[m - 1] - history) / (a_mm + lambda * g);
    }
    let ml = MittagLeffler::with_tolerance(alpha, 1.0, REFERENCE_TOL)?;
    let reference = times
        .iter()
        .map(|t| ml.value(-lambda * t.powf(alpha)))
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleRun::finish(alpha, lambda, horizon / n as f64, horizon, times, v, reference))
}

/// Implicit GL stepping of `D^β v = −λv`, `v(0) = v₀`, `v'(0) = v₁` on a
/// uniform mesh. Reference: `v₀E_{β,1}(−λt^β) + v₁tE_{β,2}(−λt^β)`.
///
/// `β = 2` is accepted as the classical limit (backward second difference).
pub fn step_mode_beta(lambda: f64, beta: f64, v0: f64, v1: f64, dt: f64, horizon: f64) -> Result<OracleRun> {
    check_beta(beta, true)?;
    check_step(dt, horizon)?;
    if !(lambda >= 0.0) {
        return Err(Error::domain("lambda must be non-negative"));
    }
    let n = steps(dt, horizon);
    let h = horizon / n as f64;
    let times: Vec<f64> = (0..=n).map(|i| if i == n { horizon } else { i as f64 * h }).collect();
    let w = gl_weights(n, beta);
    let scale = h.powf(-beta);
    // g = v − v₀ − v₁t, g₀ = 0.
    let mut g = vec![0.0; n + 1];
    for m in 1..=n {
        let history: f64 = (1..=m).map(|j| w[j] * g[m - j]).sum();
        // scale (g_m + history) = −λ (g_m + v₀ + v₁ t_m)
        g[m] = (-lambda * (v0 + v1 * times[m]) - scale * history) / (scale + lambda);
    }
    let values: Vec<f64> = g.iter().zip(&times).map(|(g, t)| g + v0 + v1 * t).collect();
    let e1 = MittagLeffler::with_tolerance(beta, 1.0, REFERENCE_TOL)?;
    let e2 = MittagLeffler::with_tolerance(beta, 2.0, REFERENCE_TOL)?;
    let reference = times
        .iter()
        .map(|&t| {
            let z = -lambda * t.powf(beta);
            Ok(v0 * e1.value(z)? + v1 * t * e2.value(z)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleRun::finish(beta, lambda, h, horizon, times, values, reference))
}

/// Least-squares slope of `log error` against `log step`.
pub fn observed_order(errors: &[f64], steps: &[f64]) -> Result<f64> {
    if errors.len() != steps.len() || errors.len() < 3 {
        return Err(Error::DegenerateData(
            "observed order needs at least 3 (error, step) pairs".into(),
        ));
    }
    if let Some(e) = errors.iter().find(|e| !(e.is_finite() && **e > ROUNDING_FLOOR)) {
        return Err(Error::DegenerateData(format!(
            "error {e:e} is at or below the rounding floor {ROUNDING_FLOOR:e}"
        )));
    }
    if steps.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::DegenerateData("steps must be positive".into()));
    }
    let xs: Vec<f64> = steps.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateData("steps are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    Ok(sxy / sxx)
}

/// Runs `run(dt)` for every step and fills in the observed rate of the set.
pub fn halving_study<F>(dts: &[f64], run: F) -> Result<Vec<OracleRun>>
where
    F: Fn(f64) -> Result<OracleRun> + Sync,
{
    use rayon::prelude::*;
    let mut runs: Vec<OracleRun> = dts.par_iter().map(|&dt| run(dt)).collect::<Result<_>>()?;
    let errors: Vec<f64> = runs.iter().map(|r| r.error_max).collect();
    let steps: Vec<f64> = runs.iter().map(|r| r.dt).collect();
    let rate = observed_order(&errors, &steps).ok();
    for r in &mut runs {
        r.observed_rate = rate;
    }
    Ok(runs)
}

/// Fractions of the half-interval at which [`residual_field_check`] probes
/// the discrete residual. The nodes stay fixed as the step is halved.
pub const PROBE_FRACTIONS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualLevel {
    pub dt_alpha: f64,
    pub dt_beta: f64,
    /// max over x grid and probe nodes of |D^α_h u + l(u)| for y > 0.
    pub alpha_residual: f64,
    /// Same for the order-β side (in t = −y).
    pub beta_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub levels: Vec<ResidualLevel>,
    /// Consecutive ratios `r(dt) / r(dt/2)`.
    pub alpha_ratios: Vec<f64>,
    pub beta_ratios: Vec<f64>,
    pub alpha_order: Option<f64>,
    pub beta_order: Option<f64>,
    /// `2 − α` for the L1 side and 1 for the GL side.
    pub expected_alpha_order: f64,
    pub expected_beta_order: f64,
}

/// Applies the discrete operators to the assembled solution and measures
/// `D u + l(u)` at fixed nodes `y = b·{¼, ½, ¾, 1}` and `y = −a·{¼, ½, ¾, 1}`
/// for `halvings + 1` successively halved steps starting near `dt`.
///
/// Both operators are linear, so they are applied to each mode profile
/// `u_k(y)` and recombined with `X_k(x)` on the x grid, which equals applying
/// them to every x-line of the field. `l(X_k) = λ_k X_k` turns the spatial
/// part into `λ_k u_k`. The lower side uses `v₀ = u(x, 0)` and
/// `v₁ = −u_y(x, −0) = Σ X_k c₃`.
pub fn residual_field_check(f: &FieldSolution, dt: f64, halvings: usize) -> Result<ResidualReport> {
    let cfg = &f.config;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::domain("dt must be positive"));
    }
    let kernel = ModeKernel::new(cfg)?;
    let active: Vec<usize> = (0..f.modes.len()).filter(|&k| f.modes[k].c1 != 0.0).collect();
    let basis: Vec<Vec<f64>> = active
        .iter()
        .map(|&k| f.x.iter().map(|&x| f.eigs[k].eigenfunction.eval(x)).collect())
        .collect();
    let n_intervals = |len: f64| (((len / dt).ceil() as usize + 3) / 4 * 4).max(4);
    let (na0, nb0) = (n_intervals(cfg.b), n_intervals(cfg.a));

    let combine = |per_mode: &[Vec<f64>]| -> f64 {
        let mut worst = 0.0f64;
        for p in 0..PROBE_FRACTIONS.len() {
            for i in 0..f.x.len() {
                let v: f64 = per_mode.iter().zip(&basis).map(|(r, x)| r[p] * x[i]).sum();
                worst = worst.max(v.abs());
            }
        }
        worst
    };

    let mut levels = Vec::with_capacity(halvings + 1);
    for level in 0..=halvings {
        let na = na0 << level;
        let nb = nb0 << level;
        let ha = cfg.b / na as f64;
        let hb = cfg.a / nb as f64;
        let b_w = l1_uniform_weights(na, cfg.alpha);
        let a_scale = ha.powf(-cfg.alpha) / gamma(2.0 - cfg.alpha);
        let g_w = gl_weights(nb, cfg.beta);
        let g_scale = hb.powf(-cfg.beta);

        let mut upper = Vec::with_capacity(active.len());
        let mut lower = Vec::with_capacity(active.len());
        for &k in &active {
            let m = &f.modes[k];
            let u: Vec<f64> = (0..=na)
                .map(|j| kernel.eval(m, if j == na { cfg.b } else { j as f64 * ha }))
                .collect::<Result<_>>()?;
            upper.push(
                PROBE_FRACTIONS
                    .iter()
                    .map(|fr| {
                        let j = (fr * na as f64).round() as usize;
                        caputo_alpha_at(&u, &b_w, a_scale, j) + m.lambda * u[j]
                    })
                    .collect::<Vec<f64>>(),
            );
            let v: Vec<f64> = (0..=nb)
                .map(|j| kernel.eval(m, if j == nb { -cfg.a } else { -(j as f64 * hb) }))
                .collect::<Result<_>>()?;
            let g: Vec<f64> = v
                .iter()
                .enumerate()
                .map(|(j, vj)| vj - m.c2 - m.c3 * (j as f64 * hb))
                .collect();
            lower.push(
                PROBE_FRACTIONS
                    .iter()
                    .map(|fr| {
                        let j = (fr * nb as f64).round() as usize;
                        caputo_beta_at(&g, &g_w, g_scale, j) + m.lambda * v[j]
                    })
                    .collect::<Vec<f64>>(),
            );
        }
        levels.push(ResidualLevel {
            dt_alpha: ha,
            dt_beta: hb,
            alpha_residual: combine(&upper),
            beta_residual: combine(&lower),
        });
    }

    let ratios = |sel: fn(&ResidualLevel) -> f64| -> Vec<f64> {
        levels.windows(2).map(|w| sel(&w[0]) / sel(&w[1])).collect()
    };
    let order = |sel: fn(&ResidualLevel) -> f64, step: fn(&ResidualLevel) -> f64| {
        let e: Vec<f64> = levels.iter().map(sel).collect();
        let h: Vec<f64> = levels.iter().map(step).collect();
        observed_order(&e, &h).ok()
    };
    Ok(ResidualReport {
        alpha_ratios: ratios(|l| l.alpha_residual),
        beta_ratios: ratios(|l| l.beta_residual),
        alpha_order: order(|l| l.alpha_residual, |l| l.dt_alpha),
        beta_order: order(|l| l.beta_residual, |l| l.dt_beta),
        expected_alpha_order: 2.0 - cfg.alpha,
        expected_beta_order: 1.0,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_weight_matches_direct_formula() {
        for &(d, tau, a) in &[(1.0f64, 0.5f64, 0.3f64), (10.0, 1.0, 0.75), (3.0, 3.0, 0.5)] {
            let direct = ((d + tau).powf(1.0 - a) - d.powf(1.0 - a)) / tau;
            assert!((l1_weight(d, tau, a) - direct).abs() < 1e-14);
        }
        // Far history: the direct difference loses every digit.
        let w = l1_weight(1.0, 1e-17, 0.5);
        assert!((w - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gl_weights_for_integer_order_two() {
        let w = gl_weights(4, 2.0);
        assert_eq!(w, vec![1.0, -2.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn observed_order_of_synthetic_data() {
        let steps = [0.1, 0.05, 0.025, 0.0125];
        let errors: Vec<f64> = steps.iter().map(|h| 3.0 * h * h).collect();
        assert!((observed_order(&errors, &steps).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(
            observed_order(&[0.0, 0.0, 0.0], &[0.1, 0.05, 0.025]),
            Err(Error::DegenerateData(_))
        ));
    }
}
