//! Per-mode closed-form solutions, the uniqueness determinant Δ(k), and the
//! assembled series solution.
//!
//! Mode `k` solves `D^α u = −λ_k u` for y > 0 and `D^β u = −λ_k u` (in the
//! variable −y) for y < 0, glued at y = 0 by continuity and the flux
//! condition, with the nonlocal datum `u(b) − u(−a) = φ_k`:
//!
//! ```text
//! u_k(y) = c₁ E_{α,1}(−λ y^α)                              y ≥ 0
//! u_k(y) = c₂ E_{β,1}(−λ(−y)^β) + c₃ (−y) E_{β,2}(−λ(−y)^β)   y < 0
//! c₂ = c₁,  c₃ = λ c₁,  c₁ Δ = φ_k
//! ```

use crate::error::{Error, Result};
use crate::grid::linspace;
use crate::mittag_leffler::{ml_real_zeros, no_real_zeros, zero_free_bound};
use crate::spectral_basis::{
    analytic_eigens, fourier_coeffs, numeric_eigens_s1, validate_phi, EigenPair, Phi, PhiReport,
    Potential, SourceData,
};
use crate::special::gamma;
use crate::MittagLeffler;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Reading of the nonlocal condition, repeated in every report.
pub const NONLOCAL_NOTE: &str =
    "nonlocal condition applied as u(x,b) - u(x,-a) = phi(x), i.e. at y = -a";

/// Largest argument scanned for zeros of E_{β,2}(−t).
pub const H_SCAN_LIMIT: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Absolute tolerance of every Mittag-Leffler evaluation.
    pub ml: f64,
    /// |Δ(k)| at or below this is treated as zero.
    pub degenerate: f64,
    /// |φ_k| at or below this counts as orthogonal for a degenerate mode.
    pub orthogonality: f64,
    /// Accepted max-norm jump residual.
    pub jump: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ml: 1e-12,
            degenerate: 1e-8,
            orthogonality: 1e-10,
            jump: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub nx: usize,
    /// Total y intervals, split between [−a, 0] and [0, b].
    pub ny: usize,
}

#[derive(Debug, Clone)]
pub struct ProblemConfig {
    pub s: u32,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub p0: Potential,
    pub phi: Phi,
    /// Number of retained modes K.
    pub k: usize,
    pub grid: Grid,
    pub tolerances: Tolerances,
    /// Admit the classical endpoints α = 1 and β = 2 (diagnostics only).
    pub classical_switch: bool,
}

impl ProblemConfig {
    /// The demonstration problem: α = 0.5, β = 1.5, a = b = 1, s = 1,
    /// p₀ = 0, φ = sin x + 0.5 sin 3x, K = 64.
    pub fn demo() -> Self {
        Self {
            s: 1,
            alpha: 0.5,
            beta: 1.5,
            a: 1.0,
            b: 1.0,
            p0: Potential::Constant(0.0),
            phi: Phi::SineCoeffs(vec![1.0, 0.0, 0.5]),
            k: 64,
            grid: Grid { nx: 64, ny: 64 },
            tolerances: Tolerances::default(),
            classical_switch: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.classical_switch;
        if !(self.alpha > 0.0 && (self.alpha < 1.0 || (c && self.alpha == 1.0))) {
            return Err(Error::domain(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.beta > 1.0 && (self.beta < 2.0 || (c && self.beta == 2.0))) {
            return Err(Error::domain(format!("beta must lie in (1, 2), got {}", self.beta)));
        }
        for (name, v) in [("a", self.a), ("b", self.b)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.s == 0 {
            return Err(Error::domain("s must be at least 1"));
        }
        if self.k == 0 {
            return Err(Error::domain("K must be at least 1"));
        }
        if self.grid.nx == 0 || self.grid.ny < 2 {
            return Err(Error::domain("grid needs nx >= 1 and ny >= 2"));
        }
        let t = &self.tolerances;
        if [t.ml, t.degenerate, t.orthogonality, t.jump].iter().any(|v| !(*v > 0.0)) {
            return Err(Error::domain("tolerances must be positive"));
        }
        match &self.p0 {
            Potential::Constant(p) => {
                if !(1.0 + p > 0.0) {
                    return Err(Error::PositivityViolation { lambda_1: 1.0 + p });
                }
            }
            Potential::Samples { samples } => {
                if self.s != 1 {
                    return Err(Error::domain("sampled p0 is supported only for s = 1"));
                }
                if samples.len() < 8 * self.k {
                    return Err(Error::domain(format!(
                        "sampled p0 needs at least 8K = {} points, got {}",
                        8 * self.k,
                        samples.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Eigenpairs k = 1..=K (analytic for constant p₀, numeric otherwise).
    pub fn eigens(&self) -> Result<Vec<EigenPair>> {
        match &self.p0 {
            Potential::Constant(p) => analytic_eigens(self.s, *p, self.k),
            Potential::Samples { samples } => numeric_eigens_s1(samples, self.k),
        }
    }

    /// Large-k limit of Δ(k): `−1/(a^{β−1} Γ(2−β))`; absent at β = 2.
    pub fn delta_limit(&self) -> Option<f64> {
        if self.beta >= 2.0 {
            return None;
        }
        Some(-1.0 / (self.a.powf(self.beta - 1.0) * gamma(2.0 - self.beta)))
    }

    /// Grid ordinates: `ny_neg` intervals on [−a, 0], the rest on [0, b].
    pub fn y_grid(&self) -> Vec<f64> {
        let ny = self.grid.ny;
        let neg = ((ny as f64 * self.a / (self.a + self.b)).round() as usize).clamp(1, ny - 1);
        let mut y = linspace(-self.a, 0.0, neg);
        y.extend(linspace(0.0, self.b, ny - neg).into_iter().skip(1));
        y
    }

    pub fn x_grid(&self) -> Vec<f64> {
        linspace(0.0, std::f64::consts::PI, self.grid.nx)
    }
}

/// The three Mittag-Leffler evaluators a mode needs.
#[derive(Debug)]
pub struct ModeKernel {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    e_alpha: MittagLeffler,
    e_beta1: MittagLeffler,
    e_beta2: MittagLeffler,
}

impl ModeKernel {
    pub fn new(cfg: &ProblemConfig) -> Result<Self> {
        cfg.validate()?;
        let tol = cfg.tolerances.ml;
        Ok(Self {
            alpha: cfg.alpha,
            beta: cfg.beta,
            a: cfg.a,
            b: cfg.b,
            e_alpha: MittagLeffler::with_tolerance(cfg.alpha, 1.0, tol)?,
            e_beta1: MittagLeffler::with_tolerance(cfg.beta, 1.0, tol)?,
            e_beta2: MittagLeffler::with_tolerance(cfg.beta, 2.0, tol)?,
        })
    }

    /// `E_{α,1}(−λ y^α)` for y ≥ 0.
    pub fn upper(&self, lambda: f64, y: f64) -> Result<f64> {
        self.e_alpha.value(-lambda * y.powf(self.alpha))
    }

    /// `(E_{β,1}(−λ t^β), t E_{β,2}(−λ t^β))` for t = −y ≥ 0.
    pub fn lower(&self, lambda: f64, t: f64) -> Result<(f64, f64)> {
        let z = -lambda * t.powf(self.beta);
        Ok((self.e_beta1.value(z)?, t * self.e_beta2.value(z)?))
    }

    /// `Δ = E_{α,1}(−λb^α) − (E_{β,1}(−λa^β) + aλE_{β,2}(−λa^β))`.
    pub fn delta(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
        }
        let up = self.upper(lambda, self.b)?;
        let (e1, te2) = self.lower(lambda, self.a)?;
        Ok(up - (e1 + lambda * te2))
    }

    /// `u_k(y)` on [−a, b]. At y = 0 both branches give c₁.
    pub fn eval(&self, m: &ModeSolution, y: f64) -> Result<f64> {
        if !(y >= -self.a && y <= self.b) {
            return Err(Error::domain(format!("y = {y} lies outside [-a, b] = [{}, {}]", -self.a, self.b)));
        }
        if m.c1 == 0.0 && m.c2 == 0.0 && m.c3 == 0.0 {
            return Ok(0.0);
        }
        if y >= 0.0 {
            Ok(m.c1 * self.upper(m.lambda, y)?)
        } else {
            let (e1, te2) = self.lower(m.lambda, -y)?;
            Ok(m.c2 * e1 + m.c3 * te2)
        }
    }

    /// Lower-branch value at y = 0 (for the continuity check).
    pub fn eval_lower_at_zero(&self, m: &ModeSolution) -> Result<f64> {
        let (e1, te2) = self.lower(m.lambda, 0.0)?;
        Ok(m.c2 * e1 + m.c3 * te2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSolution {
    pub k: usize,
    pub lambda: f64,
    pub phi_k: f64,
    pub delta: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Set to zero as the minimal-norm choice for a degenerate mode.
    pub zeroed: bool,
}

/// Δ(λ) for the parameters of `cfg`, each Mittag-Leffler term at the
/// configured tolerance (10⁻¹² by default).
pub fn delta(lambda: f64, cfg: &ProblemConfig) -> Result<f64> {
    ModeKernel::new(cfg)?.delta(lambda)
}

pub fn solve_mode(k: usize, lambda: f64, phi_k: f64, kernel: &ModeKernel, threshold: f64) -> Result<ModeSolution> {
    let delta = kernel.delta(lambda)?;
    if delta.abs() <= threshold {
        return Err(Error::DegenerateMode { k, delta });
    }
    let c1 = phi_k / delta;
    Ok(ModeSolution {
        k,
        lambda,
        phi_k,
        delta,
        c1,
        c2: c1,
        c3: lambda * c1,
        zeroed: false,
    })
}

/// `u_k(y)` for a single mode, building the evaluators from `cfg`.
pub fn eval_mode(m: &ModeSolution, y: f64, cfg: &ProblemConfig) -> Result<f64> {
    ModeKernel::new(cfg)?.eval(m, y)
}

/// Solves the 3×3 system of continuity, flux and jump conditions for
/// `(c₁, c₂, c₃)` by Gaussian elimination — an independent re-derivation of
/// the closed-form coefficients.
pub fn solve_mode_system(lambda: f64, phi_k: f64, kernel: &ModeKernel) -> Result<[f64; 3]> {
    let up = kernel.upper(lambda, kernel.b)?;
    let (e1, te2) = kernel.lower(lambda, kernel.a)?;
    let mut m = [
        [1.0, -1.0, 0.0, 0.0],
        [lambda, 0.0, -1.0, 0.0],
        [up, -e1, -te2, phi_k],
    ];
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        m.swap(col, piv);
        if m[col][col] == 0.0 {
            return Err(Error::DegenerateMode { k: 0, delta: 0.0 });
        }
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for c in col..4 {
                m[row][c] -= f * m[col][c];
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut v = m[row][3];
        for c in row + 1..3 {
            v -= m[row][c] * x[c];
        }
        x[row] = v / m[row][row];
    }
    Ok(x)
}

/// The `b` in `[b_lo, b_hi]` at which Δ(k) vanishes for the other
/// parameters of `cfg`, bisected to `xtol`. Only the upper-branch term
/// depends on `b`, and it is monotone in `b`, so there is at most one root.
pub fn degenerate_b(cfg: &ProblemConfig, k: usize, b_lo: f64, b_hi: f64, xtol: f64) -> Result<f64> {
    let eigs = cfg.eigens()?;
    let lambda = eigs
        .get(k.wrapping_sub(1))
        .ok_or_else(|| Error::domain(format!("mode {k} is outside 1..={}", eigs.len())))?
        .lambda;
    let kernel = ModeKernel::new(cfg)?;
    let (e1, te2) = kernel.lower(lambda, cfg.a)?;
    let lower = e1 + lambda * te2;
    let (lo, hi) = crate::roots::bisect(|b| Ok(kernel.upper(lambda, b)? - lower), b_lo, b_hi, xtol)?;
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub k: usize,
    pub lambda: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub rows: Vec<DeltaRow>,
    pub min_abs_delta: f64,
    pub argmin: usize,
    pub threshold: f64,
    /// Indices with |Δ(k)| ≤ threshold.
    pub flagged: Vec<usize>,
    /// `−1/(a^{β−1}Γ(2−β))`, absent at β = 2.
    pub limit: Option<f64>,
    /// E_{β,2}(−t) is guaranteed zero-free (η = 2 ≥ 3β/2).
    pub zero_free_guaranteed: bool,
    /// Largest real zero of E_{β,2}(−t), if any was found.
    pub h: Option<f64>,
    /// Upper end of the zero scan.
    pub h_scan_limit: Option<f64>,
    /// First index with λ_k a^β > h (1 when there is no zero).
    pub k0: Option<usize>,
    /// Fitted p in |Δ(k) − limit| ≈ C λ_k^{−p} over the upper half.
    pub convergence_order: Option<f64>,
    /// First index from which |Δ(k) − limit| decreases monotonically.
    pub monotone_from: Option<usize>,
    pub note: String,
}

/// Δ(k) for the configured eigenvalues and the diagnostics around it.
pub fn uniqueness_scan(cfg: &ProblemConfig) -> Result<UniquenessReport> {
    let eigs = cfg.eigens()?;
    let kernel = ModeKernel::new(cfg)?;
    uniqueness_scan_with(cfg, &kernel, &eigs)
}

pub fn uniqueness_scan_with(cfg: &ProblemConfig, kernel: &ModeKernel, eigs: &[EigenPair]) -> Result<UniquenessReport> {
    let rows: Vec<DeltaRow> = eigs
        .par_iter()
        .map(|e| {
            Ok(DeltaRow {
                k: e.k,
                lambda: e.lambda,
                delta: kernel.delta(e.lambda)?,
            })
        })
        .collect::<Result<_>>()?;
    let threshold = cfg.tolerances.degenerate;
    let (argmin, min_abs_delta) = rows
        .iter()
        .map(|r| (r.k, r.delta.abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, f64::INFINITY));
    let flagged = rows.iter().filter(|r| r.delta.abs() <= threshold).map(|r| r.k).collect();
    let limit = cfg.delta_limit();

    let (zero_free_guaranteed, h, h_scan_limit) = if cfg.beta < 2.0 {
        if no_real_zeros(cfg.beta, 2.0)? {
            (true, None, None)
        } else {
            let ml = MittagLeffler::new(cfg.beta, 2.0)?;
            let t_max = zero_free_bound(&ml).unwrap_or(H_SCAN_LIMIT).min(H_SCAN_LIMIT);
            let scan = ml_real_zeros(cfg.beta, 2.0, t_max)?;
            (false, scan.max_zero, Some(t_max))
        }
    } else {
        (false, None, None)
    };
    let k0 = match h {
        Some(h) => rows.iter().find(|r| r.lambda * cfg.a.powf(cfg.beta) > h).map(|r| r.k),
        None if cfg.beta < 2.0 => rows.first().map(|r| r.k),
        None => None,
    };

    let (convergence_order, monotone_from) = match limit {
        Some(l) => {
            let dev: Vec<(f64, f64)> = rows.iter().map(|r| (r.lambda, (r.delta - l).abs())).collect();
            let upper = &dev[dev.len() / 2..];
            let order = if upper.len() >= 3 && upper.iter().all(|d| d.1 > 0.0) {
                let xs: Vec<f64> = upper.iter().map(|d| d.0.ln()).collect();
                let ys: Vec<f64> = upper.iter().map(|d| d.1.ln()).collect();
                Some(-slope(&xs, &ys))
            } else {
                None
            };
            let mut from = None;
            for i in (0..dev.len()).rev() {
                if i + 1 < dev.len() && dev[i + 1].1 >= dev[i].1 {
                    break;
                }
                from = Some(rows[i].k);
            }
            (order, from)
        }
        None => (None, None),
    };

    Ok(UniquenessReport {
        rows,
        min_abs_delta,
        argmin,
        threshold,
        flagged,
        limit,
        zero_free_guaranteed,
        h,
        h_scan_limit,
        k0,
        convergence_order,
        monotone_from,
        note: NONLOCAL_NOTE.to_string(),
    })
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    sxy / sxx
}

/// The assembled truncated series `u(x, y) = Σ_{k≤K} X_k(x) u_k(y)`.
#[derive(Debug, Clone)]
pub struct FieldSolution {
    pub config: ProblemConfig,
    pub eigs: Vec<EigenPair>,
    pub source: SourceData,
    pub modes: Vec<ModeSolution>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `values[i][j] = u(x_i, y_j)`.
    pub values: Vec<Vec<f64>>,
    /// Estimated bound on the dropped remainder (see [`tail_estimate`]).
    pub tail_bound: f64,
    /// Fitted decay exponent of `λ_k |φ_k| sup|X_k|`, when a fit was made.
    pub tail_rate: Option<f64>,
    pub phi_report: PhiReport,
}

impl FieldSolution {
    pub fn zeroed_modes(&self) -> Vec<usize> {
        self.modes.iter().filter(|m| m.zeroed).map(|m| m.k).collect()
    }

    /// Index of y = 0 in the y grid.
    pub fn y_zero_index(&self) -> usize {
        self.y.iter().position(|&y| y == 0.0).expect("y grid contains 0")
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Solves every mode and sums the series on the configured grid. Fails with
/// [`Error::DegenerateMode`] at the first mode with |Δ(k)| ≤ threshold.
pub fn assemble(cfg: &ProblemConfig) -> Result<FieldSolution> {
    build_field(cfg, &[])
}

/// As [`assemble`], but the listed degenerate modes are set to zero when φ
/// is orthogonal to them; otherwise [`Error::Infeasible`] lists the
/// offending indices with |φ_k|.
pub fn solve_degenerate(cfg: &ProblemConfig, degenerate: &[usize]) -> Result<FieldSolution> {
    build_field(cfg, degenerate)
}

/// Runs the uniqueness scan and routes to [`assemble`] or
/// [`solve_degenerate`].
pub fn solve(cfg: &ProblemConfig) -> Result<(UniquenessReport, FieldSolution)> {
    let eigs = cfg.eigens()?;
    let kernel = ModeKernel::new(cfg)?;
    let scan = uniqueness_scan_with(cfg, &kernel, &eigs)?;
    let field = build_field_with(cfg, &kernel, eigs, &scan.flagged)?;
    Ok((scan, field))
}

fn build_field(cfg: &ProblemConfig, degenerate: &[usize]) -> Result<FieldSolution> {
    let eigs = cfg.eigens()?;
    let kernel = ModeKernel::new(cfg)?;
    build_field_with(cfg, &kernel, eigs, degenerate)
}

fn build_field_with(cfg: &ProblemConfig, kernel: &ModeKernel, eigs: Vec<EigenPair>, degenerate: &[usize]) -> Result<FieldSolution> {
    let source = fourier_coeffs(&cfg.phi, &eigs)?;
    let threshold = cfg.tolerances.degenerate;
    let orth = cfg.tolerances.orthogonality;

    let violations: Vec<(usize, f64)> = degenerate
        .iter()
        .filter_map(|&k| {
            let phi_k = source.coeffs.get(k.checked_sub(1)?)?.abs();
            (phi_k > orth).then_some((k, phi_k))
        })
        .collect();
    if !violations.is_empty() {
        return Err(Error::Infeasible { violations });
    }

    let modes: Vec<ModeSolution> = eigs
        .par_iter()
        .zip(source.coeffs.par_iter())
        .map(|(e, &phi_k)| {
            if degenerate.contains(&e.k) {
                return Ok(ModeSolution {
                    k: e.k,
                    lambda: e.lambda,
                    phi_k,
                    delta: kernel.delta(e.lambda)?,
                    c1: 0.0,
                    c2: 0.0,
                    c3: 0.0,
                    zeroed: true,
                });
            }
            solve_mode(e.k, e.lambda, phi_k, kernel, threshold)
        })
        .collect::<Result<_>>()?;

    let x = cfg.x_grid();
    let y = cfg.y_grid();
    // u_k(y_j) for every mode, then a fixed-order reduction over k.
    let profiles: Vec<Vec<f64>> = modes
        .par_iter()
        .map(|m| y.iter().map(|&yj| kernel.eval(m, yj)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let basis: Vec<Vec<f64>> = eigs
        .iter()
        .map(|e| x.iter().map(|&xi| e.eigenfunction.eval(xi)).collect())
        .collect();
    let values: Vec<Vec<f64>> = (0..x.len())
        .into_par_iter()
        .map(|i| {
            (0..y.len())
                .map(|j| {
                    let mut acc = 0.0;
                    for (k, prof) in profiles.iter().enumerate() {
                        acc += basis[k][i] * prof[j];
                    }
                    acc
                })
                .collect()
        })
        .collect();

    let sup_u: Vec<f64> = profiles
        .iter()
        .map(|p| p.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .collect();
    let (tail_bound, tail_rate) = tail_estimate(&modes, &eigs, &sup_u, source.finitely_supported());
    let phi_report = validate_phi(&cfg.phi, cfg.s, &cfg.p0)?;

    Ok(FieldSolution {
        config: cfg.clone(),
        eigs,
        source,
        modes,
        x,
        y,
        values,
        tail_bound,
        tail_rate,
        phi_report,
    })
}

/// Estimate of the dropped remainder `Σ_{k>K} X_k u_k`.
///
/// `M = max_k sup_y|u_k| / (λ_k|φ_k|)` over the retained nonzero modes, and
/// `t_k = λ_k|φ_k| sup|X_k|` is extrapolated past K by a power law `C k^{−p}`
/// fitted over the upper half of the retained modes, so the estimate is
/// `M C K^{1−p}/(p−1)`. It is zero when φ has no component past K and
/// infinite when the fitted decay is too slow (p ≤ 1) to sum.
pub fn tail_estimate(modes: &[ModeSolution], eigs: &[EigenPair], sup_u: &[f64], finitely_supported: bool) -> (f64, Option<f64>) {
    if finitely_supported || modes.is_empty() {
        return (0.0, None);
    }
    let big = modes.iter().fold(0.0f64, |m, s| m.max(s.phi_k.abs()));
    if big == 0.0 {
        return (0.0, None);
    }
    let floor = 1e-13 * big;
    let mut m_const = 0.0f64;
    for (mode, su) in modes.iter().zip(sup_u) {
        if mode.phi_k.abs() > floor && !mode.zeroed {
            m_const = m_const.max(su / (mode.lambda * mode.phi_k.abs()));
        }
    }
    let upper = &modes[modes.len() / 2..];
    let pts: Vec<(f64, f64)> = upper
        .iter()
        .filter(|m| m.phi_k.abs() > floor)
        .map(|m| {
            let sup_x = eigs[m.k - 1].eigenfunction.sup_abs();
            ((m.k as f64).ln(), (m.lambda * m.phi_k.abs() * sup_x).ln())
        })
        .collect();
    if pts.is_empty() {
        return (0.0, None);
    }
    if pts.len() < 3 {
        return (f64::INFINITY, None);
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let s = slope(&xs, &ys);
    let p = -s;
    // Line through the centroid; for concave log-log data this sits above
    // the data at the right end, which keeps the extrapolation conservative.
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let ym = ys.iter().sum::<f64>() / ys.len() as f64;
    let ln_c = ym - s * xm;
    let k = modes.len() as f64;
    if p <= 1.0 {
        return (f64::INFINITY, Some(p));
    }
    let tail = m_const * (ln_c + (1.0 - p) * k.ln()).exp() / (p - 1.0);
    (tail, Some(p))
}

/// Finite-difference corroboration of `u_y(x, −0)` at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluxProbe {
    pub h: f64,
    /// max over the x grid of |(u(x,0) − u(x,−h))/h − u_y(x,−0)|.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionReport {
    /// max_x |u(x,+0) − u(x,−0)| from the two branch formulas.
    pub continuity: f64,
    /// max_k |c₃ − λ_k c₁|.
    pub flux_identity: f64,
    /// max_k of the deviation of (c₁,c₂,c₃) from the 3×3 system solution,
    /// relative to max(1, |c|).
    pub system_mismatch: f64,
    pub flux_fd: Vec<FluxProbe>,
    /// Observed order of `flux_fd` (expected β − 1 for the one-sided
    /// difference across the t^β singularity).
    pub flux_fd_order: Option<f64>,
    /// max_x |u(x,b) − u(x,−a) − φ(x)| on the x grid.
    pub jump_residual: f64,
    /// max_k |u_k(b) − u_k(−a) − φ_k|.
    pub mode_jump_residual: f64,
    pub tail_bound: f64,
    pub note: String,
}

/// `max_i |u(x_i, b) − u(x_i, −a) − φ(x_i)|` for field rows `values[i]`
/// whose first and last entries sit at y = −a and y = b.
pub fn jump_residual(phi: &Phi, x: &[f64], values: &[Vec<f64>]) -> f64 {
    x.iter().zip(values).fold(0.0f64, |acc, (&xi, row)| {
        let last = row.len() - 1;
        acc.max((row[last] - row[0] - phi.eval(xi)).abs())
    })
}

pub fn transmission_check(f: &FieldSolution) -> Result<TransmissionReport> {
    let kernel = ModeKernel::new(&f.config)?;
    let cfg = &f.config;
    let mut continuity = 0.0f64;
    let mut flux_identity = 0.0f64;
    let mut system_mismatch = 0.0f64;
    let mut mode_jump_residual = 0.0f64;
    let mut lower0 = Vec::with_capacity(f.modes.len());
    for m in &f.modes {
        let up = kernel.eval(m, 0.0)?;
        let low = kernel.eval_lower_at_zero(m)?;
        lower0.push((up, low));
        flux_identity = flux_identity.max((m.c3 - m.lambda * m.c1).abs());
        if !m.zeroed {
            let sys = solve_mode_system(m.lambda, m.phi_k, &kernel)?;
            for (a, b) in sys.iter().zip([m.c1, m.c2, m.c3]) {
                system_mismatch = system_mismatch.max((a - b).abs() / b.abs().max(1.0));
            }
            let jump = kernel.eval(m, cfg.b)? - kernel.eval(m, -cfg.a)?;
            mode_jump_residual = mode_jump_residual.max((jump - m.phi_k).abs());
        }
    }
    for &x in &f.x {
        let (mut up, mut low) = (0.0, 0.0);
        for (e, (u, l)) in f.eigs.iter().zip(&lower0) {
            let xv = e.eigenfunction.eval(x);
            up += xv * u;
            low += xv * l;
        }
        continuity = continuity.max((up - low).abs());
    }

    let jump_residual = jump_residual(&cfg.phi, &f.x, &f.values);

    // u_y(x, −0) = −Σ X_k c₃ against one-sided differences.
    let mut flux_fd = Vec::new();
    for level in 0..4 {
        let h = cfg.a * 1e-2 / 2f64.powi(level);
        let mut err = 0.0f64;
        for &x in &f.x {
            let (mut d, mut exact) = (0.0, 0.0);
            for (e, m) in f.eigs.iter().zip(&f.modes) {
                if m.c1 == 0.0 {
                    continue;
                }
                let xv = e.eigenfunction.eval(x);
                d += xv * (kernel.eval(m, 0.0)? - kernel.eval(m, -h)?) / h;
                exact -= xv * m.c3;
            }
            err = err.max((d - exact).abs());
        }
        flux_fd.push(FluxProbe { h, error: err });
    }
    let flux_fd_order = if flux_fd.iter().all(|p| p.error > 1e-13) {
        let xs: Vec<f64> = flux_fd.iter().map(|p| p.h.ln()).collect();
        let ys: Vec<f64> = flux_fd.iter().map(|p| p.error.ln()).collect();
        Some(slope(&xs, &ys))
    } else {
        None
    };

    Ok(TransmissionReport {
        continuity,
        flux_identity,
        system_mismatch,
        flux_fd,
        flux_fd_order,
        jump_residual,
        mode_jump_residual,
        tail_bound: f.tail_bound,
        note: NONLOCAL_NOTE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_grid_contains_interface_and_ends() {
        let cfg = ProblemConfig::demo();
        let y = cfg.y_grid();
        assert_eq!(y.len(), cfg.grid.ny + 1);
        assert_eq!(y[0], -1.0);
        assert_eq!(*y.last().unwrap(), 1.0);
        assert!(y.contains(&0.0));
        assert!(y.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn validation_rejects_endpoints_without_switch() {
        let mut cfg = ProblemConfig::demo();
        cfg.alpha = 1.0;
        assert!(matches!(cfg.validate(), Err(Error::Domain(_))));
        cfg.classical_switch = true;
        cfg.beta = 2.0;
        assert!(cfg.validate().is_ok());
        cfg.a = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn limit_value_for_half_order() {
        let cfg = ProblemConfig::demo();
        let l = cfg.delta_limit().unwrap();
        assert!((l + 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
    }
}
