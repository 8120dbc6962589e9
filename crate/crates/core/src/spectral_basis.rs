//! Eigenpairs of `(−1)^s X^{(2s)} + p₀X = λX` on (0, π) with Dirichlet ends,
//! Fourier coefficients of the data in that basis, and a few checks on both.
//!
//! Two realisations are offered: the closed-form sine basis for constant
//! p₀ (any s), and a finite-difference solver for s = 1 with a sampled p₀
//! (Sturm bisection for the eigenvalues, inverse iteration for the vectors).

use crate::error::{Error, Result};
use crate::grid::{fd_weights, interp_uniform, linspace, simpson_with_error, trapezoid};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Quadrature points used when a coefficient has to be integrated.
pub const MIN_QUAD_POINTS: usize = 2049;

/// Estimated quadrature error above which a warning is attached.
pub const QUAD_WARN: f64 = 1e-8;

/// Endpoint-derivative threshold in [`validate_phi`].
pub const PHI_CHECK_TOL: f64 = 1e-8;

/// Relative accuracy of the bisected eigenvalues.
const EIG_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eigenfunction {
    /// `amplitude · sin(frequency · x)`.
    Analytic { amplitude: f64, frequency: f64 },
    /// Values on a uniform grid of [0, π] that includes both endpoints.
    Sampled { grid: Vec<f64>, values: Vec<f64> },
}

impl Eigenfunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Analytic { amplitude, frequency } => {
                // sin(kπ) is zero, not the rounding residue of sin(π·k).
                if x == PI && frequency.fract() == 0.0 {
                    return 0.0;
                }
                amplitude * (frequency * x).sin()
            }
            Self::Sampled { values, .. } => interp_uniform(0.0, PI, values, x),
        }
    }

    /// Upper bound on `sup |X(x)|`.
    pub fn sup_abs(&self) -> f64 {
        match self {
            Self::Analytic { amplitude, .. } => amplitude.abs(),
            Self::Sampled { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub k: usize,
    pub lambda: f64,
    pub eigenfunction: Eigenfunction,
}

/// Zeroth-order coefficient p₀ of the operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Potential {
    Constant(f64),
    /// Values at the `n` interior points `iπ/(n+1)`, `i = 1..=n`.
    Samples { samples: Vec<f64> },
}

impl Potential {
    /// Value near an endpoint (the nearest interior sample for sampled p₀).
    fn at(&self, x: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Samples { samples } => {
                if x < PI / 2.0 {
                    samples[0]
                } else {
                    samples[samples.len() - 1]
                }
            }
        }
    }
}

/// `λ_k = k^{2s} + p₀`, `X_k = √(2/π) sin kx`, k = 1..=K.
pub fn analytic_eigens(s: u32, p0: f64, k_max: usize) -> Result<Vec<EigenPair>> {
    if s == 0 || k_max == 0 {
        return Err(Error::domain("analytic basis needs s >= 1 and K >= 1"));
    }
    let lambda_1 = 1.0 + p0;
    if !(lambda_1 > 0.0) {
        return Err(Error::PositivityViolation { lambda_1 });
    }
    let amplitude = (2.0 / PI).sqrt();
    Ok((1..=k_max)
        .map(|k| EigenPair {
            k,
            lambda: (k as f64).powi(2 * s as i32) + p0,
            eigenfunction: Eigenfunction::Analytic {
                amplitude,
                frequency: k as f64,
            },
        })
        .collect())
}

/// Symmetric tridiagonal matrix: diagonal `a`, constant off-diagonal `b`.
struct Tridiagonal {
    a: Vec<f64>,
    b: f64,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    fn count_below(&self, x: f64) -> usize {
        let b2 = self.b * self.b;
        let mut count = 0;
        let mut d = 1.0;
        for (i, &ai) in self.a.iter().enumerate() {
            d = if i == 0 { ai - x } else { ai - x - b2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (ai.abs() + self.b.abs());
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.b.abs();
        let lo = self.a.iter().fold(f64::INFINITY, |m, &v| m.min(v - r));
        let hi = self.a.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v + r));
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (1-based) by bisection.
    fn eigenvalue(&self, k: usize) -> Result<f64> {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= EIG_RTOL * lo.abs().max(hi.abs()) || hi - lo <= f64::MIN_POSITIVE {
                return Ok(0.5 * (lo + hi));
            }
        }
        Err(Error::ConvergenceFailure { index: k })
    }

    /// Solves `(T − σI)x = rhs` by Gaussian elimination with partial pivoting.
    fn shifted_solve(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.a.len();
        let tiny = f64::EPSILON * (self.b.abs() + self.a.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        // Rows after elimination: u0 on the diagonal, u1 and u2 above it.
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut y = rhs.to_vec();
        let mut d = self.a[0] - sigma;
        let mut e = if n > 1 { self.b } else { 0.0 };
        let mut f = 0.0;
        for i in 0..n {
            if i + 1 == n {
                u0[i] = if d == 0.0 { tiny } else { d };
                break;
            }
            let below = self.b;
            let next_d = self.a[i + 1] - sigma;
            let next_e = if i + 2 < n { self.b } else { 0.0 };
            if d.abs() >= below.abs() {
                let piv = if d == 0.0 { tiny } else { d };
                let m = below / piv;
                u0[i] = piv;
                u1[i] = e;
                u2[i] = f;
                y[i + 1] -= m * y[i];
                d = next_d - m * e;
                e = next_e - m * f;
                f = 0.0;
            } else {
                let m = d / below;
                u0[i] = below;
                u1[i] = next_d;
                u2[i] = next_e;
                y.swap(i, i + 1);
                y[i + 1] -= m * y[i];
                d = e - m * next_d;
                e = f - m * next_e;
                f = 0.0;
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = y[i];
            if i + 1 < n {
                v -= u1[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= u2[i] * x[i + 2];
            }
            x[i] = v / u0[i];
        }
        x
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut v = self.a[i] * x[i];
                if i > 0 {
                    v += self.b * x[i - 1];
                }
                if i + 1 < n {
                    v += self.b * x[i + 1];
                }
                v
            })
            .collect()
    }
}

/// Eigenpairs of `−X'' + p₀(x)X = λX`, `X(0) = X(π) = 0`, from second-order
/// central differences on the `n` interior points of `p0_samples`.
pub fn numeric_eigens_s1(p0_samples: &[f64], k_max: usize) -> Result<Vec<EigenPair>> {
    let n = p0_samples.len();
    if k_max == 0 || n < 8 * k_max {
        return Err(Error::domain(format!(
            "numeric basis needs n >= 8K interior points (n = {n}, K = {k_max})"
        )));
    }
    if p0_samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("p0 samples must be finite"));
    }
    let h = PI / (n + 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let t = Tridiagonal {
        a: p0_samples.iter().map(|p| 2.0 * inv_h2 + p).collect(),
        b: -inv_h2,
    };
    let grid = linspace(0.0, PI, n + 1);
    let pairs: Vec<EigenPair> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let lambda = t.eigenvalue(k)?;
            let v = inverse_iteration(&t, lambda, k)?;
            let mut values = Vec::with_capacity(n + 2);
            values.push(0.0);
            values.extend(v);
            values.push(0.0);
            let norm = trapezoid(&values.iter().map(|v| v * v).collect::<Vec<_>>(), h).sqrt();
            let first = values.iter().copied().find(|v| *v != 0.0).unwrap_or(1.0);
            let scale = first.signum() / norm;
            values.iter_mut().for_each(|v| *v *= scale);
            Ok(EigenPair {
                k,
                lambda,
                eigenfunction: Eigenfunction::Sampled {
                    grid: grid.clone(),
                    values,
                },
            })
        })
        .collect::<Result<_>>()?;
    if let Some(w) = pairs.windows(2).find(|w| !(w[1].lambda > w[0].lambda)) {
        return Err(Error::ConvergenceFailure { index: w[1].k });
    }
    if !(pairs[0].lambda > 0.0) {
        return Err(Error::PositivityViolation {
            lambda_1: pairs[0].lambda,
        });
    }
    Ok(pairs)
}

fn inverse_iteration(t: &Tridiagonal, lambda: f64, k: usize) -> Result<Vec<f64>> {
    let n = t.a.len();
    // A start vector with a component along every sine mode.
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 104_729) as f64 / 104_729.0).collect();
    let scale = t.a.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 2.0 * t.b.abs();
    // Two solves always: the first removes the start vector's other modes
    // only down to the rounding of the nearly singular system.
    for it in 0..6 {
        let y = t.shifted_solve(lambda, &x);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::ConvergenceFailure { index: k });
        }
        x = y.into_iter().map(|v| v / norm).collect();
        let tx = t.apply(&x);
        let res = tx
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if it >= 1 && res <= 1e-9 * scale {
            return Ok(x);
        }
    }
    Err(Error::ConvergenceFailure { index: k })
}

/// Least-squares fit of `λ_k − k^{2s} ≈ c₀ + c₂/k²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub c0: f64,
    pub c2: f64,
    pub residual_norm: f64,
    /// Number of eigenvalues entering the fit (the upper half).
    pub used: usize,
}

pub fn asymptotic_fit(eigs: &[EigenPair], s: u32) -> Result<AsymptoticFit> {
    if eigs.len() < 6 {
        return Err(Error::InsufficientData(format!(
            "asymptotic fit needs at least 6 eigenpairs, got {}",
            eigs.len()
        )));
    }
    let top = &eigs[eigs.len() / 2..];
    let pts: Vec<(f64, f64)> = top
        .iter()
        .map(|e| {
            let k = e.k as f64;
            (k.powi(-2), e.lambda - k.powi(2 * s as i32))
        })
        .collect();
    // Centre the regressor to keep the 2×2 system well conditioned.
    let m = pts.len() as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let c2 = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let c0 = ym - c2 * xm;
    let residual_norm = pts
        .iter()
        .map(|p| (p.1 - c0 - c2 * p.0).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(AsymptoticFit {
        c0,
        c2,
        residual_norm,
        used: top.len(),
    })
}

/// The datum φ on [0, π].
#[derive(Clone)]
pub enum Phi {
    /// `φ(x) = Σ c_j sin(jx)`, j = 1, 2, …
    SineCoeffs(Vec<f64>),
    /// Values on a uniform grid of [0, π] including both endpoints.
    Samples(Vec<f64>),
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SineCoeffs(c) => f.debug_tuple("SineCoeffs").field(c).finish(),
            Self::Samples(v) => write!(f, "Samples({} points)", v.len()),
            Self::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl Phi {
    pub fn function<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self::Function(Arc::new(f))
    }

    pub fn zero() -> Self {
        Self::SineCoeffs(Vec::new())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::SineCoeffs(c) => {
                if x == 0.0 || x == PI {
                    return 0.0;
                }
                c.iter()
                    .enumerate()
                    .map(|(j, c)| c * ((j + 1) as f64 * x).sin())
                    .sum()
            }
            Self::Samples(v) => interp_uniform(0.0, PI, v, x),
            Self::Function(f) => f(x),
        }
    }

    /// True when every value is exactly zero.
    pub fn is_zero(&self) -> bool {
        match self {
            Self::SineCoeffs(c) => c.iter().all(|&c| c == 0.0),
            Self::Samples(v) => v.iter().all(|&v| v == 0.0),
            Self::Function(_) => false,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Samples(v) if v.len() < 2 => Err(Error::domain("phi samples need at least 2 points")),
            Self::SineCoeffs(c) if c.iter().any(|v| !v.is_finite()) => {
                Err(Error::domain("phi sine coefficients must be finite"))
            }
            Self::Samples(v) if v.iter().any(|v| !v.is_finite()) => Err(Error::domain("phi samples must be finite")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureWarning {
    pub k: usize,
    pub estimate: f64,
    pub message: String,
}

/// φ together with its coefficients `φ_k = ∫₀^π φ X_k dx`.
#[derive(Debug, Clone)]
pub struct SourceData {
    pub phi: Phi,
    pub coeffs: Vec<f64>,
    /// `∫₀^π φ² dx`.
    pub norm_sq: f64,
    /// Coefficients came from sine orthogonality rather than quadrature.
    pub exact: bool,
    pub warnings: Vec<QuadratureWarning>,
}

impl SourceData {
    /// Bessel inequality on every partial sum, with slack `slack`.
    pub fn bessel_holds(&self, slack: f64) -> bool {
        let mut acc = 0.0;
        for c in &self.coeffs {
            acc += c * c;
            if acc > self.norm_sq + slack {
                return false;
            }
        }
        true
    }

    /// Whether φ is known to have no component past the computed modes.
    pub fn finitely_supported(&self) -> bool {
        match &self.phi {
            Phi::SineCoeffs(c) => self.exact && c.len() <= self.coeffs.len(),
            _ => false,
        }
    }
}

fn is_sine_basis(eigs: &[EigenPair]) -> bool {
    eigs.iter().all(|e| match e.eigenfunction {
        Eigenfunction::Analytic { amplitude, frequency } => {
            frequency == e.k as f64 && amplitude == (2.0 / PI).sqrt()
        }
        Eigenfunction::Sampled { .. } => false,
    })
}

/// Coefficients of φ in the basis `eigs`: exact for a sine-series φ against
/// the sine basis, otherwise composite Simpson on at least 2049 points with
/// a Richardson error estimate.
pub fn fourier_coeffs(phi: &Phi, eigs: &[EigenPair]) -> Result<SourceData> {
    phi.validate()?;
    if let (Phi::SineCoeffs(c), true) = (phi, is_sine_basis(eigs)) {
        let r = (PI / 2.0).sqrt();
        let coeffs = eigs.iter().map(|e| c.get(e.k - 1).map_or(0.0, |c| c * r)).collect();
        let norm_sq = PI / 2.0 * c.iter().map(|c| c * c).sum::<f64>();
        return Ok(SourceData {
            phi: phi.clone(),
            coeffs,
            norm_sq,
            exact: true,
            warnings: Vec::new(),
        });
    }
    let mut warnings = Vec::new();
    // Reuse the sample grid when it is already fine enough for Simpson.
    let finest_basis = eigs
        .iter()
        .map(|e| match &e.eigenfunction {
            Eigenfunction::Sampled { values, .. } => values.len(),
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    let (n, phi_values) = match phi {
        Phi::Samples(v) if v.len() >= MIN_QUAD_POINTS && (v.len() - 1) % 4 == 0 && v.len() >= finest_basis => {
            (v.len() - 1, v.clone())
        }
        _ => {
            if let Phi::Samples(v) = phi {
                if v.len() < MIN_QUAD_POINTS {
                    warnings.push(QuadratureWarning {
                        k: 0,
                        estimate: f64::NAN,
                        message: format!("phi given on {} samples; interpolated to the quadrature grid", v.len()),
                    });
                }
            }
            let mut n = MIN_QUAD_POINTS - 1;
            while n + 1 < 2 * finest_basis {
                n *= 2;
            }
            let xs = linspace(0.0, PI, n);
            (n, xs.iter().map(|&x| phi.eval(x)).collect())
        }
    };
    let h = PI / n as f64;
    let xs = linspace(0.0, PI, n);
    let (norm_sq, _) = simpson_with_error(&phi_values.iter().map(|v| v * v).collect::<Vec<_>>(), h);
    let results: Vec<(f64, f64)> = eigs
        .par_iter()
        .map(|e| {
            let integrand: Vec<f64> = xs
                .iter()
                .zip(&phi_values)
                .map(|(&x, &p)| p * e.eigenfunction.eval(x))
                .collect();
            simpson_with_error(&integrand, h)
        })
        .collect();
    let mut coeffs = Vec::with_capacity(eigs.len());
    for (e, (value, err)) in eigs.iter().zip(results) {
        if err > QUAD_WARN {
            warnings.push(QuadratureWarning {
                k: e.k,
                estimate: err,
                message: format!("estimated quadrature error {err:.3e} for phi_{}", e.k),
            });
        }
        coeffs.push(value);
    }
    Ok(SourceData {
        phi: phi.clone(),
        coeffs,
        norm_sq,
        exact: false,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiCheck {
    /// `"phi"` or `"l(phi)"`.
    pub function: String,
    pub order: usize,
    pub endpoint: f64,
    pub value: f64,
    /// max(1e-8, estimated differentiation noise floor).
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiReport {
    pub checks: Vec<PhiCheck>,
    pub pass: bool,
}

impl PhiReport {
    pub fn violations(&self) -> impl Iterator<Item = &PhiCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Endpoint derivatives `(value, noise floor)` for orders `0..=max_order`.
type EndpointDerivs = Vec<[(f64, f64); 2]>;

fn sine_endpoint_derivs(max_order: usize) -> EndpointDerivs {
    // Every even derivative of a finite sine series vanishes at 0 and π.
    vec![[(0.0, 0.0); 2]; max_order + 1]
}

fn sample_endpoint_derivs(v: &[f64], max_order: usize) -> EndpointDerivs {
    let n = v.len() - 1;
    let h = PI / n as f64;
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    (0..=max_order)
        .map(|m| {
            let width = (m + 4).min(n + 1);
            let xs: Vec<f64> = (0..width).map(|i| i as f64 * h).collect();
            let w = fd_weights(0.0, &xs, m);
            let noise = 10.0 * f64::EPSILON * scale * w.iter().map(|w| w.abs()).sum::<f64>();
            let left: f64 = w.iter().zip(v).map(|(w, v)| w * v).sum();
            // Mirror the stencil at π: the m-th derivative picks up (−1)^m.
            let right: f64 = w.iter().zip(v.iter().rev()).map(|(w, v)| w * v).sum::<f64>()
                * if m % 2 == 0 { 1.0 } else { -1.0 };
            [(left, noise), (right, noise)]
        })
        .collect()
}

/// Chebyshev interpolation on [0, π] with adaptively chosen degree, then
/// spectral differentiation evaluated at the endpoints.
fn chebyshev_endpoint_derivs(f: &dyn Fn(f64) -> f64, max_order: usize) -> EndpointDerivs {
    let mut n = 16;
    let coeffs = loop {
        let fx: Vec<f64> = (0..=n)
            .map(|j| f(PI * (1.0 + (PI * j as f64 / n as f64).cos()) / 2.0))
            .collect();
        let a: Vec<f64> = (0..=n)
            .map(|k| {
                let mut s = 0.0;
                for (j, v) in fx.iter().enumerate() {
                    let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                    s += w * v * (PI * (j * k) as f64 / n as f64).cos();
                }
                let c = 2.0 / n as f64 * s;
                if k == 0 || k == n {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect();
        let big = a.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let tail = a[n - 2..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if tail <= 1e-14 * big || n >= 256 {
            break a;
        }
        n *= 2;
    };
    let big = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(max_order + 1);
    let mut c = coeffs;
    let nn = (n * n) as f64;
    for m in 0..=max_order {
        let right: f64 = c.iter().sum();
        let left: f64 = c.iter().enumerate().map(|(k, v)| if k % 2 == 0 { *v } else { -v }).sum();
        let chain = (2.0 / PI).powi(m as i32);
        // |T_n^{(m)}(±1)| = Π_{j<m} (n² − j²)/(2j + 1)
        let growth: f64 = (0..m).map(|j| (nn - (j * j) as f64) / (2 * j + 1) as f64).product();
        let noise = 10.0 * f64::EPSILON * big * growth * chain * (n as f64);
        out.push([(left * chain, noise), (right * chain, noise)]);
        // Differentiate the Chebyshev series.
        let len = c.len();
        let mut d = vec![0.0; len];
        for k in (1..len).rev() {
            let next = if k + 1 < len { d[k + 1] } else { 0.0 };
            d[k - 1] = next + 2.0 * k as f64 * c[k];
        }
        d[0] *= 0.5;
        c = d;
    }
    out
}

/// Checks `φ^{(2j)}` and `(l φ)^{(2j)}` at x = 0 and x = π, j = 0..s−1,
/// against [`PHI_CHECK_TOL`] (or the differentiation noise floor when that
/// is larger). Report only; violations never abort a solve.
pub fn validate_phi(phi: &Phi, s: u32, p0: &Potential) -> Result<PhiReport> {
    phi.validate()?;
    let s = s as usize;
    let max_order = 4 * s - 2;
    let derivs = match phi {
        Phi::SineCoeffs(_) => sine_endpoint_derivs(max_order),
        Phi::Samples(v) => sample_endpoint_derivs(v, max_order),
        Phi::Function(f) => chebyshev_endpoint_derivs(f.as_ref(), max_order),
    };
    let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
    let mut checks = Vec::new();
    for (side, endpoint) in [0.0, PI].into_iter().enumerate() {
        let p = p0.at(endpoint);
        for j in 0..s {
            let (v, noise) = derivs[2 * j][side];
            checks.push(check("phi", 2 * j, endpoint, v, noise));
            // (lφ)^{(2j)} = (−1)^s φ^{(2s+2j)} + p₀ φ^{(2j)} for constant p₀.
            let (high, high_noise) = derivs[2 * s + 2 * j][side];
            let v = sign * high + p * derivs[2 * j][side].0;
            let noise = high_noise + p.abs() * noise;
            checks.push(check("l(phi)", 2 * j, endpoint, v, noise));
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(PhiReport { checks, pass })
}

fn check(function: &str, order: usize, endpoint: f64, value: f64, noise: f64) -> PhiCheck {
    let threshold = PHI_CHECK_TOL.max(noise);
    PhiCheck {
        function: function.to_string(),
        order,
        endpoint,
        value,
        threshold,
        pass: value.abs() <= threshold,
    }
}

/// Partial sums of `Σ X_k(x)² / λ_k²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselReport {
    pub x: f64,
    pub partial_sums: Vec<f64>,
    pub nondecreasing: bool,
    /// The last increment `X_K(x)²/λ_K²`.
    pub tail_increment: f64,
    /// Tail increments have dropped below 10⁻⁸.
    pub converged: bool,
    /// `S_K` plus `sup_k X_k(x)² · Σ_{j>K} λ_j^{−2}` extrapolated with λ_j ≈ c·j^p
    /// fitted to the last two eigenvalues.
    pub bound_estimate: f64,
}

pub fn bessel_bound_check(eigs: &[EigenPair], x: f64) -> Result<BesselReport> {
    if eigs.len() < 2 {
        return Err(Error::InsufficientData("Bessel check needs at least 2 eigenpairs".into()));
    }
    let mut acc = 0.0;
    let mut partial_sums = Vec::with_capacity(eigs.len());
    let mut sup_x2 = 0.0f64;
    let mut last = 0.0;
    for e in eigs {
        let v = e.eigenfunction.eval(x);
        sup_x2 = sup_x2.max(e.eigenfunction.sup_abs().powi(2));
        last = v * v / (e.lambda * e.lambda);
        acc += last;
        partial_sums.push(acc);
    }
    let nondecreasing = partial_sums.windows(2).all(|w| w[1] >= w[0]);
    let (a, b) = (&eigs[eigs.len() - 2], &eigs[eigs.len() - 1]);
    let p = (b.lambda / a.lambda).ln() / (b.k as f64 / a.k as f64).ln();
    let kk = b.k as f64;
    // Σ_{j>K} (λ_K (j/K)^p)^{−2} ≤ λ_K^{−2} K^{2p} K^{1−2p}/(2p − 1)
    let tail = if 2.0 * p > 1.0 {
        sup_x2 * kk / (b.lambda * b.lambda * (2.0 * p - 1.0))
    } else {
        f64::INFINITY
    };
    Ok(BesselReport {
        x,
        nondecreasing,
        tail_increment: last,
        converged: last <= 1e-8,
        bound_estimate: acc + tail,
        partial_sums,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_spectrum() {
        let e = analytic_eigens(1, 0.0, 3).unwrap();
        assert_eq!(e.iter().map(|e| e.lambda).collect::<Vec<_>>(), vec![1.0, 4.0, 9.0]);
        let e = analytic_eigens(2, 0.0, 2).unwrap();
        assert_eq!(e[1].lambda, 16.0);
        assert_eq!(analytic_eigens(1, 2.5, 1).unwrap()[0].lambda, 3.5);
        assert!(matches!(analytic_eigens(1, -1.0, 1), Err(Error::PositivityViolation { .. })));
    }

    #[test]
    fn sturm_count_brackets_eigenvalues() {
        let t = Tridiagonal { a: vec![2.0; 5], b: -1.0 };
        assert_eq!(t.count_below(0.0), 0);
        assert_eq!(t.count_below(4.0), 5);
        // Eigenvalues of the 5×5 second difference: 2 − 2cos(jπ/6).
        let l1 = t.eigenvalue(1).unwrap();
        assert!((l1 - (2.0 - 2.0 * (PI / 6.0).cos())).abs() < 1e-10);
    }

    #[test]
    fn shifted_solve_matches_apply() {
        let t = Tridiagonal {
            a: vec![3.0, -1.0, 4.0, 0.5, 2.0, 1.0],
            b: 2.0,
        };
        let x = vec![1.0, -2.0, 0.5, 3.0, -1.0, 0.25];
        let mut rhs = t.apply(&x);
        for (r, xi) in rhs.iter_mut().zip(&x) {
            *r -= 0.3 * xi;
        }
        let y = t.shifted_solve(0.3, &rhs);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12, "{x:?} {y:?}");
        }
    }

    #[test]
    fn chebyshev_derivatives_of_polynomial() {
        let d = chebyshev_endpoint_derivs(&|x: f64| x * (PI - x), 2);
        assert!(d[0][0].0.abs() < 1e-13);
        assert!((d[2][0].0 + 2.0).abs() < 1e-9);
        assert!((d[2][1].0 + 2.0).abs() < 1e-9);
    }
}
