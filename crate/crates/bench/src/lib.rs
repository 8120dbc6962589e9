//! Benchmark fixtures.

use fracmix::mode_solver::ProblemConfig;
use fracmix::Phi;

/// (μ, η, z) points that land in each evaluation regime at 10⁻¹².
pub const ML_POINTS: &[(&str, f64, f64, f64)] = &[
    ("series", 0.5, 1.0, -1.0),
    ("asymptotic_near", 0.5, 1.0, -8.0),
    ("asymptotic_far", 0.5, 1.0, -1e4),
    ("beta_series", 1.5, 2.0, -3.0),
    ("extended_precision", 1.8, 1.0, -60.0),
    ("beta_asymptotic", 1.5, 1.0, -4e3),
];

/// The demo problem with K modes on an `n × n` grid.
pub fn demo(k: usize, n: usize) -> ProblemConfig {
    let mut cfg = ProblemConfig::demo();
    cfg.k = k;
    cfg.grid.nx = n;
    cfg.grid.ny = n;
    cfg
}

/// Same, with quadrature-driven data whose coefficients never vanish.
pub fn smooth_data(k: usize, n: usize) -> ProblemConfig {
    let mut cfg = demo(k, n);
    cfg.phi = Phi::function(|x| (x * (std::f64::consts::PI - x)).powi(3));
    cfg
}
