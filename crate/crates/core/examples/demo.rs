//! Solves the demonstration problem and prints the main diagnostics.

use fracmix::caputo_oracle::residual_field_check;
use fracmix::mode_solver::{solve, transmission_check, ProblemConfig};

fn main() -> fracmix::Result<()> {
    let cfg = ProblemConfig::demo();
    let (scan, field) = solve(&cfg)?;
    println!(
        "min |Δ(k)| = {:.6} at k = {}, limit {:.6}",
        scan.min_abs_delta,
        scan.argmin,
        scan.limit.unwrap_or(f64::NAN)
    );

    let t = transmission_check(&field)?;
    println!(
        "continuity {:e}, flux identity {:e}, jump residual {:.2e}",
        t.continuity, t.flux_identity, t.jump_residual
    );

    let r = residual_field_check(&field, 1.0 / 64.0, 3)?;
    for (level, a, b) in r.levels.iter().map(|l| (l.dt_alpha, l.alpha_residual, l.beta_residual)) {
        println!("dt = {level:.6}: residual y>0 {a:.3e}, y<0 {b:.3e}");
    }
    println!("observed orders: {:?} (y>0), {:?} (y<0)", r.alpha_order, r.beta_order);

    let j = field.y_zero_index();
    let mid = field.x.len() / 2;
    println!("u(π/2, 0) = {:.12}", field.values[mid][j]);
    Ok(())
}
