//! `fracmix` — command-line front end for the mixed fractional solver.
//!
//! Exit codes: 0 success, 1 other failure, 2 domain or configuration error,
//! 3 uniqueness failure under `--strict`, 4 infeasible degenerate problem,
//! 5 failed verification.

mod format;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use format::sig17;
use fracmix::mittag_leffler::{ml_real_zeros, ml_real_zeros_with_step};
use fracmix::mode_solver::{jump_residual, solve, transmission_check, uniqueness_scan, ProblemConfig};
use fracmix::spectral_basis::asymptotic_fit;
use fracmix::verify::{num, verify, CheckItem, Level};
use fracmix::{config, Error, MittagLeffler};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Optional override for the worker-thread count.
const THREADS_ENV: &str = "FRACMIX_THREADS";

#[derive(Parser)]
#[command(name = "fracmix", version, about = "Spectral solver for a mixed fractional-order strip problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate E_{mu,eta}(z), or scan its real zeros with `ml zeros`.
    Ml(MlCommand),
    /// Uniqueness scan: CSV of (k, lambda_k, delta_k) and a JSON summary.
    Delta(DeltaArgs),
    /// Solve and write the field as CSV plus a metadata JSON file.
    Solve(SolveArgs),
    /// Run the verification suite and print a JSON report.
    Verify(VerifyArgs),
    /// Eigenvalues of the spatial operator as CSV.
    Eigs(EigsArgs),
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct MlCommand {
    #[command(subcommand)]
    zeros: Option<MlSub>,
    #[arg(long, allow_hyphen_values = true, required = true)]
    mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true, required = true)]
    eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true, required = true)]
    z: Option<f64>,
    /// Absolute error tolerance.
    #[arg(long, default_value_t = fracmix::mittag_leffler::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Subcommand)]
enum MlSub {
    /// Real zeros of E_{mu,eta}(-t) on (0, tmax].
    Zeros {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        tmax: f64,
        /// Scan step (default min(1e-2, tmax/1e4)).
        #[arg(long)]
        step: Option<f64>,
    },
}

#[derive(Args)]
struct DeltaArgs {
    config: PathBuf,
    /// Number of modes to scan (defaults to K from the config).
    #[arg(long)]
    kmax: Option<usize>,
    /// Exit with code 3 if any |delta_k| is below the threshold.
    #[arg(long)]
    strict: bool,
    /// Write the summary JSON here instead of stderr.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    config: PathBuf,
    /// Field CSV (x, y, u).
    #[arg(long, short)]
    out: PathBuf,
    /// Metadata JSON (defaults to the CSV path with a .json extension).
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    config: PathBuf,
    #[arg(long, value_enum, default_value = "fast")]
    level: LevelArg,
    /// Re-check a field CSV written by `solve`.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EigsArgs {
    config: PathBuf,
    #[arg(long)]
    kmax: Option<usize>,
}

/// Failure carrying a specific exit code.
#[derive(Debug)]
struct Exit(u8);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}", self.0)
    }
}

impl std::error::Error for Exit {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(Exit(code)) = err.downcast_ref::<Exit>() {
        return *code;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Domain(_) | Error::Config(_) | Error::PositivityViolation { .. }) => 2,
        Some(Error::DegenerateMode { .. }) => 3,
        Some(Error::Infeasible { .. }) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    if let Ok(n) = std::env::var(THREADS_ENV) {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got {n:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ml(args) => cmd_ml(args),
        Command::Delta(args) => cmd_delta(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Eigs(args) => cmd_eigs(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.downcast_ref::<Exit>().is_none() {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load(path: &Path) -> Result<ProblemConfig> {
    Ok(config::load(path)?)
}

fn cmd_ml(args: MlCommand) -> Result<()> {
    let mut out = std::io::stdout().lock();
    if let Some(MlSub::Zeros { mu, eta, tmax, step }) = args.zeros {
        let scan = match step {
            Some(h) => ml_real_zeros_with_step(mu, eta, tmax, h)?,
            None => ml_real_zeros(mu, eta, tmax)?,
        };
        if scan.zeros.is_empty() {
            writeln!(out, "none")?;
        } else {
            for z in &scan.zeros {
                writeln!(out, "{}", sig17(*z))?;
            }
            writeln!(out, "h = {}", sig17(scan.max_zero.expect("nonempty")))?;
        }
        return Ok(());
    }
    let (mu, eta, z) = (args.mu.unwrap(), args.eta.unwrap(), args.z.unwrap());
    let r = MittagLeffler::with_tolerance(mu, eta, args.tol)?.eval(z)?;
    let method = serde_json::to_value(r.method)?;
    writeln!(
        out,
        "{} bound={:.3e} method={}",
        sig17(r.value),
        r.abs_error_bound,
        method.as_str().unwrap_or_default()
    )?;
    Ok(())
}

fn cmd_delta(args: DeltaArgs) -> Result<()> {
    let mut cfg = load(&args.config)?;
    if let Some(k) = args.kmax {
        cfg.k = k;
        cfg.validate()?;
    }
    let report = uniqueness_scan(&cfg)?;
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(["k", "lambda_k", "delta_k"])?;
    for r in &report.rows {
        w.write_record([r.k.to_string(), sig17(r.lambda), sig17(r.delta)])?;
    }
    w.flush()?;
    let summary = json!({
        "min_abs_delta": num(report.min_abs_delta),
        "argmin": report.argmin,
        "threshold": report.threshold,
        "flagged": report.flagged,
        "limit": report.limit.map(num),
        "zero_free_guaranteed": report.zero_free_guaranteed,
        "h": report.h.map(num),
        "h_scan_limit": report.h_scan_limit.map(num),
        "k0": report.k0,
        "convergence_order": report.convergence_order.map(num),
        "monotone_from": report.monotone_from,
        "note": report.note,
    });
    let text = serde_json::to_string_pretty(&summary)?;
    match &args.summary {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => eprintln!("{text}"),
    }
    if args.strict && !report.flagged.is_empty() {
        eprintln!("uniqueness fails: |delta_k| <= {:e} for k in {:?}", report.threshold, report.flagged);
        bail!(Exit(3));
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let cfg = load(&args.config)?;
    let (scan, field) = match solve(&cfg) {
        Ok(v) => v,
        Err(Error::Infeasible { violations }) => {
            let idx: Vec<usize> = violations.iter().map(|v| v.0).collect();
            println!("{}", json!({ "infeasible": idx }));
            for (k, phi_k) in &violations {
                eprintln!("mode {k} is degenerate but |phi_k| = {phi_k:e} is not zero");
            }
            bail!(Exit(4));
        }
        Err(e) => return Err(e.into()),
    };
    let t = transmission_check(&field)?;

    let file = std::fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    w.write_record(["x", "y", "u"])?;
    for (i, &x) in field.x.iter().enumerate() {
        let (sx, row) = (sig17(x), &field.values[i]);
        for (j, &y) in field.y.iter().enumerate() {
            w.write_record([sx.as_str(), &sig17(y), &sig17(row[j])])?;
        }
    }
    w.flush()?;

    let meta = json!({
        "config": serde_json::to_value(config::ConfigFile::from_problem(&cfg)?)?,
        "nx": cfg.grid.nx,
        "ny": cfg.grid.ny,
        "tail_bound": num(field.tail_bound),
        "tail_rate": field.tail_rate.map(num),
        "jump_residual": num(t.jump_residual),
        "continuity": num(t.continuity),
        "flux_identity": num(t.flux_identity),
        "zeroed_modes": field.zeroed_modes(),
        "min_abs_delta": num(scan.min_abs_delta),
        "phi_warnings": field.phi_report.violations().count() + field.source.warnings.len(),
        "modes": field.modes,
        "note": t.note,
    });
    let meta_path = args.meta.unwrap_or_else(|| args.out.with_extension("json"));
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")
        .with_context(|| format!("writing {}", meta_path.display()))?;
    Ok(())
}

/// Reads a `solve` CSV back and recomputes the jump residual from its
/// values, after checking that the grid matches the configuration.
fn field_item(cfg: &ProblemConfig, path: &Path, recomputed: Option<f64>) -> Result<CheckItem> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    if r.headers()? != vec!["x", "y", "u"] {
        bail!(Error::Config(format!("{}: header must be x,y,u", path.display())));
    }
    let (x, y) = (cfg.x_grid(), cfg.y_grid());
    let mut values = vec![Vec::with_capacity(y.len()); x.len()];
    let mut count = 0usize;
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> { Ok(rec.get(i).unwrap_or_default().parse::<f64>()?) };
        let (i, j) = (count / y.len(), count % y.len());
        if i >= x.len() || parse(0)? != x[i] || parse(1)? != y[j] {
            bail!(Error::Config(format!("{}: row {} does not match the configured grid", path.display(), count + 1)));
        }
        values[i].push(parse(2)?);
        count += 1;
    }
    if count != x.len() * y.len() {
        bail!(Error::Config(format!("{}: expected {} rows, found {count}", path.display(), x.len() * y.len())));
    }
    let jump = jump_residual(&cfg.phi, &x, &values);
    let pass = jump <= cfg.tolerances.jump && recomputed.map_or(true, |r| (r - jump).abs() <= 1e-12);
    Ok(CheckItem::check(
        "field_file",
        pass,
        json!({ "jump_residual": jump, "recomputed": recomputed.map(num), "rows": count }),
    ))
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let cfg = load(&args.config)?;
    let level = match args.level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let mut report = verify(&cfg, level)?;
    if let Some(path) = &args.field {
        let recomputed = report
            .item("transmission")
            .and_then(|i| i.measured.get("jump_residual"))
            .and_then(|v| v.as_f64());
        report.items.push(field_item(&cfg, path, recomputed)?);
        report.pass = report.items.iter().all(|i| i.pass || i.warning_only);
    }
    let text = serde_json::to_string_pretty(&report)?;
    println!("{text}");
    if let Some(p) = &args.out {
        std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    if !report.pass {
        for f in report.failures() {
            eprintln!("check failed: {} {}", f.name, f.measured);
        }
        bail!(Exit(5));
    }
    Ok(())
}

fn cmd_eigs(args: EigsArgs) -> Result<()> {
    let mut cfg = load(&args.config)?;
    if let Some(k) = args.kmax {
        cfg.k = k;
        cfg.validate()?;
    }
    let eigs = cfg.eigens()?;
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(["k", "lambda_k"])?;
    for e in &eigs {
        w.write_record([e.k.to_string(), sig17(e.lambda)])?;
    }
    w.flush()?;
    if let Ok(fit) = asymptotic_fit(&eigs, cfg.s) {
        eprintln!("{}", json!({ "c0": num(fit.c0), "c2": num(fit.c2), "residual_norm": num(fit.residual_norm), "used": fit.used }));
    }
    Ok(())
}
