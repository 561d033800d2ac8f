//! `nlslab`: certify virial weights, run and sweep blow-up experiments,
//! and re-analyse their diagnostics.
//!
//! Exit codes: 0 success (run completed, certificate passed), 2 blow-up
//! detected, 3 identity or certificate failure, 1 any error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use nlslab::config::{ConfigMap, ExperimentSpec};
use nlslab::output::{self, CertificateRow, Summary};
use nlslab::solver::Simulation;
use nlslab::{report, sweep, weight, Outcome};

#[derive(Parser)]
#[command(
    name = "nlslab",
    version,
    about = "Virial blow-up lab for radial NLS on warped products"
)]
struct Cli {
    /// Print only errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the virial weight and print its certificate.
    Verify(VerifyArgs),
    /// Run one experiment.
    Run(RunArgs),
    /// Run a parameter sweep in parallel.
    Sweep(RunArgs),
    /// Analyse a diagnostics CSV.
    Report(ReportArgs),
}

/// Command-line overrides of the config file.
#[derive(Args, Clone, Default)]
struct Overrides {
    /// sphere_cap, sphere_full, hyperbolic, euclidean or custom.
    #[arg(long)]
    manifold: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    rmax: Option<f64>,
    /// Warp table for custom manifolds (columns r, h, h').
    #[arg(long)]
    warp: Option<PathBuf>,
    #[arg(long)]
    cells: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    /// Emit the certificate as CSV on stdout.
    #[arg(long)]
    csv: bool,
    /// Also write certificate.csv here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long, default_value = "nlslab_out")]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Diagnostics CSV written by `run`.
    csv: PathBuf,
    /// Run summary; defaults to summary.txt next to the CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn load_map(config: Option<&Path>, ov: &Overrides) -> Result<ConfigMap> {
    let mut map = match config {
        Some(p) => ConfigMap::from_file(p)?,
        None => ConfigMap::new(),
    };
    if let Some(k) = &ov.manifold {
        map.set("manifold.kind", k.as_str())?;
    }
    if let Some(n) = ov.dim {
        map.set("manifold.dim", n.to_string())?;
    }
    if let Some(r) = ov.rmax {
        map.set("manifold.rmax", r.to_string())?;
    }
    if let Some(w) = &ov.warp {
        let abs = std::path::absolute(w).with_context(|| format!("bad path {}", w.display()))?;
        map.set("manifold.warp_table", abs.to_string_lossy())?;
    }
    if let Some(c) = ov.cells {
        map.set("grid.cells", c.to_string())?;
    }
    Ok(map)
}

fn cmd_verify(args: &VerifyArgs, quiet: bool) -> Result<u8> {
    let map = load_map(args.config.as_deref(), &args.overrides)?;
    let manifold = map.manifold()?;
    let cells = args.overrides.cells.unwrap_or(weight::CERTIFICATE_CELLS);
    let cert = weight::certify(&manifold, cells)?;
    let row = CertificateRow {
        manifold: cert.manifold.name().to_string(),
        n: cert.dim,
        residual: cert.residual.analytic,
        c: cert.c,
        tau1: cert.thresholds.tau1,
        tau2: cert.thresholds.tau2,
        kappa_min: cert.thresholds.kappa_min,
        p_min: cert.thresholds.p_min,
    };
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        output::write_certificate(
            std::fs::File::create(dir.join("certificate.csv"))?,
            std::slice::from_ref(&row),
        )?;
    }
    if args.csv {
        output::write_certificate(std::io::stdout().lock(), &[row])?;
    } else if !quiet {
        println!(
            "manifold    {} (n = {}, r_max = {})",
            row.manifold,
            row.n,
            manifold.r_max()
        );
        println!("weight      {} on {} cells", cert.provenance.name(), cells);
        println!(
            "residual    {:.3e} (tolerance {:.0e}; discrete {:.3e})",
            row.residual, cert.tolerance, cert.residual.discrete
        );
        println!("c           {:.15}", row.c);
        println!("tau1, tau2  {:.15}, {:.15}", row.tau1, row.tau2);
        println!("kappa_min   {:.12}", row.kappa_min);
        println!("p_min       {:.12}", row.p_min);
        if let Some(claim) = &cert.claim {
            println!(
                "phi bounds  {} (min margin {:.3e} at r = {:.4})",
                if claim.passed { "pass" } else { "FAIL" },
                claim.min_margin,
                claim.r_at_min
            );
        }
    }
    let failures = cert.failures();
    for f in &failures {
        eprintln!("certificate failure: {f}");
    }
    Ok(if failures.is_empty() { 0 } else { 3 })
}

fn cmd_run(args: &RunArgs, quiet: bool) -> Result<u8> {
    let map = load_map(Some(&args.config), &args.overrides)?;
    let spec = ExperimentSpec::from_map(&map)?;
    let p = spec.run.p;
    let sim = Simulation::new(spec.run)?;
    for w in sim.warnings() {
        if !quiet {
            eprintln!("warning: {w}");
        }
    }
    let res = sim.run()?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    output::write_diagnostics_file(&args.out.join("diagnostics.csv"), &res.records)?;
    let summary = Summary::from_run(&res, p);
    summary.write_file(&args.out.join("summary.txt"))?;
    if !quiet {
        print!("{summary}");
    }
    let failures = res.identity_failures();
    for f in &failures {
        eprintln!("identity failure: {f}");
    }
    Ok(match res.outcome {
        Outcome::StepFailure(t) => {
            eprintln!("error: linear solve failed at t = {t}");
            1
        }
        _ if !failures.is_empty() => 3,
        o if o.is_blowup() || matches!(o, Outcome::Overflow(_)) => 2,
        _ => 0,
    })
}

fn cmd_sweep(args: &RunArgs, quiet: bool) -> Result<u8> {
    let map = load_map(Some(&args.config), &args.overrides)?;
    let spec = ExperimentSpec::from_map(&map)?;
    let Some(axes) = spec.sweep else {
        bail!("config has no sweep.* axes");
    };
    let threads = sweep::threads_from_env()?;
    let runs = sweep::run_sweep(&spec.run, &axes, threads)?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    for (i, run) in runs.iter().enumerate() {
        if let Some(res) = &run.result {
            output::write_diagnostics_file(
                &args.out.join(format!("run_{i:03}.csv")),
                &res.records,
            )?;
        }
    }
    let rows: Vec<_> = runs.iter().map(|r| r.row.clone()).collect();
    output::write_phase_table(
        std::fs::File::create(args.out.join("phase_table.csv"))?,
        &rows,
    )?;
    if !quiet {
        println!(
            "{:>6} {:>8} {:>12} {:>16} {:>10}",
            "p", "factor", "E0", "outcome", "time"
        );
        for r in &runs {
            println!(
                "{:>6} {:>8} {:>12.4e} {:>16} {:>10.5}",
                r.point.p, r.point.factor, r.row.e0, r.row.outcome, r.row.time
            );
            if let Some(e) = &r.row.error {
                eprintln!("  run failed: {e}");
            }
        }
    }
    Ok(0)
}

fn cmd_report(args: &ReportArgs, quiet: bool) -> Result<u8> {
    let records = output::read_diagnostics_file(&args.csv)
        .with_context(|| format!("reading {}", args.csv.display()))?;
    let summary_path = args
        .summary
        .clone()
        .or_else(|| Some(args.csv.with_file_name("summary.txt")).filter(|p| p.exists()));
    let summary = match &summary_path {
        Some(p) => Some(Summary::read_file(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    let rep = report::analyze(&records, summary.as_ref())?;
    if !quiet {
        print!("{rep}");
    }
    Ok(0)
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as "blow-up"
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a, cli.quiet),
        Command::Run(a) => cmd_run(a, cli.quiet),
        Command::Sweep(a) => cmd_sweep(a, cli.quiet),
        Command::Report(a) => cmd_report(a, cli.quiet),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
