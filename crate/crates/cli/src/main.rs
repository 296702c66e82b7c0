//! `solve`: batch front end for the BFECC Maxwell solvers.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 validation error, 3 instability.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use bfecc::analysis::{phase_speed, stability_scan};
use bfecc::diagnostics::write_error_csv;
use bfecc::harness::{grid_variants, run_experiment, write_outputs, ExperimentConfig, GridVariant};
use bfecc::{Error, SchemeKind};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "solve", version, about = "BFECC solvers for the TMz Maxwell equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the finest size of a config once.
    Run(RunArgs),
    /// Run every size of a config and report convergence orders.
    Refine(RunArgs),
    /// Scan the BFECC spectral radius over the Fourier modes.
    Analyze {
        #[arg(long, default_value = "cd")]
        scheme: SchemeKind,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        dims: u8,
        #[arg(long = "lambda-x")]
        lambda_x: f64,
        #[arg(long = "lambda-y")]
        lambda_y: Option<f64>,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Write a grid variant as `i,j,x,y,shifted` lines.
    Gridgen {
        #[arg(long)]
        variant: GridVariant,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Phase speed of 1D BFECC-cd at `k̃h = jπ/samples`.
    Dispersion {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `output`).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    allow_unstable: bool,
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("SOLVER_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("SOLVER_THREADS must be a non-negative integer, got {v:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn load(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_file(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    if args.allow_unstable {
        cfg.allow_unstable = true;
    }
    if let Some(o) = &args.output {
        cfg.output = Some(o.clone());
    }
    Ok(cfg)
}

fn simulate(mut cfg: ExperimentConfig, single: bool) -> Result<()> {
    if single {
        let top = *cfg.sizes.last().expect("validated");
        cfg.sizes = vec![top];
    }
    let out = run_experiment(&cfg)?;
    let stdout = io::stdout();
    write_error_csv(&out.reports, stdout.lock())?;
    if let Some(dir) = &cfg.output {
        write_outputs(&out, dir, true)?;
    }
    Ok(())
}

fn analyze(kind: SchemeKind, theta: f64, ratios: &[f64], samples: usize) -> Result<()> {
    let scan = stability_scan(kind, theta, ratios, samples)?;
    let mut w = BufWriter::new(io::stdout().lock());
    writeln!(w, "k_index,spectral_radius")?;
    for (idx, r) in &scan.radii {
        let k: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        writeln!(w, "{},{:.17e}", k.join(":"), r)?;
    }
    let k: Vec<String> = scan.argmax.iter().map(|i| i.to_string()).collect();
    writeln!(w, "max_radius={:.17e} at k={}", scan.max_radius, k.join(":"))?;
    Ok(())
}

fn gridgen(variant: GridVariant, n: usize, out: Option<&Path>) -> Result<()> {
    let grid = grid_variants(variant, n)?;
    match out {
        Some(p) => grid.write_dump(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?))?,
        None => grid.write_dump(BufWriter::new(io::stdout().lock()))?,
    }
    Ok(())
}

fn dispersion(lambda: f64, samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()).into());
    }
    let mut w = BufWriter::new(io::stdout().lock());
    writeln!(w, "k_h,phase_speed")?;
    for j in 0..=samples {
        let kh = j as f64 * std::f64::consts::PI / samples as f64;
        let c = match phase_speed(lambda, kh) {
            Ok(c) => c,
            Err(Error::Evanescent(_)) => f64::NAN,
            Err(e) => return Err(e.into()),
        };
        writeln!(w, "{kh:.17e},{c:.17e}")?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Run(a) => simulate(load(&a)?, true),
        Command::Refine(a) => simulate(load(&a)?, false),
        Command::Analyze { scheme, theta, dims, lambda_x, lambda_y, samples } => {
            let ratios = match (dims, lambda_y) {
                (1, None) => vec![lambda_x],
                (2, Some(ly)) => vec![lambda_x, ly],
                (2, None) => vec![lambda_x, lambda_x],
                _ => return Err(Error::Config("--lambda-y needs --dims 2".into()).into()),
            };
            analyze(scheme, theta, &ratios, samples)
        }
        Command::Gridgen { variant, n, out } => gridgen(variant, n, out.as_deref()),
        Command::Dispersion { lambda, samples } => dispersion(lambda, samples),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::Unstable { .. }) => 3,
        Some(Error::Io(_)) => 1,
        Some(_) => 2,
        None if e.chain().any(|c| c.is::<io::Error>()) => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
