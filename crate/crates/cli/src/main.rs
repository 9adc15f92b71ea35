use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harmloop_cli::config::{self, FileConfig};
use harmloop_cli::{execute, CliError, Command, Overrides};

/// Neutral harmonic maps into solvable Lie groups by the loop-group method.
#[derive(Debug, Parser)]
#[command(name = "harmloop", version)]
struct Cli {
    /// TOML run configuration.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `[output] dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Truncation band N of the potential.
    #[arg(long, global = true)]
    band: Option<usize>,
    /// Grid resolution per axis.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// `roots:N` or comma-separated `re:im` pairs on the unit circle.
    #[arg(long, global = true)]
    lambdas: Option<String>,
    /// Residual tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run the pipeline and export meshes, CSV and a report.
    Synth,
    /// Run the pipeline and every consistency check; report only.
    Verify,
    /// Birkhoff and Iwasawa factors of a loop.
    Split,
    /// Export a closed-form fixture with its checks.
    Gallery {
        /// One of: plane, horosphere, hyperbolic-paraboloid, vertical-plane, sol3-primitive.
        name: String,
    },
    /// Compare the series solution of Step 1 with RK4.
    Oracle,
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(p) => config::read_file(p)?,
        None => FileConfig::default(),
    };
    let ov = Overrides {
        band: cli.band,
        grid: cli.grid,
        lambdas: cli.lambdas.as_deref().map(config::parse_lambdas).transpose()?,
        tol: cli.tol,
        out: cli.out,
    };
    let (command, name) = match cli.command {
        Cmd::Synth => (Command::Synth, None),
        Cmd::Verify => (Command::Verify, None),
        Cmd::Split => (Command::Split, None),
        Cmd::Gallery { name } => (Command::Gallery, Some(name)),
        Cmd::Oracle => (Command::Oracle, None),
    };
    let cfg = config::resolve(command, name, file, &ov)?;
    let outcome = execute(&cfg)?;
    for c in &outcome.report.checks {
        let mark = if c.passed { "pass" } else { "FAIL" };
        println!("{mark} {:<28} {:.3e} (tol {:.1e})", c.name, c.value, c.tol);
    }
    if let Some(e) = &outcome.report.error {
        eprintln!("error: {e}");
    }
    for a in &outcome.report.artifacts {
        println!("wrote {}", cfg.out_dir.join(a).display());
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
