//! Command-line front end for `entloc-core`.
//!
//! Exit codes: 0 when the command completed, 2 when a verdict is
//! `Inconclusive` or a reproduction check failed, 1 on usage or input errors.

pub mod commands;
pub mod report;
pub mod spec;

pub use report::ReportFile;
pub use spec::StateSpecFile;

use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("state file: {0}")]
    Spec(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] entloc_core::Error),
}

#[derive(Debug, Parser)]
#[command(name = "entloc", version, about = "Degeneracy-locus invariants of multipartite mixed states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Screen a state for entanglement across cuts.
    Analyze(AnalyzeArgs),
    /// Re-run one of the built-in example scenarios.
    Reproduce(ReproduceArgs),
    /// Moduli fingerprints of the three-qutrit family, or the Smolin-family obstruction.
    Fingerprint(FingerprintArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the JSON report to this file.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Print the JSON report instead of the summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// State file (JSON).
    pub state: PathBuf,
    /// Cut such as `A:B|CD`; repeat for several. Defaults to every cut.
    #[arg(long = "cut")]
    pub cuts: Vec<String>,
    /// Comma-separated ranks per cut; one list applies to every cut.
    #[arg(long = "k")]
    pub ks: Vec<String>,
    /// Locus samples per (cut, k).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative rank threshold.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// One of 1, 2, thm4, thm5.
    #[arg(long)]
    pub example: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FingerprintArgs {
    /// Angles `a,b,c` of the three-qutrit family.
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta2: Option<String>,
    /// Four complex ratios, e.g. `1,1+2i,-0.5i,3`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda2: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("ENTLOC_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("ENTLOC_THREADS must be a positive integer, got `{value}`")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs the CLI on `args` (program name first), writing to the given
/// streams, and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_USAGE;
    }
    let (result, out) = match &cli.command {
        Command::Analyze(a) => (commands::analyze(a), &a.out),
        Command::Reproduce(a) => (commands::reproduce(a), &a.out),
        Command::Fingerprint(a) => (commands::fingerprint(a), &a.out),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Some(path) = &out.output {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            let _ = writeln!(stderr, "error: {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    let _ = if out.json {
        writeln!(stdout, "{}", report.to_json())
    } else {
        write!(stdout, "{}", report.summary())
    };
    if report.has_inconclusive() || !report.all_checks_pass() {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}
