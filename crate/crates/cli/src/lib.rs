//! Batch front end: propagation tables, coherent-state coefficients,
//! overlaps and the verification suites, written as CSV or JSON.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

mod commands;
mod config;
mod output;
mod suites;

pub use config::{Engine, Format, RunConfig, Weights};
pub use output::{Check, Rule, Status};
pub use suites::{run_suite, Suite};

/// Exit codes of the `wga` binary.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const INSUFFICIENT: i32 = 3;
    pub const VERIFICATION: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, malformed input or out-of-domain parameters.
    Usage(String),
    /// The configuration cannot support the request (window too small,
    /// kernel cutoff past the overflow bound).
    Insufficient(String),
    /// The output was produced but a check failed.
    Verification(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Insufficient(_) => exit::INSUFFICIENT,
            CliError::Verification(_) => exit::VERIFICATION,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Insufficient(m) | CliError::Verification(m) => m,
        }
    }
}

impl From<wga_core::Error> for CliError {
    fn from(e: wga_core::Error) -> Self {
        match e {
            wga_core::Error::WindowTooSmall { .. } | wga_core::Error::KernelOverflow { .. } => {
                CliError::Insufficient(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parse `args` (including the program name), run, and return the exit code.
/// Output goes to `--out` when given, otherwise to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match config::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(stderr, "wga: {}", e.message());
            e.code()
        }
    }
}

fn execute(cli: config::Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let cfg = RunConfig::resolve(&cli.opts)?;
    let (doc, verdict) = match &cli.command {
        config::Command::Propagate { input, cross_check } => commands::propagate(&cfg, input.as_deref(), *cross_check)?,
        config::Command::Coherent { alpha } => (commands::coherent(&cfg, alpha)?, Ok(())),
        config::Command::Overlap { alpha, alpha_prime } => (commands::overlap(&cfg, alpha, alpha_prime)?, Ok(())),
        config::Command::Verify { suite, weights } => {
            let suite = Suite::parse(suite)?;
            let report = run_suite(suite, &cfg, weights.unwrap_or_default())?;
            let verdict = if report.pass {
                Ok(())
            } else {
                Err(CliError::Verification(format!(
                    "suite {} failed: {}",
                    suite.name(),
                    report.failed_names().join(", ")
                )))
            };
            (output::Document::Verify(report), verdict)
        }
    };
    let bytes = doc.render(cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => stdout.write_all(&bytes).map_err(|e| CliError::Usage(format!("cannot write output: {e}")))?,
    }
    verdict
}
