use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "wga", version, about = "Waveguide arrays and E(2) coherent states")]
pub(crate) struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub(crate) enum Command {
    /// Propagate amplitudes through the twisted array.
    Propagate {
        /// `delta@n` or a file of `n, re, im` lines (default `delta@0`).
        #[arg(long)]
        input: Option<String>,
        /// Run both engines and fail when they differ by more than `--tol`.
        #[arg(long)]
        cross_check: bool,
    },
    /// Coefficients of a coherent state `|r e^{iθ}⟩`.
    Coherent {
        /// Label `r,theta`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Overlap of two coherent states by closed form and by series.
    Overlap {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long = "alpha-prime", allow_hyphen_values = true)]
        alpha_prime: String,
    },
    /// Run a verification suite.
    Verify {
        /// unitarity | graf | cartesian-roi | polar-roi | naive |
        /// helmholtz-cauchy | helmholtz-polar | conv-identity
        #[arg(long)]
        suite: String,
        /// Weights of the Cartesian resolution.
        #[arg(long, value_enum)]
        weights: Option<Weights>,
    },
}

#[derive(Debug, Default, Args)]
pub(crate) struct Opts {
    /// Window half-width N (indices -N..=N).
    #[arg(long, global = true)]
    pub n_window: Option<usize>,
    /// Propagation distance.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Twist angle: radians or pi/2, pi, 3pi/2.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Propagation engine (default analytic).
    #[arg(long, global = true, value_enum)]
    pub engine: Option<Engine>,
    /// RK4 step of the ODE engine.
    #[arg(long, global = true)]
    pub dz: Option<String>,
    /// Output format (default csv).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed of the randomized checks (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tolerance of the engine cross-check; in `verify`, replaces the
    /// tolerance of every absolute-deviation check.
    #[arg(long, global = true)]
    pub tol: Option<String>,
    /// Gauss–Legendre nodes of the Cartesian spectral integrals.
    #[arg(long, global = true)]
    pub quad_nodes: Option<usize>,
    /// Domain half-width L of the direct Cartesian path, the Cauchy line
    /// integral and the naive radial integral.
    #[arg(long = "quad-L", global = true)]
    pub quad_l: Option<String>,
    /// Circle radius of the polar kernel or the reconstruction boundary.
    #[arg(long, global = true)]
    pub r0: Option<String>,
    /// Mode cutoff N_K of the polar kernel.
    #[arg(long, global = true)]
    pub nk: Option<usize>,
    /// File of `key=value` lines using the flag names; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Engine {
    #[default]
    Analytic,
    Ode,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Ode => "ode",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Weights {
    /// `P = π^{3/2}/(2√2)`, position weight 4, derivative weight 1.
    #[default]
    Reference,
    /// `P = 1`, position weight 1, derivative weight 1/2.
    Unit,
}

/// Fully resolved run parameters. Unset suite-specific values stay `None`
/// and fall back to per-suite defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_window: Option<usize>,
    pub z: f64,
    pub theta: f64,
    pub engine: Engine,
    pub dz: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub quad_nodes: usize,
    pub quad_l: Option<f64>,
    pub r0: Option<f64>,
    pub nk: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_window: None,
            z: 1.0,
            theta: PI / 2.0,
            engine: Engine::Analytic,
            dz: 1e-3,
            format: Format::Csv,
            out: None,
            seed: 0,
            tol: None,
            quad_nodes: 64,
            quad_l: None,
            r0: None,
            nk: None,
        }
    }
}

/// Angle in radians; also accepts `pi/2`, `pi`, `3pi/2` with optional sign.
pub fn parse_angle(s: &str) -> CliResult<f64> {
    let t = s.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t),
    };
    let v = match body {
        "pi/2" => PI / 2.0,
        "pi" => PI,
        "3pi/2" => 1.5 * PI,
        "2pi" => 2.0 * PI,
        _ => return parse_f64(t, "angle"),
    };
    Ok(sign * v)
}

pub fn parse_f64(s: &str, what: &str) -> CliResult<f64> {
    let v: f64 = s.trim().parse().map_err(|_| CliError::Usage(format!("invalid {what} '{s}'")))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("{what} must be finite")));
    }
    Ok(v)
}

fn positive(v: f64, what: &str) -> CliResult<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("{what} must be positive")))
    }
}

fn parse_usize(s: &str, what: &str) -> CliResult<usize> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("invalid {what} '{s}'")))
}

const KEYS: [&str; 13] =
    ["n-window", "z", "theta", "engine", "dz", "format", "out", "seed", "tol", "quad-nodes", "quad-L", "r0", "nk"];

fn read_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        let key = KEYS
            .iter()
            .find(|c| c.eq_ignore_ascii_case(&k))
            .ok_or_else(|| CliError::Usage(format!("config line {}: unknown key '{k}'", i + 1)))?;
        map.insert(key.to_string(), v.trim().to_string());
    }
    Ok(map)
}

impl RunConfig {
    pub(crate) fn resolve(opts: &Opts) -> CliResult<Self> {
        let file = match &opts.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let pick = |flag: Option<String>, key: &str| flag.or_else(|| file.get(key).cloned());
        let mut c = RunConfig::default();
        if let Some(v) = pick(opts.n_window.map(|v| v.to_string()), "n-window") {
            let n = parse_usize(&v, "n-window")?;
            if n == 0 {
                return Err(CliError::Usage("n-window must be positive".into()));
            }
            c.n_window = Some(n);
        }
        if let Some(v) = pick(opts.z.clone(), "z") {
            c.z = parse_f64(&v, "z")?;
        }
        if let Some(v) = pick(opts.theta.clone(), "theta") {
            c.theta = parse_angle(&v)?;
        }
        if let Some(v) = pick(opts.engine.map(|e| e.name().to_string()), "engine") {
            c.engine = Engine::from_str(&v, true).map_err(|_| CliError::Usage(format!("invalid engine '{v}'")))?;
        }
        if let Some(v) = pick(opts.dz.clone(), "dz") {
            c.dz = positive(parse_f64(&v, "dz")?, "dz")?;
        }
        let fmt = opts.format.map(|f| if f == Format::Csv { "csv" } else { "json" }.to_string());
        if let Some(v) = pick(fmt, "format") {
            c.format = Format::from_str(&v, true).map_err(|_| CliError::Usage(format!("invalid format '{v}'")))?;
        }
        if let Some(v) = pick(opts.out.as_ref().map(|p| p.to_string_lossy().into_owned()), "out") {
            c.out = Some(PathBuf::from(v));
        }
        if let Some(v) = pick(opts.seed.map(|s| s.to_string()), "seed") {
            c.seed = v.trim().parse().map_err(|_| CliError::Usage(format!("invalid seed '{v}'")))?;
        }
        if let Some(v) = pick(opts.tol.clone(), "tol") {
            c.tol = Some(positive(parse_f64(&v, "tol")?, "tol")?);
        }
        if let Some(v) = pick(opts.quad_nodes.map(|v| v.to_string()), "quad-nodes") {
            c.quad_nodes = parse_usize(&v, "quad-nodes")?;
            if c.quad_nodes == 0 {
                return Err(CliError::Usage("quad-nodes must be positive".into()));
            }
        }
        if let Some(v) = pick(opts.quad_l.clone(), "quad-L") {
            c.quad_l = Some(positive(parse_f64(&v, "quad-L")?, "quad-L")?);
        }
        if let Some(v) = pick(opts.r0.clone(), "r0") {
            c.r0 = Some(positive(parse_f64(&v, "r0")?, "r0")?);
        }
        if let Some(v) = pick(opts.nk.map(|v| v.to_string()), "nk") {
            let n = parse_usize(&v, "nk")?;
            if n == 0 {
                return Err(CliError::Usage("nk must be positive".into()));
            }
            c.nk = Some(n);
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3pi/2").unwrap(), 1.5 * PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("tau").is_err());
        assert!(parse_angle("nan").is_err());
    }

    #[test]
    fn config_file_and_override() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        std::fs::write(&p, "# comment\nz = 2.5\nquad_L=30\nformat=json\n--seed=9\n").unwrap();
        let opts = Opts { config: Some(p.clone()), seed: Some(3), ..Opts::default() };
        let c = RunConfig::resolve(&opts).unwrap();
        assert_eq!(c.z, 2.5);
        assert_eq!(c.quad_l, Some(30.0));
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.seed, 3);
        std::fs::write(&p, "bogus=1\n").unwrap();
        assert!(RunConfig::resolve(&opts).is_err());
        std::fs::write(&p, "z\n").unwrap();
        assert!(RunConfig::resolve(&opts).is_err());
    }

    #[test]
    fn rejects_nonpositive() {
        let opts = Opts { dz: Some("0".into()), ..Opts::default() };
        assert!(RunConfig::resolve(&opts).is_err());
        let opts = Opts { n_window: Some(0), ..Opts::default() };
        assert!(RunConfig::resolve(&opts).is_err());
    }
}
