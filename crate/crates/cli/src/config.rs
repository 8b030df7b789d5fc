//! Run configuration with layered precedence: built-in defaults, then the
//! TOML config file, then `CVTELEPORT_*` environment variables, then
//! command-line flags.

use std::path::PathBuf;

use serde::Deserialize;

use crate::CliError;

/// Environment variables are read as `CVTELEPORT_<FIELD>` (upper-case,
/// underscores), e.g. `CVTELEPORT_ALPHA`, `CVTELEPORT_GRID_POINTS`.
pub const ENV_PREFIX: &str = "CVTELEPORT_";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cutoff {
    /// Pick the cutoff from the adaptive tail rule.
    Auto,
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Fully resolved configuration a command runs with.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub rs: Vec<f64>,
    pub cutoff: Cutoff,
    pub tail_tol: f64,
    pub grid_points: usize,
    /// None picks the extent from the target amplitude.
    pub grid_extent: Option<f64>,
    pub seed: u64,
    pub trials: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Per-command defaults; the figure commands default to their published
/// parameter sets.
pub struct Defaults {
    pub alpha: f64,
    pub lambda: f64,
    pub rs: &'static [f64],
}

impl RunConfig {
    fn with_defaults(d: &Defaults) -> Self {
        Self {
            alpha: d.alpha,
            lambda: d.lambda,
            rs: d.rs.to_vec(),
            cutoff: Cutoff::Auto,
            tail_tol: 1e-12,
            grid_points: 2048,
            grid_extent: None,
            seed: 42,
            trials: 1000,
            out: None,
            format: Format::Csv,
        }
    }

    fn validate(self) -> Result<Self, CliError> {
        if !(0.0..1.0).contains(&self.lambda) {
            return Err(CliError::Config(format!(
                "lambda = {} must lie in [0, 1)",
                self.lambda
            )));
        }
        if self.rs.iter().any(|r| r.is_nan() || *r < 0.0) {
            return Err(CliError::Config("every r must be >= 0".into()));
        }
        if self.rs.is_empty() {
            return Err(CliError::Config("at least one r value is required".into()));
        }
        if self.grid_points < 64 {
            return Err(CliError::Config(format!(
                "grid_points = {} must be >= 64",
                self.grid_points
            )));
        }
        let tail_ok = self.tail_tol > 0.0 && self.tail_tol < 1e-3;
        if !tail_ok {
            return Err(CliError::Config(format!(
                "tail_tol = {} must lie in (0, 1e-3)",
                self.tail_tol
            )));
        }
        if self.trials == 0 {
            return Err(CliError::Config("trials must be >= 1".into()));
        }
        if !self.alpha.is_finite() {
            return Err(CliError::Config("alpha must be finite".into()));
        }
        Ok(self)
    }
}

/// The subset of settings a config file may carry.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    alpha: Option<f64>,
    lambda: Option<f64>,
    r: Option<Vec<f64>>,
    cutoff: Option<CutoffField>,
    tail_tol: Option<f64>,
    grid_points: Option<usize>,
    grid_extent: Option<f64>,
    seed: Option<u64>,
    trials: Option<u64>,
    format: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CutoffField {
    Fixed(usize),
    Text(String),
}

fn parse_cutoff(text: &str) -> Result<Cutoff, CliError> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(Cutoff::Auto);
    }
    text.parse::<usize>()
        .map(Cutoff::Fixed)
        .map_err(|_| CliError::Config(format!("cutoff must be \"auto\" or an integer, got {text:?}")))
}

fn parse_format(text: &str) -> Result<Format, CliError> {
    match text.to_ascii_lowercase().as_str() {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(CliError::Config(format!("format must be csv or json, got {other:?}"))),
    }
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(format!("{ENV_PREFIX}{name}")).ok()
}

fn env_parse<T: std::str::FromStr>(name: &str) -> Result<Option<T>, CliError> {
    match env_var(name) {
        None => Ok(None),
        Some(text) => text.parse::<T>().map(Some).map_err(|_| {
            CliError::Config(format!("{ENV_PREFIX}{name} could not be parsed from {text:?}"))
        }),
    }
}

/// Flag values as clap collected them; `None` means "not given".
#[derive(Clone, Debug, Default, clap::Args)]
pub struct CommonArgs {
    /// Coherent target amplitude
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Resource strength as lambda = tanh r, in [0, 1)
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Squeezing parameter r; repeat or comma-separate for sweeps
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub r: Option<Vec<f64>>,

    /// Fock cutoff: "auto" (adaptive tail rule) or an integer
    #[arg(long)]
    pub cutoff: Option<String>,

    /// Tail mass tolerance driving the adaptive cutoff
    #[arg(long)]
    pub tail_tol: Option<f64>,

    /// Number of grid points for the quadrature-protocol wavefunctions
    #[arg(long)]
    pub grid_points: Option<usize>,

    /// Half-width of the position grid (defaults to a target-derived value)
    #[arg(long)]
    pub grid_extent: Option<f64>,

    /// Base seed for sampled runs
    #[arg(long)]
    pub seed: Option<u64>,

    /// Number of Monte Carlo trials
    #[arg(long)]
    pub trials: Option<u64>,

    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format: csv or json
    #[arg(long)]
    pub format: Option<String>,

    /// TOML config file; flags and environment variables override it
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Resolve the effective configuration for one command invocation.
pub fn resolve(args: &CommonArgs, defaults: &Defaults) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::with_defaults(defaults);

    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: FileConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))?;
        if let Some(v) = file.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = file.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = file.r {
            cfg.rs = v;
        }
        if let Some(v) = file.cutoff {
            cfg.cutoff = match v {
                CutoffField::Fixed(n) => Cutoff::Fixed(n),
                CutoffField::Text(t) => parse_cutoff(&t)?,
            };
        }
        if let Some(v) = file.tail_tol {
            cfg.tail_tol = v;
        }
        if let Some(v) = file.grid_points {
            cfg.grid_points = v;
        }
        if let Some(v) = file.grid_extent {
            cfg.grid_extent = Some(v);
        }
        if let Some(v) = file.seed {
            cfg.seed = v;
        }
        if let Some(v) = file.trials {
            cfg.trials = v;
        }
        if let Some(v) = file.format {
            cfg.format = parse_format(&v)?;
        }
    }

    if let Some(v) = env_parse::<f64>("ALPHA")? {
        cfg.alpha = v;
    }
    if let Some(v) = env_parse::<f64>("LAMBDA")? {
        cfg.lambda = v;
    }
    if let Some(text) = env_var("R") {
        let rs: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
        cfg.rs = rs.map_err(|_| CliError::Config(format!("{ENV_PREFIX}R bad list {text:?}")))?;
    }
    if let Some(text) = env_var("CUTOFF") {
        cfg.cutoff = parse_cutoff(&text)?;
    }
    if let Some(v) = env_parse::<f64>("TAIL_TOL")? {
        cfg.tail_tol = v;
    }
    if let Some(v) = env_parse::<usize>("GRID_POINTS")? {
        cfg.grid_points = v;
    }
    if let Some(v) = env_parse::<f64>("GRID_EXTENT")? {
        cfg.grid_extent = Some(v);
    }
    if let Some(v) = env_parse::<u64>("SEED")? {
        cfg.seed = v;
    }
    if let Some(v) = env_parse::<u64>("TRIALS")? {
        cfg.trials = v;
    }
    if let Some(text) = env_var("FORMAT") {
        cfg.format = parse_format(&text)?;
    }

    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = &args.r {
        cfg.rs = v.clone();
    }
    if let Some(text) = &args.cutoff {
        cfg.cutoff = parse_cutoff(text)?;
    }
    if let Some(v) = args.tail_tol {
        cfg.tail_tol = v;
    }
    if let Some(v) = args.grid_points {
        cfg.grid_points = v;
    }
    if let Some(v) = args.grid_extent {
        cfg.grid_extent = Some(v);
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.clone());
    }
    if let Some(text) = &args.format {
        cfg.format = parse_format(text)?;
    }

    cfg.validate()
}
