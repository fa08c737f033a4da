use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "anderson", version, about = "Equivariant L-series of Anderson t-modules over F_q[theta]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sum of 1/a over monic a, optionally weighted by z^deg(a).
    Zeta(RunArgs),
    /// Euler product of a preset or a module file, plain and z-deformed.
    Lfun(RunArgs),
    /// Run a named verification suite.
    Verify {
        suite: String,
        #[command(flatten)]
        args: RunArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Order of the constant field.
    #[arg(long, conflicts_with = "p")]
    pub q: Option<u64>,
    /// Characteristic, for presets built over a prime field.
    #[arg(long)]
    pub p: Option<u64>,
    /// Coefficients are reported through theta^-N.
    #[arg(long)]
    pub precision: Option<i64>,
    /// Primes (or monic polynomials) of degree up to D enter.
    #[arg(long = "max-deg")]
    pub max_deg: Option<i64>,
    /// Group spec such as "Z/3" or "Z/2 x Z/2".
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long, conflicts_with = "module_file")]
    pub preset: Option<String>,
    #[arg(long = "module-file")]
    pub module_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `poly` keeps z symbolic; `eval=V` substitutes z = V.
    #[arg(long, value_parser = parse_z)]
    pub z: Option<ZMode>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZMode {
    Poly,
    Eval(u64),
}

fn parse_z(s: &str) -> Result<ZMode, String> {
    if s == "poly" {
        return Ok(ZMode::Poly);
    }
    s.strip_prefix("eval=")
        .and_then(|v| v.parse().ok())
        .map(ZMode::Eval)
        .ok_or_else(|| format!("expected `poly` or `eval=V`, got `{s}`"))
}

/// Misuse of the command line; reported with exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("usage: {0}")]
pub struct UsageError(pub String);

/// Validated settings of one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub q: Option<u64>,
    pub precision: Option<i64>,
    pub max_deg: Option<usize>,
    pub group: Option<String>,
    pub preset: Option<String>,
    pub module_file: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub z: Option<ZMode>,
}

impl RunConfig {
    /// `allow_zero_precision` admits `N = 0`, whose answer is the constant 1.
    pub fn from_args(a: &RunArgs, allow_zero_precision: bool) -> Result<Self, UsageError> {
        let min = if allow_zero_precision { 0 } else { 1 };
        if let Some(n) = a.precision {
            if n < min {
                return Err(UsageError(format!("--precision must be at least {min}, got {n}")));
            }
        }
        let max_deg = match a.max_deg {
            Some(d) if d < 1 => return Err(UsageError(format!("--max-deg must be at least 1, got {d}"))),
            d => d.map(|d| d as usize),
        };
        if let Some(q) = a.q.or(a.p) {
            if q < 2 {
                return Err(UsageError(format!("field order must be at least 2, got {q}")));
            }
        }
        Ok(RunConfig {
            q: a.q.or(a.p),
            precision: a.precision,
            max_deg,
            group: a.group.clone(),
            preset: a.preset.clone(),
            module_file: a.module_file.clone(),
            format: a.format,
            seed: a.seed,
            z: a.z,
        })
    }

    pub fn precision_or(&self, n: i64) -> i64 {
        self.precision.unwrap_or(n)
    }

    pub fn max_deg_or(&self, d: usize) -> usize {
        self.max_deg.unwrap_or(d)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "precision": self.precision,
            "max_deg": self.max_deg,
            "group": self.group,
            "preset": self.preset,
            "module_file": self.module_file.as_ref().map(|p| p.display().to_string()),
            "seed": self.seed,
            "z": match self.z {
                None => Value::Null,
                Some(ZMode::Poly) => json!("poly"),
                Some(ZMode::Eval(v)) => json!(format!("eval={v}")),
            },
        })
    }
}
