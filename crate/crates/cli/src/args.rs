use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use clap::{Args, Parser, Subcommand};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "qconfine", version, about = "Eigenvalues of -a/r + b r^2, free or inside a hard-wall sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one level with AIM, the grid oracle, or both.
    Solve(SolveArgs),
    /// Solve the quasi-exact conditions for the couplings.
    Exact(ExactArgs),
    /// Analytic energy bounds and critical-coupling estimates.
    Bounds(BoundsArgs),
    /// Critical couplings b_c where levels cross E = 0.
    #[command(name = "scan-bc")]
    ScanBc(ScanBcArgs),
    /// Levels sorted by energy.
    Ordering(OrderingArgs),
    /// Locate the crossing of two levels in b or R.
    Cross(CrossArgs),
    /// Tabulate energies over a grid in one or two parameters.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Exact(_) => "exact",
            Command::Bounds(_) => "bounds",
            Command::ScanBc(_) => "scan-bc",
            Command::Ordering(_) => "ordering",
            Command::Cross(_) => "cross",
            Command::Sweep(_) => "sweep",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Solve(x) => &x.common,
            Command::Exact(x) => &x.common,
            Command::Bounds(x) => &x.common,
            Command::ScanBc(x) => &x.common,
            Command::Ordering(x) => &x.common,
            Command::Cross(x) => &x.common,
            Command::Sweep(x) => &x.common,
        }
    }

    /// Flags given on the command line, as (key, value) pairs.
    fn flags(&self) -> Vec<(&'static str, Option<String>)> {
        let mut out = self.common().pairs();
        match self {
            Command::Solve(_) | Command::Bounds(_) => {}
            Command::Exact(x) => {
                out.push(("confined", x.confined.then(|| "true".to_string())));
                out.push(("n", x.n.clone()));
                out.push(("fix", x.fix.clone()));
            }
            Command::ScanBc(x) => {
                out.push(("levels", x.levels.clone()));
                out.push(("b-min", x.b_min.clone()));
                out.push(("b-max", x.b_max.clone()));
            }
            Command::Ordering(x) => {
                out.push(("max-nu", x.max_nu.clone()));
                out.push(("max-l", x.max_l.clone()));
                out.push(("count", x.count.clone()));
            }
            Command::Cross(x) => {
                out.push(("pair", x.pair.clone()));
                out.push(("vary", x.vary.clone()));
                out.push(("from", x.from.clone()));
                out.push(("to", x.to.clone()));
            }
            Command::Sweep(x) => {
                out.push(("levels", x.levels.clone()));
                out.push(("vary", x.vary.clone()));
                out.push(("from", x.from.clone()));
                out.push(("to", x.to.clone()));
                out.push(("count", x.count.clone()));
                out.push(("log", x.log.then(|| "true".to_string())));
                out.push(("vary2", x.vary2.clone()));
                out.push(("from2", x.from2.clone()));
                out.push(("to2", x.to2.clone()));
                out.push(("count2", x.count2.clone()));
                out.push(("log2", x.log2.then(|| "true".to_string())));
            }
        }
        out
    }

    /// Every key the command understands.
    fn keys(&self) -> Vec<&'static str> {
        self.flags().into_iter().map(|(k, _)| k).collect()
    }

    /// Config-file values overlaid with command-line flags.
    pub fn settings(&self) -> Result<Settings, CliError> {
        let mut values = BTreeMap::new();
        if let Some(path) = &self.common().config {
            let keys = self.keys();
            for (key, value) in read_config(Path::new(path))? {
                if !keys.contains(&key.as_str()) || key == "config" {
                    return Err(CliError::Usage(format!("{path}: unknown key '{key}' for {}", self.name())));
                }
                values.insert(key, value);
            }
        }
        for (key, value) in self.flags() {
            if let Some(v) = value {
                values.insert(key.to_string(), v);
            }
        }
        Ok(Settings { values })
    }
}

/// Options shared by every command. All are optional on the command line so
/// that a config file can supply them.
#[derive(Debug, Args, Default)]
pub struct Common {
    /// Coulomb coupling a.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Oscillator coupling b.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Wall radius R; omit (or `inf`) for free space.
    #[arg(long)]
    pub radius: Option<String>,
    /// Angular momentum l.
    #[arg(long)]
    pub l: Option<String>,
    /// Radial node count n.
    #[arg(long)]
    pub nodes: Option<String>,
    /// Mantissa bits for the arbitrary-precision solvers [default: 256].
    #[arg(long = "precision-bits")]
    pub precision_bits: Option<String>,
    /// Absolute energy tolerance [default: 1e-20].
    #[arg(long)]
    pub tol: Option<String>,
    /// AIM expansion point.
    #[arg(long)]
    pub r0: Option<String>,
    /// AIM iteration cap [default: 200].
    #[arg(long = "max-iter")]
    pub max_iter: Option<String>,
    /// aim, oracle or both.
    #[arg(long)]
    pub solver: Option<String>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub output: Option<String>,
    /// text, csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// File of `key = value` lines; flags override it.
    #[arg(long)]
    pub config: Option<String>,
}

impl Common {
    fn pairs(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("a", self.a.clone()),
            ("b", self.b.clone()),
            ("radius", self.radius.clone()),
            ("l", self.l.clone()),
            ("nodes", self.nodes.clone()),
            ("precision-bits", self.precision_bits.clone()),
            ("tol", self.tol.clone()),
            ("r0", self.r0.clone()),
            ("max-iter", self.max_iter.clone()),
            ("solver", self.solver.clone()),
            ("output", self.output.clone()),
            ("format", self.format.clone()),
            ("config", self.config.clone()),
        ]
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub common: Common,
    /// Hard-wall problem instead of free space.
    #[arg(long)]
    pub confined: bool,
    /// Degree of the polynomial factor.
    #[arg(long)]
    pub n: Option<String>,
    /// The fixed coupling: a=..., b=..., R=... or sqrt2b=...
    #[arg(long, allow_hyphen_values = true)]
    pub fix: Option<String>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ScanBcArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated levels, e.g. `1s,2s,2p` [default: 1s].
    #[arg(long)]
    pub levels: Option<String>,
    #[arg(long = "b-min")]
    pub b_min: Option<String>,
    #[arg(long = "b-max")]
    pub b_max: Option<String>,
}

#[derive(Debug, Args)]
pub struct OrderingArgs {
    #[command(flatten)]
    pub common: Common,
    /// Highest principal number included [default: 7].
    #[arg(long = "max-nu")]
    pub max_nu: Option<String>,
    /// Highest l included [default: 4].
    #[arg(long = "max-l")]
    pub max_l: Option<String>,
    /// Number of groups printed [default: all].
    #[arg(long)]
    pub count: Option<String>,
}

#[derive(Debug, Args)]
pub struct CrossArgs {
    #[command(flatten)]
    pub common: Common,
    /// Two levels, e.g. `3s,4f`.
    #[arg(long)]
    pub pair: Option<String>,
    /// b or R.
    #[arg(long)]
    pub vary: Option<String>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated levels.
    #[arg(long)]
    pub levels: Option<String>,
    /// First swept parameter: a, b or R.
    #[arg(long)]
    pub vary: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<String>,
    #[arg(long)]
    pub count: Option<String>,
    /// Space the first axis logarithmically.
    #[arg(long)]
    pub log: bool,
    /// Optional second swept parameter.
    #[arg(long)]
    pub vary2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub from2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub to2: Option<String>,
    #[arg(long)]
    pub count2: Option<String>,
    #[arg(long)]
    pub log2: bool,
}

/// Parses `key = value` lines; `#` starts a comment. Keys may use `_` or `-`.
pub fn parse_config(text: &str, origin: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{origin}:{}: expected `key = value`", i + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(CliError::Usage(format!("{origin}:{}: empty key or value", i + 1)));
        }
        out.push((key, value.to_string()));
    }
    Ok(out)
}

fn read_config(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string())
}

/// Resolved key/value settings for one run.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key).ok_or_else(|| CliError::Usage(format!("missing --{key}")))
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| CliError::Usage(format!("invalid value '{v}' for --{key}"))))
            .transpose()
    }

    pub fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.parse(key)?.ok_or_else(|| CliError::Usage(format!("missing --{key}")))
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.get(key) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(CliError::Usage(format!("invalid boolean '{v}' for {key}"))),
        }
    }

    /// The wall radius, or `None` for free space.
    pub fn radius(&self) -> Option<&str> {
        self.get("radius").filter(|r| !matches!(r.to_ascii_lowercase().as_str(), "inf" | "infinity" | "free"))
    }
}
