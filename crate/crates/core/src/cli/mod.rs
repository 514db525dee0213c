//! Command-line sweeps: configuration, evaluation and output.
//!
//! A run is described by a [`SweepConfig`]: the command, its grids and scalar
//! parameters, the κ convention and the output target. Configuration comes
//! from an optional flat `key = value` file overridden by `--param` flags.
//! Grids are written `start:stop:points`, complex values `re,im`, and
//! repetition lists as comma-separated counts.

pub mod format;
pub mod sweeps;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::repeated::KappaConvention;

pub use format::{format_sig, Table};

/// Exit code for configuration errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for invariant violations during computation.
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Invariant(_) => EXIT_INVARIANT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Single,
    Repeat,
    Continuous,
    Fig2a,
    Fig2b,
    Fig3,
    Isweep,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Self::Single,
        Self::Repeat,
        Self::Continuous,
        Self::Fig2a,
        Self::Fig2b,
        Self::Fig3,
        Self::Isweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Single => "single",
            Self::Repeat => "repeat",
            Self::Continuous => "continuous",
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig3 => "fig3",
            Self::Isweep => "isweep",
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown command `{s}`")))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(CliError::Config(format!("unknown output format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    /// `None` writes to standard output.
    pub path: Option<String>,
    pub format: OutputFormat,
}

/// Evenly spaced values `start, …, stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.stop
                } else {
                    self.start + span * (i as f64 / last)
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = CliError;

    /// `start:stop:points`, or a single number for a one-point grid.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || CliError::Config(format!("grid `{s}` is not `start:stop:points`"));
        let grid = match parts.as_slice() {
            [x] => {
                let v = parse_real(x)?;
                Grid {
                    start: v,
                    stop: v,
                    points: 1,
                }
            }
            [a, b, n] => Grid {
                start: parse_real(a)?,
                stop: parse_real(b)?,
                points: n.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        if grid.points == 0 || grid.start > grid.stop {
            return Err(CliError::Config(format!(
                "grid `{s}` needs at least one point and start ≤ stop"
            )));
        }
        Ok(grid)
    }
}

fn parse_real(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Config(format!("`{s}` is not a finite number")))
}

/// A non-grid parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamValue {
    Real(f64),
    Complex { re: f64, im: f64 },
    Counts(Vec<u32>),
}

/// Accepted kind and range of one named parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamKind {
    Grid { lo: f64, hi: f64 },
    Real { lo: f64, hi: f64 },
    Complex,
    Counts,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: &'static str,
}

const UNIT: (f64, f64) = (0.0, 1.0);
const HALF_TURN: f64 = std::f64::consts::PI;

const fn grid(name: &'static str, (lo, hi): (f64, f64), default: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Grid { lo, hi },
        default,
    }
}

const fn real(name: &'static str, (lo, hi): (f64, f64), default: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Real { lo, hi },
        default,
    }
}

const fn complex(name: &'static str, default: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Complex,
        default,
    }
}

const ANY: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);
const NONNEG: (f64, f64) = (0.0, f64::INFINITY);
const ANGLE: (f64, f64) = (0.0, HALF_TURN);

/// Parameters accepted by a command, with defaults.
pub fn param_specs(command: Command) -> Vec<ParamSpec> {
    match command {
        Command::Fig2a => vec![
            grid("q", UNIT, "0:1:51"),
            grid("mu", UNIT, "0:1:51"),
            real("p", UNIT, "0.5"),
        ],
        Command::Fig2b => vec![
            grid("q_E", UNIT, "0:1:51"),
            grid("q_B", UNIT, "0:1:51"),
            real("mu", UNIT, "1"),
            real("p", UNIT, "0.5"),
        ],
        Command::Fig3 => vec![
            grid("q", UNIT, "0:1:51"),
            grid("theta", ANGLE, "0:1.5707963267948966:51"),
        ],
        Command::Continuous => vec![
            grid("t", NONNEG, "0:5:51"),
            real("kappa", NONNEG, "1"),
            real("chi_dot", ANY, "0"),
            complex("r_dot", "0,0"),
            real("p", UNIT, "0.7"),
            complex("rho12", "0,0"),
        ],
        Command::Repeat => vec![
            ParamSpec {
                name: "n",
                kind: ParamKind::Counts,
                default: "1,2,5,10,20,50",
            },
            real("theta", ANGLE, "1"),
            real("chi", ANY, "0"),
            complex("r12", "1,0"),
            real("p", UNIT, "0.5"),
            complex("rho12", "0.5,0"),
        ],
        Command::Single => vec![
            real("theta", ANGLE, "1.5707963267948966"),
            real("phi", ANY, "0"),
            real("chi", ANY, "0"),
            complex("r12", "1,0"),
            real("p", UNIT, "0.5"),
            complex("rho12", "0.5,0"),
        ],
        Command::Isweep => vec![grid("t", NONNEG, "0:10:101"), real("kappa", NONNEG, "1")],
    }
}

/// Complete description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub command: Command,
    pub grids: BTreeMap<String, Grid>,
    pub params: BTreeMap<String, ParamValue>,
    pub kappa_convention: KappaConvention,
    pub output: OutputSpec,
}

/// Settings gathered from the command line before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawOptions {
    pub config_text: Option<String>,
    pub params: Vec<String>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub kappa_convention: Option<String>,
}

const RESERVED: [&str; 3] = ["kappa_convention", "format", "out"];

/// Parses a flat `key = value` document; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_value(spec: &ParamSpec, text: &str) -> Result<Option<ParamValue>, CliError> {
    let name = spec.name;
    let check = |v: f64, lo: f64, hi: f64| {
        if v < lo || v > hi {
            Err(CliError::Config(format!("`{name}` = {v} is outside [{lo}, {hi}]")))
        } else {
            Ok(v)
        }
    };
    match spec.kind {
        ParamKind::Grid { .. } => Ok(None),
        ParamKind::Real { lo, hi } => Ok(Some(ParamValue::Real(check(parse_real(text)?, lo, hi)?))),
        ParamKind::Complex => {
            let (re, im) = text
                .split_once(',')
                .ok_or_else(|| CliError::Config(format!("`{name}` = `{text}` is not `re,im`")))?;
            Ok(Some(ParamValue::Complex {
                re: parse_real(re)?,
                im: parse_real(im)?,
            }))
        }
        ParamKind::Counts => {
            let counts = text
                .split(',')
                .map(|s| s.trim().parse::<u32>().ok().filter(|&n| n >= 1))
                .collect::<Option<Vec<_>>>()
                .filter(|v| !v.is_empty())
                .ok_or_else(|| CliError::Config(format!("`{name}` = `{text}` is not a list of counts ≥ 1")))?;
            Ok(Some(ParamValue::Counts(counts)))
        }
    }
}

impl SweepConfig {
    /// Defaults for `command`, then the config file, then `--param` overrides.
    pub fn build(command: Command, raw: &RawOptions) -> Result<Self, CliError> {
        let specs = param_specs(command);
        let mut assignments: BTreeMap<String, String> =
            specs.iter().map(|s| (s.name.to_string(), s.default.to_string())).collect();
        let mut kappa = None;
        let mut format = None;
        let mut out = None;

        let mut pairs = match &raw.config_text {
            Some(text) => parse_config_text(text)?,
            None => Vec::new(),
        };
        for p in &raw.params {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--param `{p}` is not `name=value`")))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        for (k, v) in pairs {
            match k.as_str() {
                "kappa_convention" => kappa = Some(v),
                "format" => format = Some(v),
                "out" => out = Some(v),
                _ if assignments.contains_key(&k) => {
                    assignments.insert(k, v);
                }
                _ => {
                    let known: Vec<&str> = specs.iter().map(|s| s.name).chain(RESERVED).collect();
                    return Err(CliError::Config(format!(
                        "`{k}` is not a parameter of `{command}` (expected one of {})",
                        known.join(", ")
                    )));
                }
            }
        }
        kappa = raw.kappa_convention.clone().or(kappa);
        format = raw.format.clone().or(format);
        out = raw.out.clone().or(out);

        let mut grids = BTreeMap::new();
        let mut params = BTreeMap::new();
        for spec in &specs {
            let text = &assignments[spec.name];
            if let ParamKind::Grid { lo, hi } = spec.kind {
                let g: Grid = text.parse()?;
                if g.start < lo || g.stop > hi {
                    return Err(CliError::Config(format!(
                        "grid `{}` = `{text}` leaves [{lo}, {hi}]",
                        spec.name
                    )));
                }
                grids.insert(spec.name.to_string(), g);
            } else if let Some(v) = parse_value(spec, text)? {
                params.insert(spec.name.to_string(), v);
            }
        }
        let kappa_convention = match kappa {
            Some(s) => KappaConvention::parse(&s)
                .ok_or_else(|| CliError::Config(format!("unknown kappa convention `{s}`")))?,
            None => KappaConvention::default(),
        };
        let format = match format {
            Some(s) => s.parse()?,
            None => OutputFormat::default(),
        };
        Ok(Self {
            command,
            grids,
            params,
            kappa_convention,
            output: OutputSpec { path: out, format },
        })
    }

    pub fn grid(&self, name: &str) -> Result<&Grid, CliError> {
        self.grids
            .get(name)
            .ok_or_else(|| CliError::Config(format!("missing grid `{name}`")))
    }

    pub fn real(&self, name: &str) -> Result<f64, CliError> {
        match self.params.get(name) {
            Some(ParamValue::Real(v)) => Ok(*v),
            _ => Err(CliError::Config(format!("missing real parameter `{name}`"))),
        }
    }

    pub fn complex(&self, name: &str) -> Result<num_complex::Complex64, CliError> {
        match self.params.get(name) {
            Some(ParamValue::Complex { re, im }) => Ok(num_complex::Complex64::new(*re, *im)),
            _ => Err(CliError::Config(format!("missing complex parameter `{name}`"))),
        }
    }

    pub fn counts(&self, name: &str) -> Result<&[u32], CliError> {
        match self.params.get(name) {
            Some(ParamValue::Counts(v)) => Ok(v),
            _ => Err(CliError::Config(format!("missing count list `{name}`"))),
        }
    }
}

/// Evaluates the configured command.
pub fn run(config: &SweepConfig) -> Result<Table, CliError> {
    let table = match config.command {
        Command::Fig2a => sweeps::run_fig2a(config)?,
        Command::Fig2b => sweeps::run_fig2b(config)?,
        Command::Fig3 => sweeps::run_fig3(config)?,
        Command::Continuous => sweeps::run_continuous(config)?,
        Command::Repeat => sweeps::run_repeat(config)?,
        Command::Single => sweeps::run_single(config)?,
        Command::Isweep => sweeps::run_isweep(config)?,
    };
    table.check_finite()?;
    Ok(table)
}

/// Output document in the configured format.
pub fn render(config: &SweepConfig, table: &Table) -> String {
    match config.output.format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json(config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(command: Command, params: &[&str]) -> Result<SweepConfig, CliError> {
        SweepConfig::build(
            command,
            &RawOptions {
                params: params.iter().map(|s| s.to_string()).collect(),
                ..Default::default()
            },
        )
    }

    #[test]
    fn grid_parsing() {
        let g: Grid = "0:1:5".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g: Grid = "0.3".parse().unwrap();
        assert_eq!(g.values(), vec![0.3]);
        assert!("1:0:3".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("a:1:3".parse::<Grid>().is_err());
    }

    #[test]
    fn defaults_and_overrides() {
        let c = build(Command::Fig2a, &[]).unwrap();
        assert_eq!(c.grid("q").unwrap().points, 51);
        assert_eq!(c.real("p").unwrap(), 0.5);
        let c = build(Command::Fig2a, &["p=0.3", "q=0:1:3"]).unwrap();
        assert_eq!(c.real("p").unwrap(), 0.3);
        assert_eq!(c.grid("q").unwrap().points, 3);
    }

    #[test]
    fn config_file_then_flags() {
        let raw = RawOptions {
            config_text: Some("# fig 2b\nmu = 0.5\nq_B = 0:1:3 # coarse\nkappa_convention=paper\n".into()),
            params: vec!["mu=0.25".into()],
            format: Some("json".into()),
            ..Default::default()
        };
        let c = SweepConfig::build(Command::Fig2b, &raw).unwrap();
        assert_eq!(c.real("mu").unwrap(), 0.25);
        assert_eq!(c.grid("q_B").unwrap().points, 3);
        assert_eq!(c.kappa_convention, KappaConvention::Paper);
        assert_eq!(c.output.format, OutputFormat::Json);
    }

    #[test]
    fn config_errors() {
        for bad in [
            &["nope=1"][..],
            &["p=1.5"],
            &["q=0:2:3"],
            &["p"],
            &["p=abc"],
        ] {
            let e = build(Command::Fig2a, bad).unwrap_err();
            assert_eq!(e.exit_code(), EXIT_CONFIG, "{bad:?}");
        }
        assert!(build(Command::Repeat, &["n=0,1"]).is_err());
        assert!(build(Command::Continuous, &["r_dot=1"]).is_err());
        assert!(SweepConfig::build(
            Command::Fig3,
            &RawOptions {
                kappa_convention: Some("other".into()),
                ..Default::default()
            }
        )
        .is_err());
        assert!("bogus".parse::<Command>().is_err());
    }

    #[test]
    fn config_serde_round_trip() {
        let c = build(Command::Repeat, &["n=1,3", "r12=0.5,0.25"]).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: SweepConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(c, back);
    }
}
