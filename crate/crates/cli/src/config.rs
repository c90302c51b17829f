//! Run configuration: command-line flags merged over an optional
//! `key = value` file, merged over defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qes_core::grid::{DEFAULT_POINTS, DEFAULT_R_MIN};
use qes_core::{Couplings, QesError, Spin};

use crate::error::CliError;

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "qes", version, about = "Quasi-exactly solvable states of the planar hydrogen atom in a magnetic field")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one level by both methods, cross-check and verify.
    Solve(ParamArgs),
    /// Tabulate states over lists or ranges of parameters (CSV by default).
    Scan(ParamArgs),
    /// Re-verify states from a JSON file, or solve and verify.
    Verify(ParamArgs),
    /// Map solved states onto the sextic oscillator.
    MapSextic(ParamArgs),
    /// Sample the radial wavefunctions.
    Export(ParamArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every command. Values are kept as text so that the same
/// keys can come from a config file; `scan` also accepts lists (`1,2,4`) and
/// ranges (`a:b:n`, or `a:b` for integers).
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "omega-l", allow_hyphen_values = true)]
    pub omega_l: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
    /// Level n = 2j + 1 (number of states and polynomial length).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "j")]
    pub level: Option<String>,
    /// Spin j, as `1.5` or `3/2`.
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<String>,
    #[arg(long = "grid-points")]
    pub grid_points: Option<String>,
    #[arg(long = "r-min", allow_hyphen_values = true)]
    pub r_min: Option<String>,
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "sample-points")]
    pub sample_points: Option<String>,
    /// JSON produced by `solve` (for `verify`).
    #[arg(long)]
    pub input: Option<PathBuf>,
}

const KEYS: &[&str] =
    &["omega-l", "k", "m", "level", "j", "tol", "grid-points", "r-min", "format", "out", "sample-points", "input"];

/// Parses `key = value` lines; `#` starts a comment, `_` and `-` are
/// interchangeable in keys.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key '{key}'", lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Flags over file over nothing. Giving either `level` or `j` on the command
/// line replaces both file entries.
pub fn merged(args: &ParamArgs) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = match &args.config {
        Some(path) => parse_config_text(&read(path)?)?,
        None => BTreeMap::new(),
    };
    if args.level.is_some() || args.j.is_some() {
        map.remove("level");
        map.remove("j");
    }
    let flags = [
        ("omega-l", args.omega_l.clone()),
        ("k", args.k.clone()),
        ("m", args.m.clone()),
        ("level", args.level.clone()),
        ("j", args.j.clone()),
        ("tol", args.tol.clone()),
        ("grid-points", args.grid_points.clone()),
        ("r-min", args.r_min.clone()),
        ("format", args.format.map(|f| format_name(f).to_string())),
        ("out", args.out.as_ref().map(|p| p.display().to_string())),
        ("sample-points", args.sample_points.clone()),
        ("input", args.input.as_ref().map(|p| p.display().to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            map.insert(key.to_string(), v);
        }
    }
    Ok(map)
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Csv => "csv",
    }
}

/// Settings shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub tol: f64,
    pub grid_points: usize,
    pub r_min: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub sample_points: Option<usize>,
    pub input: Option<PathBuf>,
}

/// A single parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub couplings: Couplings,
    pub level: usize,
    pub settings: Settings,
}

/// Lists of parameter values for `scan`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub omega_l: Vec<f64>,
    pub k: Vec<f64>,
    pub m: Vec<i32>,
    pub levels: Vec<usize>,
    pub settings: Settings,
}

pub fn settings(map: &BTreeMap<String, String>, default_format: Format) -> Result<Settings, CliError> {
    let tol = optional(map, "tol", parse_f64)?.unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be > 0, got {tol}")));
    }
    let r_min = optional(map, "r-min", parse_f64)?.unwrap_or(DEFAULT_R_MIN);
    if !(r_min.is_finite() && r_min > 0.0) {
        return Err(CliError::Usage(format!("--r-min must be > 0, got {r_min}")));
    }
    let grid_points = optional(map, "grid-points", parse_usize)?.unwrap_or(DEFAULT_POINTS);
    let format = match map.get("format").map(String::as_str) {
        None => default_format,
        Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        Some(other) => return Err(CliError::Usage(format!("unknown format '{other}' (json or csv)"))),
    };
    Ok(Settings {
        tol,
        grid_points,
        r_min,
        format,
        out: map.get("out").map(PathBuf::from),
        sample_points: optional(map, "sample-points", parse_usize)?,
        input: map.get("input").map(PathBuf::from),
    })
}

pub fn run_config(map: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
    let omega_l = required(map, "omega-l", parse_f64)?;
    let k = required(map, "k", parse_f64)?;
    let m = required(map, "m", parse_i32)?;
    let couplings = Couplings::new(omega_l, k, m).map_err(CliError::from)?;
    let level = level_from(map)?;
    Ok(RunConfig { couplings, level, settings: settings(map, Format::Json)? })
}

pub fn scan_config(map: &BTreeMap<String, String>) -> Result<ScanConfig, CliError> {
    let omega_l = required(map, "omega-l", float_list)?;
    let k = required(map, "k", float_list)?;
    let m = required(map, "m", int_list)?;
    let levels: Vec<usize> = match (map.get("level"), map.get("j")) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --level or --j, not both".into())),
        (Some(v), None) => int_list(v)?
            .into_iter()
            .map(|l| usize::try_from(l).map_err(|_| CliError::Usage(format!("level must be >= 0, got {l}"))))
            .collect::<Result<_, _>>()?,
        (None, Some(v)) => v.split(',').map(|s| spin_from_text(s.trim()).map(|j| j.level())).collect::<Result<_, _>>()?,
        (None, None) => return Err(CliError::Usage("--level or --j is required".into())),
    };
    for (name, empty) in [("omega-l", omega_l.is_empty()), ("k", k.is_empty()), ("m", m.is_empty())] {
        if empty {
            return Err(CliError::Usage(format!("--{name} range is empty")));
        }
    }
    if levels.is_empty() {
        return Err(CliError::Usage("level range is empty".into()));
    }
    for &w in &omega_l {
        for &kk in &k {
            Couplings::new(w, kk, 0).map_err(CliError::from)?;
        }
    }
    Ok(ScanConfig { omega_l, k, m, levels, settings: settings(map, Format::Csv)? })
}

fn level_from(map: &BTreeMap<String, String>) -> Result<usize, CliError> {
    match (map.get("level"), map.get("j")) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --level or --j, not both".into())),
        (Some(v), None) => {
            let l = parse_i64(v)?;
            usize::try_from(l).map_err(|_| CliError::Usage(format!("level must be >= 0, got {l}")))
        }
        (None, Some(v)) => Ok(spin_from_text(v)?.level()),
        (None, None) => Err(CliError::Usage("--level or --j is required".into())),
    }
}

fn spin_from_text(text: &str) -> Result<Spin, CliError> {
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let (n, d) = (parse_f64(num.trim())?, parse_f64(den.trim())?);
            if d != 2.0 && d != 1.0 {
                return Err(CliError::Usage(format!("j must be a half-integer, got {text}")));
            }
            n / d
        }
        None => parse_f64(text)?,
    };
    Spin::new(value).map_err(CliError::from)
}

fn required<T>(
    map: &BTreeMap<String, String>,
    key: &str,
    parse: impl Fn(&str) -> Result<T, CliError>,
) -> Result<T, CliError> {
    let v = map.get(key).ok_or_else(|| CliError::Usage(format!("--{key} is required")))?;
    parse(v).map_err(|e| CliError::Usage(format!("--{key}: {e}")))
}

fn optional<T>(
    map: &BTreeMap<String, String>,
    key: &str,
    parse: impl Fn(&str) -> Result<T, CliError>,
) -> Result<Option<T>, CliError> {
    map.get(key).map(|v| parse(v).map_err(|e| CliError::Usage(format!("--{key}: {e}")))).transpose()
}

fn parse_f64(s: &str) -> Result<f64, CliError> {
    s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("not a number: '{s}'")))
}

fn parse_i64(s: &str) -> Result<i64, CliError> {
    s.trim().parse::<i64>().map_err(|_| CliError::Usage(format!("not an integer: '{s}'")))
}

fn parse_i32(s: &str) -> Result<i32, CliError> {
    s.trim().parse::<i32>().map_err(|_| CliError::Usage(format!("not an integer: '{s}'")))
}

fn parse_usize(s: &str) -> Result<usize, CliError> {
    s.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("not a non-negative integer: '{s}'")))
}

/// `1,2,4` or `a:b:n` (`n` evenly spaced values from `a` to `b`).
pub fn float_list(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(',').filter(|t| !t.trim().is_empty()).map(parse_f64).collect(),
        [a, b, n] => {
            let (a, b, n) = (parse_f64(a)?, parse_f64(b)?, parse_usize(n)?);
            Ok(match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            })
        }
        _ => Err(CliError::Usage(format!("expected a list or a:b:n, got '{s}'"))),
    }
}

/// `-1,0,2` or `a:b` (inclusive).
pub fn int_list(s: &str) -> Result<Vec<i32>, CliError> {
    match s.split_once(':') {
        None => s.split(',').filter(|t| !t.trim().is_empty()).map(parse_i32).collect(),
        Some((a, b)) => Ok((parse_i32(a)?..=parse_i32(b)?).collect()),
    }
}

impl From<QesError> for CliError {
    fn from(e: QesError) -> Self {
        match e {
            QesError::InvalidParameter(_)
            | QesError::NonPositiveRadius(_)
            | QesError::InvalidGrid(_)
            | QesError::GridTooCoarse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> ParamArgs {
        ParamArgs::default()
    }

    #[test]
    fn config_file_syntax() {
        let map = parse_config_text("# unit run\nomega_l = 2\nk=0.5  # slope\n\nlevel = 3\n").unwrap();
        assert_eq!(map["omega-l"], "2");
        assert_eq!(map["k"], "0.5");
        assert!(parse_config_text("omega = 1").is_err());
        assert!(parse_config_text("just text").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "omega-l = 2\nk = 1\nm = 0\nj = 1/2\ntol = 1e-6\n").unwrap();
        let a = ParamArgs { config: Some(path.clone()), k: Some("3".into()), level: Some("3".into()), ..args() };
        let cfg = run_config(&merged(&a).unwrap()).unwrap();
        assert_eq!((cfg.couplings.omega_l, cfg.couplings.k, cfg.level), (2.0, 3.0, 3));
        assert_eq!(cfg.settings.tol, 1e-6);
        let a = ParamArgs { config: Some(path), ..args() };
        let cfg = run_config(&merged(&a).unwrap()).unwrap();
        assert_eq!(cfg.level, 2);
        assert_eq!(cfg.settings.grid_points, DEFAULT_POINTS);
        assert_eq!(cfg.settings.format, Format::Json);
    }

    #[test]
    fn level_and_j() {
        let base = |level: Option<&str>, j: Option<&str>| {
            let mut map = BTreeMap::new();
            for (k, v) in [("omega-l", "1"), ("k", "1"), ("m", "0")] {
                map.insert(k.to_string(), v.to_string());
            }
            if let Some(l) = level {
                map.insert("level".into(), l.into());
            }
            if let Some(j) = j {
                map.insert("j".into(), j.into());
            }
            run_config(&map)
        };
        assert_eq!(base(None, Some("3/2")).unwrap().level, 4);
        assert_eq!(base(None, Some("1.5")).unwrap().level, 4);
        assert_eq!(base(Some("0"), None).unwrap().level, 0);
        assert!(matches!(base(Some("1"), Some("0")), Err(CliError::Usage(_))));
        assert!(matches!(base(None, None), Err(CliError::Usage(_))));
        assert!(matches!(base(None, Some("1/3")), Err(CliError::Usage(_))));
        assert!(matches!(base(Some("-1"), None), Err(CliError::Usage(_))));
    }

    #[test]
    fn lists_and_ranges() {
        assert_eq!(float_list("1:2:3").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(float_list("0.5,1,4").unwrap(), vec![0.5, 1.0, 4.0]);
        assert!(float_list("1:2:0").unwrap().is_empty());
        assert_eq!(int_list("-2:1").unwrap(), vec![-2, -1, 0, 1]);
        assert_eq!(int_list("3,-1").unwrap(), vec![3, -1]);
        assert!(int_list("2:1").unwrap().is_empty());
    }

    #[test]
    fn invalid_values_are_usage_errors() {
        let mut map = BTreeMap::new();
        for (k, v) in [("omega-l", "0"), ("k", "1"), ("m", "0"), ("level", "1")] {
            map.insert(k.to_string(), v.to_string());
        }
        assert!(matches!(run_config(&map), Err(CliError::Usage(_))));
        map.insert("omega-l".into(), "1".into());
        map.insert("tol".into(), "-1".into());
        assert!(matches!(run_config(&map), Err(CliError::Usage(_))));
    }
}
