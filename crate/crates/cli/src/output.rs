//! Serialized forms. Floats are written as the shortest decimal that reads
//! back to the same `f64`.

use std::fs;
use std::io::Write;
use std::path::Path;

use qes_core::verify::{CrossReport, StateReport};
use qes_core::{Couplings, Diagnostic, QesState, Spin};
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, Settings};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub omega_l: f64,
    pub k: f64,
    pub m: i32,
    pub level: usize,
    pub j: f64,
    pub tol: f64,
    pub grid_points: usize,
    pub r_min: f64,
}

impl Parameters {
    pub fn new(cfg: &RunConfig) -> Self {
        let c = cfg.couplings;
        Self {
            omega_l: c.omega_l,
            k: c.k,
            m: c.m,
            level: cfg.level,
            j: (cfg.level as f64 - 1.0) / 2.0,
            tol: cfg.settings.tol,
            grid_points: cfg.settings.grid_points,
            r_min: cfg.settings.r_min,
        }
    }

    pub fn couplings(&self) -> Result<Couplings, CliError> {
        Couplings::new(self.omega_l, self.k, self.m).map_err(CliError::from)
    }

    pub fn settings(&self, base: &Settings) -> Settings {
        Settings { tol: self.tol, grid_points: self.grid_points, r_min: self.r_min, ..base.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub max_residual: f64,
    pub norm_error: f64,
    pub node_count: usize,
    pub passed: bool,
}

impl From<&StateReport> for Verification {
    fn from(r: &StateReport) -> Self {
        Self { max_residual: r.max_residual, norm_error: r.norm_error, node_count: r.node_count, passed: r.passed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateOut {
    pub level: usize,
    pub j: f64,
    pub z: f64,
    pub energy: f64,
    pub poly: Vec<f64>,
    pub norm_constant: f64,
    pub verification: Verification,
}

impl StateOut {
    pub fn new(state: &QesState, report: &StateReport) -> Self {
        Self {
            level: state.level,
            j: state.j.value(),
            z: state.z,
            energy: state.energy,
            poly: state.poly.clone(),
            norm_constant: state.norm_constant,
            verification: report.into(),
        }
    }

    /// Rebuilds the state exactly as written, without renormalizing.
    pub fn to_state(&self, couplings: Couplings) -> Result<QesState, CliError> {
        if self.poly.len() != self.level {
            return Err(CliError::Usage(format!(
                "state at Z = {}: {} coefficients for level {}",
                self.z,
                self.poly.len(),
                self.level
            )));
        }
        Ok(QesState {
            couplings,
            level: self.level,
            j: Spin::from_level(self.level).map_err(CliError::from)?,
            z: self.z,
            energy: self.energy,
            poly: self.poly.clone(),
            norm_constant: self.norm_constant,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SexticCoefficients {
    pub centrifugal: f64,
    pub rho2: f64,
    pub rho4: f64,
    pub rho6: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SexticOut {
    #[serde(flatten)]
    pub state: StateOut,
    pub m_tilde: i32,
    pub coefficients: SexticCoefficients,
    pub eigenvalue: f64,
    pub sextic_residual: f64,
    /// Multiplier giving `∫ ζ² dρ = 1`.
    pub zeta_norm_constant: f64,
    /// `(ρ, ζ(ρ))` pairs with the planar normalization of the source.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<S> {
    pub parameters: Parameters,
    pub states: Vec<S>,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cross_validation: Option<CrossReport>,
    pub version: String,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Shortest round-trip decimal, always with a digit after the point or an
/// exponent; `NaN`/`inf` spelled out.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text_round_trips() {
        for x in [0.1, 1.0, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 0.13397459621556135] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(fmt_f64(1.5), "1.5");
        assert_eq!(fmt_f64(2.0), "2.0");
    }

    #[test]
    fn csv_has_header_and_quotes_nothing_numeric() {
        let text = csv_text(&["a", "b"], &[vec!["1.0".into(), "-2.5".into()]]).unwrap();
        assert_eq!(text, "a,b\n1.0,-2.5\n");
    }
}
