use rayon::prelude::*;
use serde::Serialize;

use qes_core::ks;
use qes_core::series;
use qes_core::verify::{self, CrossReport, StateReport, Tolerances};
use qes_core::{Couplings, Diagnostic, QesState, RadialGrid, Spin};

use crate::config::{Format, RunConfig, ScanConfig, Settings};
use crate::error::CliError;
use crate::output::{
    csv_text, emit, fmt_f64, to_json, Document, Parameters, SexticCoefficients, SexticOut, StateOut, VERSION,
};

struct Solved {
    states: Vec<QesState>,
    reports: Vec<StateReport>,
    diagnostics: Vec<Diagnostic>,
    cross: CrossReport,
}

fn solve_level(couplings: &Couplings, level: usize, settings: &Settings) -> Result<Solved, CliError> {
    let spin = Spin::from_level(level)?;
    let sol = series::solve_series_states(level, couplings, settings.tol)?;
    let cross = verify::cross_validate(spin, couplings, Tolerances::default().cross)?;
    let reports = verify_all(&sol.states, settings)?;
    Ok(Solved { states: sol.states, reports, diagnostics: sol.diagnostics, cross })
}

fn verify_all(states: &[QesState], settings: &Settings) -> Result<Vec<StateReport>, CliError> {
    states
        .par_iter()
        .map(|st| {
            let grid = RadialGrid::for_state(st, settings.r_min, settings.grid_points)?;
            Ok(verify::verify_state(st, &grid, &Tolerances::default())?)
        })
        .collect()
}

fn state_rows(states: &[StateOut]) -> Vec<Vec<String>> {
    states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                s.level.to_string(),
                fmt_f64(s.j),
                i.to_string(),
                fmt_f64(s.z),
                fmt_f64(s.energy),
                fmt_f64(s.norm_constant),
                fmt_f64(s.verification.max_residual),
                fmt_f64(s.verification.norm_error),
                s.verification.node_count.to_string(),
                s.verification.passed.to_string(),
                s.poly.iter().map(|c| fmt_f64(*c)).collect::<Vec<_>>().join(" "),
            ]
        })
        .collect()
}

const STATE_HEADER: &[&str] = &[
    "level",
    "j",
    "root_index",
    "z",
    "energy",
    "norm_constant",
    "max_residual",
    "norm_error",
    "node_count",
    "passed",
    "poly",
];

fn write_states(doc: &Document<StateOut>, settings: &Settings) -> Result<(), CliError> {
    let text = match settings.format {
        Format::Json => to_json(doc)?,
        Format::Csv => {
            report_diagnostics(&doc.diagnostics);
            csv_text(STATE_HEADER, &state_rows(&doc.states))?
        }
    };
    emit(&text, settings.out.as_deref())
}

fn report_diagnostics(diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        eprintln!("diagnostic: {}", serde_json::to_string(d).unwrap_or_default());
    }
}

fn cross_failure(cross: &CrossReport) -> CliError {
    CliError::Verification(format!(
        "the two solvers disagree at level {}: exact polynomials equal = {}, {} vs {} roots, max relative Z gap {:e}",
        cross.level, cross.exact_polynomials_equal, cross.sl2_count, cross.series_count, cross.max_z_relative
    ))
}

pub fn solve(cfg: &RunConfig) -> Result<(), CliError> {
    let solved = solve_level(&cfg.couplings, cfg.level, &cfg.settings)?;
    let doc = Document {
        parameters: Parameters::new(cfg),
        states: solved.states.iter().zip(&solved.reports).map(|(s, r)| StateOut::new(s, r)).collect(),
        diagnostics: solved.diagnostics,
        cross_validation: Some(solved.cross.clone()),
        version: VERSION.to_string(),
    };
    write_states(&doc, &cfg.settings)?;
    if !solved.cross.passed {
        return Err(cross_failure(&solved.cross));
    }
    Ok(())
}

/// Re-verifies the states of a `solve` document with the grid settings
/// recorded in it, or solves and verifies when no input is given.
pub fn verify(cfg: Option<&RunConfig>, settings: &Settings) -> Result<(), CliError> {
    let doc = match &settings.input {
        Some(path) => {
            let text = crate::config::read(path)?;
            let input: Document<StateOut> = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", path.display())))?;
            let couplings = input.parameters.couplings()?;
            let run = input.parameters.settings(settings);
            let states: Vec<QesState> =
                input.states.iter().map(|s| s.to_state(couplings)).collect::<Result<_, _>>()?;
            let reports = verify_all(&states, &run)?;
            Document {
                states: states.iter().zip(&reports).map(|(s, r)| StateOut::new(s, r)).collect(),
                ..input
            }
        }
        None => {
            let cfg = cfg.ok_or_else(|| CliError::Usage("verify needs --input or a parameter set".into()))?;
            let solved = solve_level(&cfg.couplings, cfg.level, &cfg.settings)?;
            Document {
                parameters: Parameters::new(cfg),
                states: solved.states.iter().zip(&solved.reports).map(|(s, r)| StateOut::new(s, r)).collect(),
                diagnostics: solved.diagnostics,
                cross_validation: Some(solved.cross),
                version: VERSION.to_string(),
            }
        }
    };
    write_states(&doc, settings)?;
    if let Some(cross) = doc.cross_validation.as_ref().filter(|c| !c.passed) {
        return Err(cross_failure(cross));
    }
    let failed: Vec<String> = doc
        .states
        .iter()
        .filter(|s| !s.verification.passed)
        .map(|s| format!("Z = {} (residual {:e}, norm error {:e})", s.z, s.verification.max_residual, s.verification.norm_error))
        .collect();
    if !failed.is_empty() {
        return Err(CliError::Verification(format!("verification failed for {}", failed.join("; "))));
    }
    Ok(())
}

pub fn map_sextic(cfg: &RunConfig) -> Result<(), CliError> {
    let solved = solve_level(&cfg.couplings, cfg.level, &cfg.settings)?;
    let settings = &cfg.settings;
    let states: Vec<SexticOut> = solved
        .states
        .par_iter()
        .zip(&solved.reports)
        .map(|(st, rep)| {
            let sx = ks::to_sextic(st);
            let grid = ks::sextic_grid(&sx, settings.r_min, settings.grid_points)?;
            let residual = ks::sextic_residual(&sx, &grid)?;
            let samples = match settings.sample_points {
                Some(n) => Some(
                    sample_points(&grid, n)?
                        .into_iter()
                        .map(|rho| Ok([rho, ks::sextic_wavefunction(&sx, rho)?]))
                        .collect::<Result<Vec<_>, CliError>>()?,
                ),
                None => None,
            };
            Ok(SexticOut {
                state: StateOut::new(st, rep),
                m_tilde: sx.m_tilde,
                coefficients: SexticCoefficients {
                    centrifugal: sx.centrifugal,
                    rho2: sx.rho2,
                    rho4: sx.rho4,
                    rho6: sx.rho6,
                },
                eigenvalue: sx.eigenvalue,
                sextic_residual: residual,
                zeta_norm_constant: ks::sextic_norm_constant(&sx)?,
                samples,
            })
        })
        .collect::<Result<_, CliError>>()?;
    let doc = Document {
        parameters: Parameters::new(cfg),
        states,
        diagnostics: solved.diagnostics,
        cross_validation: Some(solved.cross.clone()),
        version: VERSION.to_string(),
    };
    let text = match settings.format {
        Format::Json => to_json(&doc)?,
        Format::Csv => {
            report_diagnostics(&doc.diagnostics);
            let mut rows = Vec::new();
            for (i, s) in doc.states.iter().enumerate() {
                let c = &s.coefficients;
                rows.push(vec![
                    "state".into(),
                    i.to_string(),
                    fmt_f64(s.state.z),
                    s.m_tilde.to_string(),
                    fmt_f64(c.centrifugal),
                    fmt_f64(c.rho2),
                    fmt_f64(c.rho4),
                    fmt_f64(c.rho6),
                    fmt_f64(s.eigenvalue),
                    fmt_f64(s.sextic_residual),
                    String::new(),
                    String::new(),
                ]);
            }
            for (i, s) in doc.states.iter().enumerate() {
                for [rho, zeta] in s.samples.iter().flatten() {
                    let mut row = vec!["sample".into(), i.to_string(), fmt_f64(s.state.z)];
                    row.extend(std::iter::repeat_n(String::new(), 7));
                    row.extend([fmt_f64(*rho), fmt_f64(*zeta)]);
                    rows.push(row);
                }
            }
            let header = [
                "kind",
                "state_index",
                "z",
                "m_tilde",
                "centrifugal",
                "rho2",
                "rho4",
                "rho6",
                "eigenvalue",
                "sextic_residual",
                "rho",
                "zeta",
            ];
            csv_text(&header, &rows)?
        }
    };
    emit(&text, settings.out.as_deref())?;
    if !solved.cross.passed {
        return Err(cross_failure(&solved.cross));
    }
    Ok(())
}

/// `n` geometric points spanning `grid`.
fn sample_points(grid: &RadialGrid, n: usize) -> Result<Vec<f64>, CliError> {
    match n {
        0 => Err(CliError::Usage("--sample-points must be >= 1".into())),
        1 => Ok(vec![grid.r_min()]),
        _ => Ok(RadialGrid::geometric(grid.r_min(), grid.r_max(), n)?.points().to_vec()),
    }
}

#[derive(Serialize)]
struct ExportOut {
    #[serde(flatten)]
    state: StateOut,
    /// `(r, R(r))` pairs.
    samples: Vec<[f64; 2]>,
}

pub fn export(cfg: &RunConfig) -> Result<(), CliError> {
    let solved = solve_level(&cfg.couplings, cfg.level, &cfg.settings)?;
    let settings = &cfg.settings;
    let states: Vec<ExportOut> = solved
        .states
        .iter()
        .zip(&solved.reports)
        .map(|(st, rep)| {
            let grid = RadialGrid::for_state(st, settings.r_min, settings.grid_points)?;
            let points = match settings.sample_points {
                Some(n) => sample_points(&grid, n)?,
                None => grid.points().to_vec(),
            };
            let samples = points.iter().map(|&r| [r, st.radial_value(r)]).collect();
            Ok(ExportOut { state: StateOut::new(st, rep), samples })
        })
        .collect::<Result<_, CliError>>()?;
    let text = match settings.format {
        Format::Json => to_json(&Document {
            parameters: Parameters::new(cfg),
            states,
            diagnostics: solved.diagnostics,
            cross_validation: None,
            version: VERSION.to_string(),
        })?,
        Format::Csv => {
            report_diagnostics(&solved.diagnostics);
            let rows: Vec<Vec<String>> = states
                .iter()
                .enumerate()
                .flat_map(|(i, s)| {
                    s.samples.iter().map(move |[r, v]| vec![i.to_string(), fmt_f64(s.state.z), fmt_f64(*r), fmt_f64(*v)])
                })
                .collect();
            csv_text(&["state_index", "z", "r", "radial"], &rows)?
        }
    };
    emit(&text, settings.out.as_deref())
}

#[derive(Serialize)]
struct ScanRow {
    omega_l: f64,
    k: f64,
    m: i32,
    level: usize,
    root_index: usize,
    z: f64,
    energy: f64,
    max_residual: f64,
    node_count: usize,
}

#[derive(Serialize)]
struct ScanDocument {
    rows: Vec<ScanRow>,
    diagnostics: Vec<Diagnostic>,
    version: String,
}

/// Rows ordered by `(ω, k, m, level)` ascending, then by `Z`, whatever the
/// order in which the parallel workers finish.
pub fn scan(cfg: &ScanConfig) -> Result<(), CliError> {
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let (omegas, ks) = (sorted(&cfg.omega_l), sorted(&cfg.k));
    let mut ms = cfg.m.clone();
    ms.sort_unstable();
    ms.dedup();
    let mut levels = cfg.levels.clone();
    levels.sort_unstable();
    levels.dedup();
    if levels.first() == Some(&0) {
        return Err(qes_core::QesError::NoGroundState.into());
    }
    let mut tuples = Vec::new();
    for &w in &omegas {
        for &k in &ks {
            for &m in &ms {
                for &level in &levels {
                    tuples.push((w, k, m, level));
                }
            }
        }
    }
    let settings = &cfg.settings;
    let blocks: Vec<(Vec<ScanRow>, Vec<Diagnostic>)> = tuples
        .par_iter()
        .map(|&(w, k, m, level)| {
            let couplings = Couplings::new(w, k, m)?;
            let sol = series::solve_series_states(level, &couplings, settings.tol)?;
            let reports = sol
                .states
                .iter()
                .map(|st| {
                    let grid = RadialGrid::for_state(st, settings.r_min, settings.grid_points)?;
                    Ok(verify::verify_state(st, &grid, &Tolerances::default())?)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let rows = sol
                .states
                .iter()
                .zip(&reports)
                .enumerate()
                .map(|(i, (st, rep))| ScanRow {
                    omega_l: w,
                    k,
                    m,
                    level,
                    root_index: i,
                    z: st.z,
                    energy: st.energy,
                    max_residual: rep.max_residual,
                    node_count: rep.node_count,
                })
                .collect();
            Ok((rows, sol.diagnostics))
        })
        .collect::<Result<_, CliError>>()?;
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for (r, d) in blocks {
        rows.extend(r);
        diagnostics.extend(d);
    }
    let text = match settings.format {
        Format::Json => to_json(&ScanDocument { rows, diagnostics, version: VERSION.to_string() })?,
        Format::Csv => {
            report_diagnostics(&diagnostics);
            let header =
                ["omega_l", "k", "m", "level", "root_index", "z", "energy", "max_residual", "node_count"];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_f64(r.omega_l),
                        fmt_f64(r.k),
                        r.m.to_string(),
                        r.level.to_string(),
                        r.root_index.to_string(),
                        fmt_f64(r.z),
                        fmt_f64(r.energy),
                        fmt_f64(r.max_residual),
                        r.node_count.to_string(),
                    ]
                })
                .collect();
            csv_text(&header, &body)?
        }
    };
    emit(&text, settings.out.as_deref())
}
