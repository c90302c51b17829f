//! Independent checks on solved states.

use serde::{Deserialize, Serialize};

use crate::dd::DD;
use crate::error::{QesError, Result};
use crate::exact::{self, Poly};
use crate::grid::RadialGrid;
use crate::model::{Couplings, QesState, Spin};
use crate::radial::RadialOperator;
use crate::{series, sl2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Bound on the scaled finite-difference residual.
    pub residual: f64,
    /// Bound on `|∫ R² r dr - 1|`.
    pub norm: f64,
    /// Relative agreement required between the two solvers.
    pub cross: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { residual: 1e-5, norm: 1e-8, cross: 1e-9 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("residual", self.residual), ("norm", self.norm), ("cross", self.cross)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(QesError::InvalidParameter(format!("{name} tolerance must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub level: usize,
    pub z: f64,
    /// `max |(H - E) R|` over interior points divided by `max|R| · max(|E|, ω)`.
    pub max_residual: f64,
    pub norm_error: f64,
    /// Positive zeros of the polynomial factor.
    pub node_count: usize,
    pub passed: bool,
}

/// Checks one state on `grid`: radial residual, normalization and nodes.
pub fn verify_state(state: &QesState, grid: &RadialGrid, tol: &Tolerances) -> Result<StateReport> {
    tol.validate()?;
    if state.poly.iter().all(|&c| c == 0.0) {
        return Err(QesError::DegenerateState("zero polynomial".into()));
    }
    let max_residual = scaled_residual(state, grid)?;
    let norm_error = (norm_integral(state, grid) - 1.0).abs();
    let node_count = node_count(&state.poly);
    Ok(StateReport {
        level: state.level,
        z: state.z,
        max_residual,
        norm_error,
        node_count,
        passed: max_residual < tol.residual && norm_error < tol.norm,
    })
}

pub fn scaled_residual(state: &QesState, grid: &RadialGrid) -> Result<f64> {
    let samples: Vec<DD> = grid.points().iter().map(|&r| state.radial_value_dd(r)).collect();
    let op = RadialOperator::new(&state.params())?;
    let res = op.apply_dd(grid, &samples, state.energy)?;
    let peak = samples.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    Ok(res.max_interior_abs() / (peak * state.energy.abs().max(state.couplings.omega_l)))
}

/// Ratio of residuals on `grid` and on its 2x refinement.
pub fn residual_convergence(state: &QesState, grid: &RadialGrid) -> Result<f64> {
    Ok(scaled_residual(state, grid)? / scaled_residual(state, &grid.refined())?)
}

/// `∫₀^∞ R² r dr`: Simpson on `[0, r_min]`, non-uniform Simpson over the
/// grid, and an asymptotic estimate of the Gaussian tail.
pub fn norm_integral(state: &QesState, grid: &RadialGrid) -> f64 {
    let f = |r: f64| {
        let v = state.radial_value(r);
        v * v * r
    };
    let head = {
        let n = 64;
        let h = grid.r_min() / n as f64;
        let inner: f64 = (1..n).map(|i| f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
        h / 3.0 * (f(0.0) + inner + f(grid.r_min()))
    };
    let x = grid.points();
    let y: Vec<f64> = x.iter().map(|&r| f(r)).collect();
    let body = simpson_nonuniform(x, &y);

    let r_max = grid.r_max();
    let c = &state.couplings;
    let degree = state.poly.len() as f64 - 1.0;
    // d/dr ln f at r_max, for f ~ r^{2s+2d+1} exp(-ωr² - 2δr)
    let decay = 2.0 * c.omega_l * r_max + 2.0 * c.delta() - (2.0 * c.abs_m() as f64 + 2.0 * degree + 1.0) / r_max;
    let tail = if decay > 0.0 { y[y.len() - 1] / decay } else { y[y.len() - 1] * r_max };
    head + body + tail
}

fn simpson_nonuniform(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    if n < 3 {
        return if n == 2 { 0.5 * (x[1] - x[0]) * (y[0] + y[1]) } else { 0.0 };
    }
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < n {
        let (h0, h1) = (x[i + 1] - x[i], x[i + 2] - x[i + 1]);
        total += (h0 + h1) / 6.0
            * ((2.0 - h1 / h0) * y[i] + (h0 + h1).powi(2) / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        // odd number of intervals: quadratic through the last three points
        let (h0, h1) = (x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]);
        let alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        let eta = h1.powi(3) / (6.0 * h0 * (h0 + h1));
        total += alpha * y[n - 1] + beta * y[n - 2] - eta * y[n - 3];
    }
    total
}

/// Number of positive zeros of `Σ a_i r^i`: exact Sturm counting up to
/// degree 3, sign changes on a fine mesh beyond that.
pub fn node_count(poly: &[f64]) -> usize {
    let exact_poly = Poly::from_coeffs(poly.iter().map(|&c| exact::rational(c)).collect());
    let degree = exact_poly.degree().unwrap_or(0);
    if degree <= 3 {
        return exact_poly.count_positive_roots();
    }
    mesh_sign_changes(poly)
}

/// Sign changes of the polynomial on a geometric mesh up to the Cauchy bound.
pub fn mesh_sign_changes(poly: &[f64]) -> usize {
    let n = poly.iter().rposition(|&c| c != 0.0).unwrap_or(0);
    if n == 0 {
        return 0;
    }
    let bound = 1.0 + poly[..n].iter().map(|c| (c / poly[n]).abs()).fold(0.0, f64::max);
    let points = 200_000;
    let lo = bound * 1e-12;
    let ratio = (bound / lo).ln() / points as f64;
    let eval = |r: f64| poly.iter().rev().fold(0.0, |acc, c| acc * r + c);
    let mut changes = 0;
    let mut last = 0.0f64;
    for i in 0..=points {
        let v = eval(lo * (ratio * i as f64).exp());
        if v != 0.0 {
            if last != 0.0 && v.signum() != last.signum() {
                changes += 1;
            }
            last = v;
        }
    }
    changes
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossReport {
    pub level: usize,
    /// The monic characteristic polynomial of the `Z`-matrix equals the monic
    /// series constraint, coefficient by coefficient, in rationals.
    pub exact_polynomials_equal: bool,
    pub sl2_count: usize,
    pub series_count: usize,
    /// Largest `|Z_sl2 - Z_series|` over matched roots.
    pub max_z_delta: f64,
    /// The same, relative to `max(|Z_sl2|, |Z_series|)`.
    pub max_z_relative: f64,
    pub max_energy_delta: f64,
    /// Largest coefficient difference, relative to the largest coefficient,
    /// with both polynomials scaled to `a_0 = 1`.
    pub max_poly_delta: f64,
    pub passed: bool,
}

/// Runs both solvers at level `2j + 1` and compares them.
pub fn cross_validate(j: Spin, couplings: &Couplings, tol: f64) -> Result<CrossReport> {
    if !(tol > 0.0) {
        return Err(QesError::InvalidParameter(format!("tol must be > 0, got {tol}")));
    }
    let level = j.level();
    let solver_tol = 1e-8;
    let a = sl2::solve_admissible_z(j, couplings, solver_tol)?;
    let b = series::solve_series_states(level, couplings, solver_tol)?;
    let char_poly = sl2::build_qes_matrix(j, couplings).characteristic_polynomial();
    let exact_polynomials_equal = char_poly == b.constraint.monic();

    let mut report = CrossReport {
        level,
        exact_polynomials_equal,
        sl2_count: a.states.len(),
        series_count: b.states.len(),
        max_z_delta: 0.0,
        max_z_relative: 0.0,
        max_energy_delta: 0.0,
        max_poly_delta: 0.0,
        passed: false,
    };
    if a.states.len() != b.states.len() {
        return Ok(report);
    }
    let pairs = match_roots(&a.states, &b.states, tol);
    for (x, y) in pairs {
        let dz = (x.z - y.z).abs();
        report.max_z_delta = report.max_z_delta.max(dz);
        let scale = x.z.abs().max(y.z.abs());
        report.max_z_relative = report.max_z_relative.max(if scale > 0.0 { dz / scale } else { 0.0 });
        report.max_energy_delta = report.max_energy_delta.max((x.energy - y.energy).abs());
        report.max_poly_delta = report.max_poly_delta.max(poly_delta(&x.poly, &y.poly));
    }
    report.passed = exact_polynomials_equal && report.max_z_relative < tol && report.max_poly_delta < tol;
    Ok(report)
}

/// Pairs states in sorted order; when any pair disagrees beyond `tol`, falls
/// back to greedy nearest-`Z` assignment.
fn match_roots<'a>(a: &'a [QesState], b: &'a [QesState], tol: f64) -> Vec<(&'a QesState, &'a QesState)> {
    let sorted: Vec<_> = a.iter().zip(b).collect();
    let ok = sorted.iter().all(|(x, y)| (x.z - y.z).abs() <= tol * x.z.abs().max(y.z.abs()).max(1.0));
    if ok {
        return sorted;
    }
    let mut free: Vec<&QesState> = b.iter().collect();
    a.iter()
        .map(|x| {
            let k = (0..free.len())
                .min_by(|&i, &k| (free[i].z - x.z).abs().total_cmp(&(free[k].z - x.z).abs()))
                .unwrap();
            (x, free.remove(k))
        })
        .collect()
}

fn poly_delta(p: &[f64], q: &[f64]) -> f64 {
    let scale = p.iter().chain(q).map(|c| c.abs()).fold(0.0, f64::max);
    if p.len() != q.len() {
        return f64::INFINITY;
    }
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub lambda: f64,
    /// Largest `|Z' - λZ| / |λZ|` root by root.
    pub max_z_relative: f64,
    /// Largest `|E' - λ²E| / max(|λ²E|, λ²ω)`.
    pub max_energy_relative: f64,
    /// Largest `|a'_n - λ^n a_n|` relative to the largest scaled coefficient.
    pub max_poly_relative: f64,
    pub ordering_preserved: bool,
    pub passed: bool,
}

/// Compares the spectrum at `(λ²ω, λ³k)` with the scaled spectrum at `(ω, k)`.
pub fn scaling_audit(j: Spin, couplings: &Couplings, lambda: f64, tol: f64) -> Result<ScalingReport> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(QesError::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
    }
    let scaled = couplings.scaled(lambda)?;
    let solver_tol = 1e-8;
    let a = sl2::solve_admissible_z(j, couplings, solver_tol)?.states;
    let b = sl2::solve_admissible_z(j, &scaled, solver_tol)?.states;
    let mut report = ScalingReport {
        lambda,
        max_z_relative: 0.0,
        max_energy_relative: 0.0,
        max_poly_relative: 0.0,
        ordering_preserved: a.len() == b.len(),
        passed: false,
    };
    if a.len() != b.len() {
        return Ok(report);
    }
    for (x, y) in a.iter().zip(&b) {
        let zt = lambda * x.z;
        report.max_z_relative = report.max_z_relative.max((y.z - zt).abs() / zt.abs().max(f64::MIN_POSITIVE));
        let et = lambda * lambda * x.energy;
        let escale = et.abs().max(lambda * lambda * couplings.omega_l);
        report.max_energy_relative = report.max_energy_relative.max((y.energy - et).abs() / escale);
        let target: Vec<f64> = x.poly.iter().enumerate().map(|(n, c)| c * lambda.powi(n as i32)).collect();
        report.max_poly_relative = report.max_poly_relative.max(poly_delta(&target, &y.poly));
    }
    let by_z = |s: &[QesState]| {
        let mut idx: Vec<usize> = (0..s.len()).collect();
        idx.sort_by(|&i, &k| s[i].z.total_cmp(&s[k].z));
        idx
    };
    report.ordering_preserved = by_z(&a) == by_z(&b);
    report.passed = report.ordering_preserved
        && report.max_z_relative < tol
        && report.max_energy_relative < tol
        && report.max_poly_relative < tol.sqrt();
    Ok(report)
}
