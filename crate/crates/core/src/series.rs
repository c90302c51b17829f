//! The power-series route.
//!
//! Writing `R = r^|m| exp(-ωr²/2 - δr) Σ a_n r^n` turns the radial equation
//! into a three-term recurrence
//!
//! ```text
//! (n+1)(|m| + (n+1)/2) a_{n+1}
//!     = [ω(n + |m| + m) - δ²/2 - E] a_{n-1} + [(|m| + 1/2 + n)δ - Z] a_n
//! ```
//!
//! With `E = E_N` the `a_{n-1}` term vanishes at `n = N`, so the series stops
//! at degree `N - 1` exactly when `a_N(Z) = 0`. That polynomial in `Z` is the
//! constraint `F`.

use num_traits::Zero;

use crate::diagnostics::{Diagnostic, Method};
use crate::error::{QesError, Result};
use crate::exact::{self, Poly, Rational};
use crate::model::{Couplings, QesState};
use crate::roots;

/// Leading exponents at `r -> 0`: `u = √r R ~ r^{s_zero}` and the polynomial
/// factor starts at `r^{s_phi}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicialData {
    pub s_zero: Rational,
    pub s_phi: Rational,
}

impl IndicialData {
    pub fn s_zero_f64(&self) -> f64 {
        exact::to_f64(&self.s_zero)
    }
}

/// Of the two roots `0` and `-2|m|` of `s(s + 2|m|) = 0` only `0` keeps
/// `R` finite at the origin.
pub fn indicial_exponent(m: i32) -> IndicialData {
    IndicialData { s_zero: exact::int(m.unsigned_abs() as i64) + exact::frac(1, 2), s_phi: exact::int(0) }
}

/// Coefficients generated so far, with `a_{-1} = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceState {
    pub couplings: Couplings,
    pub energy: f64,
    pub z: f64,
    pub coeffs: Vec<f64>,
}

impl RecurrenceState {
    pub fn new(couplings: Couplings, energy: f64, z: f64, a0: f64) -> Self {
        Self { couplings, energy, z, coeffs: vec![a0] }
    }

    /// Appends the next coefficient and returns it.
    pub fn advance(&mut self) -> f64 {
        let n = self.coeffs.len() - 1;
        let next = recurrence_next(self, n);
        self.coeffs.push(next);
        next
    }
}

/// `a_{n+1}` from `a_n` and `a_{n-1}`.
pub fn recurrence_next(state: &RecurrenceState, n: usize) -> f64 {
    let c = &state.couplings;
    let s = c.abs_m() as f64;
    let d = c.delta();
    let nf = n as f64;
    let prev = if n == 0 { 0.0 } else { state.coeffs[n - 1] };
    let cur = state.coeffs[n];
    let e_term = c.omega_l * (nf + s + c.m as f64) - 0.5 * d * d - state.energy;
    let z_term = (s + 0.5 + nf) * d - state.z;
    (e_term * prev + z_term * cur) / ((nf + 1.0) * (s + 0.5 * (nf + 1.0)))
}

/// The termination constraint `F(Z) = a_N(Z)` at level `N`, with `a_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintPolynomial {
    pub level: usize,
    pub couplings: Couplings,
    pub poly: Poly,
}

impl ConstraintPolynomial {
    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    pub fn monic(&self) -> Poly {
        self.poly.monic()
    }
}

pub fn constraint_polynomial(level: usize, couplings: &Couplings) -> Result<ConstraintPolynomial> {
    if level == 0 {
        return Err(QesError::NoGroundState);
    }
    let seq = exact_sequence(level, couplings, level, |c0| Poly::linear(c0, exact::int(-1)), Poly::constant, |p, q| {
        p.mul(q)
    });
    Ok(ConstraintPolynomial { level, couplings: *couplings, poly: seq[level].clone() })
}

/// Runs the recurrence in exact arithmetic from `a_0 = 1` up to `a_last`,
/// with `E = E_level`. `z_factor(c)` builds `c - Z` in the coefficient ring.
fn exact_sequence<T: Clone + RingOps>(
    level: usize,
    couplings: &Couplings,
    last: usize,
    z_factor: impl Fn(Rational) -> T,
    lift: impl Fn(Rational) -> T,
    mul: impl Fn(&T, &T) -> T,
) -> Vec<T> {
    let w = couplings.omega_exact();
    let d = couplings.delta_exact();
    let s = exact::int(couplings.abs_m() as i64);
    let half = exact::frac(1, 2);
    let mut seq = vec![lift(exact::int(1))];
    for n in 0..last {
        let nq = exact::int(n as i64);
        // ω(n + |m| + m) - δ²/2 - E_level collapses to ω(n - level)
        let e_term = &w * exact::int(n as i64 - level as i64);
        let den = (&nq + exact::int(1)) * (&s + (&nq + exact::int(1)) * &half);
        let mut next = mul(&z_factor((&s + &half + &nq) * &d), &seq[n]);
        if n > 0 && !e_term.is_zero() {
            next = next.plus(&mul(&lift(e_term), &seq[n - 1]));
        }
        seq.push(next.over(&den));
    }
    seq
}

trait RingOps {
    fn plus(&self, other: &Self) -> Self;
    fn over(&self, den: &Rational) -> Self;
}

impl RingOps for Poly {
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn over(&self, den: &Rational) -> Self {
        self.scale(&(exact::int(1) / den))
    }
}

impl RingOps for Rational {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn over(&self, den: &Rational) -> Self {
        self / den
    }
}

/// Exact `a_0 ... a_last` at a fixed `Z`, with `E = E_level`.
fn exact_coefficients_at(level: usize, couplings: &Couplings, z: f64, last: usize) -> Vec<Rational> {
    let zq = exact::rational(z);
    exact_sequence(level, couplings, last, |c0| c0 - &zq, |q| q, |a, b| a * b)
}

/// Magnitude companion of the recurrence: the same sums taken with absolute
/// values, used as the reference scale for the size of `a_n`.
fn magnitudes(level: usize, couplings: &Couplings, z: f64, last: usize) -> Vec<f64> {
    let s = couplings.abs_m() as f64;
    let d = couplings.delta();
    let w = couplings.omega_l;
    let mut mag = vec![1.0];
    for n in 0..last {
        let nf = n as f64;
        let prev = if n == 0 { 0.0 } else { mag[n - 1] };
        let e = (w * (nf - level as f64)).abs();
        let zt = (s + 0.5 + nf) * d + z.abs();
        mag.push((e * prev + zt * mag[n]) / ((nf + 1.0) * (s + 0.5 * (nf + 1.0))));
    }
    mag
}

/// Largest of `|a_N|, |a_{N+1}|, |a_{N+2}|` relative to the magnitude of the
/// terms that produced them. Zero means the series stops exactly at `Z`.
pub fn termination_defect(level: usize, couplings: &Couplings, z: f64) -> Result<f64> {
    if level == 0 {
        return Err(QesError::NoGroundState);
    }
    if !z.is_finite() {
        return Err(QesError::InvalidParameter(format!("Z must be finite, got {z}")));
    }
    let a = exact_coefficients_at(level, couplings, z, level + 2);
    let mag = magnitudes(level, couplings, z, level + 2);
    Ok((level..=level + 2).map(|i| exact::to_f64(&a[i]).abs() / mag[i]).fold(0.0, f64::max))
}

/// Feasibility reading: does the user-supplied `Z` make the series terminate
/// at `level` to within `tol`?
pub fn is_admissible(level: usize, couplings: &Couplings, z: f64, tol: f64) -> Result<bool> {
    Ok(termination_defect(level, couplings, z)? <= tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    pub states: Vec<QesState>,
    pub diagnostics: Vec<Diagnostic>,
    pub constraint: ConstraintPolynomial,
}

/// Newton steps on the exact constraint, each rounded once to `f64`.
const MAX_POLISH_STEPS: usize = 4;

pub fn solve_series_states(level: usize, couplings: &Couplings, tol: f64) -> Result<SeriesSolution> {
    if !(tol > 0.0) {
        return Err(QesError::InvalidParameter(format!("tol must be > 0, got {tol}")));
    }
    let constraint = constraint_polynomial(level, couplings)?;
    let f = &constraint.poly;
    let df = f.derivative();
    let energy = exact::to_f64(&couplings.level_energy_exact(level));
    let mut diagnostics = Vec::new();
    let mut candidates = Vec::new();
    if level == 1 {
        // linear constraint, solved without rounding beyond the final one
        let c = f.coeffs();
        candidates.push(exact::to_f64(&(-&c[0] / &c[1])));
    } else {
        for root in roots::polynomial_roots(&f.to_f64()) {
            if root.im.abs() > tol * root.norm().max(f64::MIN_POSITIVE) {
                diagnostics.push(Diagnostic::ComplexRoot { method: Method::Series, level, re: root.re, im: root.im });
                continue;
            }
            candidates.push(polish(f, &df, root.re, level, &mut diagnostics));
        }
    }
    let mut states = Vec::new();
    for z in candidates {
        let tail = termination_defect(level, couplings, z)?;
        if tail > tol {
            diagnostics.push(Diagnostic::NotTerminating { level, z, tail });
            continue;
        }
        let poly = exact_coefficients_at(level, couplings, z, level - 1).iter().map(exact::to_f64).collect();
        states.push(QesState::new(*couplings, z, energy, poly)?);
    }
    states.sort_by(|a, b| a.z.total_cmp(&b.z));
    if states.is_empty() {
        diagnostics.push(Diagnostic::NoRealRoots { method: Method::Series, level });
    }
    Ok(SeriesSolution { states, diagnostics, constraint })
}

fn polish(f: &Poly, df: &Poly, start: f64, level: usize, diagnostics: &mut Vec<Diagnostic>) -> f64 {
    let residual = |z: f64| exact::to_f64(&f.eval(&exact::rational(z))).abs();
    let mut z = start;
    for _ in 0..MAX_POLISH_STEPS {
        let zq = exact::rational(z);
        let slope = df.eval(&zq);
        if slope.is_zero() {
            break;
        }
        let next = exact::to_f64(&(&zq - f.eval(&zq) / slope));
        if next == z || !next.is_finite() {
            break;
        }
        z = next;
    }
    if residual(z) > residual(start) {
        diagnostics.push(Diagnostic::PolishStalled { level, z: start });
        return start;
    }
    z
}
