//! Physical parameters, quantum numbers and the solved-state representation.
//!
//! Atomic units throughout. The radial problem is
//!
//! ```text
//! (-1/2 d²/dr² - 1/(2r) d/dr + ω²r²/2 + k r + ω m - Z/r + m²/(2r²)) R = E R
//! ```
//!
//! and every solved state has the form
//! `R(r) = N · P(r) · r^|m| · exp(-ω r²/2 - (k/ω) r)` with `P` a polynomial.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::DD;
use crate::error::{QesError, Result};
use crate::exact::{self, Rational};

/// The couplings shared by every state of the model: Larmor frequency,
/// linear-potential slope and magnetic quantum number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub omega_l: f64,
    pub k: f64,
    pub m: i32,
}

impl Couplings {
    pub fn new(omega_l: f64, k: f64, m: i32) -> Result<Self> {
        if !(omega_l.is_finite() && omega_l > 0.0) {
            return Err(QesError::InvalidParameter(format!(
                "omega_l must be finite and > 0, got {omega_l}"
            )));
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(QesError::InvalidParameter(format!(
                "k must be finite and >= 0, got {k}"
            )));
        }
        Ok(Self { omega_l, k, m })
    }

    pub fn abs_m(&self) -> u32 {
        self.m.unsigned_abs()
    }

    /// Linear envelope coefficient `k/ω`.
    pub fn delta(&self) -> f64 {
        self.k / self.omega_l
    }

    pub fn omega_exact(&self) -> Rational {
        exact::rational(self.omega_l)
    }

    pub fn k_exact(&self) -> Rational {
        exact::rational(self.k)
    }

    pub fn delta_exact(&self) -> Rational {
        self.k_exact() / self.omega_exact()
    }

    /// `ln` of the envelope `r^|m| exp(-ω r²/2 - δ r)`.
    pub fn log_envelope(&self, r: f64) -> f64 {
        let s = self.abs_m() as f64;
        let log_power = if s == 0.0 { 0.0 } else { s * r.ln() };
        log_power - 0.5 * self.omega_l * r * r - self.delta() * r
    }

    pub fn envelope(&self, r: f64) -> f64 {
        self.log_envelope(r).exp()
    }

    /// Energy of the terminating series at `level`: `ω(level + |m| + m) - k²/(2ω²)`.
    pub fn level_energy(&self, level: usize) -> f64 {
        let s = self.abs_m() as f64;
        self.omega_l * (level as f64 + s + self.m as f64)
            - self.k * self.k / (2.0 * self.omega_l * self.omega_l)
    }

    pub fn level_energy_exact(&self, level: usize) -> Rational {
        let w = self.omega_exact();
        let k = self.k_exact();
        let n = exact::int(level as i64 + self.abs_m() as i64 + self.m as i64);
        &w * n - &k * &k / (exact::int(2) * &w * &w)
    }

    /// Couplings under `r -> r/λ`: `(λ²ω, λ³k)`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda * lambda * self.omega_l, lambda.powi(3) * self.k, self.m)
    }
}

/// A full model specification: the couplings plus, when known, the
/// Coulomb strength `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub couplings: Couplings,
    pub z_coulomb: Option<f64>,
}

impl ModelParams {
    pub fn new(omega_l: f64, k: f64, m: i32, z_coulomb: Option<f64>) -> Result<Self> {
        if let Some(z) = z_coulomb {
            if !z.is_finite() {
                return Err(QesError::InvalidParameter(format!("Z must be finite, got {z}")));
            }
        }
        Ok(Self { couplings: Couplings::new(omega_l, k, m)?, z_coulomb })
    }

    pub fn with_z(couplings: Couplings, z: f64) -> Self {
        Self { couplings, z_coulomb: Some(z) }
    }
}

/// Algebra label `j`, a non-negative half-integer stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "f64", try_from = "f64")]
pub struct Spin(u32);

impl Spin {
    pub fn from_twice(twice_j: u32) -> Self {
        Spin(twice_j)
    }

    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !(j.is_finite() && j >= 0.0 && twice.fract() == 0.0 && twice <= u32::MAX as f64) {
            return Err(QesError::InvalidParameter(format!(
                "j must be a non-negative half-integer, got {j}"
            )));
        }
        Ok(Spin(twice as u32))
    }

    /// `j = (level - 1)/2`; level 0 has no solution.
    pub fn from_level(level: usize) -> Result<Self> {
        if level == 0 {
            return Err(QesError::NoGroundState);
        }
        Ok(Spin((level - 1) as u32))
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn exact(self) -> Rational {
        exact::frac(self.0 as i64, 2)
    }

    /// `2j + 1`, the dimension of the representation and the series level.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn level(self) -> usize {
        self.dim()
    }
}

impl From<Spin> for f64 {
    fn from(s: Spin) -> f64 {
        s.value()
    }
}

impl TryFrom<f64> for Spin {
    type Error = QesError;
    fn try_from(j: f64) -> Result<Self> {
        Spin::new(j)
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Coefficients of the gauge factor `exp(-∫A dr)`, `A = μ r + δ + ν/r`,
/// on the branch that keeps the wavefunction normalizable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeTransform {
    pub mu: f64,
    pub delta: f64,
    pub nu: f64,
}

pub fn gauge_transform(couplings: &Couplings) -> GaugeTransform {
    GaugeTransform {
        mu: couplings.omega_l,
        delta: couplings.delta(),
        nu: -(couplings.abs_m() as f64),
    }
}

/// One quasi-exactly solvable state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QesState {
    pub couplings: Couplings,
    pub level: usize,
    pub j: Spin,
    /// Admissible Coulomb strength.
    pub z: f64,
    pub energy: f64,
    /// `a_0 ... a_{2j}` of the polynomial factor, ascending powers.
    pub poly: Vec<f64>,
    /// `N` such that `∫ R² r dr = 1`.
    pub norm_constant: f64,
}

impl QesState {
    /// Packages a state, normalizing the polynomial so that `a_0 = 1`
    /// (or the lowest non-zero coefficient, if `a_0` vanishes) and fixing
    /// `norm_constant` by quadrature.
    pub fn new(couplings: Couplings, z: f64, energy: f64, mut poly: Vec<f64>) -> Result<Self> {
        if poly.is_empty() {
            return Err(QesError::DegenerateState("empty polynomial".into()));
        }
        if poly.iter().any(|c| !c.is_finite()) {
            return Err(QesError::DegenerateState("non-finite polynomial coefficient".into()));
        }
        let pivot = poly
            .iter()
            .copied()
            .find(|c| *c != 0.0)
            .ok_or_else(|| QesError::DegenerateState("zero polynomial".into()))?;
        for c in &mut poly {
            *c /= pivot;
        }
        let spin = Spin::from_level(poly.len())?;
        let mut state = Self {
            couplings,
            level: poly.len(),
            j: spin,
            z,
            energy,
            poly,
            norm_constant: 1.0,
        };
        state.norm_constant = normalization_constant(&state)?;
        Ok(state)
    }

    pub fn abs_m(&self) -> u32 {
        self.couplings.abs_m()
    }

    pub fn params(&self) -> ModelParams {
        ModelParams::with_z(self.couplings, self.z)
    }

    pub fn poly_value(&self, r: f64) -> f64 {
        self.poly.iter().rev().fold(0.0, |acc, c| acc * r + c)
    }

    /// `R(r)`.
    pub fn radial_value(&self, r: f64) -> f64 {
        self.norm_constant * self.poly_value(r) * self.couplings.envelope(r)
    }

    /// `R(r)` evaluated in double-double.
    pub fn radial_value_dd(&self, r: f64) -> DD {
        self.radial_value_at(DD::from(r))
    }

    /// `R` at a double-double argument.
    pub fn radial_value_at(&self, x: DD) -> DD {
        let poly = self.poly.iter().rev().fold(DD::ZERO, |acc, &c| acc * x + c);
        let c = &self.couplings;
        let arg = -(x * x * (0.5 * c.omega_l)) - x * c.delta();
        DD::from(self.norm_constant) * poly * x.powi(c.abs_m()) * arg.exp()
    }

    /// `ln |R|` bound used to place the outer edge of grids: the envelope
    /// times `Σ|a_i| r^i`.
    pub fn log_magnitude_bound(&self, r: f64) -> f64 {
        let bound: f64 = self.poly.iter().rev().fold(0.0, |acc, c| acc * r + c.abs());
        self.norm_constant.ln() + bound.ln() + self.couplings.log_envelope(r)
    }

    /// `ψ(r, θ) = (2π)^{-1/2} e^{imθ} R(r)`.
    pub fn full_wavefunction(&self, r: f64, theta: f64) -> Result<Complex64> {
        if !(r > 0.0) {
            return Err(QesError::NonPositiveRadius(r));
        }
        let phase = Complex64::from_polar(1.0, self.couplings.m as f64 * theta);
        Ok(phase * (self.radial_value(r) / (2.0 * PI).sqrt()))
    }
}

/// `N` with `N² ∫₀^∞ (P r^|m| e^{-ωr²/2-δr})² r dr = 1`, by composite
/// Gauss-Legendre quadrature up to where the integrand is below 1e-40 of
/// its peak.
pub fn normalization_constant(state: &QesState) -> Result<f64> {
    let unit = QesState { norm_constant: 1.0, ..state.clone() };
    let cut = crate::grid::outer_cutoff(|r| 2.0 * unit.log_magnitude_bound(r) + r.ln(), 1e-40);
    let rule = GaussLegendre::new(NonZeroUsize::new(24).unwrap());
    let panels = 96;
    let width = cut / panels as f64;
    let integral: f64 = (0..panels)
        .map(|i| {
            let a = i as f64 * width;
            rule.integrate(a, a + width, |r| {
                let v = unit.radial_value(r);
                v * v * r
            })
        })
        .sum();
    if !(integral.is_finite() && integral > 0.0) {
        return Err(QesError::DegenerateState(format!(
            "norm integral is {integral}, cannot normalize"
        )));
    }
    Ok(integral.sqrt().recip())
}
