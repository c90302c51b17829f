//! The map `r = ρ²`, `θ = 2φ` onto a sextic oscillator.
//!
//! With `ζ(ρ) = √ρ R(ρ²)` and `m̃ = 2m` a solved state satisfies
//!
//! ```text
//! -ζ''/2 + (4m̃² - 1)/(8ρ²) ζ + (2ωm̃ - 4E) ρ² ζ + 4k ρ⁴ ζ + 2ω² ρ⁶ ζ = 4Z ζ
//! ```

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::dd::DD;
use crate::error::{QesError, Result};
use crate::exact::{self, Rational};
use crate::fd;
use crate::grid::{RadialGrid, DEFAULT_POINTS, DEFAULT_R_MIN};
use crate::model::QesState;
use crate::radial::{check_samples, Residual, POINTS_PER_OSCILLATION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SexticState {
    pub m_tilde: i32,
    pub centrifugal: f64,
    pub rho2: f64,
    pub rho4: f64,
    pub rho6: f64,
    pub eigenvalue: f64,
    pub source: QesState,
}

pub fn to_sextic(state: &QesState) -> SexticState {
    let c = &state.couplings;
    let m_tilde = 2 * c.m;
    let mt = m_tilde as f64;
    SexticState {
        m_tilde,
        centrifugal: (4.0 * mt * mt - 1.0) / 8.0,
        rho2: 2.0 * c.omega_l * mt - 4.0 * state.energy,
        rho4: 4.0 * c.k,
        rho6: 2.0 * c.omega_l * c.omega_l,
        eigenvalue: 4.0 * state.z,
        source: state.clone(),
    }
}

impl SexticState {
    pub fn potential(&self, rho: f64) -> f64 {
        self.potential_dd(DD::from(rho)).to_f64()
    }

    fn potential_dd(&self, x: DD) -> DD {
        let x2 = x * x;
        DD::from(self.centrifugal) / x2 + x2 * (DD::from(self.rho2) + x2 * (DD::from(self.rho4) + x2 * self.rho6))
    }

    /// The eigenvalue is `4Z` with no rounding.
    pub fn eigenvalue_is_exact(&self) -> bool {
        exact::rational(self.eigenvalue) == exact::int(4) * exact::rational(self.source.z)
    }

    /// Coefficients of `P(ρ²)` in ascending powers of `ρ`.
    pub fn rho_polynomial(&self) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.source.poly.len() - 1];
        for (i, &a) in self.source.poly.iter().enumerate() {
            out[2 * i] = a;
        }
        out
    }

    /// Degree `2(level - 1)` with only even powers present.
    pub fn degree_mapping_holds(&self) -> bool {
        let p = self.rho_polynomial();
        p.len() == 2 * (self.source.level - 1) + 1
            && p.iter().skip(1).step_by(2).all(|&c| c == 0.0)
            && p.last().is_some_and(|&c| c != 0.0)
    }
}

/// `ζ(ρ) = √ρ R(ρ²)` with the source normalization.
pub fn sextic_wavefunction(sextic: &SexticState, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(QesError::NonPositiveRadius(rho));
    }
    Ok(zeta_dd(sextic, DD::from(rho)).to_f64())
}

fn zeta_dd(sextic: &SexticState, x: DD) -> DD {
    x.sqrt() * sextic.source.radial_value_at(x * x)
}

/// `C` with `C² ∫₀^∞ ζ² dρ = 1`. Equals `(∫ R² dr / 2)^{-1/2}`, which is not
/// the planar normalization `∫ R² r dr = 1` of the source.
pub fn sextic_norm_constant(sextic: &SexticState) -> Result<f64> {
    let src = &sextic.source;
    let cut_r = crate::grid::outer_cutoff(|r| 2.0 * src.log_magnitude_bound(r), 1e-40);
    let cut = cut_r.sqrt();
    let rule = GaussLegendre::new(NonZeroUsize::new(24).unwrap());
    let panels = 96;
    let width = cut / panels as f64;
    let integral: f64 = (0..panels)
        .map(|i| {
            let a = i as f64 * width;
            rule.integrate(a, a + width, |rho| {
                let v = src.radial_value(rho * rho);
                v * v * rho
            })
        })
        .sum();
    if !(integral.is_finite() && integral > 0.0) {
        return Err(QesError::DegenerateState(format!("sextic norm integral is {integral}")));
    }
    Ok(integral.sqrt().recip())
}

/// Geometric ρ-grid from `√r_min` to `√r_max` of the source state's radial grid.
pub fn sextic_grid(sextic: &SexticState, r_min: f64, n: usize) -> Result<RadialGrid> {
    let radial = RadialGrid::for_state(&sextic.source, r_min, n)?;
    RadialGrid::geometric(radial.r_min().sqrt(), radial.r_max().sqrt(), n)
}

pub fn default_sextic_grid(sextic: &SexticState) -> Result<RadialGrid> {
    sextic_grid(sextic, DEFAULT_R_MIN, DEFAULT_POINTS)
}

/// `(H_sextic - 4Z) ζ` on `grid`.
pub fn sextic_apply(sextic: &SexticState, grid: &RadialGrid, samples: &[DD]) -> Result<Residual> {
    check_samples(grid, samples)?;
    check_resolution(sextic, grid)?;
    let values = fd::derivatives(grid.points(), samples)
        .iter()
        .zip(grid.points())
        .zip(samples)
        .map(|((d, &rho), &v)| {
            let x = DD::from(rho);
            (-(d.second * 0.5) + (sextic.potential_dd(x) - sextic.eigenvalue) * v).to_f64()
        })
        .collect();
    Ok(Residual { values })
}

/// Largest interior residual divided by `max|ζ| · max(|4Z|, √ω)`.
pub fn sextic_residual(sextic: &SexticState, grid: &RadialGrid) -> Result<f64> {
    let samples: Vec<DD> = grid.points().iter().map(|&rho| zeta_dd(sextic, DD::from(rho))).collect();
    let res = sextic_apply(sextic, grid, &samples)?;
    let peak = samples.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let scale = sextic.eigenvalue.abs().max(sextic.source.couplings.omega_l.sqrt());
    Ok(res.max_interior_abs() / (peak * scale))
}

fn check_resolution(sextic: &SexticState, grid: &RadialGrid) -> Result<()> {
    let p = grid.points();
    for i in 1..p.len() - 1 {
        let h = (p[i] - p[i - 1]).max(p[i + 1] - p[i]);
        let kappa = (2.0 * (sextic.eigenvalue - sextic.potential(p[i])).abs())
            .sqrt()
            .max(sextic.source.couplings.omega_l.sqrt());
        if h * kappa * POINTS_PER_OSCILLATION > 2.0 * std::f64::consts::PI {
            return Err(QesError::GridTooCoarse(format!("ρ spacing {h:.3e} at ρ = {:.4} is too coarse", p[i])));
        }
    }
    Ok(())
}

/// `(4m̃² - 1)/8 = s(s - 1)/2` with `m̃ = 2m` and `s = 2|m| + 1/2`, in rationals.
pub fn exponent_identity_holds(m: i32) -> bool {
    let mt = exact::int(2 * m as i64);
    let lhs: Rational = (exact::int(4) * &mt * &mt - exact::int(1)) / exact::int(8);
    let s = exact::int(2 * m.unsigned_abs() as i64) + exact::frac(1, 2);
    lhs == &s * (&s - exact::int(1)) / exact::int(2)
}
