//! The radial Hamiltonian applied to sampled wavefunctions.

use crate::dd::DD;
use crate::error::{QesError, Result};
use crate::fd;
use crate::grid::RadialGrid;
use crate::model::{Couplings, ModelParams};

/// Interior points a grid must have before a residual is computed.
pub const MIN_INTERIOR_POINTS: usize = 32;
/// Required samples per local oscillation length `2π/κ`.
pub const POINTS_PER_OSCILLATION: f64 = 5.0;

/// Pointwise values of `(H - E) R`; the first and last entries come from
/// one-sided stencils.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub values: Vec<f64>,
}

impl Residual {
    pub fn is_one_sided(&self, i: usize) -> bool {
        i == 0 || i + 1 == self.values.len()
    }

    pub fn interior(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }

    pub fn max_interior_abs(&self) -> f64 {
        self.interior().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `H = -1/2 d²/dr² - 1/(2r) d/dr + ω²r²/2 + k r + ω m - Z/r + m²/(2r²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOperator {
    couplings: Couplings,
    z: f64,
}

impl RadialOperator {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let z = params
            .z_coulomb
            .ok_or(QesError::MissingCoulomb("the radial operator needs Z"))?;
        Ok(Self { couplings: params.couplings, z })
    }

    pub fn potential(&self, r: f64) -> f64 {
        self.potential_dd(DD::from(r)).to_f64()
    }

    fn potential_dd(&self, r: DD) -> DD {
        let c = &self.couplings;
        let m = c.m as f64;
        r * r * (0.5 * c.omega_l * c.omega_l) + r * c.k + c.omega_l * m - DD::from(self.z) / r
            + DD::from(0.5 * m * m) / (r * r)
    }

    /// `(H - E) R` on `grid` for `f64` samples.
    pub fn apply(&self, grid: &RadialGrid, samples: &[f64], energy: f64) -> Result<Residual> {
        let dd: Vec<DD> = samples.iter().map(|&v| DD::from(v)).collect();
        self.apply_dd(grid, &dd, energy)
    }

    /// `(H - E) R` on `grid` for double-double samples.
    pub fn apply_dd(&self, grid: &RadialGrid, samples: &[DD], energy: f64) -> Result<Residual> {
        check_samples(grid, samples)?;
        self.check_resolution(grid, energy)?;
        let values = fd::derivatives(grid.points(), samples)
            .iter()
            .zip(grid.points())
            .zip(samples)
            .map(|((d, &r), &v)| {
                let x = DD::from(r);
                let kinetic = -(d.second * 0.5) - d.first / (x * 2.0);
                (kinetic + (self.potential_dd(x) - energy) * v).to_f64()
            })
            .collect();
        Ok(Residual { values })
    }

    fn check_resolution(&self, grid: &RadialGrid, energy: f64) -> Result<()> {
        let p = grid.points();
        for i in 1..p.len() - 1 {
            let h = (p[i] - p[i - 1]).max(p[i + 1] - p[i]);
            let kappa = (2.0 * (energy - self.potential(p[i])).abs()).sqrt().max(self.couplings.omega_l.sqrt());
            if h * kappa * POINTS_PER_OSCILLATION > 2.0 * std::f64::consts::PI {
                return Err(QesError::GridTooCoarse(format!(
                    "spacing {h:.3e} at r = {:.4} resolves fewer than {POINTS_PER_OSCILLATION} points \
                     per local wavelength {:.3e}",
                    p[i],
                    2.0 * std::f64::consts::PI / kappa
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_samples(grid: &RadialGrid, samples: &[DD]) -> Result<()> {
    if grid.len() < MIN_INTERIOR_POINTS + 2 {
        return Err(QesError::GridTooCoarse(format!(
            "{} interior points, need at least {MIN_INTERIOR_POINTS}",
            grid.len().saturating_sub(2)
        )));
    }
    if samples.len() != grid.len() {
        return Err(QesError::InvalidGrid(format!(
            "{} samples for {} grid points",
            samples.len(),
            grid.len()
        )));
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(QesError::NonFinite(i));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level_one() -> (RadialOperator, Couplings) {
        let params = ModelParams::new(1.0, 1.0, 0, Some(0.5)).unwrap();
        (RadialOperator::new(&params).unwrap(), params.couplings)
    }

    #[test]
    fn closed_form_level_one_state_is_annihilated() {
        let (op, _) = level_one();
        let grid = RadialGrid::geometric(1e-3, 8.0, 4096).unwrap();
        let samples: Vec<DD> = grid
            .points()
            .iter()
            .map(|&r| {
                let x = DD::from(r);
                (-(x * x * 0.5) - x).exp()
            })
            .collect();
        let res = op.apply_dd(&grid, &samples, 0.5).unwrap();
        let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.to_f64().abs()));
        assert!(res.max_interior_abs() / scale < 1e-5, "{}", res.max_interior_abs());
        assert!(res.is_one_sided(0) && res.is_one_sided(grid.len() - 1) && !res.is_one_sided(1));
    }

    #[test]
    fn plain_float_samples_are_roundoff_limited_near_the_origin() {
        // ε/h² with h ~ 2e-6 at r_min swamps the O(h²) truncation error
        let (op, _) = level_one();
        let grid = RadialGrid::geometric(1e-3, 8.0, 4096).unwrap();
        let samples: Vec<f64> = grid.points().iter().map(|&r| (-0.5 * r * r - r).exp()).collect();
        let coarse = op.apply(&grid, &samples, 0.5).unwrap().max_interior_abs();
        let fine = grid.refined();
        let samples: Vec<f64> = fine.points().iter().map(|&r| (-0.5 * r * r - r).exp()).collect();
        let refined = op.apply(&fine, &samples, 0.5).unwrap().max_interior_abs();
        assert!(coarse / refined < 2.0, "{}", coarse / refined);
    }

    #[test]
    fn requires_coulomb_strength() {
        let params = ModelParams::new(1.0, 1.0, 0, None).unwrap();
        assert!(matches!(RadialOperator::new(&params), Err(QesError::MissingCoulomb(_))));
    }

    #[test]
    fn zero_samples_give_zero_residual() {
        let (op, _) = level_one();
        let grid = RadialGrid::geometric(1e-3, 7.0, 512).unwrap();
        let res = op.apply(&grid, &vec![0.0; grid.len()], 0.5).unwrap();
        assert!(res.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn refuses_coarse_or_malformed_input() {
        let (op, _) = level_one();
        let grid = RadialGrid::uniform(0.01, 8.0, 20).unwrap();
        assert!(matches!(op.apply(&grid, &[0.0; 20], 0.5), Err(QesError::GridTooCoarse(_))));
        let grid = RadialGrid::uniform(0.01, 30.0, 40).unwrap();
        assert!(matches!(op.apply(&grid, &vec![0.0; 40], 0.5), Err(QesError::GridTooCoarse(_))));
        let grid = RadialGrid::uniform(0.01, 8.0, 100).unwrap();
        assert!(matches!(op.apply(&grid, &vec![0.0; 99], 0.5), Err(QesError::InvalidGrid(_))));
        let mut bad = vec![0.0; 100];
        bad[7] = f64::NAN;
        assert_eq!(op.apply(&grid, &bad, 0.5), Err(QesError::NonFinite(7)));
    }
}
