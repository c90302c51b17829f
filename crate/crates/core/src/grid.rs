use serde::{Deserialize, Serialize};

use crate::error::{QesError, Result};
use crate::model::{Couplings, QesState};

pub const DEFAULT_POINTS: usize = 4096;
pub const DEFAULT_R_MIN: f64 = 1e-3;
/// Envelope level, relative to its maximum, at which the outer edge is placed.
pub const ENVELOPE_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    Geometric,
}

/// Strictly increasing positive sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    points: Vec<f64>,
    spacing: Spacing,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n: usize, spacing: Spacing) -> Result<Self> {
        if !(r_min.is_finite() && r_min > 0.0) {
            return Err(QesError::NonPositiveRadius(r_min));
        }
        if !(r_max.is_finite() && r_max > r_min) {
            return Err(QesError::InvalidGrid(format!("r_max = {r_max} must exceed r_min = {r_min}")));
        }
        if n < 2 {
            return Err(QesError::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        let last = (n - 1) as f64;
        let points = match spacing {
            Spacing::Uniform => (0..n).map(|i| r_min + (r_max - r_min) * i as f64 / last).collect(),
            Spacing::Geometric => {
                let ratio = (r_max / r_min).ln();
                (0..n).map(|i| r_min * (ratio * i as f64 / last).exp()).collect()
            }
        };
        Self::from_points(points, spacing)
    }

    pub fn uniform(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        Self::new(r_min, r_max, n, Spacing::Uniform)
    }

    pub fn geometric(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        Self::new(r_min, r_max, n, Spacing::Geometric)
    }

    pub fn from_points(points: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if let Some(&p) = points.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(QesError::NonPositiveRadius(p));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(QesError::InvalidGrid("points must be strictly increasing".into()));
        }
        Ok(Self { points, spacing })
    }

    /// Geometric grid from `r_min` to where the envelope
    /// `r^|m| exp(-ωr²/2 - δr)` has fallen below 1e-12 of its maximum.
    pub fn for_couplings(couplings: &Couplings, r_min: f64, n: usize) -> Result<Self> {
        let r_max = outer_cutoff(|r| couplings.log_envelope(r), ENVELOPE_CUTOFF);
        Self::geometric(r_min, r_max.max(2.0 * r_min), n)
    }

    /// Like [`RadialGrid::for_couplings`] but the outer edge also accounts for
    /// the growth of the state's polynomial factor.
    pub fn for_state(state: &QesState, r_min: f64, n: usize) -> Result<Self> {
        let env = outer_cutoff(|r| state.couplings.log_envelope(r), ENVELOPE_CUTOFF);
        let full = outer_cutoff(|r| state.log_magnitude_bound(r), ENVELOPE_CUTOFF);
        Self::geometric(r_min, env.max(full).max(2.0 * r_min), n)
    }

    pub fn default_for_state(state: &QesState) -> Result<Self> {
        Self::for_state(state, DEFAULT_R_MIN, DEFAULT_POINTS)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn r_min(&self) -> f64 {
        self.points[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// Halves every spacing: midpoints are inserted (geometric means on a
    /// geometric grid), giving `2n - 1` points.
    pub fn refined(&self) -> Self {
        let mut points = Vec::with_capacity(2 * self.points.len() - 1);
        for w in self.points.windows(2) {
            points.push(w[0]);
            points.push(match self.spacing {
                Spacing::Uniform => 0.5 * (w[0] + w[1]),
                Spacing::Geometric => (w[0] * w[1]).sqrt(),
            });
        }
        points.push(self.r_max());
        Self { points, spacing: self.spacing }
    }

    /// Maps every point through `f` (which must be increasing and positive).
    pub fn mapped(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_points(self.points.iter().map(|&r| f(r)).collect(), self.spacing)
    }
}

/// Largest `r` at which `log_f` still reaches `ln(ratio)` relative to its
/// maximum over `(0, 1e4]`, refined by bisection.
pub(crate) fn outer_cutoff(log_f: impl Fn(f64) -> f64, ratio: f64) -> f64 {
    const STEP: f64 = 1.01;
    let mut samples = Vec::new();
    let mut r = 1e-8;
    while r < 1e4 {
        samples.push((r, log_f(r)));
        r *= STEP;
    }
    let log_max = samples
        .iter()
        .map(|s| s.1)
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let level = log_max + ratio.ln();
    let Some(idx) = samples.iter().rposition(|s| s.1 >= level) else {
        return 1.0;
    };
    let (mut lo, mut hi) = (samples[idx].0, samples[idx].0 * STEP);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if log_f(mid) >= level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
