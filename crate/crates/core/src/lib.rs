//! Quasi-exactly solvable states of the planar hydrogen atom with a linear
//! confining potential in a uniform magnetic field.
//!
//! Two independent routes produce the admissible Coulomb strengths `Z` and
//! the polynomial factors of the wavefunctions: the sl(2) matrix route
//! ([`sl2`]) and the power-series route ([`series`]). [`verify`] checks the
//! states against the radial equation and against each other, and [`ks`]
//! maps them onto a sextic oscillator.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod dd;
pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod fd;
pub mod grid;
pub mod ks;
pub mod model;
pub mod radial;
pub mod roots;
pub mod series;
pub mod sl2;
pub mod verify;

pub use diagnostics::{Diagnostic, Method};
pub use error::{QesError, Result};
pub use grid::{RadialGrid, Spacing};
pub use model::{Couplings, ModelParams, QesState, Spin};
