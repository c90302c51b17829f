//! Finite-difference derivatives on non-uniform grids.
//!
//! Interior points use the three-point centered stencil (second order on
//! uniform and geometric grids); the two endpoints use four-point one-sided
//! stencils. Weights come from Fornberg's recursion, evaluated in
//! double-double together with the samples.

use crate::dd::DD;

/// First and second derivative at one grid point.
#[derive(Debug, Clone, Copy)]
pub struct Derivatives {
    pub first: DD,
    pub second: DD,
    pub one_sided: bool,
}

/// Fornberg weights for derivatives 0..=2 at `z` from the nodes `x`.
fn fornberg(z: DD, x: &[DD]) -> Vec<[DD; 3]> {
    let n = x.len();
    let mut c = vec![[DD::ZERO; 3]; n];
    let mut c1 = DD::ONE;
    let mut c4 = x[0] - z;
    c[0][0] = DD::ONE;
    for i in 1..n {
        let mn = i.min(2);
        let mut c2 = DD::ONE;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 = c2 * c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (c[i - 1][k - 1] * k as f64 - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -(c1 * c5 * c[i - 1][0]) / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - c[j][k - 1] * k as f64) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c
}

fn apply_stencil(points: &[f64], samples: &[DD], at: usize, nodes: std::ops::Range<usize>) -> (DD, DD) {
    let x: Vec<DD> = points[nodes.clone()].iter().map(|&p| DD::from(p)).collect();
    let w = fornberg(DD::from(points[at]), &x);
    nodes.zip(w).fold((DD::ZERO, DD::ZERO), |(d1, d2), (idx, wk)| {
        (d1 + wk[1] * samples[idx], d2 + wk[2] * samples[idx])
    })
}

/// Derivatives at every point. Requires at least four points.
pub fn derivatives(points: &[f64], samples: &[DD]) -> Vec<Derivatives> {
    let n = points.len();
    assert!(n >= 4 && samples.len() == n);
    (0..n)
        .map(|i| {
            let (nodes, one_sided) = if i == 0 {
                (0..4, true)
            } else if i == n - 1 {
                (n - 4..n, true)
            } else {
                (i - 1..i + 2, false)
            };
            let (first, second) = apply_stencil(points, samples, i, nodes);
            Derivatives { first, second, one_sided }
        })
        .collect()
}
