//! Algebraization of the radial problem.
//!
//! After stripping the envelope and multiplying by `r`, the radial equation
//! becomes an operator on polynomials,
//!
//! ```text
//! C1 T0 T- + C2 T+ + C3 T0 + C4 T- + C0,
//! T+ = 2j r - r² d/dr,   T0 = -j + r d/dr,   T- = d/dr,
//! ```
//!
//! which preserves `span{1, r, ..., r^{2j}}` when the energy equals `X_j`.
//! The Coulomb strength `Z` is then an eigenvalue of the resulting
//! `(2j+1)`-dimensional matrix.
//!
//! Generator matrices are indexed in the standard order `μ = j, j-1, ..., -j`
//! (index `i` carries `r^{2j-i}`); [`QesMatrix`] uses ascending monomials
//! `r^0 ... r^{2j}`, which is the reversed order.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use crate::diagnostics::{Diagnostic, Method};
use crate::error::{QesError, Result};
use crate::exact::{self, Matrix, Poly, Rational};
use crate::model::{Couplings, QesState, Spin};

/// Unitary ladder realization: `T± |j μ> = sqrt((j ∓ μ)(j ± μ + 1)) |j, μ±1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sl2Rep {
    pub j: Spin,
    pub t_plus: DMatrix<f64>,
    pub t_minus: DMatrix<f64>,
    pub t_zero: DMatrix<f64>,
}

pub fn build_generators(j: f64) -> Result<Sl2Rep> {
    let spin = Spin::new(j)?;
    Ok(Sl2Rep::ladder(spin))
}

impl Sl2Rep {
    pub fn ladder(j: Spin) -> Self {
        let n = j.dim();
        let jv = j.value();
        let mu = |i: usize| jv - i as f64;
        let mut t_plus = DMatrix::zeros(n, n);
        let mut t_minus = DMatrix::zeros(n, n);
        for i in 1..n {
            // <μ+1| T+ |μ> with μ = mu(i)
            let m = mu(i);
            let amp = ((jv - m) * (jv + m + 1.0)).sqrt();
            t_plus[(i - 1, i)] = amp;
            t_minus[(i, i - 1)] = amp;
        }
        let t_zero = DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| mu(i)));
        Self { j, t_plus, t_minus, t_zero }
    }

    /// Largest entry of the three commutator defects
    /// `[T+,T-] - 2T0`, `[T0,T+] - T+`, `[T0,T-] + T-`.
    pub fn commutator_defect(&self) -> f64 {
        let comm = |a: &DMatrix<f64>, b: &DMatrix<f64>| a * b - b * a;
        let d1 = comm(&self.t_plus, &self.t_minus) - &self.t_zero * 2.0;
        let d2 = comm(&self.t_zero, &self.t_plus) - &self.t_plus;
        let d3 = comm(&self.t_zero, &self.t_minus) + &self.t_minus;
        [d1, d2, d3].iter().map(|d| d.amax()).fold(0.0, f64::max)
    }
}

/// The differential-operator realization on monomials, exact.
///
/// `T+ r^n = (2j - n) r^{n+1}`, `T0 r^n = (n - j) r^n`, `T- r^n = n r^{n-1}`.
/// It is diagonally similar to [`Sl2Rep::ladder`]: the products
/// `T+[i-1][i] · T-[i][i-1]` agree entry by entry.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialRep {
    pub j: Spin,
    pub t_plus: Matrix,
    pub t_minus: Matrix,
    pub t_zero: Matrix,
}

impl DifferentialRep {
    pub fn new(j: Spin) -> Self {
        let n = j.dim();
        let two_j = j.twice() as i64;
        // index i <-> power p = 2j - i
        let power = |i: usize| two_j - i as i64;
        let mut t_plus = Matrix::zeros(n);
        let mut t_minus = Matrix::zeros(n);
        let mut t_zero = Matrix::zeros(n);
        for i in 0..n {
            let p = power(i);
            t_zero.set(i, i, exact::frac(2 * p - two_j, 2));
            if i > 0 {
                // r^p -> (2j - p) r^{p+1}, and r^{p+1} sits at index i - 1
                t_plus.set(i - 1, i, exact::int(two_j - p));
            }
            if i + 1 < n {
                t_minus.set(i + 1, i, exact::int(p));
            }
        }
        Self { j, t_plus, t_minus, t_zero }
    }

    pub fn commutators_hold(&self) -> bool {
        let two = exact::int(2);
        let minus_one = exact::int(-1);
        self.t_plus.commutator(&self.t_minus) == self.t_zero.scale(&two)
            && self.t_zero.commutator(&self.t_plus) == self.t_plus
            && self.t_zero.commutator(&self.t_minus) == self.t_minus.scale(&minus_one)
    }
}

/// Coefficients of the generator combination, exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Sl2Coefficients {
    pub j: Spin,
    pub c1: Rational,
    pub c2: Rational,
    pub c3: Rational,
    pub c4: Rational,
    /// The `Z`-free part of `C0`; the remaining `-Z` becomes the eigenvalue.
    pub c0_linear_part: Rational,
    pub x_energy: Rational,
}

impl Sl2Coefficients {
    pub fn new(j: Spin, couplings: &Couplings) -> Self {
        let w = couplings.omega_exact();
        let delta = couplings.delta_exact();
        let s = exact::int(couplings.abs_m() as i64);
        let m = exact::int(couplings.m as i64);
        let jj = j.exact();
        let half = exact::frac(1, 2);
        let two = exact::int(2);
        Self {
            j,
            c1: -half.clone(),
            c2: -w.clone(),
            c3: delta.clone(),
            // the T- coefficient carries 2|m|, not |m|
            c4: -(exact::int(1) + &jj + &two * &s) / &two,
            c0_linear_part: &delta * (&s + &half + &jj),
            x_energy: &w * (&two * &jj + exact::int(1) + &m + &s) - &delta * &delta / &two,
        }
    }

    /// Checks the six matching conditions between the generator
    /// combination and the gauge-transformed operator
    ///
    /// ```text
    /// C1 = -1/2, -C2 = ω, C3 = k/ω, C4 - j C1 = -|m| - 1/2,
    /// 2 C2 j = ω(1 + m + |m|) - δ²/2 - X, C0' - j C3 = δ(|m| + 1/2)
    /// ```
    pub fn satisfies_defining_system(&self, couplings: &Couplings) -> bool {
        let w = couplings.omega_exact();
        let delta = couplings.delta_exact();
        let s = exact::int(couplings.abs_m() as i64);
        let m = exact::int(couplings.m as i64);
        let jj = self.j.exact();
        let half = exact::frac(1, 2);
        self.c1 == -half.clone()
            && -self.c2.clone() == w
            && self.c3 == delta
            && &self.c4 - &jj * &self.c1 == -(&s + &half)
            && exact::int(2) * &self.c2 * &jj
                == &w * (exact::int(1) + &m + &s) - &delta * &delta / exact::int(2) - &self.x_energy
            && &self.c0_linear_part - &jj * &self.c3 == &delta * (&s + &half)
    }
}

/// `X_j = ω(2j + 1 + m + |m|) - (k/ω)²/2`.
pub fn energy_x(j: Spin, couplings: &Couplings) -> f64 {
    exact::to_f64(&energy_x_exact(j, couplings))
}

pub fn energy_x_exact(j: Spin, couplings: &Couplings) -> Rational {
    Sl2Coefficients::new(j, couplings).x_energy
}

/// The `Z`-eigenproblem in the ascending monomial basis, exact.
#[derive(Debug, Clone, PartialEq)]
pub struct QesMatrix {
    pub j: Spin,
    pub couplings: Couplings,
    pub entries: Matrix,
}

/// Assembles `C1 T0 T- + C2 T+ + C3 T0 + C4 T- + C0'` from the generator
/// matrices and reorders it to ascending powers.
pub fn build_qes_matrix(j: Spin, couplings: &Couplings) -> QesMatrix {
    let rep = DifferentialRep::new(j);
    let c = Sl2Coefficients::new(j, couplings);
    let n = j.dim();
    let combo = rep
        .t_zero
        .mul(&rep.t_minus)
        .scale(&c.c1)
        .add(&rep.t_plus.scale(&c.c2))
        .add(&rep.t_zero.scale(&c.c3))
        .add(&rep.t_minus.scale(&c.c4))
        .add(&Matrix::identity(n).scale(&c.c0_linear_part));
    QesMatrix { j, couplings: *couplings, entries: combo.reversed() }
}

impl QesMatrix {
    /// Closed tridiagonal form:
    /// `M[n][n] = δ(n + |m| + 1/2)`, `M[n-1][n] = -n(|m| + n/2)`,
    /// `M[n+1][n] = -ω(2j - n)`.
    pub fn closed_form(j: Spin, couplings: &Couplings) -> Self {
        let n = j.dim();
        let w = couplings.omega_exact();
        let delta = couplings.delta_exact();
        let s = exact::int(couplings.abs_m() as i64);
        let two_j = exact::int(j.twice() as i64);
        let mut entries = Matrix::zeros(n);
        for col in 0..n {
            let nn = exact::int(col as i64);
            entries.set(col, col, &delta * (&nn + &s + exact::frac(1, 2)));
            if col > 0 {
                entries.set(col - 1, col, -(&nn * (&s + &nn / exact::int(2))));
            }
            if col + 1 < n {
                entries.set(col + 1, col, -(&w * (&two_j - &nn)));
            }
        }
        Self { j, couplings: *couplings, entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn is_tridiagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|k| i.abs_diff(k) <= 1 || self.entries.get(i, k).is_zero()))
    }

    /// `det(Z I - M)`, monic, exact.
    pub fn characteristic_polynomial(&self) -> Poly {
        self.entries.characteristic_polynomial()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        self.entries.to_f64()
    }
}

/// States found by diagonalizing [`QesMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct Sl2Solution {
    pub states: Vec<QesState>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Diagonalizes the `Z`-matrix for `(j, m, ω, k)`.
///
/// Eigenvalues come from a general dense real eigen-solver after a diagonal
/// balancing similarity; when every product `M[n-1][n] M[n][n-1]` is positive
/// (always the case here for `ω > 0`) the balanced matrix is symmetric.
/// Eigenvalues whose imaginary part exceeds `tol` times the spectral radius are
/// reported as diagnostics and skipped. Eigenvectors come from inverse
/// iteration and are scaled to `a_0 = 1`.
pub fn solve_admissible_z(j: Spin, couplings: &Couplings, tol: f64) -> Result<Sl2Solution> {
    if !(tol > 0.0) {
        return Err(QesError::InvalidParameter(format!("tol must be > 0, got {tol}")));
    }
    let qm = build_qes_matrix(j, couplings);
    let m = qm.to_f64();
    let n = m.nrows();
    let (balanced, log_scale) = balance(&m);
    let symmetric = log_scale.is_some();

    let eig = balanced.clone().complex_eigenvalues();
    let radius = eig.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let energy = energy_x(j, couplings);
    let mut diagnostics = Vec::new();
    let mut states = Vec::new();
    for ev in eig.iter() {
        if ev.im.abs() > tol * radius {
            diagnostics.push(Diagnostic::ComplexRoot {
                method: Method::Sl2,
                level: j.level(),
                re: ev.re,
                im: ev.im,
            });
            continue;
        }
        let (z, w) = eigenvector(&balanced, ev.re, symmetric)?;
        let poly: Vec<f64> = match &log_scale {
            Some(ls) => (0..n).map(|i| w[i] * (-ls[i]).exp()).collect(),
            None => w.iter().copied().collect(),
        };
        states.push(QesState::new(*couplings, z, energy, poly)?);
    }
    states.sort_by(|a, b| a.z.total_cmp(&b.z));
    if states.is_empty() {
        diagnostics.push(Diagnostic::NoRealRoots { method: Method::Sl2, level: j.level() });
    }
    Ok(Sl2Solution { states, diagnostics })
}

/// Returns `D M D^{-1}` and `ln D` when a symmetrizing diagonal `D` exists.
fn balance(m: &DMatrix<f64>) -> (DMatrix<f64>, Option<Vec<f64>>) {
    let n = m.nrows();
    let products_positive = (1..n).all(|i| m[(i - 1, i)] * m[(i, i - 1)] > 0.0);
    if !products_positive {
        return (m.clone(), None);
    }
    let mut log_d = vec![0.0; n];
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        s[(i, i)] = m[(i, i)];
    }
    for i in 1..n {
        let (b, c) = (m[(i - 1, i)], m[(i, i - 1)]);
        log_d[i] = log_d[i - 1] + 0.5 * (b / c).ln();
        let off = b.signum() * (b * c).sqrt();
        s[(i - 1, i)] = off;
        s[(i, i - 1)] = off;
    }
    (s, Some(log_d))
}

/// Inverse iteration at `lambda`; for symmetric input the eigenvalue is
/// refined by the Rayleigh quotient.
fn eigenvector(a: &DMatrix<f64>, lambda: f64, symmetric: bool) -> Result<(f64, DVector<f64>)> {
    let n = a.nrows();
    if n == 1 {
        return Ok((a[(0, 0)], DVector::from_element(1, 1.0)));
    }
    let norm = a.amax().max(f64::MIN_POSITIVE);
    let shift = lambda + 64.0 * f64::EPSILON * norm;
    let lu = (a - DMatrix::identity(n, n) * shift).lu();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    for _ in 0..3 {
        let next = lu
            .solve(&v)
            .ok_or_else(|| QesError::Solver(format!("singular shifted matrix at Z = {lambda}")))?;
        let len = next.norm();
        if !(len.is_finite() && len > 0.0) {
            return Err(QesError::Solver(format!("inverse iteration diverged at Z = {lambda}")));
        }
        v = next / len;
    }
    let z = if symmetric { v.dot(&(a * &v)) } else { lambda };
    Ok((z, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn couplings(w: f64, k: f64, m: i32) -> Couplings {
        Couplings::new(w, k, m).unwrap()
    }

    #[test]
    fn spin_zero_without_linear_term() {
        let sol = solve_admissible_z(Spin::from_twice(0), &couplings(2.0, 0.0, 1), 1e-8).unwrap();
        assert_eq!(sol.states.len(), 1);
        assert_eq!(sol.states[0].z, 0.0);
    }

    #[test]
    fn generators_for_small_spins() {
        let g = build_generators(0.0).unwrap();
        assert_eq!(g.t_plus, DMatrix::zeros(1, 1));
        assert_eq!(g.t_zero, DMatrix::zeros(1, 1));
        assert_eq!(g.t_minus, DMatrix::zeros(1, 1));

        let g = build_generators(0.5).unwrap();
        assert_eq!(g.t_plus, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(g.t_zero, DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -0.5]));
        assert_eq!(g.t_minus, DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]));

        let g = build_generators(1.0).unwrap();
        let r2 = 2f64.sqrt();
        assert_eq!(g.t_plus, DMatrix::from_row_slice(3, 3, &[0.0, r2, 0.0, 0.0, 0.0, r2, 0.0, 0.0, 0.0]));
        assert_eq!(g.t_minus, g.t_plus.transpose());

        assert!(build_generators(-0.5).is_err());
        assert!(build_generators(0.3).is_err());
    }

    #[test]
    fn commutators_hold() {
        for twice in 0..=25 {
            let spin = Spin::from_twice(twice);
            assert!(DifferentialRep::new(spin).commutators_hold(), "2j = {twice}");
            assert!(Sl2Rep::ladder(spin).commutator_defect() < 1e-12, "2j = {twice}");
        }
    }

    #[test]
    fn ladder_and_differential_are_diagonally_similar() {
        for twice in 0..=12 {
            let spin = Spin::from_twice(twice);
            let lad = Sl2Rep::ladder(spin);
            let dif = DifferentialRep::new(spin);
            for i in 1..spin.dim() {
                let exact_product = exact::to_f64(&(dif.t_plus.get(i - 1, i) * dif.t_minus.get(i, i - 1)));
                let ladder_product = lad.t_plus[(i - 1, i)] * lad.t_minus[(i, i - 1)];
                assert_relative_eq!(exact_product, ladder_product, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn coefficients_solve_the_matching_system() {
        for &(w, k, m) in &[(1.0, 1.0, 0), (2.0, 0.5, -3), (0.5, 4.0, 2)] {
            for twice in 0..6 {
                let c = couplings(w, k, m);
                let co = Sl2Coefficients::new(Spin::from_twice(twice), &c);
                assert!(co.satisfies_defining_system(&c));
                assert_eq!(co.c4, -(exact::int(1) + Spin::from_twice(twice).exact() + exact::int(2 * m.abs() as i64)) / exact::int(2));
            }
        }
    }

    #[test]
    fn qes_matrix_examples() {
        let half = Spin::from_twice(1);
        let m = build_qes_matrix(half, &couplings(1.0, 1.0, 0));
        let expect = |rows: &[&[Rational]]| {
            let mut e = Matrix::zeros(rows.len());
            for (i, r) in rows.iter().enumerate() {
                for (j, v) in r.iter().enumerate() {
                    e.set(i, j, v.clone());
                }
            }
            e
        };
        assert_eq!(
            m.entries,
            expect(&[&[exact::frac(1, 2), exact::frac(-1, 2)], &[exact::int(-1), exact::frac(3, 2)]])
        );

        let c = couplings(3.0, 2.0, -2);
        let m0 = build_qes_matrix(Spin::from_twice(0), &c);
        assert_eq!(*m0.entries.get(0, 0), exact::frac(2, 3) * exact::frac(5, 2));

        let m1 = build_qes_matrix(Spin::from_twice(2), &couplings(1.0, 2.0, 0));
        let (z, i) = (exact::int(0), exact::int);
        assert_eq!(
            m1.entries,
            expect(&[
                &[i(1), exact::frac(-1, 2), z.clone()],
                &[i(-2), i(3), i(-2)],
                &[z.clone(), i(-1), i(5)],
            ])
        );
    }

    #[test]
    fn generator_combination_equals_closed_form() {
        for &(w, k, m) in &[(1.0, 1.0, 0), (2.0, 1.0, 3), (1.0, 3.0, -2), (0.5, 0.25, 1)] {
            for twice in 0..10 {
                let spin = Spin::from_twice(twice);
                let c = couplings(w, k, m);
                let built = build_qes_matrix(spin, &c);
                assert!(built.is_tridiagonal());
                assert_eq!(built, QesMatrix::closed_form(spin, &c));
            }
        }
    }

    #[test]
    fn descending_order_reproduces_reversed_matrix() {
        // [[δ(|m|+3/2), -ω], [-(|m|+1/2), δ(|m|+1/2)]] acting on (a1, a0)
        let c = couplings(2.0, 3.0, 1);
        let m = build_qes_matrix(Spin::from_twice(1), &c).entries.reversed();
        let d = exact::frac(3, 2);
        assert_eq!(*m.get(0, 0), &d * exact::frac(5, 2));
        assert_eq!(*m.get(0, 1), exact::int(-2));
        assert_eq!(*m.get(1, 0), exact::frac(-3, 2));
        assert_eq!(*m.get(1, 1), &d * exact::frac(3, 2));
    }

    #[test]
    fn energies() {
        let c = couplings(1.0, 1.0, 0);
        assert_eq!(energy_x(Spin::from_twice(0), &c), 0.5);
        assert_eq!(energy_x(Spin::from_twice(1), &c), 1.5);
        for twice in 0..8 {
            let c = couplings(1.7, 0.0, -5);
            let spin = Spin::from_twice(twice);
            assert_relative_eq!(energy_x(spin, &c), 1.7 * (twice as f64 + 1.0), max_relative = 1e-15);
        }
    }

    #[test]
    fn solve_small_spins() {
        let c = couplings(1.0, 1.0, 0);
        let sol = solve_admissible_z(Spin::from_twice(0), &c, 1e-10).unwrap();
        assert_eq!(sol.states.len(), 1);
        assert_eq!(sol.states[0].z, 0.5);
        assert_eq!(sol.states[0].energy, 0.5);
        assert_eq!(sol.states[0].poly, vec![1.0]);

        let sol = solve_admissible_z(Spin::from_twice(1), &c, 1e-10).unwrap();
        let zs: Vec<f64> = sol.states.iter().map(|s| s.z).collect();
        assert_relative_eq!(zs[0], 1.0 - 3f64.sqrt() / 2.0, max_relative = 1e-13);
        assert_relative_eq!(zs[1], 1.0 + 3f64.sqrt() / 2.0, max_relative = 1e-13);
        assert!(sol.states.iter().all(|s| s.energy == 1.5));

        let sol = solve_admissible_z(Spin::from_twice(1), &couplings(1.0, 0.0, 0), 1e-10).unwrap();
        assert_relative_eq!(sol.states[0].z, -(0.5f64).sqrt(), max_relative = 1e-13);
        assert_relative_eq!(sol.states[1].z, (0.5f64).sqrt(), max_relative = 1e-13);
        assert!(solve_admissible_z(Spin::from_twice(1), &c, 0.0).is_err());
    }

    #[test]
    fn eigenvectors_satisfy_the_matrix_equation() {
        // reference roots from an independent derivation of the operator on monomials
        let cases: &[(f64, f64, i32, u32, &[f64])] = &[
            (1.0, 2.0, 0, 2, &[0.51071142818992123721, 2.7108314535516900309, 5.7784571182583887319]),
            (
                1.0,
                2.0,
                1,
                6,
                &[
                    -1.6019756274566814566,
                    1.3437316895781813323,
                    4.5418540769692799875,
                    8.1709905330344956392,
                    12.24218721571667518,
                    16.7230923533285162,
                    21.580119758829533118,
                ],
            ),
            (
                2.0,
                1.0,
                -2,
                4,
                &[-7.9268099580770510422, -2.8400586343140670862, 2.1326775163991072314, 7.2334602653952266883, 12.650730810596784209],
            ),
        ];
        for &(w, k, m, twice, roots) in cases {
            let c = couplings(w, k, m);
            let spin = Spin::from_twice(twice);
            let mat = build_qes_matrix(spin, &c).to_f64();
            let sol = solve_admissible_z(spin, &c, 1e-10).unwrap();
            assert_eq!(sol.states.len(), roots.len());
            for (st, &expected) in sol.states.iter().zip(roots) {
                assert_relative_eq!(st.z, expected, max_relative = 1e-11);
                let v = DVector::from_column_slice(&st.poly);
                let resid = (&mat * &v - &v * st.z).amax() / (mat.amax() * v.amax());
                assert!(resid < 1e-12, "{resid}");
                assert_eq!(st.poly[0], 1.0);
            }
        }
    }
}
