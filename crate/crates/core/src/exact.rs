//! Exact rational arithmetic: dense matrices and polynomials over `BigRational`.
//!
//! Every finite `f64` is a dyadic rational, so couplings given as floats are
//! lifted exactly with [`rational`]. Identities checked here hold with no
//! rounding at all.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Exact rational value of a finite float.
pub fn rational(x: f64) -> Rational {
    BigRational::from_float(x).expect("finite float")
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial in one variable, coefficients in ascending powers.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c0 + c1 x`.
    pub fn linear(c0: Rational, c1: Rational) -> Self {
        Self::from_coeffs(vec![c0, c1])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lead) => {
                let lead = lead.clone();
                Self::from_coeffs(self.coeffs.iter().map(|c| c / &lead).collect())
            }
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero)
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    /// Remainder of Euclidean division by a non-zero divisor.
    pub fn rem(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let q = r.last().unwrap() / &lead;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                r[shift + i] -= &q * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Self::from_coeffs(r)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    /// Number of distinct real roots in the open interval `(0, inf)` by Sturm's theorem.
    pub fn count_positive_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        while let Some(last) = seq.last() {
            if last.degree().unwrap_or(0) == 0 {
                break;
            }
            let r = seq[seq.len() - 2].rem(last);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&int(-1)));
        }
        // sign just above 0: lowest non-vanishing coefficient; at +inf: leading coefficient
        let at_zero_plus: Vec<i8> = seq
            .iter()
            .map(|p| {
                p.coeffs
                    .iter()
                    .find(|c| !c.is_zero())
                    .map_or(0, |c| if c.is_positive() { 1 } else { -1 })
            })
            .collect();
        let at_inf: Vec<i8> = seq
            .iter()
            .map(|p| p.leading().map_or(0, |c| if c.is_positive() { 1 } else { -1 }))
            .collect();
        sign_changes(&at_zero_plus).saturating_sub(sign_changes(&at_inf))
    }
}

fn sign_changes(signs: &[i8]) -> usize {
    let nz: Vec<i8> = signs.iter().copied().filter(|&s| s != 0).collect();
    nz.windows(2).filter(|w| w[0] != w[1]).count()
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "Poly[{}]", parts.join(", "))
    }
}

/// Dense square matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Rational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&int(-1)))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn trace(&self) -> Rational {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// Reverses the basis order (`P A P` with `P` the exchange matrix).
    pub fn reversed(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(n - 1 - i, n - 1 - j).clone());
            }
        }
        out
    }

    /// `det(x I - A)` by the Faddeev-LeVerrier recursion; monic of degree `n`.
    pub fn characteristic_polynomial(&self) -> Poly {
        let n = self.n;
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut m = Self::zeros(n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            m = self.mul(&m);
            for i in 0..n {
                let v = m.get(i, i) + &coeffs[n - k + 1];
                m.set(i, i, v);
            }
            coeffs[n - k] = -self.mul(&m).trace() / int(k as i64);
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| to_f64(self.get(i, j)))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_lift_is_exact() {
        assert_eq!(rational(0.5), frac(1, 2));
        assert_eq!(rational(3.0), int(3));
        assert_eq!(to_f64(&rational(0.1)), 0.1);
    }

    #[test]
    fn charpoly_of_two_by_two() {
        // [[1/2, -1/2], [-1, 3/2]] -> Z^2 - 2Z + 1/4
        let mut a = Matrix::zeros(2);
        a.set(0, 0, frac(1, 2));
        a.set(0, 1, frac(-1, 2));
        a.set(1, 0, int(-1));
        a.set(1, 1, frac(3, 2));
        let p = a.characteristic_polynomial();
        assert_eq!(p, Poly::from_coeffs(vec![frac(1, 4), int(-2), int(1)]));
    }

    #[test]
    fn charpoly_matches_cofactor_expansion_for_three_by_three() {
        let entries = [[2, -1, 0], [3, 1, 4], [0, -2, 5]];
        let mut a = Matrix::zeros(3);
        for (i, row) in entries.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                a.set(i, j, int(v));
            }
        }
        let p = a.characteristic_polynomial();
        // det(xI - A) evaluated at a few integers by direct cofactor expansion
        for x in -3..=3 {
            let b: Vec<Vec<i64>> = (0..3)
                .map(|i| {
                    (0..3)
                        .map(|j| if i == j { x - entries[i][j] } else { -entries[i][j] })
                        .collect()
                })
                .collect();
            let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
                - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
                + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
            assert_eq!(p.eval(&int(x)), int(det));
        }
    }

    #[test]
    fn sturm_counts_positive_roots() {
        // (x - 1)(x - 2)(x + 3) = x^3 - 7x + 6
        let p = Poly::from_coeffs(vec![int(6), int(-7), int(0), int(1)]);
        assert_eq!(p.count_positive_roots(), 2);
        // 1 + x has no positive root
        assert_eq!(Poly::linear(int(1), int(1)).count_positive_roots(), 0);
        assert_eq!(Poly::linear(int(1), int(-2)).count_positive_roots(), 1);
        // x^2 + 1
        assert_eq!(Poly::from_coeffs(vec![int(1), int(0), int(1)]).count_positive_roots(), 0);
    }
}
