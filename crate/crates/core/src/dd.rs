//! Double-double arithmetic (about 32 significant digits).
//!
//! Finite-difference residuals divide sample differences by `h^2`; on a
//! geometric grid starting at `r = 1e-3` that amplifies the rounding of
//! `f64` samples to ~1e-4, well above the discretization error. Sampling
//! and differencing in double-double removes that floor.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct DD {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const LN2: DD = DD { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };

    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = DD::ONE;
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Scales by `2^k` exactly.
    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DD::ZERO;
        }
        let y = DD::from(self.hi.sqrt());
        // one Newton step doubles the number of correct digits
        y + (self - y * y) / (y * 2.0)
    }

    pub fn exp(self) -> Self {
        if self.hi < -745.0 {
            return DD::ZERO;
        }
        if self.hi > 709.0 {
            return DD::from(f64::INFINITY);
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * k).ldexp(-10);
        // expm1 by Taylor series on |r| < 4e-4, then (1 + s)² - 1 = s(s + 2)
        // repeated, which avoids the cancellation of squaring 1 + s directly
        let mut term = DD::ONE;
        let mut s = DD::ZERO;
        for n in 1..=12 {
            term = term * r / (n as f64);
            s = s + term;
        }
        for _ in 0..10 {
            s = s * (s + 2.0);
        }
        let sum = s + 1.0;
        sum.ldexp(k as i32)
    }
}

impl From<f64> for DD {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, b: DD) -> DD {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DD { hi, lo }
    }
}

impl Add<f64> for DD {
    type Output = DD;
    fn add(self, b: f64) -> DD {
        self + DD::from(b)
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, b: DD) -> DD {
        self + (-b)
    }
}

impl Sub<f64> for DD {
    type Output = DD;
    fn sub(self, b: f64) -> DD {
        self + DD::from(-b)
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, b: DD) -> DD {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DD { hi, lo }
    }
}

impl Mul<f64> for DD {
    type Output = DD;
    fn mul(self, b: f64) -> DD {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DD { hi, lo }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, b: DD) -> DD {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + q3
    }
}

impl Div<f64> for DD {
    type Output = DD;
    fn div(self, b: f64) -> DD {
        self / DD::from(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: DD, b: DD) -> f64 {
        ((a - b) / b).to_f64().abs()
    }

    #[test]
    fn exp_matches_high_precision_reference() {
        // references from a 50-digit evaluation, split as hi + lo
        let cases = [
            (1.0, DD::new(std::f64::consts::E, 1.4456468917292502e-16)),
            (-7.25, DD::new(0.000710174388842549, 3.546078199295509e-20)),
            (1e-3, DD::new(1.0010005001667084, -4.290842058948394e-17)),
            (-30.3, DD::new(6.932297597586547e-14, 2.8428283439866896e-30)),
        ];
        for (x, reference) in cases {
            let got = DD::from(x).exp();
            assert!(rel(got, reference) < 1e-30, "exp({x}) = {got:?}");
        }
    }

    #[test]
    fn exp_is_multiplicative_to_double_double_precision() {
        for &(a, b) in &[(0.3, -1.7), (-12.5, 3.25), (5.0, 5.0), (-0.001, -30.0)] {
            let lhs = DD::from(a).exp() * DD::from(b).exp();
            let rhs = (DD::from(a) + DD::from(b)).exp();
            assert!(rel(lhs, rhs) < 1e-29, "{a} {b}");
        }
    }

    #[test]
    fn division_and_sqrt_round_trip() {
        let x = DD::from(1.0) / DD::from(3.0);
        assert!(rel(x * 3.0, DD::ONE) < 1e-31);
        let y = DD::from(2.0).sqrt();
        assert!(rel(y * y, DD::from(2.0)) < 1e-31);
    }

    #[test]
    fn cancellation_is_resolved() {
        // (1 + 1e-20) - 1 is representable in double-double
        let a = DD::ONE + DD::from(1e-20);
        assert!(((a - DD::ONE).to_f64() - 1e-20).abs() < 1e-35);
    }
}
