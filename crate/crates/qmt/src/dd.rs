//! Double-double arithmetic and the scalar abstraction used by the
//! degeneracy-safe evaluator.
//!
//! A [`Dd`] value represents a real number as an unevaluated sum `hi + lo`
//! of two `f64`s, giving roughly 32 significant decimal digits. The grouped
//! evaluation of the dangerous term cancels large intermediate contributions
//! against each other when distinct group values lie close together; the
//! evaluator reruns such cases in `Dd` to keep the final `f64` result
//! accurate. The arithmetic follows the classic error-free transformations
//! of Dekker and Knuth.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar interface shared by `f64` and [`Dd`].
///
/// Only the operations needed by the coefficient and grouped-term kernels
/// are included.
pub trait Real:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const ZERO: Self;
    const ONE: Self;

    fn from_f64(v: f64) -> Self;
    fn from_usize(v: usize) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn ln(self) -> Self;
    /// Natural log of 2 at full working precision.
    fn ln_2() -> Self;
    /// Nonnegative integer power by repeated squaring.
    fn powu(self, n: usize) -> Self {
        let mut base = self;
        let mut exp = n;
        let mut acc = Self::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }
}

impl Real for f64 {
    const ZERO: f64 = 0.0;
    const ONE: f64 = 1.0;

    fn from_f64(v: f64) -> f64 {
        v
    }
    fn from_usize(v: usize) -> f64 {
        v as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn ln(self) -> f64 {
        f64::ln(self)
    }
    fn ln_2() -> f64 {
        std::f64::consts::LN_2
    }
}

/// Unevaluated sum of two floats with |lo| <= ulp(hi)/2.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, f64::mul_add(a, b, -p))
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    /// Exact square of an `f64`.
    pub fn sq_exact(v: f64) -> Self {
        let (p, e) = two_prod(v, v);
        Dd { hi: p, lo: e }
    }

    /// Scale by a power of two (exact).
    fn ldexp(self, e: i32) -> Self {
        let f = f64::powi(2.0, e);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from(q2);
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from(q3)
    }
}

const LN_2_DD: Dd = Dd::new(0.693_147_180_559_945_3, 2.319_046_813_846_299_6e-17);

impl Real for Dd {
    const ZERO: Dd = Dd::new(0.0, 0.0);
    const ONE: Dd = Dd::new(1.0, 0.0);

    fn from_f64(v: f64) -> Dd {
        Dd::from(v)
    }

    fn from_usize(v: usize) -> Dd {
        // usize may exceed 2^53; split into two exactly representable halves
        let hi = (v >> 32) as f64 * 4294967296.0;
        let lo = (v & 0xffff_ffff) as f64;
        Dd::from(hi) + Dd::from(lo)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Natural logarithm for positive arguments.
    ///
    /// Reduces to m in [sqrt(1/2), sqrt(2)) and sums the atanh series of
    /// (m-1)/(m+1), whose ratio is below 0.03, so ~24 terms reach 1e-33.
    fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0, "Dd::ln of non-positive value");
        let e = (self.hi.log2() + 0.5).floor() as i32;
        let m = self.ldexp(-e);
        let z = (m - Dd::ONE) / (m + Dd::ONE);
        let zz = z * z;
        let mut term = z;
        let mut sum = z;
        for i in 1..26 {
            term = term * zz;
            sum = sum + term / Dd::from((2 * i + 1) as f64);
        }
        let ln_m = Dd::from(2.0) * sum;
        LN_2_DD * Dd::from(e as f64) + ln_m
    }

    fn ln_2() -> Dd {
        LN_2_DD
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(got: Dd, want: f64) -> f64 {
        ((got.to_f64() - want) / want).abs()
    }

    #[test]
    fn sq_exact_captures_rounding() {
        let v = 0.1_f64;
        let sq = Dd::sq_exact(v);
        // 0.1^2 is not representable; lo carries the residual
        assert_eq!(sq.hi, v * v);
        assert!(sq.lo != 0.0);
    }

    #[test]
    fn mul_div_roundtrip() {
        let a = Dd::from(3.0) / Dd::from(7.0);
        let b = a * Dd::from(7.0);
        assert!((b.to_f64() - 3.0).abs() < 1e-30);
        assert!((b - Dd::from(3.0)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn ln_matches_f64_and_refines() {
        for &x in &[0.04_f64, 0.5, 0.9999, 1.0, 1.5, 2.0, 117.25] {
            let got = Dd::from(x).ln();
            if x == 1.0 {
                assert_eq!(got.to_f64(), 0.0);
            } else {
                assert!(rel_err(got, x.ln()) < 1e-15, "ln({x})");
            }
        }
        // spot check digits beyond f64: ln(2) residual
        let l2 = Dd::from(2.0).ln();
        assert!((l2 - LN_2_DD).abs().to_f64() < 1e-30);
    }

    #[test]
    fn powu_small_cases() {
        assert_eq!(Dd::from(2.0).powu(0).to_f64(), 1.0);
        assert_eq!(Dd::from(2.0).powu(10).to_f64(), 1024.0);
        let x = Dd::from(0.7).powu(5);
        assert!((x.to_f64() - 0.7_f64.powi(5)).abs() < 1e-16);
    }

    #[test]
    fn sub_cancellation_keeps_residual() {
        // (1 + 2^-60) - 1 survives in double-double
        let tiny = 2.0_f64.powi(-60);
        let x = Dd::from(1.0) + Dd::from(tiny);
        let y = x - Dd::from(1.0);
        assert_eq!(y.to_f64(), tiny);
    }
}
