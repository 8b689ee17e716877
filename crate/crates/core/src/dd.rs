//! Double-double real numbers: an unevaluated sum `hi + lo` with
//! `|lo| <= ulp(hi)/2`, giving about 106 bits of significand.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct Dd {
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

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };
    pub const FRAC_PI_2: Dd = Dd { hi: std::f64::consts::FRAC_PI_2, lo: 6.123233995736766e-17 };

    pub const fn from_f64(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    /// Exact sum of two doubles.
    pub fn from_sum(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from_f64(self.hi.sqrt());
        }
        let y = Dd::from_f64(self.hi.sqrt());
        y + (self - y * y) / (y * 2.0)
    }

    pub fn cbrt(self) -> Dd {
        if self.hi == 0.0 || !self.hi.is_finite() {
            return Dd::from_f64(self.hi.cbrt());
        }
        let y = Dd::from_f64(self.hi.cbrt());
        y + (self - y * y * y) / (y * y * 3.0)
    }

    pub fn powi(self, n: i32) -> Dd {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            Dd::ONE / acc
        } else {
            acc
        }
    }

    pub fn floor(self) -> Dd {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (h, l) = quick_two_sum(hi, self.lo.floor());
            Dd { hi: h, lo: l }
        } else {
            Dd::from_f64(hi)
        }
    }

    pub fn round(self) -> Dd {
        (self + Dd::from_f64(0.5)).floor()
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd::from_f64(v)
    }
}

impl From<Dd> for f64 {
    fn from(v: Dd) -> Self {
        v.hi + v.lo
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.hi + self.lo)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Dd::from_f64(q1);
        }
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        let q = self / b;
        let t = Dd::from_f64(q.hi.trunc());
        let t = if t.hi == q.hi { t + Dd::from_f64(q.lo.trunc()) } else { t };
        self - b * t
    }
}

macro_rules! assign_ops {
    ($($tr:ident $f:ident $op:tt),*) => {$(
        impl $tr for Dd {
            fn $f(&mut self, b: Dd) {
                *self = *self $op b;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl Zero for Dd {
    fn zero() -> Self {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd::ONE
    }
}

impl Num for Dd {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Dd::from_f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(a: Dd, b: Dd) -> f64 {
        f64::from((a - b).abs())
    }

    #[test]
    fn division_is_double_double_accurate() {
        let three = Dd::from(3.0);
        let third = Dd::ONE / three;
        assert!(err(third * three, Dd::ONE) < 1e-31);
        let x = Dd::from_sum(7.0, 3e-17);
        let y = Dd::from_sum(3.0, 1e-17);
        assert!(err((x / y) * y, x) < 1e-30);
    }

    #[test]
    fn roots() {
        let three = Dd::from(3.0);
        let s = three.sqrt();
        assert!(err(s * s, three) < 1e-30);
        let ten = Dd::from(10.0);
        let c = ten.cbrt();
        assert!(err(c * c * c, ten) < 1e-29);
        assert!(err(Dd::from(2.0).powi(-3), Dd::from(0.125)) == 0.0);
    }

    #[test]
    fn pi_constant() {
        // pi/2 * 2 == pi in both words
        assert!(err(Dd::FRAC_PI_2 * 2.0, Dd::PI) < 1e-32);
    }

    #[test]
    fn ordering_and_round() {
        assert!(Dd::from_sum(1.0, 1e-20) > Dd::ONE);
        assert_eq!(Dd::from(2.4).round(), Dd::from(2.0));
        assert_eq!(Dd::from(-2.6).round(), Dd::from(-3.0));
    }
}
