//! Scalar backends shared by the series engine and the integrators.
//!
//! [`Field`] is what the coefficient recurrences need: exact field arithmetic
//! or a floating stand-in. [`Real`] is the real type underneath the complex
//! floating backends: `f64` or the double-double [`Dd`] (~106 bits).

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive, Zero};

pub use crate::dd::Dd;
use crate::exact::ExactScalar;

pub type C64 = Complex<f64>;
pub type CDD = Complex<Dd>;

/// Arithmetic required by the coefficient recurrences.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(n: i64, d: i64) -> Self;
    fn from_exact(e: &ExactScalar) -> Self;
    /// `None` for the exact field, which cannot hold arbitrary floats.
    fn from_c64(z: C64) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn to_c64(&self) -> C64;
    fn is_finite(&self) -> bool;
}

impl Field for ExactScalar {
    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn one() -> Self {
        ExactScalar::one()
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        ExactScalar::from_ratio(n, d)
    }
    fn from_exact(e: &ExactScalar) -> Self {
        e.clone()
    }
    fn from_c64(_z: C64) -> Option<Self> {
        None
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
    fn to_c64(&self) -> C64 {
        self.to_complex64()
    }
    fn is_finite(&self) -> bool {
        true
    }
}

impl<R: Real> Field for Complex<R> {
    fn zero() -> Self {
        Complex::new(R::zero(), R::zero())
    }
    fn one() -> Self {
        Complex::new(R::one(), R::zero())
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        Complex::new(R::of(n as f64) / R::of(d as f64), R::zero())
    }
    fn from_exact(e: &ExactScalar) -> Self {
        let [a, b, c, d] = e.basis();
        let s3 = R::sqrt3();
        Complex::new(
            R::from_rational(&a) + s3 * R::from_rational(&c),
            R::from_rational(&b) + s3 * R::from_rational(&d),
        )
    }
    fn from_c64(z: C64) -> Option<Self> {
        Some(Complex::new(R::of(z.re), R::of(z.im)))
    }
    fn is_zero(&self) -> bool {
        self.re == R::zero() && self.im == R::zero()
    }
    fn to_c64(&self) -> C64 {
        Complex::new(self.re.f64(), self.im.f64())
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Real scalar underneath the floating complex backends.
pub trait Real:
    Copy
    + PartialOrd
    + Debug
    + Send
    + Sync
    + Default
    + 'static
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Unit roundoff, used to place precision floors.
    const EPS: f64;
    const NAME: &'static str;

    fn of(v: f64) -> Self;
    fn f64(self) -> f64;
    fn pi() -> Self;
    fn sqrt3() -> Self {
        Self::of(3.0).sqrt()
    }
    /// `(cos theta, sin theta)` to full working precision.
    fn cos_sin(theta: Self) -> (Self, Self);
    fn from_rational(r: &BigRational) -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn cbrt(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn is_finite(self) -> bool;
    fn max(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }
}

/// Modulus of a complex number in working precision.
pub fn cabs<R: Real>(z: Complex<R>) -> R {
    let (a, b) = (z.re.abs(), z.im.abs());
    let m = a.max(b);
    if m == R::zero() || !m.is_finite() {
        return m;
    }
    let (a, b) = (a / m, b / m);
    m * (a * a + b * b).sqrt()
}

/// Complex conversion between backends.
pub fn to_c64<R: Real>(z: Complex<R>) -> C64 {
    C64::new(z.re.f64(), z.im.f64())
}

pub fn from_c64<R: Real>(z: C64) -> Complex<R> {
    Complex::new(R::of(z.re), R::of(z.im))
}

pub fn cis<R: Real>(theta: R) -> Complex<R> {
    let (c, s) = R::cos_sin(theta);
    Complex::new(c, s)
}

impl Real for f64 {
    const EPS: f64 = f64::EPSILON;
    const NAME: &'static str = "f64";

    fn of(v: f64) -> Self {
        v
    }
    fn f64(self) -> f64 {
        self
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn cos_sin(theta: Self) -> (Self, Self) {
        (theta.cos(), theta.sin())
    }
    fn from_rational(r: &BigRational) -> Self {
        crate::exact::rational_to_f64(r)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn cbrt(self) -> Self {
        f64::cbrt(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

fn bigint_to_dd(n: &BigInt) -> Dd {
    let hi = n.to_f64().unwrap_or(f64::INFINITY);
    if !hi.is_finite() {
        return Dd::from(hi);
    }
    let rem = n - BigInt::from_f64(hi).unwrap_or_default();
    Dd::from_sum(hi, rem.to_f64().unwrap_or(0.0))
}

impl Real for Dd {
    const EPS: f64 = 1.0e-32;
    const NAME: &'static str = "double-double";

    fn of(v: f64) -> Self {
        Dd::from(v)
    }
    fn f64(self) -> f64 {
        f64::from(self)
    }
    fn pi() -> Self {
        Dd::PI
    }

    // reduction by pi/2, then Taylor series on |r| <= pi/4
    fn cos_sin(theta: Self) -> (Self, Self) {
        let k = (theta / Dd::FRAC_PI_2).round();
        let r = theta - k * Dd::FRAC_PI_2;
        let r2 = r * r;
        let mut term_s = r;
        let mut term_c = Dd::ONE;
        let mut s = r;
        let mut c = Dd::ONE;
        for n in 1..40 {
            let n = n as f64;
            term_s = -term_s * r2 / Dd::from((2.0 * n) * (2.0 * n + 1.0));
            term_c = -term_c * r2 / Dd::from((2.0 * n - 1.0) * (2.0 * n));
            s += term_s;
            c += term_c;
            if term_s.hi().abs() < 1e-36 && term_c.hi().abs() < 1e-36 {
                break;
            }
        }
        match (k.hi() as i64).rem_euclid(4) {
            0 => (c, s),
            1 => (-s, c),
            2 => (-c, -s),
            _ => (s, -c),
        }
    }

    fn from_rational(r: &BigRational) -> Self {
        let (mut n, mut d) = (r.numer().clone(), r.denom().clone());
        let bits = n.bits().max(d.bits());
        if bits > 1000 {
            let shift = (bits - 1000) as usize;
            n >>= shift;
            d >>= shift;
        }
        if n.is_zero() {
            return Dd::ZERO;
        }
        bigint_to_dd(&n) / bigint_to_dd(&d)
    }
    fn abs(self) -> Self {
        Dd::abs(self)
    }
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    fn cbrt(self) -> Self {
        Dd::cbrt(self)
    }
    fn powi(self, n: i32) -> Self {
        Dd::powi(self, n)
    }
    fn is_finite(self) -> bool {
        Dd::is_finite(self)
    }
}

/// `z^p` for rational `p = num/den` on the sheet fixed by the tracked
/// argument `theta` of `z` (with `|z| = r`).
pub fn tracked_pow<R: Real>(r: R, theta: R, num: i64, den: i64) -> Complex<R> {
    let p = R::of(num as f64) / R::of(den as f64);
    let modulus = if den == 1 {
        r.powi(num as i32)
    } else if den == 3 {
        r.cbrt().powi(num as i32)
    } else {
        R::of(r.f64().powf(p.f64()))
    };
    cis(theta * p) * modulus
}
