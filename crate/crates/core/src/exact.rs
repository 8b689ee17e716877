//! Exact arithmetic in the number field Q(i, sqrt 3).
//!
//! Every leading coefficient that appears in the canonical branches is a root
//! of unity of order 4 or 3, and Q(i, sqrt 3) = Q(e^{i pi/6}) contains all of
//! them together with the Gaussian rationals used for parameters. Elements are
//! stored over the basis {1, i, sqrt3, i sqrt3}.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Smallest of the standard subfields that contains a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumberField {
    Rational,
    /// Q(i)
    Gaussian,
    /// Q(omega) = Q(i sqrt 3)
    Eisenstein,
    /// Q(i, sqrt 3)
    Cyclotomic12,
}

impl NumberField {
    pub fn contains(self, other: NumberField) -> bool {
        use NumberField::*;
        match (self, other) {
            (Cyclotomic12, _) => true,
            (a, b) if a == b => true,
            (_, Rational) => true,
            _ => false,
        }
    }
}

/// Gaussian rational p + q i, the coefficient ring of the sqrt 3 tower.
#[derive(Clone, PartialEq, Eq, Hash)]
struct GaussRat {
    re: BigRational,
    im: BigRational,
}

impl GaussRat {
    fn zero() -> Self {
        GaussRat { re: BigRational::zero(), im: BigRational::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, o: &Self) -> Self {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn sub(&self, o: &Self) -> Self {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        // the parameters and roots of unity are mostly real, imaginary or
        // free of sqrt3, so skip products with a zero factor
        let prod = |a: &BigRational, b: &BigRational| {
            if a.is_zero() || b.is_zero() {
                BigRational::zero()
            } else {
                a * b
            }
        };
        GaussRat {
            re: prod(&self.re, &o.re) - prod(&self.im, &o.im),
            im: prod(&self.re, &o.im) + prod(&self.im, &o.re),
        }
    }

    fn scale(&self, k: &BigRational) -> Self {
        GaussRat { re: &self.re * k, im: &self.im * k }
    }

    fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -&self.im }
    }

    fn inv(&self) -> Option<Self> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if norm.is_zero() {
            return None;
        }
        Some(self.conj().scale(&norm.recip()))
    }
}

/// Element `p + q sqrt3` with `p, q` Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    p: GaussRat,
    q: GaussRat,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar { p: GaussRat::zero(), q: GaussRat::zero() }
    }

    pub fn one() -> Self {
        Self::from_ratio(1, 1)
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn from_rational(r: BigRational) -> Self {
        ExactScalar {
            p: GaussRat { re: r, im: BigRational::zero() },
            q: GaussRat::zero(),
        }
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        ExactScalar { p: GaussRat { re, im }, q: GaussRat::zero() }
    }

    /// Build from the four basis coordinates over {1, i, sqrt3, i sqrt3}.
    pub fn from_basis(c: [BigRational; 4]) -> Self {
        let [a, b, c3, d] = c;
        ExactScalar { p: GaussRat { re: a, im: b }, q: GaussRat { re: c3, im: d } }
    }

    pub fn basis(&self) -> [BigRational; 4] {
        [self.p.re.clone(), self.p.im.clone(), self.q.re.clone(), self.q.im.clone()]
    }

    pub fn i() -> Self {
        Self::gaussian(BigRational::zero(), BigRational::one())
    }

    /// omega = e^{2 pi i / 3} = -1/2 + (1/2) i sqrt3.
    pub fn omega() -> Self {
        ExactScalar {
            p: GaussRat { re: rat(-1, 2), im: BigRational::zero() },
            q: GaussRat { re: BigRational::zero(), im: rat(1, 2) },
        }
    }

    pub fn sqrt3() -> Self {
        ExactScalar {
            p: GaussRat::zero(),
            q: GaussRat { re: BigRational::one(), im: BigRational::zero() },
        }
    }

    /// e^{2 pi i k / 12} for integer k.
    pub fn root_of_unity_12(k: i64) -> Self {
        let k = k.rem_euclid(12);
        // zeta = sqrt3/2 + i/2
        let zeta = ExactScalar {
            p: GaussRat { re: BigRational::zero(), im: rat(1, 2) },
            q: GaussRat { re: rat(1, 2), im: BigRational::zero() },
        };
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * &zeta;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn conj(&self) -> Self {
        ExactScalar { p: self.p.conj(), q: self.q.conj() }
    }

    pub fn inv(&self) -> Option<Self> {
        // (P + Q s)^{-1} = (P - Q s) / (P^2 - 3 Q^2)
        let den = self.p.mul(&self.p).sub(&self.q.mul(&self.q).scale(&rat(3, 1)));
        let den_inv = den.inv()?;
        Some(ExactScalar { p: self.p.mul(&den_inv), q: self.q.mul(&den_inv).scale(&rat(-1, 1)) })
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        ExactScalar { p: self.p.scale(k), q: self.q.scale(k) }
    }

    pub fn field(&self) -> NumberField {
        let zero_b = self.p.im.is_zero();
        let zero_c = self.q.re.is_zero();
        let zero_d = self.q.im.is_zero();
        match (zero_b, zero_c, zero_d) {
            (true, true, true) => NumberField::Rational,
            (false, true, true) => NumberField::Gaussian,
            (true, true, false) => NumberField::Eisenstein,
            _ => NumberField::Cyclotomic12,
        }
    }

    /// Returns the value as `(re, im)` rationals when it lies in Q(i).
    pub fn as_gaussian(&self) -> Option<(BigRational, BigRational)> {
        if self.q.is_zero() {
            Some((self.p.re.clone(), self.p.im.clone()))
        } else {
            None
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.field() {
            NumberField::Rational => Some(self.p.re.clone()),
            _ => None,
        }
    }

    pub fn to_complex64(&self) -> Complex<f64> {
        let s3 = 3f64.sqrt();
        let f = |r: &BigRational| rational_to_f64(r);
        Complex::new(f(&self.p.re) + s3 * f(&self.q.re), f(&self.p.im) + s3 * f(&self.q.im))
    }

    /// Real and imaginary parts as exact strings; irrational parts are
    /// written as `a+b*sqrt(3)`.
    pub fn export_strings(&self) -> [String; 2] {
        let part = |a: &BigRational, b: &BigRational| -> String {
            if b.is_zero() {
                a.to_string()
            } else if a.is_zero() {
                format!("{}*sqrt(3)", b)
            } else if b.is_negative() {
                format!("{}-{}*sqrt(3)", a, -b)
            } else {
                format!("{}+{}*sqrt(3)", a, b)
            }
        };
        [part(&self.p.re, &self.q.re), part(&self.p.im, &self.q.im)]
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale huge numerators and denominators down before dividing.
            let nb = r.numer().bits() as i64;
            let db = r.denom().bits() as i64;
            let shift = (nb.max(db) - 900).max(0) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [re, im] = self.export_strings();
        if self.p.im.is_zero() && self.q.im.is_zero() {
            write!(f, "{}", re)
        } else {
            write!(f, "({})+({})i", re, im)
        }
    }
}

impl<'a> Add<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar { p: self.p.add(&o.p), q: self.q.add(&o.q) }
    }
}

impl<'a> Sub<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: &ExactScalar) -> ExactScalar {
        ExactScalar { p: self.p.sub(&o.p), q: self.q.sub(&o.q) }
    }
}

impl<'a> Mul<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn mul(self, o: &ExactScalar) -> ExactScalar {
        if self.q.is_zero() && o.q.is_zero() {
            return ExactScalar { p: self.p.mul(&o.p), q: GaussRat::zero() };
        }
        let three = rat(3, 1);
        // (P1 + Q1 s)(P2 + Q2 s) = P1 P2 + 3 Q1 Q2 + (P1 Q2 + Q1 P2) s
        let p = self.p.mul(&o.p).add(&self.q.mul(&o.q).scale(&three));
        let q = self.p.mul(&o.q).add(&self.q.mul(&o.p));
        ExactScalar { p, q }
    }
}

impl<'a> Div<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn div(self, o: &ExactScalar) -> ExactScalar {
        let inv = o.inv().expect("division by zero in exact field");
        self * &inv
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: ExactScalar) -> ExactScalar {
                (&self).$m(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        self.scale(&rat(-1, 1))
    }
}

/// Parse a real rational: `"-2"`, `"1/3"`, `"0.25"`, `"1.5e-3"`.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    let bad = || Error::BadParameter(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{}{}", int_part, frac_part);
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

impl FromStr for ExactScalar {
    type Err = Error;

    /// Accepts a real rational or a Gaussian rational `a+bi` / `a-bi` / `bi`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(body) = t.strip_suffix('i') {
            // find the split between real and imaginary part
            let bytes = body.as_bytes();
            let mut split = None;
            for idx in (1..bytes.len()).rev() {
                let c = bytes[idx] as char;
                let prev = bytes[idx - 1] as char;
                if (c == '+' || c == '-') && prev != 'e' && prev != 'E' && prev != '/' {
                    split = Some(idx);
                    break;
                }
            }
            let (re_s, im_s) = match split {
                Some(idx) => (&body[..idx], &body[idx..]),
                None => ("0", body),
            };
            let im_s = match im_s {
                "" | "+" => "1",
                "-" => "-1",
                other => other,
            };
            let im_s = im_s.strip_suffix('*').unwrap_or(im_s);
            Ok(ExactScalar::gaussian(parse_rational(re_s)?, parse_rational(im_s)?))
        } else {
            Ok(ExactScalar::from_rational(parse_rational(&t)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_is_cube_root_of_unity() {
        let w = ExactScalar::omega();
        assert_eq!(w.pow(3), ExactScalar::one());
        assert_ne!(w, ExactScalar::one());
        assert_eq!(w.field(), NumberField::Eisenstein);
        assert_eq!(ExactScalar::root_of_unity_12(4), w);
        assert_eq!(ExactScalar::root_of_unity_12(3), ExactScalar::i());
    }

    #[test]
    fn inverse_round_trips() {
        let z: ExactScalar = &ExactScalar::omega() + &ExactScalar::from_str("2/3-5i").unwrap();
        let w = &z * &ExactScalar::sqrt3();
        let one = &w * &w.inv().unwrap();
        assert_eq!(one, ExactScalar::one());
        assert!(ExactScalar::zero().inv().is_none());
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let a = ExactScalar::from_str("1/3+2i").unwrap();
        let b = &ExactScalar::omega() + &ExactScalar::sqrt3();
        let prod = (&a * &b).to_complex64();
        let expect = a.to_complex64() * b.to_complex64();
        assert!((prod - expect).norm() < 1e-14);
    }

    #[test]
    fn parses_decimal_and_gaussian_forms() {
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5e-1").unwrap(), rat(-3, 20));
        assert_eq!(parse_rational("-2").unwrap(), rat(-2, 1));
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        let z: ExactScalar = "1/2-3/4i".parse().unwrap();
        assert_eq!(z.as_gaussian().unwrap(), (rat(1, 2), rat(-3, 4)));
        let z: ExactScalar = "-i".parse().unwrap();
        assert_eq!(z.as_gaussian().unwrap(), (rat(0, 1), rat(-1, 1)));
        let z: ExactScalar = "1e-2+2i".parse().unwrap();
        assert_eq!(z.as_gaussian().unwrap(), (rat(1, 100), rat(2, 1)));
    }

    #[test]
    fn export_writes_sqrt3_parts() {
        let [re, im] = ExactScalar::omega().export_strings();
        assert_eq!(re, "-1/2");
        assert_eq!(im, "1/2*sqrt(3)");
    }
}
