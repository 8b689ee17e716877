//! Substitution of a truncated formal pair into the first-order system with
//! exact generalized-series arithmetic.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{Branch, EquationSpec, Family, Param};
use crate::scalar::Field;

/// Exponents are stored in units of 1/3.
pub const UNITS: i64 = 3;

fn units(q: num_rational::Rational64) -> i64 {
    let v = q * UNITS;
    assert!(v.is_integer(), "exponent {q} is not a multiple of 1/{UNITS}");
    v.to_integer()
}

/// A finite generalized series `sum_i c[i] x^{(lead - i*step)/3}`.
///
/// `nominal` is the leading exponent a generic instance of the expression
/// would have; the order of a coefficient is counted from there.
#[derive(Clone, Debug, PartialEq)]
pub struct GSeries<S> {
    pub lead: i64,
    pub step: i64,
    pub coeffs: Vec<S>,
}

impl<S: Field> GSeries<S> {
    pub fn new(lead: i64, step: i64, coeffs: Vec<S>) -> Self {
        assert!(step > 0);
        GSeries { lead, step, coeffs }
    }

    pub fn constant(c: S, step: i64) -> Self {
        GSeries::new(0, step, vec![c])
    }

    /// Coefficient of `x^{e/3}`.
    pub fn coeff_at(&self, e: i64) -> S {
        let d = self.lead - e;
        if d < 0 || d % self.step != 0 {
            return S::zero();
        }
        self.coeffs.get((d / self.step) as usize).cloned().unwrap_or_else(S::zero)
    }

    pub fn lowest(&self) -> i64 {
        self.lead - self.step * (self.coeffs.len() as i64 - 1).max(0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_to(o, usize::MAX)
    }

    /// Product keeping only the first `len` coefficients.
    pub fn mul_to(&self, o: &Self, len: usize) -> Self {
        assert_eq!(self.step, o.step);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return GSeries::new(self.lead + o.lead, self.step, vec![]);
        }
        let n = (self.coeffs.len() + o.coeffs.len() - 1).min(len);
        let mut c = vec![S::zero(); n];
        for (i, x) in self.coeffs.iter().enumerate().take(n) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.coeffs.iter().enumerate().take(n - i) {
                if !y.is_zero() {
                    c[i + j] = c[i + j].clone() + x.clone() * y.clone();
                }
            }
        }
        GSeries::new(self.lead + o.lead, self.step, c)
    }

    pub fn scale(&self, k: &S) -> Self {
        GSeries::new(self.lead, self.step, self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    /// Multiply by `x^{e/3}`.
    pub fn shift(&self, e: i64) -> Self {
        GSeries::new(self.lead + e, self.step, self.coeffs.clone())
    }

    /// `x d/dx`.
    pub fn euler(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.clone() * S::from_ratio(self.lead - self.step * i as i64, UNITS))
            .collect();
        GSeries::new(self.lead, self.step, c)
    }

    /// `d/dx`.
    pub fn deriv(&self) -> Self {
        self.euler().shift(-UNITS)
    }

    /// Sum of series on a common lattice.
    pub fn sum(terms: &[GSeries<S>]) -> Self {
        let step = terms[0].step;
        let lead = terms.iter().map(|t| t.lead).max().unwrap();
        let low = terms.iter().map(|t| t.lowest()).min().unwrap();
        for t in terms {
            assert_eq!((lead - t.lead).rem_euclid(step), 0, "series on different lattices");
        }
        let len = ((lead - low) / step + 1) as usize;
        let mut c = vec![S::zero(); len];
        for t in terms {
            let off = ((lead - t.lead) / step) as usize;
            for (i, x) in t.coeffs.iter().enumerate() {
                c[off + i] = c[off + i].clone() + x.clone();
            }
        }
        GSeries::new(lead, step, c)
    }
}

/// Result of the formal substitution check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualOrder {
    /// every residual coefficient of order `<= r` vanishes, order `r + 1` does not
    Finite(i64),
    /// the truncated pair solves the system exactly
    Infinite,
}

impl ResidualOrder {
    pub fn at_least(self, n: i64) -> bool {
        match self {
            ResidualOrder::Infinite => true,
            ResidualOrder::Finite(r) => r >= n,
        }
    }
}

impl fmt::Display for ResidualOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidualOrder::Finite(r) => write!(f, "{r}"),
            ResidualOrder::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ResidualOrder {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        match self {
            ResidualOrder::Finite(r) => s.serialize_i64(*r),
            ResidualOrder::Infinite => s.serialize_str("inf"),
        }
    }
}

/// A residual expression: a list of terms, each with its nominal leading
/// exponent.
struct Equation<S> {
    terms: Vec<(i64, GSeries<S>)>,
}

impl<S: Field> Equation<S> {
    fn new() -> Self {
        Equation { terms: vec![] }
    }

    fn push(&mut self, nominal: i64, s: GSeries<S>) {
        self.terms.push((nominal, s));
    }

    /// Residual coefficients, ordered from the nominal top exponent down.
    fn orders(&self) -> (i64, GSeries<S>) {
        let top = self.terms.iter().map(|t| t.0).max().unwrap();
        let series: Vec<_> = self.terms.iter().map(|t| t.1.clone()).collect();
        (top, GSeries::sum(&series))
    }
}

fn lift<S: Field>(p: &Param) -> Result<S> {
    p.to_field::<S>().ok_or(Error::ExactBackendUnavailable)
}

/// Residual series of the two equations for the pair `u = x^{p_u} sum a_n s^n`,
/// `U = x^{p_U} sum A_n s^n`, `s = x^{-step}`.
pub fn system_residuals<S: Field>(
    eq: &EquationSpec,
    branch: &Branch,
    a: &[S],
    big_a: &[S],
) -> Result<[(i64, GSeries<S>); 2]> {
    residuals_to_depth(eq, branch, a, big_a, usize::MAX)
}

/// As `system_residuals`, but products are cut after `depth + 1` terms; every
/// residual coefficient within `depth` orders of the top is still exact.
fn residuals_to_depth<S: Field>(
    eq: &EquationSpec,
    branch: &Branch,
    a: &[S],
    big_a: &[S],
    depth: usize,
) -> Result<[(i64, GSeries<S>); 2]> {
    let len = depth.saturating_add(1);
    let step = units(branch.step);
    let pu = units(branch.p_u);
    let pw = units(branch.p_big_u);
    let u = GSeries::new(pu, step, a.to_vec());
    let w = GSeries::new(pw, step, big_a.to_vec());
    let one = S::one();
    let c = |v: S| GSeries::constant(v, step);
    let mut e1 = Equation::new();
    let mut e2 = Equation::new();
    match eq.family() {
        Family::P3i | Family::P3ii => {
            let alpha: S = lift(&eq.alpha())?;
            let beta: S = lift(&eq.beta())?;
            let gamma: S = lift(&eq.gamma().expect("P3"))?;
            // x u' - [x + (1 - beta) u + x u^2 U]
            let uuw = u.mul_to(&u, len).mul_to(&w, len).shift(UNITS);
            e1.push(pu, u.euler());
            e1.push(UNITS, c(-one.clone()).shift(UNITS));
            e1.push(pu, u.scale(&(beta.clone() - one.clone())));
            e1.push(2 * pu + pw + UNITS, uuw.scale(&-one.clone()));
            // x U' - [alpha + gamma x u - (2 - beta) U - x u U^2]
            let uww = u.mul_to(&w, len).mul_to(&w, len).shift(UNITS);
            e2.push(pw, w.euler());
            e2.push(0, c(-alpha));
            if !gamma.is_zero() {
                e2.push(pu + UNITS, u.shift(UNITS).scale(&-gamma));
            }
            e2.push(pw, w.scale(&(S::from_ratio(2, 1) - beta)));
            e2.push(pu + 2 * pw + UNITS, uww);
        }
        Family::P4 => {
            let k0: S = lift(&eq.kappa0().expect("P4"))?;
            let kinf: S = lift(&eq.kappa_inf().expect("P4"))?;
            let two = S::from_ratio(2, 1);
            // u' - [4uU - u^2 - 2xu - 2 k0]
            e1.push(pu - UNITS, u.deriv());
            e1.push(pu + pw, u.mul_to(&w, len).scale(&S::from_ratio(-4, 1)));
            e1.push(2 * pu, u.mul_to(&u, len));
            e1.push(pu + UNITS, u.shift(UNITS).scale(&two));
            e1.push(0, c(two.clone() * k0));
            // U' - [-2U^2 + 2uU + 2xU - kinf]
            e2.push(pw - UNITS, w.deriv());
            e2.push(2 * pw, w.mul_to(&w, len).scale(&two));
            e2.push(pu + pw, u.mul_to(&w, len).scale(&-two.clone()));
            e2.push(pw + UNITS, w.shift(UNITS).scale(&-two));
            e2.push(0, c(kinf));
        }
    }
    Ok([e1.orders(), e2.orders()])
}

/// First order (counted in units of `step` below the nominal top exponent)
/// whose residual coefficient is nonzero in either equation, minus one.
pub fn residual_order_of_pair<S: Field>(
    eq: &EquationSpec,
    branch: &Branch,
    a: &[S],
    big_a: &[S],
) -> Result<ResidualOrder> {
    // a window just past the truncation settles the generic case; the full
    // products are only needed when the window is clean
    let window = a.len().max(big_a.len()) + 1;
    match first_nonzero(eq, branch, a, big_a, window)? {
        Some(j) if j <= window as i64 => Ok(ResidualOrder::Finite(j - 1)),
        _ => Ok(match first_nonzero(eq, branch, a, big_a, usize::MAX)? {
            None => ResidualOrder::Infinite,
            Some(j) => ResidualOrder::Finite(j - 1),
        }),
    }
}

fn first_nonzero<S: Field>(
    eq: &EquationSpec,
    branch: &Branch,
    a: &[S],
    big_a: &[S],
    depth: usize,
) -> Result<Option<i64>> {
    let step = units(branch.step);
    let mut first: Option<i64> = None;
    for (top, res) in residuals_to_depth(eq, branch, a, big_a, depth)? {
        let low = res.lowest().min(res.lead);
        let mut j = 0i64;
        while top - j * step >= low {
            if !res.coeff_at(top - j * step).is_zero() {
                first = Some(first.map_or(j, |f: i64| f.min(j)));
                break;
            }
            j += 1;
        }
        // coefficients above the nominal top would indicate a wrong lattice
        if res.lead > top && (1..=((res.lead - top) / step)).any(|i| !res.coeff_at(top + i * step).is_zero()) {
            first = Some(-1);
        }
    }
    Ok(first)
}
