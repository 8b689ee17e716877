//! Truncated-series oracle: substitutes the finite sums into the first-order
//! system with sparse maps keyed by exponents in thirds.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::Rational64;
use tronquee::series::ResidualOrder;
use tronquee::{Branch, EquationSpec, ExactScalar, Family};

type Poly = BTreeMap<i64, ExactScalar>;

fn thirds(r: Rational64) -> i64 {
    let v = r * Rational64::from_integer(3);
    assert!(v.is_integer());
    v.to_integer()
}

fn add_into(p: &mut Poly, e: i64, c: ExactScalar) {
    let slot = p.entry(e).or_insert_with(ExactScalar::zero);
    *slot = &*slot + &c;
}

fn series(lead: i64, step: i64, c: &[ExactScalar]) -> Poly {
    let mut p = Poly::new();
    for (n, v) in c.iter().enumerate() {
        add_into(&mut p, lead - n as i64 * step, v.clone());
    }
    p
}

/// Product with every exponent below `floor` dropped.
fn mul(a: &Poly, b: &Poly, floor: i64) -> Poly {
    let mut p = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            if ea + eb >= floor {
                add_into(&mut p, ea + eb, ca * cb);
            }
        }
    }
    p
}

fn scale(a: &Poly, k: &ExactScalar) -> Poly {
    a.iter().map(|(e, c)| (*e, c * k)).collect()
}

fn shift(a: &Poly, d: i64) -> Poly {
    a.iter().map(|(e, c)| (e + d, c.clone())).collect()
}

/// `x d/dx`
fn euler(a: &Poly) -> Poly {
    a.iter().map(|(e, c)| (*e, c * &ExactScalar::from_ratio(*e, 3))).collect()
}

fn konst(k: ExactScalar) -> Poly {
    let mut p = Poly::new();
    p.insert(0, k);
    p
}

fn sum(terms: &[(i64, Poly)]) -> (i64, Poly) {
    let top = terms.iter().map(|t| t.0).max().unwrap();
    let mut p = Poly::new();
    for (_, t) in terms {
        for (e, c) in t {
            add_into(&mut p, *e, c.clone());
        }
    }
    (top, p)
}

fn param(p: tronquee::Param) -> ExactScalar {
    p.exact().cloned().expect("exact parameter")
}

/// Residual order of the truncated pair, recomputed from scratch.
pub fn oracle_residual_order(eq: &EquationSpec, b: &Branch, a: &[ExactScalar], big_a: &[ExactScalar]) -> ResidualOrder {
    let depth = a.len().max(big_a.len()) as i64 + 1;
    match first_nonzero(eq, b, a, big_a, Some(depth)) {
        Some(j) if j <= depth => ResidualOrder::Finite(j - 1),
        _ => match first_nonzero(eq, b, a, big_a, None) {
            None => ResidualOrder::Infinite,
            Some(j) => ResidualOrder::Finite(j - 1),
        },
    }
}

/// Depth below the top of the first nonzero residual coefficient; with a
/// depth limit, products are only formed down to that depth.
fn first_nonzero(eq: &EquationSpec, b: &Branch, a: &[ExactScalar], big_a: &[ExactScalar], depth: Option<i64>) -> Option<i64> {
    let (pu, pw, step) = (thirds(b.p_u), thirds(b.p_big_u), thirds(b.step));
    // generous: every equation top lies within a few x-powers of these
    let floor = match depth {
        Some(d) => (pu.min(pw) - 6) - (d + 2) * step - 3 * (pu.abs() + pw.abs()),
        None => i64::MIN / 4,
    };
    let u = series(pu, step, a);
    let w = series(pw, step, big_a);
    let one = ExactScalar::one();
    let m1 = -ExactScalar::one();
    let two = ExactScalar::from_ratio(2, 1);
    let (r1, r2) = match eq.family() {
        Family::P3i | Family::P3ii => {
            let al = param(eq.alpha());
            let be = param(eq.beta());
            let ga = if eq.family() == Family::P3i { one.clone() } else { ExactScalar::zero() };
            let x = 3;
            // x u' = x + (1 - beta) u + x u^2 U
            let r1 = sum(&[
                (pu, euler(&u)),
                (x, konst(m1.clone()).into_iter().map(|(e, c)| (e + x, c)).collect()),
                (pu, scale(&u, &(&be - &one))),
                (2 * pu + pw + x, scale(&shift(&mul(&mul(&u, &u, floor - pw - 6), &w, floor - 6), x), &m1)),
            ]);
            // x U' = alpha + gamma x u - (2 - beta) U - x u U^2
            let r2 = sum(&[
                (pw, euler(&w)),
                (0, konst(-al)),
                (pu + x, scale(&shift(&u, x), &-ga)),
                (pw, scale(&w, &(&two - &be))),
                (pu + 2 * pw + x, shift(&mul(&mul(&u, &w, floor - pw - 6), &w, floor - 6), x)),
            ]);
            (r1, r2)
        }
        Family::P4 => {
            let k0 = param(eq.kappa0().unwrap());
            let ki = param(eq.kappa_inf().unwrap());
            let x = 3;
            // multiply through by x so that derivatives become Euler operators
            let r1 = sum(&[
                (pu, euler(&u)),
                (pu + pw + x, scale(&shift(&mul(&u, &w, floor - 6), x), &ExactScalar::from_ratio(-4, 1))),
                (2 * pu + x, shift(&mul(&u, &u, floor - 6), x)),
                (pu + 2 * x, scale(&shift(&u, 2 * x), &two)),
                (x, shift(&konst(&two * &k0), x)),
            ]);
            let r2 = sum(&[
                (pw, euler(&w)),
                (2 * pw + x, scale(&shift(&mul(&w, &w, floor - 6), x), &two)),
                (pu + pw + x, scale(&shift(&mul(&u, &w, floor - 6), x), &-two.clone())),
                (pw + 2 * x, scale(&shift(&w, 2 * x), &-two.clone())),
                (x, shift(&konst(ki), x)),
            ]);
            (r1, r2)
        }
    };
    let mut first: Option<i64> = None;
    for (top, p) in [r1, r2] {
        if let Some((e, _)) = p.iter().rev().find(|(_, c)| !c.is_zero()) {
            let j = (top - e) / step;
            first = Some(first.map_or(j, |f| f.min(j)));
        }
    }
    first
}
