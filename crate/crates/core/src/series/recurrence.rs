//! The coefficient recurrences of the three families, generic over the
//! scalar backend.

use crate::error::{Error, Result};
use crate::model::{Branch, EquationSpec, Family, Param};
use crate::scalar::Field;

fn lift<S: Field>(p: &Param) -> Result<S> {
    p.to_field::<S>().ok_or(Error::ExactBackendUnavailable)
}

fn int<S: Field>(n: i64) -> S {
    S::from_ratio(n, 1)
}

fn half<S: Field>(n: i64) -> S {
    S::from_ratio(n, 2)
}

/// sum_{l=lo}^{hi} x_l y_{n-l}; empty when hi < lo.
fn conv<S: Field>(x: &[S], y: &[S], n: usize, lo: usize, hi: usize) -> S {
    let mut acc = S::zero();
    for l in lo..=hi.min(n) {
        acc = acc + x[l].clone() * y[n - l].clone();
    }
    acc
}

/// Cauchy squares `sum_{l=0}^{m} x_l x_{m-l}` for every `m` whose terms are
/// known, extended as `x` grows.
struct Squares<S> {
    sq: Vec<S>,
}

impl<S: Field> Squares<S> {
    fn new() -> Self {
        Squares { sq: vec![] }
    }

    fn extend(&mut self, x: &[S]) {
        while self.sq.len() < x.len() {
            let m = self.sq.len();
            self.sq.push(conv(x, x, m, 0, m));
        }
    }

    fn at(&self, m: usize) -> S {
        self.sq[m].clone()
    }
}

/// Generate `a[0..=n_max]`, `A[0..=n_max]` for `branch` of `eq`.
pub fn generate<S: Field>(eq: &EquationSpec, branch: &Branch, n_max: usize) -> Result<(Vec<S>, Vec<S>)> {
    let a0: S = lift(&branch.a0)?;
    let big_a0: S = lift(&branch.big_a0)?;
    let (mut a, mut b) = (vec![a0], vec![big_a0]);
    match eq.family() {
        Family::P3i => p3i(eq, &mut a, &mut b, n_max)?,
        Family::P3ii => p3ii(eq, &mut a, &mut b, n_max)?,
        Family::P4 => p4(eq, branch.m, &mut a, &mut b, n_max)?,
    }
    a.truncate(n_max + 1);
    b.truncate(n_max + 1);
    Ok((a, b))
}

fn p3i<S: Field>(eq: &EquationSpec, a: &mut Vec<S>, b: &mut Vec<S>, n_max: usize) -> Result<()> {
    let alpha: S = lift(&eq.alpha())?;
    let beta: S = lift(&eq.beta())?;
    let a0 = a[0].clone();
    let b0 = b[0].clone();
    let lead = int::<S>(2) * a0.clone() * b0.clone();
    let (mut aa, mut bb) = (Squares::new(), Squares::new());
    for n in 0..n_max {
        aa.extend(a);
        bb.extend(b);
        let nn = int::<S>(n as i64);
        // second line: A_{n+1} is explicit
        let mut r2 = (nn.clone() + beta.clone() - int(2)) * b[n].clone();
        if n == 0 {
            r2 = r2 + alpha.clone();
        }
        r2 = r2 - a0.clone() * conv(b, b, n + 1, 1, n);
        for k in 1..=n {
            r2 = r2 - a[k].clone() * bb.at(n + 1 - k);
        }
        b.push(r2 / lead.clone());
        // first line: the k = n+1 term uses the new A_{n+1}
        let mut r1 = (beta.clone() - int(1) - nn) * a[n].clone();
        r1 = r1 - b0.clone() * conv(a, a, n + 1, 1, n);
        for k in 1..=n + 1 {
            r1 = r1 - b[k].clone() * aa.at(n + 1 - k);
        }
        a.push(r1 / lead.clone());
    }
    Ok(())
}

fn p3ii<S: Field>(eq: &EquationSpec, a: &mut Vec<S>, b: &mut Vec<S>, n_max: usize) -> Result<()> {
    let beta: S = lift(&eq.beta())?;
    let a0 = a[0].clone();
    let sq = a0.clone() * a0.clone();
    let (mut aa, mut bb) = (Squares::new(), Squares::new());
    for n in 0..n_max {
        aa.extend(a);
        bb.extend(b);
        let nn = int::<S>(n as i64);
        let three = int::<S>(3);
        let mut r1 = (int::<S>(2) * nn.clone() + int(2) - three.clone() * beta.clone()) * a[n].clone();
        r1 = r1 - three.clone() * a0.clone() * conv(a, a, n + 1, 1, n);
        for k in 1..=n {
            r1 = r1 + three.clone() * b[k].clone() * aa.at(n + 1 - k);
        }
        let mut r2 = (three.clone() * beta.clone() - int(4) + int::<S>(2) * nn) * b[n].clone();
        r2 = r2 - three.clone() * a0.clone() * conv(b, b, n + 1, 1, n);
        for k in 1..=n {
            r2 = r2 - three.clone() * a[k].clone() * bb.at(n + 1 - k);
        }
        // a0^2 [[6, -3], [3, -6]] (a, A)^T = (r1, r2)^T, determinant -27 a0^4
        let (r1, r2) = (r1 / sq.clone(), r2 / sq.clone());
        let nine = int::<S>(9);
        a.push((int::<S>(2) * r1.clone() - r2.clone()) / nine.clone());
        b.push((r1 - int::<S>(2) * r2) / nine);
    }
    Ok(())
}

fn p4<S: Field>(eq: &EquationSpec, m: u32, a: &mut Vec<S>, b: &mut Vec<S>, n_max: usize) -> Result<()> {
    let alpha: S = lift(&eq.alpha())?;
    let k0: S = lift(&eq.kappa0().expect("P4"))?;
    let kinf: S = lift(&eq.kappa_inf().expect("P4"))?;
    let four = int::<S>(4);
    match m {
        1 => {
            if n_max >= 1 {
                a.push(alpha);
                b.push(half::<S>(1) - k0 + half::<S>(1) * kinf);
            }
            for n in 1..n_max {
                let nn = int::<S>(n as i64);
                let mut r1 = (int::<S>(1) - int::<S>(2) * nn.clone()) * a[n].clone();
                let mut r2 = (int::<S>(2) * nn - int(1)) * b[n].clone();
                for k in 1..=n {
                    r1 = r1 - a[k].clone() * (four.clone() * b[n + 1 - k].clone() - a[n + 1 - k].clone());
                    r2 = r2 + int::<S>(2) * b[k].clone() * (a[n + 1 - k].clone() - b[n + 1 - k].clone());
                }
                // (2/3) a - (8/3) A = r1, (2/3) A - (2/3) a = r2
                let big = -(r1.clone() + r2) / int(2);
                let small = (r1 + S::from_ratio(8, 3) * big.clone()) * S::from_ratio(3, 2);
                a.push(small);
                b.push(big);
            }
        }
        2 => {
            if n_max >= 1 {
                a.push(-alpha);
            }
            for n in 0..n_max {
                let nn = int::<S>(n as i64);
                if n >= 1 {
                    let mut v = (half::<S>(1) - nn.clone()) * a[n].clone() + four.clone() * b[n].clone();
                    for k in 1..=n {
                        v = v + half::<S>(1)
                            * a[k].clone()
                            * (a[n + 1 - k].clone() - four.clone() * b[n - k].clone());
                    }
                    a.push(v);
                }
                let mut w = (half::<S>(1) + nn) * b[n].clone();
                for k in 0..=n {
                    w = w + b[k].clone() * (a[n + 1 - k].clone() - b[n - k].clone());
                }
                b.push(w);
            }
        }
        3 => {
            if n_max >= 1 {
                b.push(-half::<S>(1) * (int::<S>(1) - int::<S>(2) * k0 + kinf));
            }
            for n in 0..n_max {
                let nn = int::<S>(n as i64);
                if n >= 1 {
                    let mut w = (nn.clone() - half::<S>(1)) * b[n].clone() + a[n].clone();
                    for k in 1..=n {
                        w = w - b[k].clone() * (b[n + 1 - k].clone() - a[n - k].clone());
                    }
                    b.push(w);
                }
                let mut v = -(nn + half::<S>(1)) * a[n].clone();
                for k in 0..=n {
                    v = v + half::<S>(1)
                        * a[k].clone()
                        * (a[n - k].clone() - four.clone() * b[n + 1 - k].clone());
                }
                a.push(v);
            }
        }
        _ => {
            for n in 0..n_max {
                let nn = int::<S>(n as i64);
                let mut v = (nn.clone() + half::<S>(1)) * a[n].clone();
                let mut w = -(nn + half::<S>(1)) * b[n].clone();
                for k in 0..=n {
                    v = v - half::<S>(1) * a[k].clone() * (a[n - k].clone() - four.clone() * b[n - k].clone());
                    w = w + b[k].clone() * (b[n - k].clone() - a[n - k].clone());
                }
                a.push(v);
                b.push(w);
            }
        }
    }
    Ok(())
}
