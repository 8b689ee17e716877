//! Asymptotic-series coefficients, their evaluation and formal verification.

pub mod recurrence;
pub mod residual;

use std::str::FromStr;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactScalar;
use crate::model::{branch as make_branch, Branch, EquationSpec, TrackedPoint};
use crate::scalar::{cabs, tracked_pow, Dd, Field, Real, C64, CDD};

pub use residual::{residual_order_of_pair, GSeries, ResidualOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    F64,
    /// double-double, about 106 bits
    Dd,
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Backend::Exact),
            "f64" | "double" => Ok(Backend::F64),
            "dd" | "double-double" => Ok(Backend::Dd),
            _ => Err(Error::Invalid(format!("unknown backend {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coeffs {
    Exact(Vec<ExactScalar>, Vec<ExactScalar>),
    F64(Vec<C64>, Vec<C64>),
    Dd(Vec<CDD>, Vec<CDD>),
}

/// Coefficients `a[0..=N]`, `A[0..=N]` of one formal solution.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub eq: EquationSpec,
    pub branch: Branch,
    pub coeffs: Coeffs,
}

fn embed<R: Real>(v: &[ExactScalar]) -> Vec<Complex<R>> {
    v.iter().map(<Complex<R> as Field>::from_exact).collect()
}

impl CoefficientTable {
    /// Highest order stored.
    pub fn order(&self) -> usize {
        self.len() - 1
    }

    fn len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Exact(a, _) => a.len(),
            Coeffs::F64(a, _) => a.len(),
            Coeffs::Dd(a, _) => a.len(),
        }
    }

    pub fn backend(&self) -> Backend {
        match &self.coeffs {
            Coeffs::Exact(..) => Backend::Exact,
            Coeffs::F64(..) => Backend::F64,
            Coeffs::Dd(..) => Backend::Dd,
        }
    }

    pub fn exact(&self) -> Option<(&[ExactScalar], &[ExactScalar])> {
        match &self.coeffs {
            Coeffs::Exact(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Both sequences in the floating type `R`.
    pub fn as_complex<R: Real>(&self) -> (Vec<Complex<R>>, Vec<Complex<R>>) {
        fn conv<R: Real, T: Real>(v: &[Complex<T>]) -> Vec<Complex<R>> {
            v.iter()
                .map(|z| {
                    // carry both words of a double-double
                    let re = R::of(z.re.f64()) + R::of((z.re - T::of(z.re.f64())).f64());
                    let im = R::of(z.im.f64()) + R::of((z.im - T::of(z.im.f64())).f64());
                    Complex::new(re, im)
                })
                .collect()
        }
        match &self.coeffs {
            Coeffs::Exact(a, b) => (embed(a), embed(b)),
            Coeffs::F64(a, b) => (conv(a), conv(b)),
            Coeffs::Dd(a, b) => (conv(a), conv(b)),
        }
    }

    pub fn a_c64(&self) -> Vec<C64> {
        self.as_complex::<f64>().0
    }

    pub fn big_a_c64(&self) -> Vec<C64> {
        self.as_complex::<f64>().1
    }

    /// Coefficient table as the documented JSON schema.
    pub fn to_json(&self) -> serde_json::Value {
        let strings = |v: Vec<[String; 2]>| serde_json::to_value(v).unwrap();
        let (a, b) = match &self.coeffs {
            Coeffs::Exact(a, b) => (
                a.iter().map(|e| e.export_strings()).collect(),
                b.iter().map(|e| e.export_strings()).collect(),
            ),
            _ => {
                let (a, b) = self.as_complex::<Dd>();
                let f = |v: Vec<CDD>| -> Vec<[String; 2]> {
                    v.iter().map(|z| [format!("{:e}", z.re.f64()), format!("{:e}", z.im.f64())]).collect()
                };
                (f(a), f(b))
            }
        };
        let params: serde_json::Map<String, serde_json::Value> = self
            .eq
            .free_params()
            .iter()
            .map(|(k, v)| (k.to_string(), serde_json::to_value(v.export_strings()).unwrap()))
            .collect();
        let q = |r: num_rational::Rational64| format!("{r}");
        serde_json::json!({
            "family": self.eq.family().name(),
            "m": self.branch.m,
            "params": params,
            "backend": self.backend(),
            "step": q(self.branch.step),
            "p_u": q(self.branch.p_u),
            "p_U": q(self.branch.p_big_u),
            "a": strings(a),
            "A": strings(b),
        })
    }
}

/// Run the recurrence of `branch` through order `n` in `backend`.
///
/// Trivial branches are computed as well; their zero series is returned
/// as-is.
pub fn compute_coefficients(eq: &EquationSpec, branch: &Branch, n: usize, backend: Backend) -> Result<CoefficientTable> {
    let coeffs = match backend {
        Backend::Exact => {
            if !eq.is_exact() {
                return Err(Error::ExactBackendUnavailable);
            }
            let (a, b) = recurrence::generate::<ExactScalar>(eq, branch, n)?;
            Coeffs::Exact(a, b)
        }
        Backend::F64 => {
            let (a, b) = recurrence::generate::<C64>(eq, branch, n)?;
            check_finite(&a, &b)?;
            Coeffs::F64(a, b)
        }
        Backend::Dd => {
            // running the recurrence directly in double-double keeps about 30
            // digits through order 60 and is far cheaper than the exact field
            let (a, b) = recurrence::generate::<CDD>(eq, branch, n)?;
            check_finite(&a, &b)?;
            Coeffs::Dd(a, b)
        }
    };
    Ok(CoefficientTable { eq: eq.clone(), branch: branch.clone(), coeffs })
}

fn check_finite<S: Field>(a: &[S], b: &[S]) -> Result<()> {
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::BackendOverflow { order: i });
        }
    }
    Ok(())
}

/// Convenience: exact-or-floating table for `(eq, m)`.
pub fn table_for(eq: &EquationSpec, m: u32, n: usize, backend: Backend) -> Result<CoefficientTable> {
    let b = make_branch(eq, m)?;
    compute_coefficients(eq, &b, n, backend)
}

/// Substitute the order-`n` truncated pair into the system with exact
/// arithmetic.
pub fn residual_order(eq: &EquationSpec, branch: &Branch, n: usize) -> Result<ResidualOrder> {
    if !eq.is_exact() {
        return Err(Error::ExactBackendUnavailable);
    }
    let (a, b) = recurrence::generate::<ExactScalar>(eq, branch, n)?;
    residual_order_of_pair(eq, branch, &a, &b)
}

/// Partial sums of both series through `n_use`, prefactors applied, at the
/// point `r e^{i theta}` on the sheet fixed by the tracked argument.
pub fn evaluate_in<R: Real>(
    a: &[Complex<R>],
    big_a: &[Complex<R>],
    branch: &Branch,
    r: R,
    theta: R,
    n_use: usize,
) -> (Complex<R>, Complex<R>) {
    let (sn, sd) = (*branch.step.numer(), *branch.step.denom());
    let s = tracked_pow(r, theta, -sn, sd);
    let horner = |c: &[Complex<R>]| {
        let mut acc = Complex::new(R::zero(), R::zero());
        for v in c[..=n_use.min(c.len() - 1)].iter().rev() {
            acc = acc * s + *v;
        }
        acc
    };
    let pu = tracked_pow(r, theta, *branch.p_u.numer(), *branch.p_u.denom());
    let pw = tracked_pow(r, theta, *branch.p_big_u.numer(), *branch.p_big_u.denom());
    (pu * horner(a), pw * horner(big_a))
}

/// `evaluate_in` in double precision for a table.
pub fn evaluate(table: &CoefficientTable, x: TrackedPoint, n_use: usize) -> (C64, C64) {
    let (a, b) = table.as_complex::<f64>();
    evaluate_in(&a, &b, &table.branch, x.r, x.theta, n_use)
}

/// Magnitudes `|c_n| |x|^{-n step}` for `n = 0..=N`.
pub fn term_magnitudes(c: &[C64], step: f64, abs_x: f64) -> Vec<f64> {
    let ls = abs_x.ln() * step;
    c.iter()
        .enumerate()
        .map(|(n, v)| if v.norm() == 0.0 { 0.0 } else { (v.norm().ln() - n as f64 * ls).exp() })
        .collect()
}

fn argmin(t: &[f64]) -> (usize, f64) {
    // pairing each term with its successor keeps isolated (or rounded-off)
    // zeros from posing as the optimum while a terminated tail still is one
    let eff: Vec<f64> = (0..t.len()).map(|i| if i + 1 < t.len() { t[i].max(t[i + 1]) } else { t[i] }).collect();
    let mut best = 0;
    for (i, v) in eff.iter().enumerate() {
        if *v < eff[best] {
            best = i;
        }
    }
    (best, eff[best])
}

/// Index of the smallest term `|a_n| |x|^{-n step}`, ties to the smaller
/// index.
pub fn optimal_truncation_index(table: &CoefficientTable, abs_x: f64) -> usize {
    argmin(&term_magnitudes(&table.a_c64(), table.branch.step_f64(), abs_x)).0
}

/// Joint truncation index for seeding both components: the smallest term of
/// `max(|a_n|, |A_n|) |x|^{-n step}`.
pub fn optimal_truncation_pair(table: &CoefficientTable, abs_x: f64) -> (usize, f64) {
    let step = table.branch.step_f64();
    let ta = term_magnitudes(&table.a_c64(), step, abs_x);
    let tb = term_magnitudes(&table.big_a_c64(), step, abs_x);
    let t: Vec<f64> = ta.iter().zip(&tb).map(|(x, y)| x.max(*y)).collect();
    argmin(&t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthFlag {
    Zero,
    Terminating,
    /// `|a_n|^{1/n}` increases over the upper half of the table
    MonotoneGrowth,
    Bounded,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub magnitudes: Vec<f64>,
    /// `|a_n|^{1/n}`, `n >= 1`
    pub nth_roots: Vec<f64>,
    /// `|a_n / a_{n-1}|` where defined
    pub ratios: Vec<Option<f64>>,
    pub flag: GrowthFlag,
}

pub fn term_growth(table: &CoefficientTable) -> Result<GrowthReport> {
    if table.order() < 5 {
        return Err(Error::InsufficientSamples { needed: 6, got: table.order() + 1 });
    }
    let a = table.a_c64();
    let magnitudes: Vec<f64> = a.iter().map(|z| z.norm()).collect();
    let nth_roots: Vec<f64> = magnitudes.iter().enumerate().skip(1).map(|(n, m)| m.powf(1.0 / n as f64)).collect();
    let ratios = magnitudes
        .windows(2)
        .map(|w| if w[0] > 0.0 { Some(w[1] / w[0]) } else { None })
        .collect();
    let flag = if magnitudes.iter().all(|m| *m == 0.0) {
        GrowthFlag::Zero
    } else if magnitudes.iter().rev().take(magnitudes.len() / 2).all(|m| *m == 0.0) {
        GrowthFlag::Terminating
    } else {
        // compare the n-th roots along the nonzero entries of the upper half
        let upper: Vec<f64> = nth_roots[nth_roots.len() / 2..].iter().copied().filter(|v| *v > 0.0).collect();
        let rising = upper.len() >= 2 && upper.windows(2).all(|w| w[1] >= w[0]);
        if rising {
            GrowthFlag::MonotoneGrowth
        } else {
            GrowthFlag::Bounded
        }
    };
    Ok(GrowthReport { magnitudes, nth_roots, ratios, flag })
}

/// Modulus helper shared with the experiments.
pub fn abs<R: Real>(z: Complex<R>) -> f64 {
    cabs(z).f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_equation, Family, Param, RawParams};

    fn p3(f: Family, alpha: Param, beta: Param) -> EquationSpec {
        make_equation(f, RawParams::p3(alpha, beta)).unwrap()
    }

    fn p4(k0: Param, kinf: Param) -> EquationSpec {
        make_equation(Family::P4, RawParams::p4(k0, kinf)).unwrap()
    }

    #[test]
    fn p3i_first_coefficients() {
        let eq = p3(Family::P3i, Param::ratio(3, 7), Param::ratio(-5, 2));
        let t = table_for(&eq, 0, 3, Backend::Exact).unwrap();
        let (a, b) = t.exact().unwrap();
        // a1 = -(alpha + beta)/4, A1 = (beta - alpha - 2)/2
        let alpha = ExactScalar::from_ratio(3, 7);
        let beta = ExactScalar::from_ratio(-5, 2);
        assert_eq!(a[1], -(&(&alpha + &beta) / &ExactScalar::from_ratio(4, 1)));
        assert_eq!(b[1], &(&(&beta - &alpha) - &ExactScalar::from_ratio(2, 1)) / &ExactScalar::from_ratio(2, 1));
    }

    #[test]
    fn residual_orders_all_branches() {
        let cases = [
            p3(Family::P3i, Param::int(1), Param::int(2)),
            p3(Family::P3ii, Param::int(1), Param::ratio(1, 2)),
            p4(Param::ratio(2, 5), Param::ratio(-3, 4)),
        ];
        for eq in &cases {
            for m in eq.family().branch_range() {
                let b = make_branch(eq, m).unwrap();
                let r = residual_order(eq, &b, 12).unwrap();
                assert!(r.at_least(12), "{} m={m}: r={r}", eq.family());
            }
        }
    }

    #[test]
    fn exact_solutions_have_infinite_order() {
        let eq = p4(Param::int(1), Param::int(0));
        let b = make_branch(&eq, 2).unwrap();
        assert_eq!(residual_order(&eq, &b, 20).unwrap(), ResidualOrder::Infinite);
        let eq = p4(Param::ratio(1, 3), Param::ratio(-1, 3));
        let b = make_branch(&eq, 1).unwrap();
        assert_eq!(residual_order(&eq, &b, 10).unwrap(), ResidualOrder::Infinite);
    }

    #[test]
    fn corrupted_coefficient_is_detected() {
        let eq = p3(Family::P3i, Param::int(1), Param::int(2));
        let b = make_branch(&eq, 0).unwrap();
        let (mut a, big) = recurrence::generate::<ExactScalar>(&eq, &b, 10).unwrap();
        a[4] = &a[4] + &ExactScalar::one();
        assert_eq!(residual_order_of_pair(&eq, &b, &a, &big).unwrap(), ResidualOrder::Finite(3));
    }

    #[test]
    fn leading_term_evaluation() {
        let eq = p4(Param::ratio(1, 2), Param::int(1));
        let t = table_for(&eq, 3, 4, Backend::Exact).unwrap();
        let (u, _) = evaluate(&t, TrackedPoint::new(10.0, 0.0), 0);
        assert!((u - C64::new(0.05, 0.0)).norm() < 1e-16);
        let eq = p3(Family::P3ii, Param::int(1), Param::int(0));
        let t = table_for(&eq, 0, 4, Backend::Exact).unwrap();
        let (u, _) = evaluate(&t, TrackedPoint::new(8.0, 0.0), 0);
        assert!((u - C64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn backends_agree() {
        let eq = p3(Family::P3i, Param::int(1), Param::int(2));
        let e = table_for(&eq, 1, 25, Backend::Exact).unwrap().as_complex::<Dd>().0;
        let f = table_for(&eq, 1, 25, Backend::F64).unwrap().a_c64();
        for (x, y) in e.iter().zip(&f) {
            let x = C64::new(x.re.f64(), x.im.f64());
            assert!((x - y).norm() <= 1e-12 * x.norm().max(1.0));
        }
    }
}
