mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use tronquee::series::{compute_coefficients, evaluate, residual_order, table_for, Backend};
use tronquee::{branch, make_equation, EquationSpec, ExactScalar, Family, Param, RawParams, TrackedPoint};

use common::oracle_residual_order;

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn real() -> impl Strategy<Value = Param> {
    small_rat().prop_map(|r| Param::Exact(ExactScalar::from_rational(r)))
}

fn gaussian() -> impl Strategy<Value = Param> {
    (small_rat(), small_rat()).prop_map(|(re, im)| Param::Exact(ExactScalar::gaussian(re, im)))
}

fn equation(f: Family, p: Param, q: Param) -> EquationSpec {
    let raw = match f {
        Family::P3i => RawParams::p3(p, q),
        Family::P3ii => RawParams::p3(Param::int(1), q),
        Family::P4 => RawParams::p4(p, q),
    };
    make_equation(f, raw).unwrap()
}

fn exact_table(eq: &EquationSpec, m: u32, n: usize) -> (Vec<ExactScalar>, Vec<ExactScalar>) {
    let t = table_for(eq, m, n, Backend::Exact).unwrap();
    let (a, b) = t.exact().unwrap();
    (a.to_vec(), b.to_vec())
}

fn conj(v: &[ExactScalar]) -> Vec<ExactScalar> {
    v.iter().map(|c| c.conj()).collect()
}

const N: usize = 10;

/// Product of power series in `1/x`, truncated to the shorter length.
fn cauchy(a: &[ExactScalar], b: &[ExactScalar]) -> Vec<ExactScalar> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| (0..=k).fold(ExactScalar::zero(), |acc, i| &acc + &(&a[i] * &b[k - i])))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn recurrence_agrees_with_independent_substitution(
        fam in 0usize..3, p in gaussian(), q in gaussian(), pick in 0u32..4,
    ) {
        let f = Family::all()[fam];
        let eq = equation(f, p, q);
        let ms: Vec<u32> = f.branch_range().collect();
        let m = ms[pick as usize % ms.len()];
        let b = branch(&eq, m).unwrap();
        let (a, big) = exact_table(&eq, m, N);
        prop_assert!(residual_order(&eq, &b, N).unwrap().at_least(N as i64));
        prop_assert!(oracle_residual_order(&eq, &b, &a, &big).at_least(N as i64));
    }

    // u -> -u with (alpha, beta) -> (-alpha, -beta) maps solutions to
    // solutions; U then picks up the terms forced by its definition through h:
    // U2 = -U0 - 2/u0^2 - 2 beta/(x u0), i.e. u0^2 (U0 + U2) + 2 + 2 beta u0/x = 0
    #[test]
    fn p3i_branch_two_is_branch_zero_reflected(alpha in gaussian(), beta in gaussian()) {
        let eq = equation(Family::P3i, alpha.clone(), beta.clone());
        let flipped = equation(Family::P3i, alpha.neg(), beta.neg());
        let (a0, big0) = exact_table(&flipped, 0, N);
        let (a2, big2) = exact_table(&eq, 2, N);
        for (x, y) in a2.iter().zip(&a0) {
            prop_assert_eq!(x.clone(), -y.clone());
        }
        let sum: Vec<ExactScalar> = big0.iter().zip(&big2).map(|(x, y)| x + y).collect();
        let mut lhs = cauchy(&cauchy(&a0, &a0), &sum);
        let two_beta = &ExactScalar::from_ratio(2, 1) * beta.exact().unwrap();
        lhs[0] = &lhs[0] + &ExactScalar::from_ratio(2, 1);
        for n in 1..=N {
            lhs[n] = &lhs[n] + &(&two_beta * &a0[n - 1]);
        }
        prop_assert!(lhs.iter().all(|c| c.is_zero()), "{:?}", lhs);
    }

    #[test]
    fn conjugate_tables_solve_conjugate_branches(p in real(), q in real()) {
        for (f, pairs, real_branches) in [
            (Family::P3i, vec![(1u32, 3u32)], vec![0u32, 2]),
            (Family::P3ii, vec![(1, 2)], vec![0]),
            (Family::P4, vec![], vec![1, 2, 3, 4]),
        ] {
            let eq = equation(f, p.clone(), q.clone());
            for (m, m_bar) in pairs {
                let (a, big) = exact_table(&eq, m, N);
                let target = branch(&eq, m_bar).unwrap();
                prop_assert!(oracle_residual_order(&eq, &target, &conj(&a), &conj(&big)).at_least(N as i64));
                prop_assert_eq!(exact_table(&eq, m_bar, N), (conj(&a), conj(&big)));
            }
            for m in real_branches {
                let (a, big) = exact_table(&eq, m, N);
                prop_assert!(a.iter().chain(&big).all(|c| c.as_rational().is_some()), "{} m={}", f, m);
            }
        }
    }

    #[test]
    fn one_more_term_adds_exactly_that_term(r in 3.0f64..30.0, theta in -1.0f64..1.0, n in 0usize..12) {
        let eq = equation(Family::P3i, Param::ratio(1, 3), Param::ratio(-2, 5));
        let t = table_for(&eq, 0, 14, Backend::F64).unwrap();
        let x = TrackedPoint::new(r, theta);
        let (u0, w0) = evaluate(&t, x, n);
        let (u1, w1) = evaluate(&t, x, n + 1);
        let s = num_complex::Complex::from_polar(r.powi(-(n as i32 + 1)), -(n as f64 + 1.0) * theta);
        let a = t.a_c64();
        let b = t.big_a_c64();
        let tol = 1e-13 * (1.0 + u0.norm() + w0.norm());
        prop_assert!(((u1 - u0) - a[n + 1] * s).norm() <= tol);
        prop_assert!(((w1 - w0) - b[n + 1] * s).norm() <= tol);
    }
}

#[test]
fn backends_agree_on_a_generic_table() {
    let eq = equation(Family::P4, Param::ratio(1, 3), Param::ratio(1, 5));
    for m in 1..=4 {
        let b = branch(&eq, m).unwrap();
        let ex = compute_coefficients(&eq, &b, 30, Backend::Exact).unwrap();
        let dd = compute_coefficients(&eq, &b, 30, Backend::Dd).unwrap();
        for (x, y) in ex.a_c64().iter().zip(dd.a_c64()) {
            assert!((x - y).norm() <= 1e-12 * (1.0 + x.norm()), "case {m}");
        }
    }
}

#[test]
fn float_parameters_have_no_exact_backend() {
    let eq = make_equation(
        Family::P3i,
        RawParams::p3(Param::Float(num_complex::Complex::new(0.3, 0.1)), Param::int(1)),
    )
    .unwrap();
    let b = branch(&eq, 0).unwrap();
    assert!(compute_coefficients(&eq, &b, 5, Backend::Exact).is_err());
    assert!(compute_coefficients(&eq, &b, 5, Backend::F64).is_ok());
}
