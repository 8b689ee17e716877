use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use tronquee::model::SectorKind;
use tronquee::{branch, make_equation, p3ii_y_sector, sector, ExactScalar, Family, Param, RawParams, Sector, TrackedPoint};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| rat(n, d))
}

fn scalar() -> impl Strategy<Value = ExactScalar> {
    [small_rat(), small_rat(), small_rat(), small_rat()].prop_map(ExactScalar::from_basis)
}

fn gaussian() -> impl Strategy<Value = ExactScalar> {
    (small_rat(), small_rat()).prop_map(|(re, im)| ExactScalar::gaussian(re, im))
}

proptest! {
    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if let Some(inv) = a.inv() {
            prop_assert_eq!(&a * &inv, ExactScalar::one());
            prop_assert_eq!(&(&b * &a) / &a, b.clone());
        } else {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn conjugation_is_an_automorphism(a in scalar(), b in scalar()) {
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
        let z = a.to_complex64().conj();
        let w = a.conj().to_complex64();
        prop_assert!((z - w).norm() <= 1e-12 * (1.0 + z.norm()));
    }

    #[test]
    fn p4_beta_is_minus_twice_kappa0_squared(k0 in gaussian(), kinf in gaussian()) {
        let eq = make_equation(Family::P4, RawParams::p4(Param::Exact(k0.clone()), Param::Exact(kinf))).unwrap();
        let want = -(&(&k0 * &k0) * &ExactScalar::from_ratio(2, 1));
        prop_assert_eq!(eq.beta(), Param::Exact(want));
    }

    #[test]
    fn contains_is_monotone_in_r_min(
        lo in -40i64..40, width in 1i64..40, r_min in 0.0f64..50.0, extra in 0.0f64..20.0,
        r in 0.0f64..100.0, t in -20.0f64..20.0,
    ) {
        let s = Sector { lo_over_pi: (lo, 8), hi_over_pi: (lo + width, 8), r_min, kind: SectorKind::Existence };
        let tighter = Sector { r_min: r_min + extra, ..s.clone() };
        let x = TrackedPoint::new(r, t);
        prop_assert!(!tighter.contains(x) || s.contains(x));
    }

    #[test]
    fn contains_is_antitone_under_shrinking(
        lo in -40i64..40, width in 2i64..40, cut_lo in 0i64..20, cut_hi in 0i64..20,
        r in 0.0f64..100.0, t in -20.0f64..20.0,
    ) {
        prop_assume!(cut_lo + cut_hi < width);
        let s = Sector { lo_over_pi: (lo, 8), hi_over_pi: (lo + width, 8), r_min: 1.0, kind: SectorKind::Existence };
        let inner = Sector { lo_over_pi: (lo + cut_lo, 8), hi_over_pi: (lo + width - cut_hi, 8), ..s.clone() };
        prop_assert!(s.covers(&inner));
        let x = TrackedPoint::new(r, t);
        prop_assert!(!inner.contains(x) || s.contains(x));
    }
}

fn sample_equation(f: Family) -> tronquee::EquationSpec {
    let raw = match f {
        Family::P3i => RawParams::p3(Param::ratio(1, 3), Param::ratio(-2, 5)),
        Family::P3ii => RawParams::p3(Param::int(1), Param::ratio(1, 2)),
        Family::P4 => RawParams::p4(Param::ratio(1, 3), Param::ratio(1, 5)),
    };
    make_equation(f, raw).unwrap()
}

#[test]
fn uniqueness_sectors_contain_existence_sectors() {
    for f in Family::all() {
        let eq = sample_equation(f);
        for m in f.branch_range() {
            for k in f.sector_k_range() {
                let s = sector(&eq, m, k, SectorKind::Existence, 1.0).unwrap();
                let o = sector(&eq, m, k, SectorKind::Uniqueness, 1.0).unwrap();
                // P3ii is multivalued so inclusion is on the cover; the other
                // two families only need inclusion up to a turn
                let ok = if f == Family::P3ii { o.covers(&s) } else { o.covers_mod_2pi(&s) };
                assert!(ok, "{f} m={m} k={k}");
                if f == Family::P3ii {
                    let s = p3ii_y_sector(m, k, SectorKind::Existence, 1.0).unwrap();
                    let o = p3ii_y_sector(m, k, SectorKind::Uniqueness, 1.0).unwrap();
                    assert!(o.covers(&s), "y-plane m={m} k={k}");
                }
            }
        }
    }
}

#[test]
fn out_of_range_indices_are_rejected() {
    for f in Family::all() {
        let eq = sample_equation(f);
        let m_bad = *f.branch_range().end() + 1;
        assert!(branch(&eq, m_bad).is_err());
        let m = *f.branch_range().start();
        let k_bad = *f.sector_k_range().end() + 1;
        assert!(sector(&eq, m, k_bad, SectorKind::Existence, 1.0).is_err());
        assert!(sector(&eq, m, 0, SectorKind::Existence, -1.0).is_err());
    }
}

// leading coefficients checked through the algebraic relations they solve
#[test]
fn leading_coefficients_solve_their_balance() {
    let one = ExactScalar::one();
    let p3i = sample_equation(Family::P3i);
    for m in 0..=3 {
        let b = branch(&p3i, m).unwrap();
        let a0 = b.a0.exact().unwrap().clone();
        let big = b.big_a0.exact().unwrap().clone();
        assert_eq!(a0.pow(4), one);
        assert_eq!(&big + &(&a0 * &a0), ExactScalar::zero());
    }
    let p3ii = sample_equation(Family::P3ii);
    let mut seen = vec![];
    for m in 0..=2 {
        let b = branch(&p3ii, m).unwrap();
        let a0 = b.a0.exact().unwrap().clone();
        assert_eq!(a0.pow(3), one);
        assert_eq!(&a0 + b.big_a0.exact().unwrap(), ExactScalar::zero());
        assert!(!seen.contains(&a0));
        seen.push(a0);
    }
    let (k0, kinf) = (ExactScalar::from_ratio(1, 3), ExactScalar::from_ratio(1, 5));
    let p4 = sample_equation(Family::P4);
    let half = ExactScalar::from_ratio(1, 2);
    let want = [
        (ExactScalar::from_ratio(-2, 3), ExactScalar::from_ratio(1, 3)),
        (ExactScalar::from_ratio(-2, 1), -(&half * &kinf)),
        (k0.clone(), one.clone()),
        (-k0, &half * &kinf),
    ];
    for (m, (a, big)) in (1..=4).zip(want) {
        let b = branch(&p4, m).unwrap();
        assert_eq!(b.a0, Param::Exact(a), "case {m}");
        assert_eq!(b.big_a0, Param::Exact(big), "case {m}");
    }
}
