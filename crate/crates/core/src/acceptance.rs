//! The acceptance suite shared by the `acceptance` test target and the
//! `selftest` subcommand.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{jacobian_limit, pair_distance};
use crate::error::Result;
use crate::exact::ExactScalar;
use crate::experiments::{
    overlap_agreement, perturbation_decay, pole_scan, tritronquee_sweep_p3ii, validate_asymptotics, ExpOptions, GridSpec,
    Perturb, Rays, Seeder,
};
use crate::integrate::{integrate_with, make_ray, Options};
use crate::model::{branch, make_equation, sector, Branch, EquationSpec, Family, Param, RawParams, SectorKind};
use crate::scalar::{Dd, C64};
use crate::series::{compute_coefficients, residual_order_of_pair, Backend, ResidualOrder};

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2}: {} ({:.2} s of {} s) -- {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.budget_seconds,
            self.detail
        )
    }
}

/// Residual-order oracle supplied by the caller for cross-checking.
pub type Oracle<'a> = &'a (dyn Fn(&EquationSpec, &Branch, &[ExactScalar], &[ExactScalar]) -> ResidualOrder + Sync);

fn timed(id: u32, title: &'static str, budget: f64, f: impl FnOnce() -> Result<(bool, String)>) -> Criterion {
    let t = Instant::now();
    let (pass, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    let seconds = t.elapsed().as_secs_f64();
    Criterion { id, title, pass: pass && seconds < budget, detail, seconds, budget_seconds: budget }
}

fn p3(f: Family, a: Param, b: Param) -> Result<EquationSpec> {
    make_equation(f, RawParams::p3(a, b))
}

fn p4(k0: Param, kinf: Param) -> Result<EquationSpec> {
    make_equation(Family::P4, RawParams::p4(k0, kinf))
}

fn ex(p: &Param) -> ExactScalar {
    p.exact().cloned().expect("exact parameter")
}

/// One equation per family with every branch non-trivial.
fn representatives() -> Result<Vec<EquationSpec>> {
    Ok(vec![
        p3(Family::P3i, Param::ratio(1, 3), Param::ratio(-2, 5))?,
        p3(Family::P3ii, Param::int(1), Param::ratio(1, 2))?,
        p4(Param::ratio(1, 3), Param::ratio(1, 5))?,
    ])
}

/// 1: leading coefficients of all eleven branches.
pub fn criterion_1() -> Criterion {
    timed(1, "leading data (a0, A0) of all 11 branches", 1.0, || {
        let i = ExactScalar::i();
        let w = ExactScalar::omega();
        let w2 = &w * &w;
        let mut checked = 0;
        let mut bad = vec![];
        for eq in representatives()? {
            let (k0, kinf) = (eq.kappa0(), eq.kappa_inf());
            for m in eq.family().branch_range() {
                let (a0, big_a0) = match eq.family() {
                    Family::P3i => {
                        let a = [ExactScalar::one(), i.clone(), -ExactScalar::one(), -i.clone()][m as usize].clone();
                        let b = if m % 2 == 0 { -ExactScalar::one() } else { ExactScalar::one() };
                        (a, b)
                    }
                    Family::P3ii => {
                        let a = [ExactScalar::one(), w.clone(), w2.clone()][m as usize].clone();
                        (a.clone(), -a)
                    }
                    Family::P4 => {
                        let k0 = ex(k0.as_ref().unwrap());
                        let kinf = ex(kinf.as_ref().unwrap());
                        let half = ExactScalar::from_ratio(1, 2);
                        match m {
                            1 => (ExactScalar::from_ratio(-2, 3), ExactScalar::from_ratio(1, 3)),
                            2 => (ExactScalar::from_ratio(-2, 1), -(&half * &kinf)),
                            3 => (k0, ExactScalar::one()),
                            _ => (-k0, &half * &kinf),
                        }
                    }
                };
                let t = compute_coefficients(&eq, &branch(&eq, m)?, 0, Backend::Exact)?;
                let (a, b) = t.exact().unwrap();
                checked += 1;
                if a[0] != a0 || b[0] != big_a0 {
                    bad.push(t.branch.label());
                }
            }
        }
        Ok((checked == 11 && bad.is_empty(), format!("{checked} branches checked, mismatches {bad:?}")))
    })
}

fn random_rational(rng: &mut ChaCha8Rng) -> Param {
    Param::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=7))
}

/// 2: printed low-order P4 coefficients for 20 random rational pairs.
pub fn criterion_2(seed: u64) -> Criterion {
    timed(2, "printed low-order P4 coefficients, 20 random (k0, kinf)", 1.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fails = 0;
        let mut draws = 0;
        while draws < 20 {
            let (k0p, kip) = (random_rational(&mut rng), random_rational(&mut rng));
            let eq = p4(k0p.clone(), kip.clone())?;
            let (k0, ki) = (ex(&k0p), ex(&kip));
            if k0.is_zero() || ki.is_zero() {
                continue;
            }
            draws += 1;
            let half = ExactScalar::from_ratio(1, 2);
            let one = ExactScalar::one();
            let two = ExactScalar::from_ratio(2, 1);
            let alpha = &(&(&two * &ki) - &k0) + &one;
            let table = |m| compute_coefficients(&eq, &branch(&eq, m).unwrap(), 2, Backend::Exact);
            let (t1, t2, t3, t4) = (table(1)?, table(2)?, table(3)?, table(4)?);
            let e = |t: &crate::series::CoefficientTable| {
                let (a, b) = t.exact().unwrap();
                (a.to_vec(), b.to_vec())
            };
            let ((a1, b1), (a2, b2), (_, b3), (_, b4)) = (e(&t1), e(&t2), e(&t3), e(&t4));
            let checks = [
                a1[1] == alpha,
                b1[1] == &(&half - &k0) + &(&ki * &half),
                a2[1] == -alpha.clone(),
                b2[0] == -(&ki * &half),
                b3[1] == -(&half * &(&(&one - &(&two * &k0)) + &ki)),
                b4[0] == &ki * &half,
            ];
            fails += checks.iter().filter(|c| !**c).count();
        }
        Ok((fails == 0, format!("{draws} draws x 6 identities, {fails} failures")))
    })
}

fn random_gaussian(rng: &mut ChaCha8Rng) -> Param {
    let re = num_rational::BigRational::new(rng.gen_range(-6i64..=6).into(), rng.gen_range(1i64..=5).into());
    let im = num_rational::BigRational::new(rng.gen_range(-6i64..=6).into(), rng.gen_range(1i64..=5).into());
    Param::Exact(ExactScalar::gaussian(re, im))
}

/// Random Gaussian-rational equations, one per family per draw.
pub fn random_equations(seed: u64, draws: usize) -> Result<Vec<EquationSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![];
    for _ in 0..draws {
        out.push(p3(Family::P3i, random_gaussian(&mut rng), random_gaussian(&mut rng))?);
        out.push(p3(Family::P3ii, Param::int(1), random_gaussian(&mut rng))?);
        out.push(p4(random_gaussian(&mut rng), random_gaussian(&mut rng))?);
    }
    Ok(out)
}

/// 3: residual order of the N = 20 truncation, exact arithmetic.
pub fn criterion_3(seed: u64, oracle: Option<Oracle>) -> Criterion {
    use rayon::prelude::*;
    timed(3, "formal solutions: residual order >= 20 at N = 20, 20 random draws", 60.0, || {
        let eqs = random_equations(seed, 20)?;
        let jobs: Vec<(EquationSpec, u32)> =
            eqs.iter().flat_map(|e| e.family().branch_range().map(move |m| (e.clone(), m))).collect();
        let rows: Vec<Result<(bool, bool, bool)>> = jobs
            .par_iter()
            .map(|(eq, m)| {
                let b = branch(eq, *m)?;
                let t = compute_coefficients(eq, &b, 20, Backend::Exact)?;
                let (a, big_a) = t.exact().unwrap();
                let r = residual_order_of_pair(eq, &b, a, big_a)?;
                let agree = oracle.is_none_or(|o| o(eq, &b, a, big_a) == r);
                Ok((b.trivial, r.at_least(20), agree))
            })
            .collect();
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
        let active: Vec<_> = rows.iter().filter(|r| !r.0).collect();
        let low = active.iter().filter(|r| !r.1).count();
        let disagree = rows.iter().filter(|r| !r.2).count();
        let oracle_note = if oracle.is_some() { "oracle cross-checked" } else { "no oracle supplied" };
        Ok((
            low == 0 && disagree == 0 && !active.is_empty(),
            format!("{} tables, {low} below order 20, {disagree} oracle disagreements ({oracle_note})", active.len()),
        ))
    })
}

/// 4: eigenvalues of the limit Jacobians against the printed values.
pub fn criterion_4() -> Criterion {
    timed(4, "eigenvalue anchors of J, J1-J4", 1.0, || {
        let mut worst = 0.0f64;
        let mut all_nonzero = true;
        let mut n = 0;
        for eq in representatives()? {
            for m in eq.family().branch_range() {
                let b = branch(&eq, m)?;
                let j = jacobian_limit(&eq, &b)?;
                let mf = m as f64;
                let l = match eq.family() {
                    Family::P3i => C64::from_polar(2.0, -mf * FRAC_PI_2),
                    Family::P3ii => C64::from_polar(3.0 * 3f64.sqrt(), -2.0 * mf * PI / 3.0),
                    Family::P4 if m == 1 => C64::new(0.0, 2.0 * 3f64.sqrt() / 3.0),
                    Family::P4 => C64::new(2.0, 0.0),
                };
                worst = worst.max(pair_distance(j.eigenvalues, [l, -l]));
                all_nonzero &= j.eigenvalues.iter().all(|e| e.norm() > 1e-12);
                n += 1;
            }
        }
        Ok((n == 11 && worst <= 1e-12 && all_nonzero, format!("{n} matrices, max deviation {worst:.2e}")))
    })
}

fn c(z: C64) -> Complex<Dd> {
    crate::scalar::from_c64(z)
}

/// 5: exact solutions held by the integrator.
pub fn criterion_5() -> Criterion {
    timed(5, "exact-solution integration", 10.0, || {
        type Exact = fn(C64) -> (C64, C64);
        let cases: [(EquationSpec, f64, f64, f64, Exact, &str); 3] = [
            (p3(Family::P3i, Param::int(1), Param::int(-1))?, FRAC_PI_2, 40.0, 10.0, |x| (C64::new(1.0, 0.0), -1.0 - 2.0 / x), "u = 1"),
            (p4(Param::int(1), Param::int(0))?, FRAC_PI_4, 30.0, 5.0, |x| (-2.0 * x, C64::new(0.0, 0.0)), "u = -2x"),
            (p4(Param::ratio(1, 3), Param::ratio(-1, 3))?, 0.0, 5.0, 30.0, |x| (-2.0 * x / 3.0, x / 3.0), "u = -2x/3"),
        ];
        let mut pass = true;
        let mut parts = vec![];
        for (eq, theta, r0, r1, exact, name) in cases {
            let x0 = C64::from_polar(r0, theta);
            let (u0, w0) = exact(x0);
            let t = integrate_with::<Dd>(&eq, &make_ray(theta, r0, r1)?, [c(u0), c(w0)], &Options::precise::<Dd>())?;
            let err = t
                .samples
                .iter()
                .map(|s| {
                    let e = exact(s.x).0;
                    (s.u - e).norm() / e.norm()
                })
                .fold(0.0, f64::max);
            pass &= t.completed() && err <= 1e-8;
            parts.push(format!("{name}: {err:.1e}"));
        }
        Ok((pass, parts.join(", ")))
    })
}

/// Parameters used for the slope and decay criteria.
pub fn generic_cases() -> Result<Vec<(EquationSpec, u32, f64)>> {
    Ok(vec![
        (p3(Family::P3i, Param::int(-1), Param::ratio(1, 2))?, 0, 0.0),
        (p3(Family::P3ii, Param::int(1), Param::ratio(-5, 2))?, 0, 0.0),
        (p4(Param::ratio(1, 3), Param::ratio(1, 5))?, 1, FRAC_PI_4),
    ])
}

/// 6: log-error slopes against the next omitted term.
pub fn criterion_6() -> Criterion {
    timed(6, "asymptotic slopes for N_cmp = 3..6, radii 15..40", 120.0, || {
        let o = ExpOptions::default();
        let radii: Vec<f64> = (0..11).map(|i| 15.0 + 2.5 * i as f64).collect();
        let mut worst = 0.0f64;
        let mut parts = vec![];
        for (eq, m, theta) in generic_cases()? {
            let s = Seeder::new(&eq, m, o.table_order)?;
            let mut devs = vec![];
            for n in 3..=6 {
                let r = validate_asymptotics(&s, theta, &radii, n, &o)?;
                worst = worst.max(r.deviation.abs());
                devs.push(format!("{:+.2}", r.deviation));
            }
            parts.push(format!("{} [{}]", s.branch.label(), devs.join(" ")));
        }
        Ok((worst <= 0.3, format!("max |deviation| {worst:.3}; {}", parts.join("; "))))
    })
}

/// 7: decay rate of the free mode.
pub fn criterion_7() -> Criterion {
    timed(7, "perturbation decay rates", 60.0, || {
        let o = ExpOptions::default();
        let cases = generic_cases()?;
        let mut pass = true;
        let mut parts = vec![];
        for (idx, r0) in [(0usize, 30.0), (2, 10.0)] {
            let (eq, m, theta) = &cases[idx];
            let s = Seeder::new(eq, *m, o.table_order)?;
            let r = perturbation_decay(&s, *theta, r0, 1e-14, Perturb::U, 1e10, false, &o)?;
            pass &= r.relative_deviation <= 0.05;
            parts.push(format!(
                "{}: predicted {:.4}, measured {:.4} at |x| = {:.2}",
                s.branch.label(),
                r.predicted_rate,
                r.measured_rate,
                r.reference_radius
            ));
        }
        Ok((pass, parts.join("; ")))
    })
}

/// 8: adjacent-sector patches agree.
pub fn criterion_8() -> Criterion {
    timed(8, "overlap uniqueness at |x| = 20", 120.0, || {
        let o = ExpOptions::default();
        let eq = p3(Family::P3i, Param::int(1), Param::int(2))?;
        let s = Seeder::new(&eq, 0, o.table_order)?;
        let r = overlap_agreement(&s, 0, 10, 20.0, 40.0, 0.3, 0.25, None, &o)?;
        let floor: f64 = 1e-24;
        let pass = r.both_pole_free && r.max_difference <= floor.max(1e-10) && r.separation >= 1e3;
        Ok((
            pass,
            format!("max |du| {:.2e}, first neglected term {:.2e}, separation {:.1e}", r.max_difference, r.neglected_term, r.separation),
        ))
    })
}

/// 9: a detuned solution has a stable pole where the tronquee has none.
pub fn criterion_9() -> Criterion {
    timed(9, "tronquee vs detuned contrast", 60.0, || {
        let o = ExpOptions::default();
        let eq = p3(Family::P3i, Param::int(1), Param::int(2))?;
        let s = Seeder::new(&eq, 0, o.table_order)?;
        let sec = sector(&eq, 0, 0, SectorKind::Existence, 0.0)?;
        let grid = GridSpec { rays: Rays::Angles(vec![0.0]), radii: vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0] };
        let f = pole_scan(&s, &sec, 15.0, Some(0.0), 0.5, &grid, &o)?;
        let stable: Vec<String> = f.poles.iter().filter(|p| p.refinement_stable).map(|p| format!("{:.4}", p.x)).collect();
        Ok((f.contrast, format!("reference pole-free {}, stable poles {:?}", f.reference_pole_free, stable)))
    })
}

/// 10: the P3ii sweep.
pub fn criterion_10() -> Criterion {
    timed(10, "P3ii tritronquee sweep over 3 pi - 0.2 at |x| = 30", 120.0, || {
        let o = ExpOptions::default();
        let eq = p3(Family::P3ii, Param::int(1), Param::ratio(1, 2))?;
        let s = Seeder::new(&eq, 0, o.table_order)?;
        let r = tritronquee_sweep_p3ii(&s, -PI, 30.0, 6, 48, 0.1, 12, &o)?;
        Ok((
            r.pole_free && r.max_relative_deviation < 1e-3,
            format!("pole-free {}, max deviation {:.2e} at 12 checkpoints", r.pole_free, r.max_relative_deviation),
        ))
    })
}

/// All ten criteria in order.
pub fn run_all(seed: u64, oracle: Option<Oracle>) -> Vec<Criterion> {
    vec![
        criterion_1(),
        criterion_2(seed),
        criterion_3(seed, oracle),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ]
}
