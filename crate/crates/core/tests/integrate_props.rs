use num_complex::Complex;
use proptest::prelude::*;
use tronquee::dynamics::{d2u_from_system, rhs, scalar_residual};
use tronquee::integrate::{concat, integrate_with, make_arc, make_ray, Options, Path, Segment, Status};
use tronquee::scalar::{Dd, C64, CDD};
use tronquee::{make_equation, EquationSpec, Family, Param, RawParams};

fn p3i(alpha: Param, beta: Param) -> EquationSpec {
    make_equation(Family::P3i, RawParams::p3(alpha, beta)).unwrap()
}

fn p4(k0: Param, kinf: Param) -> EquationSpec {
    make_equation(Family::P4, RawParams::p4(k0, kinf)).unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

fn run(eq: &EquationSpec, path: &Path, y: [C64; 2], opts: &Options) -> tronquee::integrate::Trajectory {
    integrate_with::<f64>(eq, path, y, opts).unwrap()
}

fn dist(a: [C64; 2], b: [C64; 2]) -> f64 {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
}

#[test]
fn tighter_tolerance_shrinks_the_global_error_at_least_fourth_order() {
    // on the linear P4 solution every step is exact up to rounding
    let eq = p4(Param::int(1), Param::int(0));
    let path = make_ray(std::f64::consts::FRAC_PI_4, 1.0, 4.0).unwrap();
    let x0 = path.start().to_c64();
    let x1 = path.end_point();
    let exact = [-2.0 * x1, c(0.0, 0.0)];
    let errs: Vec<f64> = [1e-6, 1e-6 / 32.0]
        .iter()
        .map(|tol| dist(*run(&eq, &path, [-2.0 * x0, c(0.0, 0.0)], &Options::dopri(*tol)).segment_ends.last().unwrap(), exact))
        .collect();
    let floor = 1e-11 * (1.0 + exact[0].norm());
    assert!(errs[1] <= errs[0] / 16.0 || errs[1] < floor, "{errs:?}");

    // a trajectory with curvature, against a double-double reference
    let eq = p3i(Param::ratio(1, 3), Param::ratio(-2, 5));
    let path = make_ray(0.3, 1.0, 3.0).unwrap();
    let y0 = [c(0.8, 0.1), c(-0.9, 0.2)];
    let dd: [CDD; 2] = y0.map(|z| Complex::new(Dd::from(z.re), Dd::from(z.im)));
    let reference = integrate_with::<Dd>(&eq, &path, dd, &Options::taylor(1e-28, 30)).unwrap();
    assert!(reference.completed());
    let want = reference.segment_ends[0].map(tronquee::scalar::to_c64);
    let errs: Vec<f64> = [1e-6, 1e-6 / 32.0]
        .iter()
        .map(|tol| dist(run(&eq, &path, y0, &Options::dopri(*tol)).segment_ends[0], want))
        .collect();
    assert!(errs[1] <= errs[0] / 16.0 || errs[1] < 1e-13, "{errs:?}");
}

#[test]
fn pole_estimates_do_not_depend_on_the_threshold() {
    let eq = p4(Param::int(1), Param::int(0));
    let path = make_ray(0.0, 0.5, 6.0).unwrap();
    let est: Vec<C64> = [1e8, 1e10]
        .iter()
        .map(|b| {
            let t = run(&eq, &path, [c(1.0, 0.0), c(1.0, 0.0)], &Options { blowup: *b, ..Options::dopri(1e-12) });
            t.pole().expect("pole on this ray").x_pole_estimate
        })
        .collect();
    assert!((est[0] - est[1]).norm() < 1e-4 * est[1].norm(), "{est:?}");
}

#[test]
fn origin_is_refused_for_p3_but_not_p4() {
    let through = Path { segments: vec![Segment::Ray { theta: 0.0, r0: 0.0, r1: 1.0 }] };
    assert!(through.passes_origin());
    assert!(make_ray(0.0, 0.0, 1.0).is_err());
    let eq = p3i(Param::int(1), Param::int(-1));
    assert!(integrate_with::<f64>(&eq, &through, [c(1.0, 0.0), c(-3.0, 0.0)], &Options::dopri(1e-10)).is_err());
    // u = -2x through the origin
    let eq = p4(Param::int(1), Param::int(0));
    let t = run(&eq, &through, [c(0.0, 0.0), c(0.0, 0.0)], &Options::dopri(1e-10));
    assert_eq!(t.status, Status::Completed);
    assert!(dist(t.segment_ends[0], [c(-2.0, 0.0), c(0.0, 0.0)]) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reversed_path_returns_to_the_start(
        theta in -0.6f64..0.6, r0 in 6.0f64..10.0, len in 0.5f64..2.0, sweep in -0.3f64..0.3,
    ) {
        // start on the exact P3i solution u = 1 so the state stays O(1)
        let eq = p3i(Param::int(1), Param::int(-1));
        let path = concat(&[make_ray(theta, r0, r0 + len).unwrap(), make_arc(r0 + len, theta, theta + sweep).unwrap()]).unwrap();
        let x0 = path.start().to_c64();
        let y0 = [c(1.05, 0.0), -1.0 - 2.0 / x0];
        let tol = 1e-14;
        let opts = Options::taylor(tol, 20);
        let fwd = run(&eq, &path, y0, &opts);
        prop_assert!(fwd.completed());
        let back = run(&eq, &path.reversed(), *fwd.segment_ends.last().unwrap(), &opts);
        prop_assert!(back.completed());
        let d = dist(*back.segment_ends.last().unwrap(), y0);
        prop_assert!(d <= 10.0 * tol * (1.0 + y0[0].norm() + y0[1].norm()), "returned off by {}", d);
    }

    #[test]
    fn completed_trajectories_satisfy_the_scalar_equation(
        a in -1.0f64..1.0, b in -1.0f64..1.0, u0 in 0.5f64..1.5, w0 in -1.5f64..-0.5, theta in -0.5f64..0.5,
    ) {
        let eq = p3i(Param::Float(c(a, 0.0)), Param::Float(c(b, 0.0)));
        let path = make_ray(theta, 2.0, 3.0).unwrap();
        let tol = 1e-12;
        let t = run(&eq, &path, [c(u0, 0.1), c(w0, 0.0)], &Options::dopri(tol));
        prop_assume!(t.completed());
        for s in &t.samples {
            let (du, _) = rhs(&eq, &s.x, &s.u, &s.w).unwrap();
            let d2 = d2u_from_system(&eq, &s.x, &s.u, &s.w).unwrap();
            let res = scalar_residual(&eq, &s.x, &s.u, &du, &d2).unwrap();
            let scale = 1.0 + d2.norm() + du.norm() * du.norm() / s.u.norm() + s.u.norm().powi(3) + 1.0 / s.u.norm();
            prop_assert!(res.norm() <= 100.0 * tol * scale, "residual {} at {}", res.norm(), s.x);
        }
    }
}
