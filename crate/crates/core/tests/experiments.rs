use tronquee::experiments::{build_tronquee, validate_asymptotics, Anchor, ExpOptions, GridSpec, Rays, Seeder};
use tronquee::model::SectorKind;
use tronquee::scalar::to_c64;
use tronquee::{make_equation, sector, EquationSpec, Family, Param, RawParams};

fn p3i() -> EquationSpec {
    make_equation(Family::P3i, RawParams::p3(Param::ratio(1, 3), Param::ratio(-2, 5))).unwrap()
}

fn grid(rays: Vec<f64>) -> GridSpec {
    GridSpec { rays: Rays::Angles(rays), radii: vec![10.0, 12.5, 15.0, 17.5, 20.0] }
}

#[test]
fn patches_are_deterministic_and_ray_order_free() {
    let o = ExpOptions::default();
    let eq = p3i();
    let seeder = Seeder::new(&eq, 0, o.table_order).unwrap();
    let s = sector(&eq, 0, 0, SectorKind::Existence, 0.0).unwrap();
    let rays = vec![-0.9, -0.3, 0.4, 1.0];
    let a = build_tronquee(&seeder, &s, 20.0, 20, &grid(rays.clone()), &Anchor::default(), &o).unwrap();
    let b = build_tronquee(&seeder, &s, 20.0, 20, &grid(rays.clone()), &Anchor::default(), &o).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.pole_free && a.incomplete.is_empty());

    let rev: Vec<f64> = rays.iter().rev().copied().collect();
    let c = build_tronquee(&seeder, &s, 20.0, 20, &grid(rev), &Anchor::default(), &o).unwrap();
    let mut checked = 0;
    for p in &a.grid {
        let q = c.grid.iter().find(|q| q.theta == p.theta && q.r == p.r).expect("same grid point");
        let (y, z) = (p.value().unwrap(), q.value().unwrap());
        for i in 0..2 {
            let d = to_c64(y[i] - z[i]).norm();
            assert!(d <= 10.0 * o.tol * (1.0 + to_c64(y[i]).norm()), "theta {} r {}: {d:e}", p.theta, p.r);
        }
        checked += 1;
    }
    assert_eq!(checked, rays.len() * 5);
}

#[test]
fn fitted_slope_drops_by_one_step_per_extra_term() {
    let o = ExpOptions::default();
    let eq = make_equation(Family::P4, RawParams::p4(Param::ratio(1, 3), Param::ratio(1, 5))).unwrap();
    let seeder = Seeder::new(&eq, 1, o.table_order).unwrap();
    let radii: Vec<f64> = (0..6).map(|i| 6.0 + i as f64).collect();
    let theta = std::f64::consts::FRAC_PI_4;
    let slopes: Vec<f64> =
        (3..=4).map(|n| validate_asymptotics(&seeder, theta, &radii, n, &o).unwrap().slope).collect();
    let step = seeder.branch.step_f64();
    assert!((slopes[1] - slopes[0] + step).abs() < 0.3 * step, "{slopes:?}");
}

#[test]
fn bad_inputs_are_rejected() {
    let o = ExpOptions::default();
    let eq = p3i();
    let seeder = Seeder::new(&eq, 0, 20).unwrap();
    let s = sector(&eq, 0, 0, SectorKind::Existence, 5.0).unwrap();
    let g = grid(vec![0.0]);
    assert!(build_tronquee(&seeder, &s, 4.0, 10, &g, &Anchor::default(), &o).is_err());
    assert!(build_tronquee(&seeder, &s, 20.0, 30, &g, &Anchor::default(), &o).is_err());
    assert!(build_tronquee(&seeder, &s, 20.0, 10, &grid(vec![2.0]), &Anchor::default(), &o).is_err());
    let outside = Anchor { theta: Some(3.0), ..Anchor::default() };
    assert!(build_tronquee(&seeder, &s, 20.0, 10, &g, &outside, &o).is_err());
}
