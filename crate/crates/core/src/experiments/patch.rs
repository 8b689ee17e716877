use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::{c64, linspace, ExpOptions, Seeder};
use crate::error::{Error, Result};
use crate::integrate::{concat, make_arc, Path, PoleEvent, Status};
use crate::model::{Sector, TrackedPoint};
use crate::scalar::{Dd, CDD};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rays {
    /// evenly spaced over the sector minus the margins
    Count(usize),
    Angles(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub rays: Rays,
    pub radii: Vec<f64>,
}

impl GridSpec {
    /// `n_rays` rays and `n_radii` radii from `r_inner` up to the anchor radius.
    pub fn inward(n_rays: usize, r_inner: f64, r0: f64, n_radii: usize) -> Self {
        GridSpec { rays: Rays::Count(n_rays), radii: linspace(r_inner, r0, n_radii) }
    }
}

/// Seeding choices beyond the defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Anchor {
    /// anchor argument; the sector bisector when absent
    pub theta: Option<f64>,
    /// relative change applied to the seeded u
    pub detuning: f64,
    /// angular allowance beyond the sector edges for grid rays
    pub widen: f64,
    /// keep the requested radius even if the seed error target is missed
    pub fixed_radius: bool,
}

impl Default for Anchor {
    fn default() -> Self {
        Anchor { theta: None, detuning: 0.0, widen: 0.0, fixed_radius: false }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridPoint {
    pub ray: usize,
    pub r: f64,
    pub theta: f64,
    pub u: Option<Complex<f64>>,
    #[serde(rename = "U")]
    pub w: Option<Complex<f64>>,
    #[serde(skip)]
    pub(crate) exact: Option<[CDD; 2]>,
}

impl GridPoint {
    pub fn point(&self) -> TrackedPoint {
        TrackedPoint::new(self.r, self.theta)
    }

    /// Value in working precision.
    pub fn value(&self) -> Option<[CDD; 2]> {
        self.exact
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleRecord {
    /// index into the ray list, or `None` on the shared arc
    pub ray: Option<usize>,
    pub theta: f64,
    pub event: PoleEvent,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionPatch {
    pub branch: String,
    pub params: Vec<(String, [String; 2])>,
    pub sector: Sector,
    pub widen: f64,
    pub anchor: TrackedPoint,
    pub requested_radius: f64,
    pub n_seed: usize,
    pub seed_error: f64,
    pub detuning: f64,
    pub rays: Vec<f64>,
    pub grid: Vec<GridPoint>,
    pub pole_free: bool,
    pub poles: Vec<PoleRecord>,
    /// rays abandoned on a tolerance failure
    pub incomplete: Vec<usize>,
}

impl SolutionPatch {
    pub fn on_ray(&self, ray: usize) -> impl Iterator<Item = &GridPoint> {
        self.grid.iter().filter(move |g| g.ray == ray)
    }

    pub fn in_sector(&self, p: TrackedPoint) -> bool {
        p.r > self.sector.r_min
            && self.sector.theta_lo() - self.widen < p.theta
            && p.theta < self.sector.theta_hi() + self.widen
    }
}

fn cdd_mul(z: CDD, f: f64) -> CDD {
    Complex::new(z.re * Dd::from(f), z.im * Dd::from(f))
}

/// Arc through the stops in travel order; returns the state at each stop.
fn arc_pass(
    seeder: &Seeder,
    r0: f64,
    from: f64,
    stops: &[f64],
    init: [CDD; 2],
    opts: &ExpOptions,
) -> Result<(Vec<[CDD; 2]>, Option<PoleEvent>, bool)> {
    let mut pts = vec![from];
    pts.extend_from_slice(stops);
    let pieces: Vec<Path> = pts.windows(2).map(|w| make_arc(r0, w[0], w[1])).collect::<Result<_>>()?;
    if pieces.is_empty() {
        return Ok((vec![], None, false));
    }
    let path = concat(&pieces)?;
    let traj = seeder.run(&path, init, opts)?;
    let failed = matches!(traj.status, Status::ToleranceFailure { .. });
    Ok((traj.segment_ends.clone(), traj.pole().cloned(), failed))
}

/// Build a tronquee patch: seed at the anchor, integrate along the arc
/// `|x| = R0` to each grid ray, then radially through the grid radii.
pub fn build_tronquee(
    seeder: &Seeder,
    sector: &Sector,
    r0: f64,
    n: usize,
    grid: &GridSpec,
    anchor: &Anchor,
    opts: &ExpOptions,
) -> Result<SolutionPatch> {
    if !(r0 > sector.r_min) || !r0.is_finite() {
        return Err(Error::Invalid(format!("anchor radius {r0} must exceed the sector radius {}", sector.r_min)));
    }
    if n > seeder.order() {
        return Err(Error::Invalid(format!("N = {n} exceeds the table order {}", seeder.order())));
    }
    if grid.radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::Invalid("grid radii must be positive".into()));
    }
    let theta_a = anchor.theta.unwrap_or_else(|| sector.bisector());
    let inside = |th: f64| sector.theta_lo() - anchor.widen < th && th < sector.theta_hi() + anchor.widen;
    if !inside(theta_a) {
        return Err(Error::SeedOutsideSector);
    }

    // push the anchor outward until the first omitted term is small enough
    let mut r_seed = r0;
    let mut seed = seeder.seed(r_seed, theta_a, n);
    if !anchor.fixed_radius {
        let mut tries = 0;
        while seed.err_estimate >= opts.seed_target && tries < 12 {
            r_seed *= 1.25;
            seed = seeder.seed(r_seed, theta_a, n);
            tries += 1;
        }
    }
    let mut init = seed.y;
    if anchor.detuning != 0.0 {
        init[0] = cdd_mul(init[0], 1.0 + anchor.detuning);
    }

    let rays: Vec<f64> = match &grid.rays {
        Rays::Count(k) => {
            let (lo, hi) = sector.interior_range(opts.margin);
            linspace(lo - anchor.widen, hi + anchor.widen, *k)
        }
        Rays::Angles(v) => v.clone(),
    };
    if let Some(t) = rays.iter().find(|t| !inside(**t)) {
        return Err(Error::Invalid(format!("grid ray {t} lies outside the sector")));
    }

    // shared arc pass in both directions from the anchor
    let mut order: Vec<usize> = (0..rays.len()).collect();
    order.sort_by(|a, b| rays[*a].partial_cmp(&rays[*b]).unwrap());
    let up: Vec<usize> = order.iter().copied().filter(|i| rays[*i] > theta_a).collect();
    let down: Vec<usize> = order.iter().rev().copied().filter(|i| rays[*i] < theta_a).collect();
    let mut start: Vec<Option<[CDD; 2]>> = vec![None; rays.len()];
    let mut poles = vec![];
    let mut incomplete = vec![];
    for i in order.iter().filter(|i| rays[**i] == theta_a) {
        start[*i] = Some(init);
    }
    for side in [&up, &down] {
        let stops: Vec<f64> = side.iter().map(|i| rays[*i]).collect();
        let (ends, pole, failed) = arc_pass(seeder, r_seed, theta_a, &stops, init, opts)?;
        for (j, i) in side.iter().enumerate() {
            match ends.get(j) {
                Some(y) => start[*i] = Some(*y),
                None if failed => incomplete.push(*i),
                None => {}
            }
        }
        if let Some(p) = pole {
            poles.push(PoleRecord { ray: None, theta: p.x_pole_estimate.arg(), event: p });
        }
    }

    // radial passes, inward and outward from the arc
    let results: Vec<Result<(Vec<GridPoint>, Option<PoleRecord>, bool)>> = rays
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| radial(seeder, i, theta, r_seed, start[i], &grid.radii, opts))
        .collect();
    let mut points = vec![];
    for res in results {
        let (pts, pole, failed) = res?;
        if let Some(p) = pole {
            poles.push(p);
        }
        if failed {
            incomplete.push(pts[0].ray);
        }
        points.extend(pts);
    }
    incomplete.sort();
    incomplete.dedup();

    Ok(SolutionPatch {
        branch: seeder.branch.label(),
        params: seeder.eq.free_params().iter().map(|(k, v)| (k.to_string(), v.export_strings())).collect(),
        sector: sector.clone(),
        widen: anchor.widen,
        anchor: TrackedPoint::new(r_seed, theta_a),
        requested_radius: r0,
        n_seed: seed.n_used,
        seed_error: seed.err_estimate,
        detuning: anchor.detuning,
        rays,
        grid: points,
        pole_free: poles.is_empty(),
        poles,
        incomplete,
    })
}

fn radial(
    seeder: &Seeder,
    ray: usize,
    theta: f64,
    r0: f64,
    start: Option<[CDD; 2]>,
    radii: &[f64],
    opts: &ExpOptions,
) -> Result<(Vec<GridPoint>, Option<PoleRecord>, bool)> {
    let mut inward: Vec<f64> = radii.iter().copied().filter(|r| *r < r0).collect();
    inward.sort_by(|a, b| b.partial_cmp(a).unwrap());
    inward.dedup();
    let mut outward: Vec<f64> = radii.iter().copied().filter(|r| *r > r0).collect();
    outward.sort_by(|a, b| a.partial_cmp(b).unwrap());
    outward.dedup();
    let mut values: Vec<(f64, Option<[CDD; 2]>)> = vec![];
    let mut pole = None;
    let mut failed = false;
    if radii.contains(&r0) {
        values.push((r0, start));
    }
    if let Some(y0) = start {
        for side in [&inward, &outward] {
            if side.is_empty() {
                continue;
            }
            let path = Path::ray_with_stops(theta, r0, *side.last().unwrap(), &side[..side.len() - 1])?;
            let traj = seeder.run(&path, y0, opts)?;
            for (j, r) in side.iter().enumerate() {
                values.push((*r, traj.segment_ends.get(j).copied()));
            }
            if let Some(p) = traj.pole() {
                pole = Some(PoleRecord { ray: Some(ray), theta, event: *p });
            }
            failed |= matches!(traj.status, Status::ToleranceFailure { .. });
        }
    } else {
        values.extend(inward.iter().chain(&outward).map(|r| (*r, None)));
    }
    values.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let pts = values
        .into_iter()
        .map(|(r, y)| GridPoint { ray, r, theta, u: y.map(|v| c64(v[0])), w: y.map(|v| c64(v[1])), exact: y })
        .collect::<Vec<_>>();
    let pts = if pts.is_empty() {
        vec![GridPoint { ray, r: r0, theta, u: start.map(|v| c64(v[0])), w: start.map(|v| c64(v[1])), exact: start }]
    } else {
        pts
    };
    Ok((pts, pole, failed))
}
