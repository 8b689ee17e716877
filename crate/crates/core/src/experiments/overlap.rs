use serde::Serialize;

use super::patch::{Anchor, Rays};
use super::{build_tronquee, linspace, ExpOptions, GridSpec, Seeder};
use crate::error::{Error, Result};
use crate::model::{sector, SectorKind};
use crate::scalar::{cabs, Real};

#[derive(Debug, Clone, Serialize)]
pub struct OverlapReport {
    pub branch: String,
    pub k: i32,
    /// angular interval shared by the two widened sectors
    pub overlap: (f64, f64),
    pub anchors: (f64, f64),
    pub anchor_radius: f64,
    pub probe_theta: f64,
    pub probe_radii: Vec<f64>,
    /// `|du|` at each probe radius
    pub differences: Vec<f64>,
    pub max_difference: f64,
    /// `max |du| / exp(Re(lambda phi))` over the probes
    pub fitted_c: f64,
    /// largest series term left out by the N-th partial sum at the probe
    /// radius, with the leading power restored
    pub neglected_term: f64,
    pub separation: f64,
    pub both_pole_free: bool,
}

/// Build tronquee patches for sectors `k` and `k + 1` and compare them on a
/// ray inside both widened sectors.
///
/// Each patch is anchored `offset` radians from the probe ray on its own
/// side, so the recessive mode grows only modestly along the connecting
/// arcs.
#[allow(clippy::too_many_arguments)]
pub fn overlap_agreement(
    seeder: &Seeder,
    k: i32,
    n: usize,
    r_probe: f64,
    r0: f64,
    widen: f64,
    offset: f64,
    probe_theta: Option<f64>,
    opts: &ExpOptions,
) -> Result<OverlapReport> {
    let eq = &seeder.eq;
    let m = seeder.branch.m;
    let s1 = sector(eq, m, k, SectorKind::Existence, 0.0)?;
    let s2 = sector(eq, m, k + 1, SectorKind::Existence, 0.0).map_err(|_| Error::NoOverlap)?;
    let lo = s1.theta_lo().max(s2.theta_lo()) - widen;
    let hi = s1.theta_hi().min(s2.theta_hi()) + widen;
    if !(lo < hi) {
        return Err(Error::NoOverlap);
    }
    let theta = probe_theta.unwrap_or(0.5 * (lo + hi));
    if !(lo < theta && theta < hi) {
        return Err(Error::NoOverlap);
    }
    if !(r_probe < r0) {
        return Err(Error::Invalid("probe radius must lie inside the anchor radius".into()));
    }
    let toward = |b: f64| {
        let d = b - theta;
        theta + d.signum() * offset.min(d.abs())
    };
    let (a1, a2) = (toward(s1.bisector()), toward(s2.bisector()));
    let probes = linspace(r_probe, r_probe + 0.5 * (r0 - r_probe), 6);
    let grid = GridSpec { rays: Rays::Angles(vec![theta]), radii: probes.clone() };
    let build = |sec, a| {
        let anchor = Anchor { theta: Some(a), widen, fixed_radius: true, ..Default::default() };
        build_tronquee(seeder, sec, r0, seeder.order(), &grid, &anchor, opts)
    };
    let (p1, p2) = rayon::join(|| build(&s1, a1), || build(&s2, a2));
    let (p1, p2) = (p1?, p2?);
    let mut differences = vec![];
    for (g1, g2) in p1.grid.iter().zip(&p2.grid) {
        match (g1.value(), g2.value()) {
            (Some(y1), Some(y2)) => differences.push(cabs(y1[0] - y2[0]).f64()),
            _ => differences.push(f64::INFINITY),
        }
    }
    let max_difference = differences.iter().copied().fold(0.0, f64::max);
    let fitted_c = probes
        .iter()
        .zip(&differences)
        .map(|(r, d)| d / seeder.mode_exponent(*r, theta).map_or(1.0, |e| e.exp()))
        .fold(0.0, f64::max);
    let scale = r_probe.powf(seeder.branch.p_u_f64());
    let neglected_term = (n + 1..=seeder.order()).map(|j| seeder.term(j, r_probe)).find(|t| *t > 0.0).unwrap_or(0.0) * scale;
    let separation = if max_difference > 0.0 { neglected_term / max_difference } else { f64::INFINITY };
    Ok(OverlapReport {
        branch: seeder.branch.label(),
        k,
        overlap: (lo, hi),
        anchors: (a1, a2),
        anchor_radius: r0,
        probe_theta: theta,
        probe_radii: probes,
        differences,
        max_difference,
        fitted_c,
        neglected_term,
        separation,
        both_pole_free: p1.pole_free && p2.pole_free,
    })
}

