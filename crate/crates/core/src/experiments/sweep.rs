use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::{linspace, ExpOptions, Seeder};
use crate::error::{Error, Result};
use crate::integrate::make_arc;
use crate::model::Family;
use crate::scalar::{cabs, Real};

#[derive(Debug, Clone, Serialize)]
pub struct Checkpoint {
    pub theta: f64,
    pub u: Complex<f64>,
    pub series: Complex<f64>,
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub branch: String,
    pub radius: f64,
    pub cut: f64,
    pub span: (f64, f64),
    pub nodes: usize,
    pub n: usize,
    pub pole_free: bool,
    /// poles met on any piece, by node index
    pub poles: Vec<(usize, Complex<f64>)>,
    /// largest relative jump between a piece's end and the next seed
    pub max_join_mismatch: f64,
    pub checkpoints: Vec<Checkpoint>,
    pub max_relative_deviation: f64,
}

/// Traverse the arc `|x| = radius` over tracked arguments
/// `(cut + margin, cut + 3 pi - margin)` for a P3ii branch.
///
/// The arc is split at `nodes` points; each piece starts from the optimally
/// truncated series and is integrated to the next node, so the recessive
/// modes never grow by more than a modest factor. Pieces run concurrently.
pub fn tritronquee_sweep_p3ii(
    seeder: &Seeder,
    cut: f64,
    radius: f64,
    n: usize,
    nodes: usize,
    margin: f64,
    checkpoints: usize,
    opts: &ExpOptions,
) -> Result<SweepReport> {
    if seeder.eq.family() != Family::P3ii {
        return Err(Error::UnsupportedFamily(seeder.eq.family().name()));
    }
    if !(radius > 0.0) || nodes < 2 || checkpoints < 1 || checkpoints > nodes {
        return Err(Error::Invalid("need a positive radius and at least as many nodes as checkpoints".into()));
    }
    let lo = cut + margin;
    let hi = cut + 3.0 * std::f64::consts::PI - margin;
    let thetas = linspace(lo, hi, nodes + 1);
    let pieces: Vec<Result<_>> = (0..nodes)
        .into_par_iter()
        .map(|j| {
            let seed = seeder.seed(radius, thetas[j], usize::MAX);
            let traj = seeder.run(&make_arc(radius, thetas[j], thetas[j + 1])?, seed.y, opts)?;
            Ok((traj.completed(), traj.last, traj.pole().map(|p| p.x_pole_estimate)))
        })
        .collect();
    let pieces = pieces.into_iter().collect::<Result<Vec<_>>>()?;
    let mut poles = vec![];
    let mut max_join = 0.0f64;
    for (j, (done, y, pole)) in pieces.iter().enumerate() {
        if let Some(p) = pole {
            poles.push((j, *p));
        }
        if *done && j + 1 < nodes {
            let next = seeder.seed(radius, thetas[j + 1], usize::MAX).y;
            max_join = max_join.max(cabs(y[0] - next[0]).f64() / cabs(next[0]).f64());
        }
    }
    let pole_free = poles.is_empty() && pieces.iter().all(|p| p.0);
    let stride = nodes / checkpoints;
    let mut cps = vec![];
    for c in 0..checkpoints {
        let j = nodes - 1 - c * stride;
        let (done, y, _) = &pieces[j];
        let theta = thetas[j + 1];
        let s = seeder.eval(radius, theta, n)[0];
        let dev = if *done { cabs(y[0] - s).f64() / cabs(y[0]).f64() } else { f64::INFINITY };
        cps.push(Checkpoint { theta, u: super::c64(y[0]), series: super::c64(s), relative_deviation: dev });
    }
    cps.reverse();
    let max_dev = cps.iter().map(|c| c.relative_deviation).fold(0.0, f64::max);
    Ok(SweepReport {
        branch: seeder.branch.label(),
        radius,
        cut,
        span: (lo, hi),
        nodes,
        n,
        pole_free,
        poles,
        max_join_mismatch: max_join,
        checkpoints: cps,
        max_relative_deviation: max_dev,
    })
}
