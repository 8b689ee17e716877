use num_complex::Complex;
use serde::Serialize;

use super::patch::Anchor;
use super::{build_tronquee, ExpOptions, GridSpec, Seeder, SolutionPatch};
use crate::error::Result;
use crate::model::Sector;

#[derive(Debug, Clone, Serialize)]
pub struct ScannedPole {
    pub ray: Option<usize>,
    pub x: Complex<f64>,
    pub fit_quality: f64,
    /// a pole within `1e-3 |x|` reappears with a tenth of the tolerance and a
    /// hundredfold blow-up threshold
    pub refinement_stable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleField {
    pub branch: String,
    pub detuning: f64,
    pub poles: Vec<ScannedPole>,
    /// the undetuned patch over the same grid
    pub reference_pole_free: bool,
    pub contrast: bool,
}

/// Integrate a detuned copy of the tronquee seed over `grid` and collect
/// its poles, next to the undetuned reference.
pub fn pole_scan(
    seeder: &Seeder,
    sector: &Sector,
    r0: f64,
    anchor_theta: Option<f64>,
    detuning: f64,
    grid: &GridSpec,
    opts: &ExpOptions,
) -> Result<PoleField> {
    let n = seeder.order();
    let anchor = Anchor { theta: anchor_theta, detuning, fixed_radius: true, ..Default::default() };
    let run = |o: &ExpOptions, a: &Anchor| build_tronquee(seeder, sector, r0, n, grid, a, o);
    let fine = ExpOptions { tol: opts.tol / 10.0, blowup: opts.blowup * 100.0, ..*opts };
    let reference = Anchor { detuning: 0.0, ..anchor };
    let (coarse, (refined, base)) =
        rayon::join(|| run(opts, &anchor), || rayon::join(|| run(&fine, &anchor), || run(opts, &reference)));
    let (coarse, refined, base): (SolutionPatch, SolutionPatch, SolutionPatch) = (coarse?, refined?, base?);
    let poles: Vec<ScannedPole> = coarse
        .poles
        .iter()
        .map(|p| {
            let x = p.event.x_pole_estimate;
            let stable = refined
                .poles
                .iter()
                .any(|q| q.ray == p.ray && (q.event.x_pole_estimate - x).norm() <= 1e-3 * x.norm().max(1.0));
            ScannedPole { ray: p.ray, x, fit_quality: p.event.fit_quality, refinement_stable: stable }
        })
        .collect();
    let contrast = base.pole_free && poles.iter().any(|p| p.refinement_stable);
    Ok(PoleField { branch: seeder.branch.label(), detuning, poles, reference_pole_free: base.pole_free, contrast })
}
