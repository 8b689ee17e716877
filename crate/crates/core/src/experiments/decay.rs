use num_complex::Complex;
use serde::Serialize;

use super::{least_squares, linspace, ExpOptions, Seeder};
use crate::error::{Error, Result};
use crate::integrate::Path;
use crate::scalar::{cabs, Dd, Real, CDD};

/// Which component receives the perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturb {
    U,
    #[serde(rename = "U_big")]
    BigU,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub branch: String,
    pub theta: f64,
    pub eps: f64,
    pub component: Perturb,
    pub decaying_eigenvalue: Complex<f64>,
    pub radii: Vec<f64>,
    pub log_delta: Vec<f64>,
    /// first sample used in the fit
    pub fit_start: usize,
    pub reference_radius: f64,
    /// `Re(lambda dphi/dr)` at the reference radius
    pub predicted_rate: f64,
    pub measured_rate: f64,
    pub relative_deviation: f64,
    /// fitted coefficients of `log|du| = c + mu Re(lambda phi) + d log r`
    pub offset: f64,
    pub mu: f64,
    pub power: f64,
    pub escaped: bool,
}

/// Measure the rate of the free exponential mode of the tronquee family on
/// the ray `theta`.
///
/// The base solution and a copy with `eps * |u|` added to one component are
/// both integrated inward from `r0`; along that direction the free mode
/// grows while the other one dies out, so `log|du|` follows
/// `Re(lambda phi(x))` up to an algebraic prefactor, which is fitted freely.
/// The run stops once the mode has grown by `amplification`.
pub fn perturbation_decay(
    seeder: &Seeder,
    theta: f64,
    r0: f64,
    eps: f64,
    component: Perturb,
    amplification: f64,
    expect_growth: bool,
    opts: &ExpOptions,
) -> Result<DecayReport> {
    if !(eps > 0.0) || !(amplification > 1.0) {
        return Err(Error::Invalid("eps must be positive and the amplification above 1".into()));
    }
    let lam = seeder
        .decaying_eigenvalue(r0, theta)
        .ok_or_else(|| Error::Invalid("branch has no exponential modes".into()))?;
    let e0 = seeder.mode_exponent(r0, theta).unwrap();
    let rate0 = seeder.mode_rate(r0, theta);
    if !(rate0 < 0.0) {
        return Err(Error::Invalid("no decaying mode on this ray".into()));
    }
    // inner radius where the mode has grown by the amplification budget
    let budget = amplification.ln();
    let (mut lo, mut hi) = (0.0f64, r0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if seeder.mode_exponent(mid, theta).unwrap() - e0 > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_end = hi.max(1e-3 * r0);
    let radii: Vec<f64> = linspace(r0, r_end, 81);
    let seed = seeder.seed(r0, theta, usize::MAX);
    let base = seed.y;
    let mut pert = base;
    let idx = if component == Perturb::U { 0 } else { 1 };
    let size = cabs(base[0]).f64().max(1e-300) * eps;
    pert[idx] = pert[idx] + Complex::new(Dd::from(size), Dd::ZERO);

    let path = Path::ray_with_stops(theta, r0, r_end, &radii[1..radii.len() - 1])?;
    let (ta, tb) = rayon::join(|| seeder.run(&path, base, opts), || seeder.run(&path, pert, opts));
    let (ta, tb) = (ta?, tb?);
    let n = ta.segment_ends.len().min(tb.segment_ends.len());
    let mut log_delta = vec![(size).ln()];
    let mut escaped = !(ta.completed() && tb.completed());
    for j in 0..n {
        let (ya, yb): ([CDD; 2], [CDD; 2]) = (ta.segment_ends[j], tb.segment_ends[j]);
        let d = cabs(ya[0] - yb[0]).f64();
        if d > 1e-2 * cabs(ya[0]).f64() {
            escaped = true;
            break;
        }
        log_delta.push(d.max(1e-300).ln());
    }
    if escaped && !expect_growth {
        return Err(Error::PerturbationEscaped { radius: radii[log_delta.len().min(radii.len() - 1)] });
    }
    let used = log_delta.len();
    let radii_used = radii[..used].to_vec();
    // skip the stretch where the other mode is still dying out
    let fit_start = radii_used
        .iter()
        .position(|r| seeder.mode_exponent(*r, theta).unwrap() - e0 > 0.3 * budget)
        .unwrap_or(0);
    if used < fit_start + 6 {
        return Err(Error::InsufficientSamples { needed: fit_start + 6, got: used });
    }
    let rs = &radii_used[fit_start..];
    let phi: Vec<f64> = rs.iter().map(|r| seeder.mode_exponent(*r, theta).unwrap()).collect();
    let logr: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let (coef, _) = least_squares(&[vec![1.0; rs.len()], phi, logr], &log_delta[fit_start..])
        .ok_or_else(|| Error::Invalid("degenerate fit".into()))?;
    let r_ref = 0.5 * (rs[0] + rs[rs.len() - 1]);
    let predicted = seeder.mode_rate(r_ref, theta);
    let measured = coef[1] * predicted;
    Ok(DecayReport {
        branch: seeder.branch.label(),
        theta,
        eps,
        component,
        decaying_eigenvalue: lam,
        radii: radii_used,
        log_delta,
        fit_start,
        reference_radius: r_ref,
        predicted_rate: predicted,
        measured_rate: measured,
        relative_deviation: (coef[1] - 1.0).abs(),
        offset: coef[0],
        mu: coef[1],
        power: coef[2],
        escaped,
    })
}
