use rayon::prelude::*;
use serde::Serialize;

use super::{ExpOptions, Seeder};
use crate::error::{Error, Result};
use crate::integrate::make_ray;
use crate::scalar::{cabs, Real};

/// Least squares for `y ~ X c` with a handful of columns, by normal
/// equations with partial pivoting. Returns the coefficients and the RMS
/// residual.
pub fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let k = cols.len();
    let n = y.len();
    if n < k || cols.iter().any(|c| c.len() != n) {
        return None;
    }
    let mut m = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            m[i][j] = (0..n).map(|t| cols[i][t] * cols[j][t]).sum();
        }
        m[i][k] = (0..n).map(|t| cols[i][t] * y[t]).sum();
    }
    for c in 0..k {
        let p = (c..k).max_by(|a, b| m[*a][c].abs().partial_cmp(&m[*b][c].abs()).unwrap())?;
        m.swap(c, p);
        if m[c][c].abs() < 1e-300 {
            return None;
        }
        for r in 0..k {
            if r != c {
                let f = m[r][c] / m[c][c];
                for j in c..=k {
                    m[r][j] -= f * m[c][j];
                }
            }
        }
    }
    let coef: Vec<f64> = (0..k).map(|i| m[i][k] / m[i][i]).collect();
    let rms = ((0..n)
        .map(|t| {
            let fit: f64 = (0..k).map(|i| coef[i] * cols[i][t]).sum();
            (y[t] - fit).powi(2)
        })
        .sum::<f64>()
        / n as f64)
        .sqrt();
    Some((coef, rms))
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub branch: String,
    pub theta: f64,
    pub n_cmp: usize,
    pub radii: Vec<f64>,
    /// natural log of `|u - S_N(x)| / |x|^{p_u}`
    pub log_errors: Vec<f64>,
    pub slope: f64,
    /// `-(n+1) step` for the first nonzero omitted coefficient `n+1`
    pub predicted_slope: f64,
    pub deviation: f64,
    pub residual: f64,
    /// every error sits at the working-precision floor (terminating series)
    pub floor_limited: bool,
    /// seeding offsets used per radius
    pub offsets: Vec<f64>,
}

/// Relative error floor of the double-double runs.
pub const FLOOR: f64 = 1e-26;

/// Compare the numerical tronquee solution with the `n_cmp` partial sum
/// along the ray `theta`.
///
/// Each radius gets its own seed from the optimally truncated series a
/// little further out, placed so the recessive mode grows by at most
/// `opts.growth` on the way in.
pub fn validate_asymptotics(seeder: &Seeder, theta: f64, radii: &[f64], n_cmp: usize, opts: &ExpOptions) -> Result<FitReport> {
    if radii.len() < 6 {
        return Err(Error::InsufficientSamples { needed: 6, got: radii.len() });
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::Invalid("radii must be positive and strictly increasing".into()));
    }
    if n_cmp >= seeder.order() {
        return Err(Error::Invalid(format!("N_cmp = {n_cmp} needs a longer table than {}", seeder.order())));
    }
    let p_u = seeder.branch.p_u_f64();
    let rows: Vec<Result<(f64, f64)>> = radii
        .par_iter()
        .map(|&r| {
            let l = seeder.reseed_offset(r, theta, opts.growth, 0.5 * r);
            let seed = seeder.seed(r + l, theta, usize::MAX);
            let traj = seeder.run(&make_ray(theta, r + l, r)?, seed.y, opts)?;
            if !traj.completed() {
                return Err(Error::Invalid(format!("integration to |x| = {r} did not complete")));
            }
            let u = traj.last[0];
            let s = seeder.eval(r, theta, n_cmp)[0];
            let err = cabs(u - s).f64() * r.powf(-p_u);
            Ok((err.max(1e-300).ln(), l))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let log_errors: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let offsets: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let logr: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let (coef, residual) = least_squares(&[vec![1.0; radii.len()], logr], &log_errors)
        .ok_or_else(|| Error::Invalid("degenerate fit".into()))?;
    let step = seeder.branch.step_f64();
    let a = seeder.table.a_c64();
    let next = (n_cmp + 1..a.len()).find(|k| a[*k].norm() != 0.0).unwrap_or(n_cmp + 1);
    let predicted = -(next as f64) * step;
    let floor_limited = log_errors.iter().all(|e| *e < FLOOR.ln() + 2.0);
    Ok(FitReport {
        branch: seeder.branch.label(),
        theta,
        n_cmp,
        radii: radii.to_vec(),
        log_errors,
        slope: coef[1],
        predicted_slope: predicted,
        deviation: coef[1] - predicted,
        residual,
        floor_limited,
        offsets,
    })
}

