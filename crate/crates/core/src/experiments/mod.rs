//! Numerical experiments on tronquee solutions: construction, asymptotic
//! validation, perturbation decay, overlap uniqueness, the P3ii sweep and
//! contrast pole scans.
//!
//! All experiments run in double-double with the Taylor integrator and seed
//! from the optimally truncated series.

mod decay;
mod fit;
mod overlap;
mod patch;
mod scan;
mod sweep;

pub use decay::{perturbation_decay, DecayReport, Perturb};
pub use fit::{least_squares, validate_asymptotics, FitReport};
pub use overlap::{overlap_agreement, OverlapReport};
pub use patch::{build_tronquee, Anchor, GridPoint, GridSpec, PoleRecord, Rays, SolutionPatch};
pub use scan::{pole_scan, PoleField, ScannedPole};
pub use sweep::{tritronquee_sweep_p3ii, Checkpoint, SweepReport};

use num_complex::Complex;
use serde::Serialize;

use crate::dynamics::{jacobian_limit, System};
use crate::error::Result;
use crate::integrate::{integrate_system, Options, Path, Trajectory};
use crate::model::{branch, Branch, EquationSpec};
use crate::scalar::{Dd, CDD};
use crate::series::{compute_coefficients, evaluate_in, optimal_truncation_pair, Backend, CoefficientTable};

/// Knobs shared by all experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpOptions {
    /// local error bound of the integrator
    pub tol: f64,
    /// Taylor order
    pub order: usize,
    /// pole threshold on |u|, |U|
    pub blowup: f64,
    /// order of the seeding table
    pub table_order: usize,
    /// radians removed from both sector edges in grids
    pub margin: f64,
    /// largest tolerated amplification of the recessive mode between a seed
    /// and the point it is used for
    pub growth: f64,
    /// seed error the builder aims for when choosing the anchor radius
    pub seed_target: f64,
}

impl Default for ExpOptions {
    fn default() -> Self {
        ExpOptions { tol: 1e-30, order: 30, blowup: 1e8, table_order: 60, margin: 0.05, growth: 20.0, seed_target: 1e-10 }
    }
}

impl ExpOptions {
    pub fn integrator(&self) -> Options {
        Options { blowup: self.blowup, ..Options::taylor(self.tol, self.order) }
    }
}

/// A branch with its seeding table in double-double.
#[derive(Debug, Clone)]
pub struct Seeder {
    pub eq: EquationSpec,
    pub branch: Branch,
    pub table: CoefficientTable,
    a: Vec<CDD>,
    b: Vec<CDD>,
    sys: System<CDD>,
}

/// A seed value with the truncation used.
#[derive(Debug, Clone, Copy)]
pub struct Seed {
    pub y: [CDD; 2],
    /// highest order summed
    pub n_used: usize,
    /// size of the first omitted term relative to the leading power
    pub err_estimate: f64,
}

impl Seeder {
    pub fn new(eq: &EquationSpec, m: u32, table_order: usize) -> Result<Self> {
        let br = branch(eq, m)?;
        let table = compute_coefficients(eq, &br, table_order, Backend::Dd)?;
        let (a, b) = table.as_complex::<Dd>();
        Ok(Seeder { eq: eq.clone(), branch: br, table, a, b, sys: System::new(eq)? })
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    /// Truncation order for seeding at radius `r`, capped at `n_cap`, and
    /// the size of the first term left out.
    pub fn truncation(&self, r: f64, n_cap: usize) -> (usize, f64) {
        let (idx, _) = optimal_truncation_pair(&self.table, r);
        let order = self.order();
        let n_star = if idx >= order { order } else { idx.saturating_sub(1) };
        let n = n_star.min(n_cap);
        let err = if n < order { self.term(n + 1, r) } else { self.term(order, r) };
        (n, err)
    }

    /// `max(|a_n|, |A_n|) r^{-n step}`.
    pub fn term(&self, n: usize, r: f64) -> f64 {
        let size = crate::series::abs(self.a[n]).max(crate::series::abs(self.b[n]));
        size * r.powf(-(n as f64) * self.branch.step_f64())
    }

    /// Series value summed through `n`.
    pub fn eval(&self, r: f64, theta: f64, n: usize) -> [CDD; 2] {
        let (u, w) = evaluate_in(&self.a, &self.b, &self.branch, Dd::from(r), Dd::from(theta), n);
        [u, w]
    }

    /// Optimally truncated seed at `(r, theta)`.
    pub fn seed(&self, r: f64, theta: f64, n_cap: usize) -> Seed {
        let (n, err) = self.truncation(r, n_cap);
        Seed { y: self.eval(r, theta, n), n_used: n, err_estimate: err }
    }

    pub fn system(&self) -> &System<CDD> {
        &self.sys
    }

    pub fn run(&self, path: &Path, init: [CDD; 2], opts: &ExpOptions) -> Result<Trajectory<Dd>> {
        integrate_system(&self.sys, path, init, &opts.integrator())
    }

    /// Decaying eigenvalue on the ray `theta`, if the branch has one.
    pub fn decaying_eigenvalue(&self, r: f64, theta: f64) -> Option<Complex<f64>> {
        jacobian_limit(&self.eq, &self.branch).ok().map(|j| j.decaying(r, theta))
    }

    /// `Re(lambda phi(r e^{i theta}))` for the decaying eigenvalue.
    pub fn mode_exponent(&self, r: f64, theta: f64) -> Option<f64> {
        let j = jacobian_limit(&self.eq, &self.branch).ok()?;
        let lam = j.decaying(r, theta);
        Some((lam * j.phase.eval(r, theta)).re)
    }

    /// `Re(lambda dphi/dr)` for the decaying eigenvalue, 0 without modes.
    pub fn mode_rate(&self, r: f64, theta: f64) -> f64 {
        match jacobian_limit(&self.eq, &self.branch) {
            Ok(j) => (j.decaying(r, theta) * j.phase.radial_derivative(r, theta)).re,
            Err(_) => 0.0,
        }
    }

    /// Innermost radius (not below `0.3 r0`) down to which a seed with
    /// relative error `seed_err` at `r0` stays below `target` once the
    /// recessive mode has grown on the way in.
    pub fn reach(&self, r0: f64, theta: f64, seed_err: f64, target: f64) -> f64 {
        let Some(e0) = self.mode_exponent(r0, theta) else { return 0.3 * r0 };
        let err = seed_err.max(1e-32);
        let ok = |r: f64| err * (self.mode_exponent(r, theta).unwrap() - e0).exp() <= target;
        if ok(0.3 * r0) {
            return 0.3 * r0;
        }
        let (mut lo, mut hi) = (0.3 * r0, r0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Smallest `L > 0` with the recessive mode growing by at most `growth`
    /// from `r + L` inward to `r`, capped at `max_len`.
    pub fn reseed_offset(&self, r: f64, theta: f64, growth: f64, max_len: f64) -> f64 {
        let Some(e0) = self.mode_exponent(r, theta) else { return max_len };
        let budget = growth.ln();
        let g = |l: f64| e0 - self.mode_exponent(r + l, theta).unwrap() - budget;
        if g(max_len) <= 0.0 {
            return max_len;
        }
        let (mut lo, mut hi) = (0.0, max_len);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }
}

pub(crate) fn c64(z: CDD) -> Complex<f64> {
    crate::scalar::to_c64(z)
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (a + b)],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}
