//! Adaptive complex-path integration of the first-order systems with pole
//! detection.

mod dopri;
pub mod path;
pub mod taylor;

use std::io::Write;

use num_complex::Complex;
use serde::Serialize;

use crate::dynamics::System;
use crate::error::{Error, Result};
use crate::model::{EquationSpec, Family};
use crate::scalar::{cabs, from_c64, to_c64, Real, C64};

pub use path::{concat, make_arc, make_ray, Path, Segment};

pub(crate) fn norm<R: Real>(z: Complex<R>) -> f64 {
    cabs(z).f64()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Method {
    DormandPrince,
    Taylor { order: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Options {
    /// per-step relative error bound (mixed with an absolute floor of 1)
    pub tol: f64,
    /// largest step in |dx|
    pub max_step: f64,
    pub method: Method,
    /// |u| or |U| beyond this ends the run as a pole
    pub blowup: f64,
    /// smallest step as a fraction of the segment length
    pub step_floor: f64,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: 1e-12,
            max_step: f64::INFINITY,
            method: Method::DormandPrince,
            blowup: 1e8,
            step_floor: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

impl Options {
    pub fn dopri(tol: f64) -> Self {
        Options { tol, ..Default::default() }
    }

    pub fn taylor(tol: f64, order: usize) -> Self {
        Options { tol, method: Method::Taylor { order }, ..Default::default() }
    }

    /// Taylor defaults matched to the working precision of `R`.
    pub fn precise<R: Real>() -> Self {
        if R::EPS < 1e-20 {
            Options::taylor(1e-30, 30)
        } else {
            Options::taylor(1e-15, 20)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    /// segment index plus local parameter: strictly increasing along the path
    pub t: f64,
    pub x: C64,
    pub arg: f64,
    pub u: C64,
    #[serde(rename = "U")]
    pub w: C64,
    pub err: f64,
}

impl Sample {
    fn new<R: Real>(seg_index: usize, seg: &Segment, t: f64, x: Complex<R>, y: &[Complex<R>; 2], err: f64) -> Self {
        Sample {
            t: seg_index as f64 + t,
            x: to_c64(x),
            arg: seg.tracked(t).theta,
            u: to_c64(y[0]),
            w: to_c64(y[1]),
            err,
        }
    }
}

pub(crate) enum SegEnd {
    Done,
    Blowup,
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    U,
    #[serde(rename = "U_big")]
    BigU,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleEvent {
    pub x_pole_estimate: C64,
    pub blowing_component: Component,
    /// normalized residual of the linear fit of the reciprocal
    pub fit_quality: f64,
    /// path parameter of the last accepted step
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    Completed,
    PoleDetected(PoleEvent),
    ToleranceFailure { t: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory<R: Real = f64> {
    pub samples: Vec<Sample>,
    pub status: Status,
    /// state at the end of every completed segment in working precision
    #[serde(skip)]
    pub segment_ends: Vec<[Complex<R>; 2]>,
    /// state at the last accepted step
    #[serde(skip)]
    pub last: [Complex<R>; 2],
}

impl<R: Real> Trajectory<R> {
    pub fn completed(&self) -> bool {
        self.status == Status::Completed
    }

    pub fn pole(&self) -> Option<&PoleEvent> {
        match &self.status {
            Status::PoleDetected(p) => Some(p),
            _ => None,
        }
    }

    /// Largest per-step error estimate.
    pub fn max_err(&self) -> f64 {
        self.samples.iter().map(|s| s.err).fold(0.0, f64::max)
    }

    /// CSV with columns t, re(x), im(x), arg(x), re(u), im(u), re(U), im(U), err.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,re_x,im_x,arg_x,re_u,im_u,re_U,im_U,err")?;
        for s in &self.samples {
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.6e}",
                s.t, s.x.re, s.x.im, s.arg, s.u.re, s.u.im, s.w.re, s.w.im, s.err
            )?;
        }
        Ok(())
    }
}

/// Integrate `eq` along `path` from `(u0, U0)` in the working precision `R`.
pub fn integrate_with<R: Real>(
    eq: &EquationSpec,
    path: &Path,
    init: [Complex<R>; 2],
    opts: &Options,
) -> Result<Trajectory<R>> {
    let sys = System::<Complex<R>>::new(eq)?;
    integrate_system(&sys, path, init, opts)
}

pub fn integrate_system<R: Real>(
    sys: &System<Complex<R>>,
    path: &Path,
    init: [Complex<R>; 2],
    opts: &Options,
) -> Result<Trajectory<R>> {
    if sys.family != Family::P4 && path.passes_origin() {
        return Err(Error::ZeroXOnPath);
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    if init.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Invalid("initial values must be finite".into()));
    }
    let mut y = init;
    let mut samples = vec![Sample::new(0, &path.segments[0], 0.0, path.segments[0].point(R::zero()), &y, 0.0)];
    let mut ends = vec![];
    let mut status = Status::Completed;
    for (i, seg) in path.segments.iter().enumerate() {
        let end = match opts.method {
            Method::DormandPrince => dopri::advance(sys, seg, i, &mut y, opts, &mut samples),
            Method::Taylor { order } => taylor::advance(sys, seg, i, order.max(4), &mut y, opts, &mut samples),
        };
        match end {
            SegEnd::Done => ends.push(y),
            SegEnd::Blowup => {
                status = pole_status(&samples, opts.blowup);
                break;
            }
            SegEnd::StepUnderflow => {
                let t = samples.last().map_or(0.0, |s| s.t);
                status = match estimate_from_samples(&samples) {
                    Some(p) => Status::PoleDetected(p),
                    None => Status::ToleranceFailure { t },
                };
                break;
            }
        }
    }
    Ok(Trajectory { samples, status, segment_ends: ends, last: y })
}

/// Double-precision convenience with the Dormand-Prince pair.
pub fn integrate(eq: &EquationSpec, path: &Path, init_u: C64, init_w: C64, tol: f64, max_step: f64) -> Result<Trajectory> {
    let opts = Options { tol, max_step, ..Default::default() };
    integrate_with::<f64>(eq, path, [from_c64(init_u), from_c64(init_w)], &opts)
}

fn pole_status(samples: &[Sample], blowup: f64) -> Status {
    match estimate_from_samples(samples) {
        Some(p) => Status::PoleDetected(p),
        None => {
            // the threshold was crossed without a clean fit; report the crossing point
            let s = samples.last().unwrap();
            let comp = if s.u.norm() > blowup || !s.u.norm().is_finite() { Component::U } else { Component::BigU };
            Status::PoleDetected(PoleEvent { x_pole_estimate: s.x, blowing_component: comp, fit_quality: f64::INFINITY, t: s.t })
        }
    }
}

const WINDOW: usize = 6;

fn estimate_from_samples(samples: &[Sample]) -> Option<PoleEvent> {
    let tail = &samples[samples.len().saturating_sub(WINDOW)..];
    let t = tail.last()?.t;
    let mut best: Option<PoleEvent> = None;
    for comp in [Component::U, Component::BigU] {
        let pts: Vec<(C64, C64)> =
            tail.iter().map(|s| (s.x, if comp == Component::U { s.u } else { s.w })).collect();
        if let Ok(mut p) = estimate_pole(&pts) {
            p.blowing_component = comp;
            p.t = t;
            if best.as_ref().is_none_or(|b| p.fit_quality < b.fit_quality) {
                best = Some(p);
            }
        }
    }
    best
}

/// Fit `1/v` linearly in `x` over the trailing samples and return the root.
pub fn estimate_pole(trailing: &[(C64, C64)]) -> Result<PoleEvent> {
    if trailing.len() < 4 {
        return Err(Error::NoBlowupSignature);
    }
    let growing = trailing.windows(2).all(|w| w[1].1.norm() > w[0].1.norm());
    if !growing || trailing.iter().any(|(x, v)| !v.norm().is_finite() || !x.norm().is_finite() || v.norm() == 0.0) {
        return Err(Error::NoBlowupSignature);
    }
    // least squares for z = c0 + c1 x, centred on the last point for conditioning
    let xc = trailing.last().unwrap().0;
    let n = trailing.len() as f64;
    let xs: Vec<C64> = trailing.iter().map(|(x, _)| x - xc).collect();
    let zs: Vec<C64> = trailing.iter().map(|(_, v)| 1.0 / v).collect();
    let mx = xs.iter().sum::<C64>() / n;
    let mz = zs.iter().sum::<C64>() / n;
    let mut sxx = 0.0;
    let mut sxz = C64::new(0.0, 0.0);
    for (x, z) in xs.iter().zip(&zs) {
        sxx += (x - mx).norm_sqr();
        sxz += (x - mx).conj() * (z - mz);
    }
    if sxx == 0.0 {
        return Err(Error::NoBlowupSignature);
    }
    let c1 = sxz / sxx;
    let c0 = mz - c1 * mx;
    if c1.norm() == 0.0 {
        return Err(Error::NoBlowupSignature);
    }
    let root = -c0 / c1 + xc;
    let res: f64 = xs.iter().zip(&zs).map(|(x, z)| (z - c0 - c1 * x).norm_sqr()).sum::<f64>().sqrt();
    let scale: f64 = zs.iter().map(|z| (z - mz).norm_sqr()).sum::<f64>().sqrt();
    let fit_quality = if scale > 0.0 { res / scale } else { f64::INFINITY };
    Ok(PoleEvent { x_pole_estimate: root, blowing_component: Component::U, fit_quality, t: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_equation, Param, RawParams};
    use crate::scalar::Dd;

    #[test]
    fn simple_pole_is_recovered() {
        let xp = C64::new(3.0, 1.0);
        let pts: Vec<(C64, C64)> =
            (0..6).map(|k| xp - C64::new(0.5f64.powi(k), 0.0)).map(|x| (x, 1.0 / (x - xp))).collect();
        let p = estimate_pole(&pts).unwrap();
        assert!((p.x_pole_estimate - xp).norm() < 1e-10);
        assert!(p.fit_quality < 1e-10);
        let sq: Vec<(C64, C64)> = pts.iter().map(|(x, v)| (*x, v * v)).collect();
        assert!(estimate_pole(&sq).unwrap().fit_quality > 1e-3);
        let flat: Vec<(C64, C64)> = pts.iter().map(|(x, _)| (*x, C64::new(1.0, 0.0))).collect();
        assert!(matches!(estimate_pole(&flat), Err(Error::NoBlowupSignature)));
    }

    #[test]
    fn paths_join_and_report_gaps() {
        let r = make_ray(0.0, 10.0, 20.0).unwrap();
        assert_eq!((r.start().r, r.end().r), (10.0, 20.0));
        let a = make_arc(20.0, 0.0, std::f64::consts::FRAC_PI_2).unwrap();
        let p = concat(&[r.clone(), a]).unwrap();
        assert!((p.end_point() - C64::new(0.0, 20.0)).norm() < 1e-13);
        assert_eq!(p.end().theta, std::f64::consts::FRAC_PI_2);
        let bad = make_arc(10.0, 0.0, 1.0).unwrap();
        assert!(matches!(concat(&[r, bad]), Err(Error::DiscontinuousJoin { .. })));
    }

    #[test]
    fn linear_p4_solution_both_methods() {
        let eq = make_equation(Family::P4, RawParams::p4(Param::int(1), Param::int(0))).unwrap();
        let path = make_ray(0.0, 30.0, 5.0).unwrap();
        let t = integrate(&eq, &path, C64::new(-60.0, 0.0), C64::new(0.0, 0.0), 1e-12, f64::INFINITY).unwrap();
        assert!(t.completed());
        for s in &t.samples {
            assert!((s.u + 2.0 * s.x).norm() / (2.0 * s.x).norm() < 1e-10);
        }
        let opts = Options::precise::<Dd>();
        let init = [Complex::new(Dd::from(-60.0), Dd::from(0.0)), Complex::new(Dd::from(0.0), Dd::from(0.0))];
        let t = integrate_with::<Dd>(&eq, &path, init, &opts).unwrap();
        assert!(t.completed());
        assert!(norm(t.last[0] + Complex::new(Dd::from(10.0), Dd::from(0.0))) < 1e-25);
    }

    #[test]
    fn p3_paths_avoid_origin() {
        let eq = make_equation(Family::P3i, RawParams::p3(Param::int(1), Param::int(-1))).unwrap();
        let path = Path { segments: vec![Segment::Ray { theta: 0.0, r0: 1.0, r1: 0.0 }] };
        assert!(matches!(integrate(&eq, &path, C64::new(1.0, 0.0), C64::new(0.0, 0.0), 1e-8, 1.0), Err(Error::ZeroXOnPath)));
    }
}
