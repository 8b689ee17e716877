//! Piecewise paths of rays and arcs with a tracked argument.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::TrackedPoint;
use crate::scalar::{cis, Real, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    Ray { theta: f64, r0: f64, r1: f64 },
    Arc { r: f64, theta0: f64, theta1: f64 },
}

impl Segment {
    /// Polar coordinates at parameter `t` in `[0, 1]`.
    pub fn polar<R: Real>(&self, t: R) -> (R, R) {
        match *self {
            Segment::Ray { theta, r0, r1 } => (R::of(r0) + (R::of(r1) - R::of(r0)) * t, R::of(theta)),
            Segment::Arc { r, theta0, theta1 } => (R::of(r), R::of(theta0) + (R::of(theta1) - R::of(theta0)) * t),
        }
    }

    pub fn point<R: Real>(&self, t: R) -> Complex<R> {
        let (r, th) = self.polar(t);
        cis(th) * r
    }

    pub fn tracked(&self, t: f64) -> TrackedPoint {
        let (r, th) = self.polar(t);
        TrackedPoint::new(r, th)
    }

    /// `dx/dt`.
    pub fn velocity<R: Real>(&self, t: R) -> Complex<R> {
        match *self {
            Segment::Ray { theta, r0, r1 } => cis(R::of(theta)) * (R::of(r1) - R::of(r0)),
            Segment::Arc { r, theta0, theta1 } => {
                let (_, th) = self.polar(t);
                cis(th) * Complex::new(R::zero(), R::of(r) * (R::of(theta1) - R::of(theta0)))
            }
        }
    }

    /// Arc length.
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Ray { r0, r1, .. } => (r1 - r0).abs(),
            Segment::Arc { r, theta0, theta1 } => r * (theta1 - theta0).abs(),
        }
    }

    pub fn start(&self) -> TrackedPoint {
        self.tracked(0.0)
    }

    pub fn end(&self) -> TrackedPoint {
        self.tracked(1.0)
    }

    fn touches_origin(&self) -> bool {
        match *self {
            Segment::Ray { r0, r1, .. } => r0 <= 0.0 || r1 <= 0.0,
            Segment::Arc { r, .. } => r <= 0.0,
        }
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Ray { theta, r0, r1 } => Segment::Ray { theta, r0: r1, r1: r0 },
            Segment::Arc { r, theta0, theta1 } => Segment::Arc { r, theta0: theta1, theta1: theta0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    pub segments: Vec<Segment>,
}

fn check_finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Invalid("path coordinates must be finite".into()))
    }
}

pub fn make_ray(theta: f64, r0: f64, r1: f64) -> Result<Path> {
    check_finite(&[theta, r0, r1])?;
    if r0 <= 0.0 || r1 <= 0.0 {
        return Err(Error::Invalid("ray radii must be positive".into()));
    }
    Ok(Path { segments: vec![Segment::Ray { theta, r0, r1 }] })
}

pub fn make_arc(r: f64, theta0: f64, theta1: f64) -> Result<Path> {
    check_finite(&[r, theta0, theta1])?;
    if r <= 0.0 {
        return Err(Error::Invalid("arc radius must be positive".into()));
    }
    Ok(Path { segments: vec![Segment::Arc { r, theta0, theta1 }] })
}

/// Join paths end to start; radii and tracked arguments must agree.
pub fn concat(paths: &[Path]) -> Result<Path> {
    let mut segments: Vec<Segment> = vec![];
    for p in paths {
        for s in &p.segments {
            if let Some(prev) = segments.last() {
                let (a, b) = (prev.end(), s.start());
                let scale = a.r.abs().max(1.0);
                let gap = (a.r - b.r).abs().max((a.theta - b.theta).abs() * scale);
                if gap > 1e-12 * scale {
                    return Err(Error::DiscontinuousJoin { gap });
                }
            }
            segments.push(*s);
        }
    }
    if segments.is_empty() {
        return Err(Error::Invalid("empty path".into()));
    }
    Ok(Path { segments })
}

impl Path {
    pub fn start(&self) -> TrackedPoint {
        self.segments[0].start()
    }

    pub fn end(&self) -> TrackedPoint {
        self.segments.last().unwrap().end()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length()).sum()
    }

    pub fn passes_origin(&self) -> bool {
        self.segments.iter().any(|s| s.touches_origin())
    }

    pub fn reversed(&self) -> Path {
        Path { segments: self.segments.iter().rev().map(|s| s.reversed()).collect() }
    }

    /// Ray from `r0` to `r1` broken at each of `stops` (which must lie
    /// strictly between them, in travel order).
    pub fn ray_with_stops(theta: f64, r0: f64, r1: f64, stops: &[f64]) -> Result<Path> {
        let mut pts = vec![r0];
        pts.extend_from_slice(stops);
        pts.push(r1);
        let parts = pts.windows(2).filter(|w| w[0] != w[1]).map(|w| make_ray(theta, w[0], w[1])).collect::<Result<Vec<_>>>()?;
        concat(&parts)
    }

    pub fn end_point(&self) -> C64 {
        self.end().to_c64()
    }
}
