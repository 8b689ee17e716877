//! High-order Taylor-series stepping; the local expansion of the
//! polynomial systems comes from Cauchy products.

use num_complex::Complex;

use super::{norm, Options, Sample, SegEnd};
use crate::dynamics::System;
use crate::model::Family;
use crate::scalar::{cabs, Real};
use crate::integrate::path::Segment;

type C<R> = Complex<R>;

fn cauchy<R: Real>(a: &[C<R>], b: &[C<R>], k: usize) -> C<R> {
    let mut s = C::new(R::zero(), R::zero());
    for i in 0..=k {
        s = s + a[i] * b[k - i];
    }
    s
}

/// Taylor coefficients of `(u, U)` about `x0` through order `order`.
pub fn coefficients<R: Real>(sys: &System<C<R>>, x0: C<R>, u0: C<R>, w0: C<R>, order: usize) -> (Vec<C<R>>, Vec<C<R>>) {
    let zero = C::new(R::zero(), R::zero());
    let mut u = Vec::with_capacity(order + 1);
    let mut w = Vec::with_capacity(order + 1);
    u.push(u0);
    w.push(w0);
    let mut uu: Vec<C<R>> = Vec::with_capacity(order);
    let mut uw: Vec<C<R>> = Vec::with_capacity(order);
    let mut second: Vec<C<R>> = Vec::with_capacity(order);
    let mut third: Vec<C<R>> = Vec::with_capacity(order);
    let prev = |v: &[C<R>], k: usize| if k == 0 { zero } else { v[k - 1] };
    for k in 0..order {
        let kr = R::of(k as f64);
        let k1 = R::of((k + 1) as f64);
        uu.push(cauchy(&u, &u, k));
        uw.push(cauchy(&u, &w, k));
        match sys.family {
            Family::P3i | Family::P3ii => {
                // second = u^2 U, third = u U^2
                second.push(cauchy(&uu, &w, k));
                third.push(cauchy(&uw, &w, k));
                let mut f = sys.h * u[k] + x0 * second[k] + prev(&second, k);
                let mut g = -(C::new(R::one(), R::zero()) + sys.h) * w[k] - (x0 * third[k] + prev(&third, k))
                    + sys.gamma * (x0 * u[k] + prev(&u, k));
                if k == 0 {
                    f = f + sys.root * x0;
                    g = g + sys.alpha;
                } else if k == 1 {
                    f = f + sys.root;
                }
                let denom = x0 * k1;
                u.push((f - u[k] * kr) / denom);
                w.push((g - w[k] * kr) / denom);
            }
            Family::P4 => {
                second.push(cauchy(&w, &w, k));
                let two = R::of(2.0);
                let mut f = uw[k] * R::of(4.0) - uu[k] - (x0 * u[k] + prev(&u, k)) * two;
                let mut g = -second[k] * two + uw[k] * two + (x0 * w[k] + prev(&w, k)) * two;
                if k == 0 {
                    f = f - sys.k0 * two;
                    g = g - sys.kinf;
                }
                u.push(f / k1);
                w.push(g / k1);
            }
        }
    }
    (u, w)
}

fn horner<R: Real>(c: &[C<R>], h: C<R>) -> C<R> {
    let mut acc = C::new(R::zero(), R::zero());
    for v in c.iter().rev() {
        acc = acc * h + *v;
    }
    acc
}

/// Advance `y` along one segment.
pub(super) fn advance<R: Real>(
    sys: &System<C<R>>,
    seg: &Segment,
    seg_index: usize,
    order: usize,
    y: &mut [C<R>; 2],
    opts: &Options,
    samples: &mut Vec<Sample>,
) -> SegEnd {
    let len = seg.length();
    if len == 0.0 {
        return SegEnd::Done;
    }
    let floor = opts.step_floor * len;
    let mut t = 0.0f64;
    let mut tr = R::zero();
    let mut steps = 0usize;
    while t < 1.0 {
        steps += 1;
        if steps > opts.max_steps {
            return SegEnd::StepUnderflow;
        }
        let x0 = seg.point(tr);
        let (cu, cw) = coefficients(sys, x0, y[0], y[1], order);
        let scale = norm(y[0]).max(norm(y[1])).max(1.0);
        let size = |k: usize| norm(cu[k]).max(norm(cw[k]));
        let mut h = f64::INFINITY;
        for k in [order - 1, order] {
            let e = size(k);
            if e > 0.0 {
                h = h.min((opts.tol * scale / e).powf(1.0 / k as f64));
            }
        }
        h = (0.8 * h).min(opts.max_step);
        if h < floor {
            return SegEnd::StepUnderflow;
        }
        // next parameter value with |x(t1) - x(t)| close to h
        let dt = match *seg {
            Segment::Ray { .. } => h / len,
            Segment::Arc { r, theta0, theta1 } => {
                let half = (h / (2.0 * r)).min(1.0);
                2.0 * half.asin() / (theta1 - theta0).abs()
            }
        };
        let (t1, t1r) = if t + dt >= 1.0 { (1.0, R::one()) } else { (t + dt, R::of(t + dt)) };
        let step = seg.point(t1r) - x0;
        let hn = cabs(step).f64();
        y[0] = horner(&cu, step);
        y[1] = horner(&cw, step);
        let err = size(order) * hn.powi(order as i32) / scale;
        t = t1;
        tr = t1r;
        let x = seg.point(t1r);
        samples.push(Sample::new(seg_index, seg, t, x, y, err));
        if !y[0].re.is_finite() || !y[0].im.is_finite() || !y[1].re.is_finite() || !y[1].im.is_finite() {
            return SegEnd::Blowup;
        }
        if norm(y[0]) > opts.blowup || norm(y[1]) > opts.blowup {
            return SegEnd::Blowup;
        }
    }
    SegEnd::Done
}
