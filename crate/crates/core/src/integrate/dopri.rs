//! Dormand-Prince 5(4) over the path parameter.

use num_complex::Complex;

use super::{norm, Options, Sample, SegEnd};
use crate::dynamics::System;
use crate::integrate::path::Segment;
use crate::scalar::Real;

type C<R> = Complex<R>;

const A: [&[(i64, i64)]; 6] = [
    &[(1, 5)],
    &[(3, 40), (9, 40)],
    &[(44, 45), (-56, 15), (32, 9)],
    &[(19372, 6561), (-25360, 2187), (64448, 6561), (-212, 729)],
    &[(9017, 3168), (-355, 33), (46732, 5247), (49, 176), (-5103, 18656)],
    &[(35, 384), (0, 1), (500, 1113), (125, 192), (-2187, 6784), (11, 84)],
];
const NODES: [(i64, i64); 7] = [(0, 1), (1, 5), (3, 10), (4, 5), (8, 9), (1, 1), (1, 1)];
/// fifth-order weights minus embedded fourth-order weights
const E: [(i64, i64); 7] = [(71, 57600), (0, 1), (-71, 16695), (71, 1920), (-17253, 339200), (22, 525), (-1, 40)];

fn q<R: Real>((n, d): (i64, i64)) -> R {
    R::of(n as f64) / R::of(d as f64)
}

fn f<R: Real>(sys: &System<C<R>>, seg: &Segment, t: R, y: &[C<R>; 2]) -> [C<R>; 2] {
    let x = seg.point(t);
    let v = seg.velocity(t);
    let (du, dw) = sys.eval(&x, &y[0], &y[1]);
    [du * v, dw * v]
}

pub(super) fn advance<R: Real>(
    sys: &System<C<R>>,
    seg: &Segment,
    seg_index: usize,
    y: &mut [C<R>; 2],
    opts: &Options,
    samples: &mut Vec<Sample>,
) -> SegEnd {
    let len = seg.length();
    if len == 0.0 {
        return SegEnd::Done;
    }
    let h_max = (opts.max_step / len).min(1.0);
    let mut h = (0.01f64).min(h_max);
    let mut t = 0.0f64;
    let mut steps = 0usize;
    let mut k1 = f(sys, seg, R::zero(), y);
    while t < 1.0 {
        steps += 1;
        if steps > opts.max_steps || h < opts.step_floor {
            return SegEnd::StepUnderflow;
        }
        let last = t + h >= 1.0;
        if last {
            h = 1.0 - t;
        }
        let hr = R::of(h);
        let tr = R::of(t);
        let mut k: Vec<[C<R>; 2]> = vec![k1];
        for (i, row) in A.iter().enumerate() {
            let mut yi = *y;
            for (j, c) in row.iter().enumerate() {
                let w: R = q(*c);
                if c.0 != 0 {
                    yi[0] = yi[0] + k[j][0] * (hr * w);
                    yi[1] = yi[1] + k[j][1] * (hr * w);
                }
            }
            let ti = if i == 5 { tr + hr } else { tr + hr * q::<R>(NODES[i + 1]) };
            k.push(f(sys, seg, ti, &yi));
            if i == 5 {
                // FSAL: stage 7 is evaluated at the fifth-order solution
                let mut err = 0.0f64;
                for c in 0..2 {
                    let mut e = C::new(R::zero(), R::zero());
                    for (j, ej) in E.iter().enumerate() {
                        if ej.0 != 0 {
                            e = e + k[j][c] * q::<R>(*ej);
                        }
                    }
                    let sc = opts.tol * norm(y[c]).max(norm(yi[c])).max(1.0);
                    err = err.max(norm(e * hr) / sc);
                }
                if !err.is_finite() {
                    h *= 0.2;
                    break;
                }
                if err <= 1.0 {
                    t = if last { 1.0 } else { t + h };
                    *y = yi;
                    k1 = k[6];
                    let x = seg.point(R::of(t));
                    samples.push(Sample::new(seg_index, seg, t, x, y, err * opts.tol));
                    if norm(y[0]) > opts.blowup || norm(y[1]) > opts.blowup {
                        return SegEnd::Blowup;
                    }
                }
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = (h * fac).min(h_max);
            }
        }
    }
    SegEnd::Done
}
