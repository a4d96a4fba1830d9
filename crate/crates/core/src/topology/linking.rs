//! Gauss linking number of closed polygons.
//!
//! Each pair of segments contributes the signed solid angle it subtends,
//! evaluated in closed form (four arcsines per pair), so the sum over all pairs
//! is the exact Gauss integral of the two polygons.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::FieldLine;
use crate::error::{Error, Result};
use crate::vec3::{cross, dot, norm, sub, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linking {
    pub raw: f64,
    pub value: i64,
}

/// Signed solid angle contribution of segment `p1→p2` against `p3→p4`,
/// divided by `4π`.
pub fn segment_pair(p1: Vec3, p2: Vec3, p3: Vec3, p4: Vec3) -> f64 {
    let r13 = sub(p3, p1);
    let r14 = sub(p4, p1);
    let r23 = sub(p3, p2);
    let r24 = sub(p4, p2);
    let r12 = sub(p2, p1);
    let r34 = sub(p4, p3);
    let orient = dot(cross(r34, r12), r13);
    if orient == 0.0 {
        return 0.0;
    }
    let unit = |v: Vec3| {
        let l = norm(v);
        if l > 0.0 {
            [v[0] / l, v[1] / l, v[2] / l]
        } else {
            [0.0; 3]
        }
    };
    let n1 = unit(cross(r13, r14));
    let n2 = unit(cross(r14, r24));
    let n3 = unit(cross(r24, r23));
    let n4 = unit(cross(r23, r13));
    let asin = |x: f64| x.clamp(-1.0, 1.0).asin();
    let omega = asin(dot(n1, n2)) + asin(dot(n2, n3)) + asin(dot(n3, n4)) + asin(dot(n4, n1));
    omega * orient.signum() / (4.0 * PI)
}

/// Raw linking number of two closed polygons given as vertex lists (the last
/// vertex connects back to the first).
pub fn polygon_linking(a: &[Vec3], b: &[Vec3]) -> f64 {
    let mut total = 0.0;
    for i in 0..a.len() {
        let (p1, p2) = (a[i], a[(i + 1) % a.len()]);
        let mut row = 0.0;
        for j in 0..b.len() {
            row += segment_pair(p1, p2, b[j], b[(j + 1) % b.len()]);
        }
        total += row;
    }
    total
}

/// Smallest distance between any two segments of the closed polygons.
pub fn polygon_separation(a: &[Vec3], b: &[Vec3]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..a.len() {
        let (p1, p2) = (a[i], a[(i + 1) % a.len()]);
        for j in 0..b.len() {
            best = best.min(segment_distance(p1, p2, b[j], b[(j + 1) % b.len()]));
        }
    }
    best
}

fn segment_distance(p1: Vec3, q1: Vec3, p2: Vec3, q2: Vec3) -> f64 {
    let d1 = sub(q1, p1);
    let d2 = sub(q2, p2);
    let r = sub(p1, p2);
    let a = dot(d1, d1);
    let e = dot(d2, d2);
    let f = dot(d2, r);
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return norm(r);
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = dot(d1, r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = dot(d1, d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    let c1 = [p1[0] + d1[0] * s, p1[1] + d1[1] * s, p1[2] + d1[2] * s];
    let c2 = [p2[0] + d2[0] * t, p2[1] + d2[1] * t, p2[2] + d2[2] * t];
    norm(sub(c1, c2))
}

/// Linking number of two closed field lines. Lines must be closed and
/// separated by more than `min_separation`.
pub fn linking_number_with(a: &FieldLine, b: &FieldLine, min_separation: f64) -> Result<Linking> {
    if !a.closed || !b.closed || a.points.len() < 3 || b.points.len() < 3 {
        return Err(Error::OpenCurve);
    }
    let distance = polygon_separation(&a.points, &b.points);
    if distance <= min_separation {
        return Err(Error::CurvesTooClose { distance, threshold: min_separation });
    }
    let raw = polygon_linking(&a.points, &b.points);
    Ok(Linking { raw, value: raw.round() as i64 })
}

/// [`linking_number_with`] using the default separation threshold of the two
/// lines (see [`FieldLine::min_separation`]).
pub fn linking_number(a: &FieldLine, b: &FieldLine) -> Result<Linking> {
    let threshold = a.min_separation().max(b.min_separation());
    linking_number_with(a, b, threshold)
}
