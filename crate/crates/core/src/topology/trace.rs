//! Integral curves of `B`, i.e. preimage lines of the director field.

use serde::{Deserialize, Serialize};

use super::HField;
use crate::error::{Error, Result};
use crate::lattice::{interpolate, Grid, Interpolation};
use crate::vec3::{self, Vec3};

/// Seeds with `|B|` below this are rejected.
pub const MIN_SEED_FIELD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceParams {
    /// Arc-length step.
    pub step: f64,
    pub max_steps: usize,
    /// A line is closed once it passes within this distance of its seed.
    pub closure_tol: f64,
    #[serde(default)]
    pub interpolation: Interpolation,
}

impl TraceParams {
    pub fn for_grid(grid: &Grid) -> Self {
        TraceParams { step: 0.25 * grid.h, max_steps: 40_000, closure_tol: 0.5 * grid.h, interpolation: Interpolation::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !(self.closure_tol > 0.0) || self.max_steps < 10 {
            return Err(Error::InvalidParameter(format!("bad tracer parameters {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Closed,
    MaxSteps,
    LeftDomain,
    FieldVanished,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldLine {
    /// Polyline vertices; when `closed`, the last vertex joins the first.
    pub points: Vec<Vec3>,
    /// Arc length at each vertex.
    pub arclength: Vec<f64>,
    /// Normalized director sampled at each vertex.
    pub n_samples: Vec<Vec3>,
    pub closed: bool,
    /// Director value at the seed.
    pub n_value: Vec3,
    /// `max |n(p) - n_value|` over the vertices.
    pub drift: f64,
    pub termination: Termination,
    /// Grid spacing of the field the line was traced in.
    pub spacing: f64,
}

impl FieldLine {
    /// Builds a closed line from explicit vertices (no director data).
    pub fn closed_polygon(points: Vec<Vec3>) -> Self {
        let mut arclength = Vec::with_capacity(points.len());
        let mut s = 0.0;
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                s += vec3::dist(points[i - 1], *p);
            }
            arclength.push(s);
        }
        FieldLine {
            n_samples: vec![[0.0; 3]; points.len()],
            points,
            arclength,
            closed: true,
            n_value: [0.0; 3],
            drift: 0.0,
            termination: Termination::Closed,
            spacing: 0.0,
        }
    }

    /// Separation below which linking numbers are refused: twice the grid
    /// spacing, but never less than twice the longest segment.
    pub fn min_separation(&self) -> f64 {
        let longest = self
            .points
            .windows(2)
            .map(|w| vec3::dist(w[0], w[1]))
            .fold(0.0, f64::max);
        (2.0 * self.spacing).max(2.0 * longest)
    }

    pub fn length(&self) -> f64 {
        let open = self.arclength.last().copied().unwrap_or(0.0);
        if self.closed && self.points.len() > 1 {
            open + vec3::dist(self.points[self.points.len() - 1], self.points[0])
        } else {
            open
        }
    }
}

fn unit_b(h: &HField, p: Vec3, scheme: Interpolation) -> Option<Vec3> {
    let b = interpolate(&h.grid, &h.b.data, p, scheme).ok()?;
    let m = vec3::norm(b);
    (m > MIN_SEED_FIELD * 1e-3).then(|| vec3::scale(b, 1.0 / m))
}

fn director_at(h: &HField, p: Vec3, scheme: Interpolation) -> Result<Vec3> {
    let v = interpolate(&h.grid, &h.n.data, p, scheme)?;
    Ok(vec3::normalized(v))
}

/// Distance from `q` to the segment `a→b`.
fn point_segment_distance(q: Vec3, a: Vec3, b: Vec3) -> f64 {
    let ab = vec3::sub(b, a);
    let len2 = vec3::norm2(ab);
    let t = if len2 > 0.0 { (vec3::dot(vec3::sub(q, a), ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    vec3::dist(q, vec3::add(a, vec3::scale(ab, t)))
}

/// Follows `dx/ds = B/|B|` from `seed` with classical RK4 on the
/// interpolant of `B` selected by `params.interpolation`.
pub fn trace_field_line(h: &HField, seed: Vec3, params: &TraceParams) -> Result<FieldLine> {
    params.validate()?;
    let scheme = params.interpolation;
    let b0 = interpolate(&h.grid, &h.b.data, seed, scheme)?;
    let magnitude = vec3::norm(b0);
    if !(magnitude > MIN_SEED_FIELD) {
        return Err(Error::DegenerateSeed { position: seed, magnitude });
    }
    let n_value = director_at(h, seed, scheme)?;
    let ds = params.step;

    let mut points = vec![seed];
    let mut arclength = vec![0.0];
    let mut n_samples = vec![n_value];
    let mut farthest: f64 = 0.0;
    let mut termination = Termination::MaxSteps;
    let mut x = seed;

    for step in 1..=params.max_steps {
        let rk = (|| {
            let k1 = unit_b(h, x, scheme)?;
            let k2 = unit_b(h, vec3::add(x, vec3::scale(k1, 0.5 * ds)), scheme)?;
            let k3 = unit_b(h, vec3::add(x, vec3::scale(k2, 0.5 * ds)), scheme)?;
            let k4 = unit_b(h, vec3::add(x, vec3::scale(k3, ds)), scheme)?;
            let dir = vec3::add(vec3::add(k1, vec3::scale(k2, 2.0)), vec3::add(vec3::scale(k3, 2.0), k4));
            Some(vec3::add(x, vec3::scale(dir, ds / 6.0)))
        })();
        let next = match rk {
            Some(p) => p,
            None => {
                termination = match interpolate(&h.grid, &h.b.data, x, scheme) {
                    Ok(_) => {
                        // Either a stage left the box or B vanished along the way.
                        if unit_b(h, x, scheme).is_none() {
                            Termination::FieldVanished
                        } else {
                            Termination::LeftDomain
                        }
                    }
                    Err(_) => Termination::LeftDomain,
                };
                break;
            }
        };
        let n_next = match director_at(h, next, scheme) {
            Ok(v) => v,
            Err(_) => {
                termination = Termination::LeftDomain;
                break;
            }
        };
        farthest = farthest.max(vec3::dist(next, seed));
        if step >= 10
            && farthest > 2.0 * params.closure_tol
            && point_segment_distance(seed, x, next) <= params.closure_tol
        {
            termination = Termination::Closed;
            break;
        }
        let s = arclength[arclength.len() - 1] + vec3::dist(x, next);
        points.push(next);
        arclength.push(s);
        n_samples.push(n_next);
        x = next;
    }

    let drift = n_samples.iter().map(|v| vec3::dist(*v, n_value)).fold(0.0, f64::max);
    Ok(FieldLine {
        points,
        arclength,
        n_samples,
        closed: termination == Termination::Closed,
        n_value,
        drift,
        termination,
        spacing: h.grid.h,
    })
}

/// Moves `start` within the plane orthogonal to `B` until the interpolated
/// director matches `target` as closely as possible (Gauss–Newton).
pub fn polish_seed(h: &HField, start: Vec3, target: Vec3, scheme: Interpolation) -> (Vec3, f64) {
    let target = vec3::normalized(target);
    let eps = 1e-3 * h.grid.h;
    let mut x = start;
    let Ok(mut err) = director_at(h, x, scheme).map(|n| vec3::dist(n, target)) else {
        return (start, f64::INFINITY);
    };
    for _ in 0..20 {
        if err < 1e-12 {
            break;
        }
        let Some(t) = unit_b(h, x, scheme) else { break };
        let (e1, e2) = vec3::orthonormal_pair(t);
        let Ok(n0) = director_at(h, x, scheme) else { break };
        let mut cols = [[0.0; 3]; 2];
        let mut ok = true;
        for (c, e) in [e1, e2].into_iter().enumerate() {
            match (
                director_at(h, vec3::add(x, vec3::scale(e, eps)), scheme),
                director_at(h, vec3::sub(x, vec3::scale(e, eps)), scheme),
            ) {
                (Ok(p), Ok(m)) => cols[c] = vec3::scale(vec3::sub(p, m), 0.5 / eps),
                _ => ok = false,
            }
        }
        if !ok {
            break;
        }
        let r = vec3::sub(target, n0);
        let (a11, a12, a22) = (vec3::dot(cols[0], cols[0]), vec3::dot(cols[0], cols[1]), vec3::dot(cols[1], cols[1]));
        let (r1, r2) = (vec3::dot(cols[0], r), vec3::dot(cols[1], r));
        let det = a11 * a22 - a12 * a12;
        if !(det.abs() > 1e-30) {
            break;
        }
        let mut d1 = (a22 * r1 - a12 * r2) / det;
        let mut d2 = (a11 * r2 - a12 * r1) / det;
        let len = (d1 * d1 + d2 * d2).sqrt();
        if len > h.grid.h {
            d1 *= h.grid.h / len;
            d2 *= h.grid.h / len;
        }
        let cand = vec3::add(x, vec3::add(vec3::scale(e1, d1), vec3::scale(e2, d2)));
        match director_at(h, cand, scheme) {
            Ok(n) if vec3::dist(n, target) < err => {
                err = vec3::dist(n, target);
                x = cand;
            }
            _ => break,
        }
    }
    (x, err)
}

/// Interior node whose director is closest to `target`.
pub fn nearest_node(h: &HField, target: Vec3) -> (usize, f64) {
    nearest_nodes(h, target, 1).first().copied().unwrap_or((0, f64::INFINITY))
}

/// The `count` interior nodes closest to `target` in director space, best first.
pub fn nearest_nodes(h: &HField, target: Vec3, count: usize) -> Vec<(usize, f64)> {
    let target = vec3::normalized(target);
    let grid = h.grid;
    let fixed = grid.boundary == crate::lattice::BoundaryPolicy::FixedVacuum;
    let mut all: Vec<(usize, f64)> = h
        .n
        .data
        .iter()
        .enumerate()
        .filter(|(idx, _)| {
            let [i, j, k] = grid.coords(*idx);
            !fixed || grid.shell_depth(i, j, k) >= 2
        })
        .map(|(idx, v)| (idx, vec3::dist(*v, target)))
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    all.truncate(count);
    all
}
