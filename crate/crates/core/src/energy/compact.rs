//! Nearest-neighbour discretization: `E₂` on links, `E₄` on plaquettes.
//!
//! Every node enters its own differences, so no lattice mode escapes the
//! energy. A plaquette in the `(i, j)` plane with corners `n00, n10, n01, n11`
//! carries four corner estimates `T_c = n_c · (u × v)` built from the two
//! edges meeting at that corner, each approximating `h² H_ij`. Averaging
//! their squares keeps the estimate second order and symmetric.

use crate::lattice::{reduce, BoundaryPolicy, DirectorField, Grid, ScalarField};
use crate::vec3::{self, cross, dot, Vec3};

/// Planes of the three unordered pairs, ordered like `(H12, H23, H31)`.
const PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

/// Node `dir` steps along `axis`, if there is one.
#[inline]
fn step(grid: &Grid, coords: [usize; 3], axis: usize, dir: i64) -> Option<[usize; 3]> {
    let dims = grid.dims();
    let mut c = coords;
    let v = c[axis] as i64 + dir;
    if v < 0 || v >= dims[axis] as i64 {
        if grid.boundary != BoundaryPolicy::Periodic {
            return None;
        }
        c[axis] = v.rem_euclid(dims[axis] as i64) as usize;
    } else {
        c[axis] = v as usize;
    }
    Some(c)
}

#[inline]
fn idx(grid: &Grid, c: [usize; 3]) -> usize {
    grid.index(c[0], c[1], c[2])
}

/// Corner indices `[c00, c10, c01, c11]` of the plaquette of side `span`
/// whose lower corner is `p`.
#[inline]
fn plaquette(grid: &Grid, p: [usize; 3], i: usize, j: usize, span: i64) -> Option<[usize; 4]> {
    let c10 = step(grid, p, i, span)?;
    let c01 = step(grid, p, j, span)?;
    let c11 = step(grid, c10, j, span)?;
    Some([idx(grid, p), idx(grid, c10), idx(grid, c01), idx(grid, c11)])
}

/// Corner triple products of one plaquette.
#[inline]
fn corner_terms(n: [Vec3; 4]) -> [f64; 4] {
    let [n00, n10, n01, n11] = n;
    let (u0, u1) = (vec3::sub(n10, n00), vec3::sub(n11, n01));
    let (v0, v1) = (vec3::sub(n01, n00), vec3::sub(n11, n10));
    [dot(n00, cross(u0, v0)), dot(n10, cross(u0, v1)), dot(n01, cross(u1, v0)), dot(n11, cross(u1, v1))]
}

/// Derivatives of `Σ_c T_c²` with respect to the four corners.
#[inline]
fn corner_gradients(n: [Vec3; 4]) -> [Vec3; 4] {
    let [n00, n10, n01, n11] = n;
    let (u0, u1) = (vec3::sub(n10, n00), vec3::sub(n11, n01));
    let (v0, v1) = (vec3::sub(n01, n00), vec3::sub(n11, n10));
    let [t00, t10, t01, t11] = corner_terms(n).map(|t| 2.0 * t);
    let gu0 = vec3::add(vec3::scale(cross(v0, n00), t00), vec3::scale(cross(v1, n10), t10));
    let gu1 = vec3::add(vec3::scale(cross(v0, n01), t01), vec3::scale(cross(v1, n11), t11));
    let gv0 = vec3::add(vec3::scale(cross(n00, u0), t00), vec3::scale(cross(n01, u1), t01));
    let gv1 = vec3::add(vec3::scale(cross(n10, u0), t10), vec3::scale(cross(n11, u1), t11));
    [
        vec3::sub(vec3::scale(cross(u0, v0), t00), vec3::add(gu0, gv0)),
        vec3::sub(vec3::add(vec3::scale(cross(u0, v1), t10), gu0), gv1),
        vec3::add(vec3::sub(vec3::scale(cross(u1, v0), t01), gu1), gv0),
        vec3::add(vec3::add(vec3::scale(cross(u1, v1), t11), gu1), gv1),
    ]
}

#[inline]
fn corners(n: &DirectorField, c: [usize; 4]) -> [Vec3; 4] {
    c.map(|i| n.data[i])
}

/// `(Σ |Δn|², Σ T²)` over the links and plaquettes whose lower corner is `p`.
fn owned_sums(n: &DirectorField, p: usize, span: i64) -> (f64, f64) {
    let grid = &n.grid;
    let c = grid.coords(p);
    let mut links = 0.0;
    for axis in 0..3 {
        if let Some(q) = step(grid, c, axis, span) {
            links += vec3::norm2(vec3::sub(n.data[idx(grid, q)], n.data[p]));
        }
    }
    let mut quartic = 0.0;
    for (i, j) in PAIRS {
        if let Some(pl) = plaquette(grid, c, i, j, span) {
            quartic += corner_terms(corners(n, pl)).iter().map(|t| t * t).sum::<f64>();
        }
    }
    (links, quartic)
}

/// Weights turning raw sums over span-`s` links and plaquettes into `e2`
/// and `e4` for unit couplings.
#[inline]
fn weights(h: f64, span: i64) -> (f64, f64) {
    let s = span as f64;
    (h / (s * s), 1.0 / (2.0 * h * s.powi(4)))
}

/// `(e2, e4)` for unit couplings from links and plaquettes of side `span`.
pub(super) fn sums(n: &DirectorField, span: i64) -> (f64, f64) {
    let (w2, w4) = weights(n.grid.h, span);
    let owned: Vec<(f64, f64)> = reduce::node_map(&n.grid, |p| owned_sums(n, p, span));
    let s2 = reduce::node_sum(&n.grid, |p| owned[p].0);
    let s4 = reduce::node_sum(&n.grid, |p| owned[p].1);
    (w2 * s2, w4 * s4)
}

/// Density per unit volume: each link is split between its ends and each
/// corner estimate is charged to its own corner.
pub(super) fn density(n: &DirectorField, a: f64, b: f64, span: i64) -> ScalarField {
    let grid = n.grid;
    let (w2, w4) = weights(grid.h, span);
    let vol = grid.cell_volume();
    let data = reduce::node_map(&grid, |p| {
        let c = grid.coords(p);
        let mut links = 0.0;
        for axis in 0..3 {
            for dir in [-span, span] {
                if let Some(q) = step(&grid, c, axis, dir) {
                    links += vec3::norm2(vec3::sub(n.data[idx(&grid, q)], n.data[p]));
                }
            }
        }
        let mut quartic = 0.0;
        for_each_touching(&grid, c, span, |pl, slot| {
            let t = corner_terms(corners(n, pl))[slot];
            quartic += t * t;
        });
        (a * w2 * 0.5 * links + b * w4 * quartic) / vol
    });
    ScalarField { grid, data }
}

/// Calls `f(corners, slot)` for each plaquette having `c` as corner `slot`.
#[inline]
fn for_each_touching<F: FnMut([usize; 4], usize)>(grid: &Grid, c: [usize; 3], span: i64, mut f: F) {
    for (i, j) in PAIRS {
        for (slot, (di, dj)) in [(0, 0), (1, 0), (0, 1), (1, 1)].into_iter().enumerate() {
            let lower = if di == 1 { step(grid, c, i, -span) } else { Some(c) };
            let lower = match lower {
                Some(l) if dj == 1 => step(grid, l, j, -span),
                other => other,
            };
            if let Some(pl) = lower.and_then(|l| plaquette(grid, l, i, j, span)) {
                f(pl, slot);
            }
        }
    }
}

/// Exact, unprojected derivative of `a e2 + b e4` at every node.
///
/// Each plane orientation is swept once, storing the four corner gradients
/// of every plaquette; the nodes then gather from the plaquettes they touch.
pub(super) fn raw_gradient(n: &DirectorField, a: f64, b: f64, span: i64) -> Vec<Vec3> {
    let grid = n.grid;
    let (w2, w4) = weights(grid.h, span);
    let mut out = reduce::node_map(&grid, |p| {
        let c = grid.coords(p);
        let np = n.data[p];
        let mut g2 = [0.0; 3];
        for axis in 0..3 {
            for dir in [-span, span] {
                if let Some(q) = step(&grid, c, axis, dir) {
                    g2 = vec3::add(g2, vec3::sub(np, n.data[idx(&grid, q)]));
                }
            }
        }
        vec3::scale(g2, 2.0 * a * w2)
    });
    let w = b * w4;
    for (i, j) in PAIRS {
        let per_plaquette: Vec<[Vec3; 4]> = reduce::node_map(&grid, |p| {
            plaquette(&grid, grid.coords(p), i, j, span).map_or([[0.0; 3]; 4], |pl| corner_gradients(corners(n, pl)))
        });
        let gathered = reduce::node_map(&grid, |p| {
            let c = grid.coords(p);
            let mut acc = per_plaquette[p][0];
            let di = step(&grid, c, i, -span);
            let dj = step(&grid, c, j, -span);
            if let Some(l) = di {
                acc = vec3::add(acc, per_plaquette[idx(&grid, l)][1]);
                if let Some(ll) = step(&grid, l, j, -span) {
                    acc = vec3::add(acc, per_plaquette[idx(&grid, ll)][3]);
                }
            }
            if let Some(l) = dj {
                acc = vec3::add(acc, per_plaquette[idx(&grid, l)][2]);
            }
            acc
        });
        for (o, g) in out.iter_mut().zip(&gathered) {
            *o = vec3::add(*o, vec3::scale(*g, w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_gradients_match_finite_differences() {
        let n = [[0.3, -0.2, 0.9], [0.1, 0.5, 0.7], [-0.4, 0.2, 0.8], [0.6, 0.6, -0.1]];
        let g = corner_gradients(n);
        let f = |m: [Vec3; 4]| corner_terms(m).iter().map(|t| t * t).sum::<f64>();
        let eps = 1e-6;
        for c in 0..4 {
            for k in 0..3 {
                let (mut up, mut dn) = (n, n);
                up[c][k] += eps;
                dn[c][k] -= eps;
                let fd = (f(up) - f(dn)) / (2.0 * eps);
                assert!((fd - g[c][k]).abs() < 1e-8, "corner {c} comp {k}: {fd} vs {}", g[c][k]);
            }
        }
    }

    #[test]
    fn gather_matches_per_node_visits() {
        let g = Grid::cube(9, 2.0).unwrap();
        let n = crate::ansatz::perturb(&DirectorField::vacuum(g), 0.2, 11).unwrap();
        for span in [1, 2] {
            let fast = raw_gradient(&n, 0.0, 1.0, span);
            for p in 0..g.len() {
                let mut slow = [0.0; 3];
                for_each_touching(&g, g.coords(p), span, |pl, slot| {
                    slow = vec3::add(slow, corner_gradients(corners(&n, pl))[slot]);
                });
                let slow = vec3::scale(slow, weights(g.h, span).1);
                assert!(vec3::norm(vec3::sub(slow, fast[p])) < 1e-12);
            }
        }
    }

    #[test]
    fn touching_plaquettes_cover_each_corner_once() {
        let g = Grid::periodic_cube(8, 4.0).unwrap();
        let mut seen = 0;
        for_each_touching(&g, [3, 4, 5], 1, |pl, slot| {
            assert_eq!(pl[slot], g.index(3, 4, 5));
            seen += 1;
        });
        assert_eq!(seen, 12);
        let f = Grid::cube(8, 2.0).unwrap();
        let mut corner = 0;
        for_each_touching(&f, [0, 0, 0], 2, |_, _| corner += 1);
        assert_eq!(corner, 3);
    }
}
