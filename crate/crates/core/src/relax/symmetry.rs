//! How far an energy density is from being invariant under rotations about
//! a line.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::energy::energy_with_density;
use crate::error::{Error, Result};
use crate::lattice::{reduce, tricubic, DirectorField, ScalarField};
use crate::vec3::{self, Vec3};

/// Node layers counted as the outer shell by the localization check.
pub const OUTER_SHELL_LAYERS: usize = 3;

/// Largest energy share the outer shell may hold.
pub const MAX_OUTER_FRACTION: f64 = 0.05;

/// Samples per circle.
const CIRCLE_SAMPLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub point: Vec3,
    /// Unit direction.
    pub direction: Vec3,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SymmetryFit {
    pub axis: Axis,
    pub score: f64,
    /// Energy share in the outer shell.
    pub outer_fraction: f64,
}

/// Share of `Σ density` on nodes within [`OUTER_SHELL_LAYERS`] of a face.
pub fn outer_fraction(density: &ScalarField) -> f64 {
    let grid = density.grid;
    let total = reduce::node_sum(&grid, |i| density.data[i]);
    if total == 0.0 {
        return 0.0;
    }
    let outer = reduce::node_sum(&grid, |i| {
        let [x, y, z] = grid.coords(i);
        if grid.shell_depth(x, y, z) < OUTER_SHELL_LAYERS {
            density.data[i]
        } else {
            0.0
        }
    });
    outer / total
}

fn localized_density(n: &DirectorField, a: f64, b: f64) -> Result<(ScalarField, f64)> {
    let density = energy_with_density(n, a, b).density.expect("density requested");
    let frac = outer_fraction(&density);
    if frac > MAX_OUTER_FRACTION {
        return Err(Error::NotLocalized { outer_fraction: frac });
    }
    if density.data.iter().all(|e| *e == 0.0) {
        return Err(Error::InvalidParameter("the field carries no energy".into()));
    }
    Ok((density, frac))
}

/// Relative deviation of the energy density from its circle averages,
/// `sqrt(Σ (e - ē_c)² / Σ ē_c²)`, over circles about `axis` that lie
/// inside the box. Circles are spaced one grid step apart in radius and
/// height.
pub fn axial_symmetry_score(n: &DirectorField, a: f64, b: f64, axis: &Axis) -> Result<f64> {
    let (density, _) = localized_density(n, a, b)?;
    score_density(&density, axis)
}

fn score_density(density: &ScalarField, axis: &Axis) -> Result<f64> {
    let grid = density.grid;
    let dir = vec3::normalized(axis.direction);
    let (e1, e2) = vec3::orthonormal_pair(dir);
    let reach = vec3::norm(vec3::sub(grid.extent_max(), grid.origin));
    let steps = (reach / grid.h).ceil() as i64;
    let trig: Vec<(f64, f64)> = (0..CIRCLE_SAMPLES)
        .map(|k| (2.0 * std::f64::consts::PI * k as f64 / CIRCLE_SAMPLES as f64).sin_cos())
        .collect();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut samples = vec![0.0; CIRCLE_SAMPLES];
    for l in -steps..=steps {
        let center = vec3::add(axis.point, vec3::scale(dir, l as f64 * grid.h));
        'circle: for j in 1..=steps {
            let r = j as f64 * grid.h;
            for (slot, (s, c)) in samples.iter_mut().zip(&trig) {
                let p = vec3::add(center, vec3::add(vec3::scale(e1, r * c), vec3::scale(e2, r * s)));
                match tricubic(&grid, &density.data, p) {
                    Ok(v) => *slot = v,
                    Err(_) => break 'circle,
                }
            }
            let mean = samples.iter().sum::<f64>() / CIRCLE_SAMPLES as f64;
            num += samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
            den += CIRCLE_SAMPLES as f64 * mean * mean;
        }
    }
    if den == 0.0 {
        return Err(Error::InvalidParameter("no circle about the axis fits in the box".into()));
    }
    Ok((num / den).sqrt())
}

/// Fits the symmetry axis through the energy centroid. The principal axes
/// of the second moment of the density are the starting candidates; the
/// best one is refined by a shrinking pattern search over directions.
pub fn fit_symmetry_axis(n: &DirectorField, a: f64, b: f64) -> Result<SymmetryFit> {
    let (density, outer) = localized_density(n, a, b)?;
    let grid = density.grid;
    let total = reduce::node_sum(&grid, |i| density.data[i]);
    let centroid: Vec3 =
        std::array::from_fn(|c| reduce::node_sum(&grid, |i| density.data[i] * grid.position_of(i)[c]) / total);
    let mut m = Matrix3::zeros();
    for r in 0..3 {
        for c in r..3 {
            let v = reduce::node_sum(&grid, |i| {
                let d = vec3::sub(grid.position_of(i), centroid);
                density.data[i] * d[r] * d[c]
            });
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut best: Option<(Vec3, f64)> = None;
    for k in 0..3 {
        let v = eig.eigenvectors.column(k);
        let dir = vec3::normalized([v[0], v[1], v[2]]);
        let s = score_density(&density, &Axis { point: centroid, direction: dir })?;
        if best.map_or(true, |(_, b)| s < b) {
            best = Some((dir, s));
        }
    }
    let (mut dir, mut score) = best.expect("three candidates");
    let mut angle: f64 = 0.1;
    while angle > 2e-3 {
        let (u, w) = vec3::orthonormal_pair(dir);
        let mut improved = false;
        for t in [u, vec3::scale(u, -1.0), w, vec3::scale(w, -1.0)] {
            let trial = vec3::normalized(vec3::add(vec3::scale(dir, angle.cos()), vec3::scale(t, angle.sin())));
            let s = score_density(&density, &Axis { point: centroid, direction: trial })?;
            if s < score {
                dir = trial;
                score = s;
                improved = true;
                break;
            }
        }
        if !improved {
            angle *= 0.5;
        }
    }
    Ok(SymmetryFit { axis: Axis { point: centroid, direction: dir }, score, outer_fraction: outer })
}

/// Largest relative deviation of the distance to `axis` from its mean over
/// `points`: `max |r - r̄| / r̄`.
pub fn radial_variation(points: &[Vec3], axis: &Axis) -> f64 {
    let dir = vec3::normalized(axis.direction);
    let radii: Vec<f64> = points.iter().map(|p| vec3::norm(vec3::reject(vec3::sub(*p, axis.point), dir))).collect();
    if radii.is_empty() {
        return 0.0;
    }
    let mean = radii.iter().sum::<f64>() / radii.len() as f64;
    if mean == 0.0 {
        return 0.0;
    }
    radii.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max) / mean
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_ansatz, hopf_projection, AnsatzSpec};
    use crate::Grid;

    fn z_axis(g: &Grid) -> Axis {
        Axis { point: g.center(), direction: [0.0, 0.0, 1.0] }
    }

    #[test]
    fn ansatz_is_axially_symmetric_about_z() {
        let g = Grid::cube(32, 4.0).unwrap();
        let n = build_ansatz(g, &AnsatzSpec::new(1, 1, 4.0)).unwrap();
        let s = axial_symmetry_score(&n, 1.0, 1.0, &z_axis(&g)).unwrap();
        assert!(s <= 0.02, "score {s}");
        let tilted = Axis { point: g.center(), direction: vec3::normalized([1.0, 0.0, 1.0]) };
        assert!(axial_symmetry_score(&n, 1.0, 1.0, &tilted).unwrap() > 10.0 * s);
    }

    #[test]
    fn fitted_axis_follows_a_rotated_soliton() {
        // Rotate space only, sending the symmetry axis from z to x.
        let g = Grid::cube(32, 4.0).unwrap();
        let spec = AnsatzSpec::new(1, 1, 4.0);
        let n = DirectorField::from_fn(g, [0.0, 0.0, 1.0], |p| {
            let (c1, c2) = spec.spinor([p[1], p[2], p[0]]);
            hopf_projection(c1, c2)
        })
        .unwrap();
        let fit = fit_symmetry_axis(&n, 1.0, 1.0).unwrap();
        assert!(fit.axis.direction[0].abs() > 0.999, "{:?}", fit.axis);
        assert!(vec3::norm(vec3::sub(fit.axis.point, g.center())) < 0.05);
        let straight = build_ansatz(g, &spec).unwrap();
        let s0 = axial_symmetry_score(&straight, 1.0, 1.0, &z_axis(&g)).unwrap();
        assert!((fit.score - s0).abs() < 0.01, "{} vs {s0}", fit.score);
    }

    #[test]
    fn energy_at_the_faces_is_not_localized() {
        let g = Grid::cube(16, 2.0).unwrap();
        let mut spec = AnsatzSpec::new(1, 1, 2.0);
        spec.core_radius = 1.0;
        let n = build_ansatz(g, &spec).unwrap();
        assert!(matches!(axial_symmetry_score(&n, 1.0, 1.0, &z_axis(&g)), Err(Error::NotLocalized { .. })));
        assert!(matches!(
            axial_symmetry_score(&DirectorField::vacuum(g), 1.0, 1.0, &z_axis(&g)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn radial_variation_of_circles_and_ellipses() {
        let axis = Axis { point: [1.0, 2.0, 0.0], direction: [0.0, 0.0, 2.0] };
        let ring = |a: f64, b: f64| -> Vec<Vec3> {
            (0..100)
                .map(|k| {
                    let t = k as f64 * std::f64::consts::TAU / 100.0;
                    [1.0 + a * t.cos(), 2.0 + b * t.sin(), 0.3]
                })
                .collect()
        };
        assert!(radial_variation(&ring(1.5, 1.5), &axis) < 1e-12);
        let v = radial_variation(&ring(1.1, 0.9), &axis);
        assert!((v - 0.1).abs() < 0.01, "{v}");
    }
}
