use super::stencil::NodeValue;
use super::{BoundaryPolicy, DirectorField, Grid, VectorField3};
use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Slack for positions that sit on the box faces up to rounding.
const FACE_SLACK: f64 = 1e-9;

/// Locates `p` as a base node and fractional offsets per axis.
fn locate(grid: &Grid, p: Vec3) -> Result<([usize; 3], [usize; 3], Vec3)> {
    let dims = grid.dims();
    let mut lo = [0usize; 3];
    let mut hi = [0usize; 3];
    let mut frac = [0.0; 3];
    for a in 0..3 {
        let u = (p[a] - grid.origin[a]) / grid.h;
        if !u.is_finite() {
            return Err(Error::OutOfDomain(p));
        }
        let n = dims[a];
        match grid.boundary {
            BoundaryPolicy::FixedVacuum => {
                let top = (n - 1) as f64;
                if u < -FACE_SLACK || u > top + FACE_SLACK {
                    return Err(Error::OutOfDomain(p));
                }
                let u = u.clamp(0.0, top);
                let i = (u.floor() as usize).min(n - 2);
                lo[a] = i;
                hi[a] = i + 1;
                frac[a] = u - i as f64;
            }
            BoundaryPolicy::Periodic => {
                let u = u.rem_euclid(n as f64);
                let i = (u.floor() as usize).min(n - 1);
                lo[a] = i;
                hi[a] = (i + 1) % n;
                frac[a] = u - i as f64;
            }
        }
    }
    Ok((lo, hi, frac))
}

/// Trilinear interpolation of node data at `p`.
pub fn trilinear<T: NodeValue>(grid: &Grid, data: &[T], p: Vec3) -> Result<T> {
    let (lo, hi, t) = locate(grid, p)?;
    let mut acc = T::zero();
    for corner in 0..8 {
        let pick = |a: usize| corner >> a & 1 == 1;
        let mut w = 1.0;
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            if pick(a) {
                w *= t[a];
                ijk[a] = hi[a];
            } else {
                w *= 1.0 - t[a];
                ijk[a] = lo[a];
            }
        }
        if w != 0.0 {
            acc = acc.axpy(w, data[grid.index(ijk[0], ijk[1], ijk[2])]);
        }
    }
    Ok(acc)
}

/// Sampling scheme for off-node positions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Interpolation {
    Trilinear,
    /// Catmull-Rom cubic per axis, exact for quadratics. Stencils that
    /// reach past a `FixedVacuum` face are clamped to the face node.
    #[default]
    Tricubic,
}

fn catmull_rom(t: f64) -> [f64; 4] {
    let (t2, t3) = (t * t, t * t * t);
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Tricubic interpolation of node data at `p` over the surrounding 4³ nodes.
pub fn tricubic<T: NodeValue>(grid: &Grid, data: &[T], p: Vec3) -> Result<T> {
    let (lo, _, t) = locate(grid, p)?;
    let dims = grid.dims();
    let mut idx = [[0usize; 4]; 3];
    let mut w = [[0.0; 4]; 3];
    for a in 0..3 {
        let n = dims[a] as isize;
        w[a] = catmull_rom(t[a]);
        for (o, slot) in idx[a].iter_mut().enumerate() {
            let q = lo[a] as isize + o as isize - 1;
            *slot = match grid.boundary {
                BoundaryPolicy::FixedVacuum => q.clamp(0, n - 1) as usize,
                BoundaryPolicy::Periodic => q.rem_euclid(n) as usize,
            };
        }
    }
    let mut acc = T::zero();
    for (k, wz) in idx[2].iter().zip(w[2]) {
        for (j, wy) in idx[1].iter().zip(w[1]) {
            for (i, wx) in idx[0].iter().zip(w[0]) {
                let weight = wx * wy * wz;
                if weight != 0.0 {
                    acc = acc.axpy(weight, data[grid.index(*i, *j, *k)]);
                }
            }
        }
    }
    Ok(acc)
}

pub fn interpolate<T: NodeValue>(grid: &Grid, data: &[T], p: Vec3, scheme: Interpolation) -> Result<T> {
    match scheme {
        Interpolation::Trilinear => trilinear(grid, data, p),
        Interpolation::Tricubic => tricubic(grid, data, p),
    }
}

/// Anything that carries per-node 3-vectors on a grid.
pub trait VectorNodes {
    fn grid(&self) -> &Grid;
    fn nodes(&self) -> &[Vec3];
}

impl VectorNodes for DirectorField {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn nodes(&self) -> &[Vec3] {
        &self.data
    }
}

impl VectorNodes for VectorField3 {
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn nodes(&self) -> &[Vec3] {
        &self.data
    }
}

/// Trilinear sample of a vector-valued field. Director values are not
/// renormalized.
pub fn trilinear_sample<F: VectorNodes + ?Sized>(field: &F, p: Vec3) -> Result<Vec3> {
    trilinear(field.grid(), field.nodes(), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tricubic_is_exact_for_quadratics() {
        let g = Grid::cube(9, 2.0).unwrap();
        let q = |p: Vec3| 1.0 + p[0] * p[1] - 0.5 * p[2] * p[2] + 2.0 * p[1];
        let data: Vec<f64> = (0..g.len()).map(|i| q(g.position_of(i))).collect();
        for p in [[0.13, -0.71, 0.4], [-0.9, 0.33, -0.05], [0.5, 0.5, 0.5]] {
            assert!((tricubic(&g, &data, p).unwrap() - q(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn tricubic_converges_faster_than_trilinear() {
        let err = |n: usize, scheme: Interpolation| {
            let g = Grid::periodic_cube(n, 2.0 * std::f64::consts::PI).unwrap();
            let data: Vec<f64> = (0..g.len()).map(|i| {
                let p = g.position_of(i);
                (p[0] + 2.0 * p[1]).sin() * p[2].cos()
            }).collect();
            (0..200)
                .map(|i| {
                    let t = i as f64;
                    let p = [(0.37 * t).sin() * 3.0, (1.21 * t).cos() * 3.0, (0.53 * t + 1.0).sin() * 3.0];
                    (interpolate(&g, &data, p, scheme).unwrap() - (p[0] + 2.0 * p[1]).sin() * p[2].cos()).abs()
                })
                .fold(0.0, f64::max)
        };
        let lin = (err(16, Interpolation::Trilinear) / err(32, Interpolation::Trilinear)).log2();
        let cub = (err(16, Interpolation::Tricubic) / err(32, Interpolation::Tricubic)).log2();
        assert!(lin > 1.5 && cub > 2.5, "{lin} {cub}");
    }

    #[test]
    fn node_positions_reproduce_node_values() {
        let g = Grid::cube(9, 2.0).unwrap();
        let f = VectorField3::from_fn(g, |p| [p[0] * p[1], p[2].sin(), 1.0 + p[0]]);
        for idx in [0, 17, 300, g.len() - 1] {
            let v = trilinear_sample(&f, g.position_of(idx)).unwrap();
            for c in 0..3 {
                assert!((v[c] - f.data[idx][c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cell_center_of_linear_field() {
        let g = Grid::cube(9, 2.0).unwrap();
        let f = VectorField3::from_fn(g, |p| [3.0, (p[0] + 2.0) / g.h, 0.0]);
        let mut p = g.position(3, 4, 5);
        p[0] += 0.5 * g.h;
        p[1] += 0.5 * g.h;
        p[2] += 0.5 * g.h;
        let v = trilinear_sample(&f, p).unwrap();
        assert!((v[0] - 3.0).abs() < 1e-12);
        assert!((v[1] - 3.5).abs() < 1e-12);
    }

    #[test]
    fn fixed_vacuum_rejects_outside_points() {
        let g = Grid::cube(9, 2.0).unwrap();
        let f = VectorField3::zeros(g);
        assert!(matches!(trilinear_sample(&f, [2.1, 0.0, 0.0]), Err(Error::OutOfDomain(_))));
        assert!(trilinear_sample(&f, [2.0, -2.0, 0.0]).is_ok());
    }

    #[test]
    fn periodic_wraps() {
        let g = Grid::periodic_cube(8, 8.0).unwrap();
        let f = VectorField3::from_fn(g, |p| [p[0], 0.0, 0.0]);
        let a = trilinear_sample(&f, [-4.0 + 1.0, 0.0, 0.0]).unwrap();
        let b = trilinear_sample(&f, [-4.0 + 9.0, 0.0, 0.0]).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-12);
    }
}
