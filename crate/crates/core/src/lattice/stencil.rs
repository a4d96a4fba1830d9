//! Second-order finite-difference stencils and their transposes.
//!
//! Interior nodes use the central difference `(f[p+1] - f[p-1]) / 2h`. Under
//! `FixedVacuum` the first and last node of each line use the one-sided
//! second-order formulas; under `Periodic` indices wrap.
//!
//! A fourth-order variant `(-f[p+2] + 8f[p+1] - 8f[p-1] + f[p-2]) / 12h` is
//! available for the topological diagnostics. Under `FixedVacuum` it falls
//! back to the second-order rows on the two outermost layers.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{BoundaryPolicy, Grid};
use crate::vec3::Vec3;

/// Values that can be combined linearly by a stencil.
pub trait NodeValue: Copy + Send + Sync + Default {
    fn zero() -> Self {
        Self::default()
    }
    fn axpy(self, coeff: f64, x: Self) -> Self;
}

impl NodeValue for f64 {
    #[inline]
    fn axpy(self, coeff: f64, x: f64) -> f64 {
        self + coeff * x
    }
}

impl NodeValue for Vec3 {
    #[inline]
    fn axpy(self, coeff: f64, x: Vec3) -> Vec3 {
        [self[0] + coeff * x[0], self[1] + coeff * x[1], self[2] + coeff * x[2]]
    }
}

impl NodeValue for Complex64 {
    #[inline]
    fn axpy(self, coeff: f64, x: Complex64) -> Complex64 {
        self + x * coeff
    }
}

/// Accuracy of a difference operator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DiffOrder {
    #[default]
    Second,
    Fourth,
}

const MAX_TERMS: usize = 6;

/// Up to [`MAX_TERMS`] `(line position, coefficient)` pairs.
#[derive(Clone, Copy, Debug, Default)]
struct Terms {
    len: usize,
    at: [(usize, f64); MAX_TERMS],
}

impl Terms {
    fn push(&mut self, q: usize, c: f64) {
        self.at[self.len] = (q, c);
        self.len += 1;
    }

    fn iter(&self) -> impl Iterator<Item = &(usize, f64)> {
        self.at[..self.len].iter()
    }
}

/// Stencil rows for one axis, indexed by position along the line.
struct AxisStencil {
    rows: Vec<Terms>,
}

impl AxisStencil {
    fn forward(n: usize, h: f64, policy: BoundaryPolicy, order: DiffOrder) -> Self {
        let s = 0.5 / h;
        let f = 1.0 / (12.0 * h);
        let rows = (0..n)
            .map(|p| {
                let mut t = Terms::default();
                let wide = order == DiffOrder::Fourth
                    && (policy == BoundaryPolicy::Periodic || (p >= 2 && p + 2 < n));
                if wide {
                    t.push((p + 2) % n, -f);
                    t.push((p + 1) % n, 8.0 * f);
                    t.push((p + n - 1) % n, -8.0 * f);
                    t.push((p + n - 2) % n, f);
                    return t;
                }
                match policy {
                    BoundaryPolicy::Periodic => {
                        t.push((p + 1) % n, s);
                        t.push((p + n - 1) % n, -s);
                    }
                    BoundaryPolicy::FixedVacuum => {
                        if p == 0 {
                            t.push(0, -3.0 * s);
                            t.push(1, 4.0 * s);
                            t.push(2, -s);
                        } else if p == n - 1 {
                            t.push(n - 1, 3.0 * s);
                            t.push(n - 2, -4.0 * s);
                            t.push(n - 3, s);
                        } else {
                            t.push(p + 1, s);
                            t.push(p - 1, -s);
                        }
                    }
                }
                t
            })
            .collect();
        AxisStencil { rows }
    }

    /// Rows of the transposed operator, built by scattering the forward rows.
    fn transpose(n: usize, h: f64, policy: BoundaryPolicy, order: DiffOrder) -> Self {
        let fwd = Self::forward(n, h, policy, order);
        let mut rows = vec![Terms::default(); n];
        for (p, row) in fwd.rows.iter().enumerate() {
            for &(q, c) in row.iter() {
                rows[q].push(p, c);
            }
        }
        AxisStencil { rows }
    }
}

fn apply<T: NodeValue>(grid: &Grid, data: &[T], axis: usize, stencil: &AxisStencil) -> Vec<T> {
    assert_eq!(data.len(), grid.len(), "field length does not match grid");
    let plane = grid.plane_len();
    let stride = grid.stride(axis) as isize;
    let mut out = vec![T::zero(); grid.len()];
    out.par_chunks_mut(plane).enumerate().for_each(|(k, chunk)| {
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let p = [i, j, k][axis];
                let idx = grid.index(i, j, k) as isize;
                let mut acc = T::zero();
                for &(q, c) in stencil.rows[p].iter() {
                    let nb = idx + (q as isize - p as isize) * stride;
                    acc = acc.axpy(c, data[nb as usize]);
                }
                chunk[i + grid.nx * j] = acc;
            }
        }
    });
    out
}

/// Second-order derivative of `data` along `axis` (0 = x, 1 = y, 2 = z).
pub fn central_diff<T: NodeValue>(grid: &Grid, data: &[T], axis: usize) -> Vec<T> {
    central_diff_with(grid, data, axis, DiffOrder::Second)
}

pub fn central_diff_with<T: NodeValue>(grid: &Grid, data: &[T], axis: usize, order: DiffOrder) -> Vec<T> {
    let n = grid.dims()[axis];
    apply(grid, data, axis, &AxisStencil::forward(n, grid.h, grid.boundary, order))
}

/// Transpose of [`central_diff`]: for every node `j`, `sum_i D[i][j] g[i]`.
/// This is the adjoint used when differentiating lattice energies.
pub fn central_diff_transpose<T: NodeValue>(grid: &Grid, data: &[T], axis: usize) -> Vec<T> {
    central_diff_transpose_with(grid, data, axis, DiffOrder::Second)
}

pub fn central_diff_transpose_with<T: NodeValue>(grid: &Grid, data: &[T], axis: usize, order: DiffOrder) -> Vec<T> {
    let n = grid.dims()[axis];
    apply(grid, data, axis, &AxisStencil::transpose(n, grid.h, grid.boundary, order))
}

/// All three second-order partial derivatives.
pub fn gradient<T: NodeValue>(grid: &Grid, data: &[T]) -> [Vec<T>; 3] {
    gradient_with(grid, data, DiffOrder::Second)
}

pub fn gradient_with<T: NodeValue>(grid: &Grid, data: &[T], order: DiffOrder) -> [Vec<T>; 3] {
    std::array::from_fn(|axis| central_diff_with(grid, data, axis, order))
}

/// Discrete curl of a vector field.
pub fn curl(grid: &Grid, data: &[Vec3]) -> Vec<Vec3> {
    curl_with(grid, data, DiffOrder::Second)
}

pub fn curl_with(grid: &Grid, data: &[Vec3], order: DiffOrder) -> Vec<Vec3> {
    let [dx, dy, dz] = gradient_with(grid, data, order);
    (0..grid.len())
        .map(|i| {
            [
                dy[i][2] - dz[i][1],
                dz[i][0] - dx[i][2],
                dx[i][1] - dy[i][0],
            ]
        })
        .collect()
}

/// Discrete divergence of a vector field.
pub fn divergence(grid: &Grid, data: &[Vec3]) -> Vec<f64> {
    divergence_with(grid, data, DiffOrder::Second)
}

pub fn divergence_with(grid: &Grid, data: &[Vec3], order: DiffOrder) -> Vec<f64> {
    let [dx, dy, dz] = gradient_with(grid, data, order);
    (0..grid.len()).map(|i| dx[i][0] + dy[i][1] + dz[i][2]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn periodic(n: usize) -> Grid {
        Grid::periodic_cube(n, 2.0 * PI).unwrap()
    }

    #[test]
    fn constant_field_has_zero_derivative() {
        for g in [Grid::cube(9, 1.0).unwrap(), periodic(10)] {
            let data = vec![[1.5, -2.0, 0.25]; g.len()];
            for axis in 0..3 {
                assert!(central_diff(&g, &data, axis).iter().all(|v| *v == [0.0; 3]));
            }
        }
    }

    #[test]
    fn quadratic_is_exact_including_boundary() {
        let g = Grid::new([9, 10, 11], 0.3, [-1.0, 0.5, 2.0], BoundaryPolicy::FixedVacuum).unwrap();
        let f: Vec<f64> = (0..g.len())
            .map(|i| {
                let p = g.position_of(i);
                2.0 * p[0] * p[0] - p[1] + 0.5 * p[2] * p[2] + p[0]
            })
            .collect();
        let [dx, dy, dz] = gradient(&g, &f);
        for i in 0..g.len() {
            let p = g.position_of(i);
            assert!((dx[i] - (4.0 * p[0] + 1.0)).abs() < 1e-11);
            assert!((dy[i] + 1.0).abs() < 1e-11);
            assert!((dz[i] - p[2]).abs() < 1e-11);
        }
    }

    #[test]
    fn linear_ramp_gives_unit_slope() {
        let g = Grid::cube(12, 3.0).unwrap();
        let f: Vec<Vec3> = (0..g.len()).map(|i| [g.position_of(i)[0], 0.0, 0.0]).collect();
        let d = central_diff(&g, &f, 0);
        assert!(d.iter().all(|v| (v[0] - 1.0).abs() < 1e-12));
    }

    fn sine_error(n: usize) -> f64 {
        let g = periodic(n);
        let f: Vec<f64> = (0..g.len()).map(|i| g.position_of(i)[0].sin()).collect();
        let d = central_diff(&g, &f, 0);
        (0..g.len())
            .map(|i| (d[i] - g.position_of(i)[0].cos()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn periodic_sine_converges_at_second_order() {
        let errs: Vec<f64> = [16, 32, 64].iter().map(|&n| sine_error(n)).collect();
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((1.8..=2.2).contains(&order), "order {order}");
        }
    }

    #[test]
    fn fourth_order_periodic_sine() {
        let err = |n: usize| {
            let g = periodic(n);
            let f: Vec<f64> = (0..g.len()).map(|i| g.position_of(i)[1].sin()).collect();
            let d = central_diff_with(&g, &f, 1, DiffOrder::Fourth);
            (0..g.len()).map(|i| (d[i] - g.position_of(i)[1].cos()).abs()).fold(0.0, f64::max)
        };
        let order = (err(16) / err(32)).log2();
        assert!((3.8..=4.2).contains(&order), "order {order}");
    }

    #[test]
    fn one_sided_boundary_converges_at_second_order() {
        let err = |n: usize| {
            let g = Grid::new([n, 8, 8], 1.0 / (n - 1) as f64, [0.0; 3], BoundaryPolicy::FixedVacuum).unwrap();
            let f: Vec<f64> = (0..g.len()).map(|i| (3.0 * g.position_of(i)[0]).exp()).collect();
            let d = central_diff(&g, &f, 0);
            (0..g.len())
                .map(|i| (d[i] - 3.0 * (3.0 * g.position_of(i)[0]).exp()).abs())
                .fold(0.0, f64::max)
        };
        let e = [err(17), err(33), err(65)];
        for w in e.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!((1.8..=2.2).contains(&order), "order {order}");
        }
    }

    #[test]
    fn transpose_is_adjoint() {
        for g in [
            Grid::new([8, 9, 10], 0.7, [0.0; 3], BoundaryPolicy::FixedVacuum).unwrap(),
            Grid::new([8, 9, 10], 0.7, [0.0; 3], BoundaryPolicy::Periodic).unwrap(),
        ] {
            let u: Vec<f64> = (0..g.len()).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
            let v: Vec<f64> = (0..g.len()).map(|i| ((i * 104729) % 97) as f64 / 48.0 - 1.0).collect();
            for axis in 0..3 {
                for order in [DiffOrder::Second, DiffOrder::Fourth] {
                    let du = central_diff_with(&g, &u, axis, order);
                    let dtv = central_diff_transpose_with(&g, &v, axis, order);
                    let lhs: f64 = du.iter().zip(&v).map(|(a, b)| a * b).sum();
                    let rhs: f64 = u.iter().zip(&dtv).map(|(a, b)| a * b).sum();
                    assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0));
                }
            }
        }
    }
}
