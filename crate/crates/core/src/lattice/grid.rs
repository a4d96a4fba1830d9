use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// How the outermost node layer is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryPolicy {
    /// The outermost layer is clamped to the vacuum value and never updated.
    FixedVacuum,
    /// Indices wrap around on every axis.
    Periodic,
}

impl BoundaryPolicy {
    pub fn to_byte(self) -> u8 {
        match self {
            BoundaryPolicy::FixedVacuum => 0,
            BoundaryPolicy::Periodic => 1,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(BoundaryPolicy::FixedVacuum),
            1 => Some(BoundaryPolicy::Periodic),
            _ => None,
        }
    }
}

/// Cubic lattice with uniform spacing `h`. Node `(i, j, k)` sits at
/// `origin + h * (i, j, k)`; storage is x-fastest, z-slowest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub h: f64,
    pub origin: Vec3,
    pub boundary: BoundaryPolicy,
}

pub const MIN_NODES: usize = 8;

impl Grid {
    pub fn new(dims: [usize; 3], h: f64, origin: Vec3, boundary: BoundaryPolicy) -> Result<Grid> {
        if dims.iter().any(|&n| n < MIN_NODES) {
            return Err(Error::InvalidGrid(format!(
                "node counts {dims:?} must all be at least {MIN_NODES}"
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing h = {h} must be positive")));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Grid { nx: dims[0], ny: dims[1], nz: dims[2], h, origin, boundary })
    }

    /// `n^3` fixed-vacuum box spanning `[-half_width, half_width]` on every axis,
    /// with nodes on both faces.
    pub fn cube(n: usize, half_width: f64) -> Result<Grid> {
        if !(half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width {half_width} must be positive")));
        }
        let h = 2.0 * half_width / (n.max(2) - 1) as f64;
        Grid::new([n, n, n], h, [-half_width; 3], BoundaryPolicy::FixedVacuum)
    }

    /// `n^3` periodic box of period `length` starting at `-length/2`.
    pub fn periodic_cube(n: usize, length: f64) -> Result<Grid> {
        if !(length > 0.0) {
            return Err(Error::InvalidGrid(format!("period {length} must be positive")));
        }
        let h = length / n.max(1) as f64;
        Grid::new([n, n, n], h, [-0.5 * length; 3], BoundaryPolicy::Periodic)
    }

    pub fn with_boundary(mut self, boundary: BoundaryPolicy) -> Grid {
        self.boundary = boundary;
        self
    }

    #[inline]
    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn plane_len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.nx;
        let j = (idx / self.nx) % self.ny;
        let k = idx / self.plane_len();
        [i, j, k]
    }

    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => 1,
            1 => self.nx,
            _ => self.plane_len(),
        }
    }

    #[inline]
    pub fn position(&self, i: usize, j: usize, k: usize) -> Vec3 {
        [
            self.origin[0] + self.h * i as f64,
            self.origin[1] + self.h * j as f64,
            self.origin[2] + self.h * k as f64,
        ]
    }

    #[inline]
    pub fn position_of(&self, idx: usize) -> Vec3 {
        let [i, j, k] = self.coords(idx);
        self.position(i, j, k)
    }

    /// Whether node `(i, j, k)` lies in the clamped outer layer.
    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize, k: usize) -> bool {
        self.boundary == BoundaryPolicy::FixedVacuum
            && (i == 0
                || j == 0
                || k == 0
                || i + 1 == self.nx
                || j + 1 == self.ny
                || k + 1 == self.nz)
    }

    #[inline]
    pub fn is_boundary_index(&self, idx: usize) -> bool {
        let [i, j, k] = self.coords(idx);
        self.is_boundary(i, j, k)
    }

    /// Distance in nodes from `(i, j, k)` to the nearest face.
    pub fn shell_depth(&self, i: usize, j: usize, k: usize) -> usize {
        [i, self.nx - 1 - i, j, self.ny - 1 - j, k, self.nz - 1 - k]
            .into_iter()
            .min()
            .unwrap_or(0)
    }

    /// Volume element for node quadrature.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.h * self.h * self.h
    }

    /// Upper corner of the node bounding box.
    pub fn extent_max(&self) -> Vec3 {
        self.position(self.nx - 1, self.ny - 1, self.nz - 1)
    }

    /// Geometric center of the node bounding box.
    pub fn center(&self) -> Vec3 {
        let hi = self.extent_max();
        [
            0.5 * (self.origin[0] + hi[0]),
            0.5 * (self.origin[1] + hi[1]),
            0.5 * (self.origin[2] + hi[2]),
        ]
    }

    /// Periodic length of each axis (`n * h`).
    pub fn period(&self) -> Vec3 {
        [self.nx as f64 * self.h, self.ny as f64 * self.h, self.nz as f64 * self.h]
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.dims() == other.dims()
            && self.h == other.h
            && self.origin == other.origin
            && self.boundary == other.boundary
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_bad_grids() {
        assert!(Grid::new([7, 8, 8], 1.0, [0.0; 3], BoundaryPolicy::Periodic).is_err());
        assert!(Grid::new([8, 8, 8], 0.0, [0.0; 3], BoundaryPolicy::Periodic).is_err());
        assert!(Grid::new([8, 8, 8], -1.0, [0.0; 3], BoundaryPolicy::Periodic).is_err());
        assert!(Grid::new([8, 9, 10], 0.5, [0.0; 3], BoundaryPolicy::FixedVacuum).is_ok());
    }

    #[test]
    fn cube_spans_symmetric_box() {
        let g = Grid::cube(33, 4.0).unwrap();
        assert_eq!(g.position(0, 0, 0), [-4.0; 3]);
        let hi = g.position(32, 32, 32);
        for c in hi {
            assert!((c - 4.0).abs() < 1e-12);
        }
        assert!(g.center().iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn index_roundtrip() {
        let g = Grid::new([9, 10, 11], 0.3, [0.0; 3], BoundaryPolicy::FixedVacuum).unwrap();
        for idx in [0, 1, 9, 90, 500, g.len() - 1] {
            let [i, j, k] = g.coords(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
        assert!(g.is_boundary(0, 4, 4));
        assert!(g.is_boundary(4, 4, 10));
        assert!(!g.is_boundary(4, 4, 4));
        assert!(!g.with_boundary(BoundaryPolicy::Periodic).is_boundary(0, 0, 0));
    }
}
