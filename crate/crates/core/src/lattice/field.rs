use num_complex::Complex64;

use super::{reduce, Grid};
use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

/// Default vacuum direction, the north pole of the target sphere.
pub const NORTH_POLE: Vec3 = [0.0, 0.0, 1.0];

/// Nodes whose norm falls below this are treated as a collapsed field.
pub const COLLAPSE_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField { data: vec![0.0; grid.len()], grid }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(Vec3) -> f64 + Sync) -> Self {
        let data = reduce::node_map(&grid, |idx| f(grid.position_of(idx)));
        ScalarField { grid, data }
    }

    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * reduce::node_sum(&self.grid, |i| self.data[i])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField3 {
    pub grid: Grid,
    pub data: Vec<Vec3>,
}

impl VectorField3 {
    pub fn zeros(grid: Grid) -> Self {
        VectorField3 { data: vec![[0.0; 3]; grid.len()], grid }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(Vec3) -> Vec3 + Sync) -> Self {
        let data = reduce::node_map(&grid, |idx| f(grid.position_of(idx)));
        VectorField3 { grid, data }
    }

    /// Discrete L2 norm `sqrt(h^3 sum |v|^2)`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_volume() * reduce::node_sum(&self.grid, |i| vec3::norm2(self.data[i]))).sqrt()
    }

    pub fn component(&self, c: usize) -> ScalarField {
        ScalarField { grid: self.grid, data: self.data.iter().map(|v| v[c]).collect() }
    }

    pub fn from_components(x: &ScalarField, y: &ScalarField, z: &ScalarField) -> Result<Self> {
        if !x.grid.same_shape(&y.grid) || !x.grid.same_shape(&z.grid) {
            return Err(Error::GridMismatch);
        }
        let data = (0..x.data.len()).map(|i| [x.data[i], y.data[i], z.data[i]]).collect();
        Ok(VectorField3 { grid: x.grid, data })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    pub grid: Grid,
    pub data: Vec<Complex64>,
}

impl ComplexField {
    pub fn from_fn(grid: Grid, f: impl Fn(Vec3) -> Complex64 + Sync) -> Self {
        let data = reduce::node_map(&grid, |idx| f(grid.position_of(idx)));
        ComplexField { grid, data }
    }
}

/// Unit-vector field with values on the 2-sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectorField {
    pub grid: Grid,
    pub data: Vec<Vec3>,
    pub vacuum: Vec3,
}

impl DirectorField {
    /// Uniform field equal to `vacuum` everywhere.
    pub fn uniform(grid: Grid, vacuum: Vec3) -> Self {
        DirectorField { data: vec![vacuum; grid.len()], grid, vacuum }
    }

    pub fn vacuum(grid: Grid) -> Self {
        Self::uniform(grid, NORTH_POLE)
    }

    /// Samples `f` at every node and normalizes. Boundary nodes are set to the
    /// vacuum under [`super::BoundaryPolicy::FixedVacuum`].
    pub fn from_fn(grid: Grid, vacuum: Vec3, f: impl Fn(Vec3) -> Vec3 + Sync) -> Result<Self> {
        let data = reduce::node_map(&grid, |idx| f(grid.position_of(idx)));
        let mut field = DirectorField { grid, data, vacuum };
        field.normalize_in_place()?;
        Ok(field)
    }

    /// Divides every node by its norm and resets the clamped boundary layer.
    pub fn normalize_in_place(&mut self) -> Result<()> {
        if let Some((index, v)) = self
            .data
            .iter()
            .enumerate()
            .find(|(_, v)| !(vec3::norm(**v) >= COLLAPSE_THRESHOLD))
        {
            return Err(Error::FieldCollapse { index, norm: vec3::norm(*v) });
        }
        for v in self.data.iter_mut() {
            *v = vec3::normalized(*v);
        }
        self.reset_boundary();
        Ok(())
    }

    pub fn normalize(&self) -> Result<DirectorField> {
        let mut out = self.clone();
        out.normalize_in_place()?;
        Ok(out)
    }

    /// Writes the vacuum into every clamped boundary node.
    pub fn reset_boundary(&mut self) {
        let grid = self.grid;
        if grid.boundary != super::BoundaryPolicy::FixedVacuum {
            return;
        }
        for (idx, v) in self.data.iter_mut().enumerate() {
            if grid.is_boundary_index(idx) {
                *v = self.vacuum;
            }
        }
    }

    /// Largest `| |n| - 1 |` over all nodes.
    pub fn max_norm_error(&self) -> f64 {
        self.data.iter().map(|v| (vec3::norm(*v) - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn as_vector_field(&self) -> VectorField3 {
        VectorField3 { grid: self.grid, data: self.data.clone() }
    }

    pub fn component(&self, c: usize) -> ScalarField {
        ScalarField { grid: self.grid, data: self.data.iter().map(|v| v[c]).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BoundaryPolicy;

    fn grid() -> Grid {
        Grid::cube(8, 1.0).unwrap()
    }

    #[test]
    fn normalize_scales_to_unit() {
        let mut f = DirectorField::uniform(grid().with_boundary(BoundaryPolicy::Periodic), [0.0, 0.0, 2.0]);
        f.normalize_in_place().unwrap();
        assert!(f.data.iter().all(|v| *v == [0.0, 0.0, 1.0]));
    }

    #[test]
    fn normalize_detects_collapse() {
        let mut f = DirectorField::vacuum(grid());
        let idx = f.grid.index(3, 3, 3);
        f.data[idx] = [1e-9, 0.0, 0.0];
        match f.normalize_in_place() {
            Err(Error::FieldCollapse { index, .. }) => assert_eq!(index, idx),
            other => panic!("expected collapse, got {other:?}"),
        }
    }

    #[test]
    fn normalize_is_idempotent_and_keeps_boundary() {
        let g = grid();
        let f = DirectorField::from_fn(g, NORTH_POLE, |p| [p[0].sin() + 0.1, p[1] * p[2], 0.7 + p[0]]).unwrap();
        let once = f.normalize().unwrap();
        let twice = once.normalize().unwrap();
        assert!(f.max_norm_error() < 1e-12);
        for (a, b) in once.data.iter().zip(&twice.data) {
            for c in 0..3 {
                assert!((a[c] - b[c]).abs() <= 2.0 * f64::EPSILON);
            }
        }
        for idx in 0..g.len() {
            if g.is_boundary_index(idx) {
                assert_eq!(twice.data[idx], NORTH_POLE);
            }
        }
    }
}
