//! Lattice geometry, node-centered field storage, stencils and file formats.

mod field;
mod grid;
pub mod interp;
pub mod io;
pub mod reduce;
pub mod spectral;
pub mod stencil;
pub mod vtk;

pub use field::{ComplexField, DirectorField, ScalarField, VectorField3, COLLAPSE_THRESHOLD, NORTH_POLE};
pub use grid::{BoundaryPolicy, Grid, MIN_NODES};
pub use interp::{interpolate, tricubic, trilinear, trilinear_sample, Interpolation};
pub use stencil::{central_diff, central_diff_transpose, central_diff_with, curl, divergence, DiffOrder, NodeValue};

/// Free-function form of [`DirectorField::normalize`].
pub fn normalize(f: &DirectorField) -> crate::Result<DirectorField> {
    f.normalize()
}
