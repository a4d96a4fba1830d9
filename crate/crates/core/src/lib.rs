//! Lattice solver for hopfions of the Faddeev model.
//!
//! The crate finds string-like topological solitons by gradient-flow
//! minimization of `E = a ∫ (∂n)² + b ∫ H²` at fixed Hopf charge. It carries two
//! independent charge evaluators (a volume integral `∫ B·C` and the linking
//! number of traced preimage lines) and a gauge-invariant change of variables
//! for two-component Ginzburg–Landau fields.

pub mod ansatz;
pub mod energy;
mod error;
pub mod glmap;
pub mod lattice;
pub mod relax;
pub mod topology;
pub mod vec3;

pub use error::{Error, Result};
pub use lattice::{BoundaryPolicy, DirectorField, Grid, ScalarField, VectorField3};
