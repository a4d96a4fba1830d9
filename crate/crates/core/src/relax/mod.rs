//! Gradient flow `dn/ds = -δE/δn` on the unit sphere, with adaptive steps,
//! convergence detection, charge monitoring and checkpoints.
//!
//! The flow is the descent direction. Ascent would never stabilize on a
//! minimum, so the sign is fixed by the minimization it serves.

mod checkpoint;
mod flow;
mod symmetry;

pub use checkpoint::{checkpoint_paths, load_checkpoint, read_run_log, write_checkpoint, RunLog, Sidecar};
pub use flow::{
    flatness, flow_step, relax, relax_observed, resume, ChargeSample, EnergySample, RelaxParams, RelaxState, Status,
    StepRecord, DEFAULT_ENERGY_FLAT_TOL,
};
pub use symmetry::{
    axial_symmetry_score, fit_symmetry_axis, outer_fraction, radial_variation, Axis, SymmetryFit, MAX_OUTER_FRACTION,
    OUTER_SHELL_LAYERS,
};
