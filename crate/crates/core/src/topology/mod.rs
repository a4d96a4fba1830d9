//! The H tensor, its potential, the two Hopf-charge evaluators and preimage
//! line tracing.

mod charge;
pub mod export;
mod hfield;
mod linking;
pub mod potential;
mod trace;

pub use charge::{
    charge_report, generic_value, generic_value_at, hopf_charge_linking, hopf_charge_whitehead, hopf_charge_whitehead_from,
    preimage_linking, trace_preimage, whitehead_integral, ChargeOptions, ChargeReport, PreimageLinking, Residuals,
    GENERIC_VALUE_ANGLE, PREIMAGE_TOLERANCE, SOUTH_POLE, VACUUM_EXCLUSION, WHITEHEAD_NORMALIZATION,
};
pub use hfield::{compute_h, compute_h_with, HField};
pub use linking::{linking_number, linking_number_with, polygon_linking, polygon_separation, segment_pair, Linking};
pub use potential::{solve_potential, solve_potential_with, PotentialMethod, PotentialSolution};
pub use trace::{nearest_node, nearest_nodes, polish_seed, trace_field_line, FieldLine, Termination, TraceParams, MIN_SEED_FIELD};
