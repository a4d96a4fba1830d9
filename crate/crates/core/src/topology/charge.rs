use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::potential::{solve_potential_with, PotentialMethod, DEFAULT_CLOSEDNESS_TOL};
use super::trace::{nearest_nodes, polish_seed, trace_field_line, FieldLine, TraceParams};
use super::{compute_h, linking_number, HField, Linking};
use crate::error::{Error, Result};
use crate::lattice::{reduce, DirectorField, VectorField3};
use crate::vec3::{self, Vec3};

/// Normalization of the Whitehead integral `Q = κ ∫ B·C d³x`.
///
/// `B` is the pullback of the sphere's area form, which has total area 4π, so
/// `B / 4π` pulls back the unit-area form and `C / 4π` is its potential. The
/// Hopf invariant is the integral of `α ∧ dα` for that normalized pair, which
/// gives `κ = 1 / (4π)² = 1 / 16π²`. Calibrated against the standard Hopf map
/// (charge +1 with preimages oriented along `B`).
pub const WHITEHEAD_NORMALIZATION: f64 = 1.0 / (16.0 * PI * PI);

/// Preimage values within this distance of the vacuum are refused: their
/// lines run off to the box faces.
pub const VACUUM_EXCLUSION: f64 = 0.05;

/// A seed node must be at least this close to the requested value.
pub const PREIMAGE_TOLERANCE: f64 = 0.1;

/// Polar angle of the default linking values.
pub const GENERIC_VALUE_ANGLE: f64 = 2.5;

/// `(sin θ, 0, cos θ)` with `θ = GENERIC_VALUE_ANGLE`.
pub fn generic_value() -> Vec3 {
    generic_value_at(0.0)
}

/// Point at polar angle `GENERIC_VALUE_ANGLE` and azimuth `phi`.
pub fn generic_value_at(phi: f64) -> Vec3 {
    let (s, c) = GENERIC_VALUE_ANGLE.sin_cos();
    [s * phi.cos(), s * phi.sin(), c]
}

pub const SOUTH_POLE: Vec3 = [0.0, 0.0, -1.0];

/// `κ h³ Σ B·C`.
pub fn whitehead_integral(b: &VectorField3, c: &VectorField3) -> f64 {
    let grid = b.grid;
    WHITEHEAD_NORMALIZATION * grid.cell_volume() * reduce::node_sum(&grid, |i| vec3::dot(b.data[i], c.data[i]))
}

pub fn hopf_charge_whitehead(n: &DirectorField) -> Result<f64> {
    let h = compute_h(n);
    hopf_charge_whitehead_from(&h, PotentialMethod::Spectral).map(|(q, _, _)| q)
}

/// Returns `(q, closedness, curl_residual)`.
pub fn hopf_charge_whitehead_from(h: &HField, method: PotentialMethod) -> Result<(f64, f64, f64)> {
    if h.is_zero() {
        return Ok((0.0, 0.0, 0.0));
    }
    let sol = solve_potential_with(h, method, DEFAULT_CLOSEDNESS_TOL)?;
    Ok((whitehead_integral(&h.b, &sol.c), sol.closedness, sol.curl_residual))
}

/// Traces the preimage line of `value`, seeded at the best-matching node and
/// polished onto the line.
const SEED_CANDIDATES: usize = 8;

pub fn trace_preimage(h: &HField, value: Vec3, params: &TraceParams) -> Result<FieldLine> {
    let value = vec3::normalized(value);
    if vec3::dist(value, h.n.vacuum) < VACUUM_EXCLUSION {
        return Err(Error::InvalidParameter(format!(
            "value {value:?} is within {VACUUM_EXCLUSION} of the vacuum"
        )));
    }
    // The preimage rarely passes through a node, so the tolerance applies
    // to the polished seed. A few candidates guard against a polish that
    // stalls on a fold of the map.
    for (idx, _) in nearest_nodes(h, value, SEED_CANDIDATES) {
        let (seed, residual) = polish_seed(h, h.grid.position_of(idx), value, params.interpolation);
        if residual <= PREIMAGE_TOLERANCE {
            return trace_field_line(h, seed, params);
        }
    }
    Err(Error::NoPreimage { value, tolerance: PREIMAGE_TOLERANCE })
}

#[derive(Clone, Debug)]
pub struct PreimageLinking {
    pub line_a: FieldLine,
    pub line_b: FieldLine,
    pub linking: Linking,
}

pub fn preimage_linking(h: &HField, value_a: Vec3, value_b: Vec3, params: &TraceParams) -> Result<PreimageLinking> {
    if vec3::dist(vec3::normalized(value_a), vec3::normalized(value_b)) < 1e-6 {
        return Err(Error::InvalidParameter("preimage values must differ".into()));
    }
    let line_a = trace_preimage(h, value_a, params)?;
    let line_b = trace_preimage(h, value_b, params)?;
    let linking = linking_number(&line_a, &line_b)?;
    Ok(PreimageLinking { line_a, line_b, linking })
}

pub fn hopf_charge_linking(n: &DirectorField, value_a: Vec3, value_b: Vec3) -> Result<i64> {
    let h = compute_h(n);
    let params = TraceParams::for_grid(&n.grid);
    Ok(preimage_linking(&h, value_a, value_b, &params)?.linking.value)
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Residuals {
    pub div_b: f64,
    pub curl_mismatch: f64,
    pub tracer_drift: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChargeReport {
    pub q_whitehead: f64,
    pub q_linking: Option<i64>,
    pub q_rounded: i64,
    pub linking_raw: Option<f64>,
    pub residuals: Residuals,
    /// Why the linking evaluator gave no answer, if it did not.
    pub linking_error: Option<String>,
}

impl ChargeReport {
    pub fn evaluators_agree(&self) -> bool {
        self.q_linking.map_or(false, |q| q == self.q_rounded)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ChargeOptions {
    pub value_a: Vec3,
    pub value_b: Vec3,
    pub trace: Option<TraceParams>,
    pub method: PotentialMethod,
}

impl Default for ChargeOptions {
    fn default() -> Self {
        // Two antipodal azimuths. The south pole is avoided because it is a
        // critical value of twisted fields with |k| > 1.
        ChargeOptions {
            value_a: generic_value_at(0.0),
            value_b: generic_value_at(std::f64::consts::PI),
            trace: None,
            method: PotentialMethod::Spectral,
        }
    }
}

/// Runs both evaluators. A failing linking evaluation is recorded in the
/// report rather than returned as an error; a failing potential solve is an
/// error.
pub fn charge_report(n: &DirectorField, opts: &ChargeOptions) -> Result<ChargeReport> {
    let h = compute_h(n);
    let div_b = h.divergence_residual();
    let (q_whitehead, _, curl_mismatch) = hopf_charge_whitehead_from(&h, opts.method)?;
    let params = opts.trace.unwrap_or_else(|| TraceParams::for_grid(&n.grid));
    let (q_linking, linking_raw, tracer_drift, linking_error) =
        match preimage_linking(&h, opts.value_a, opts.value_b, &params) {
            Ok(pl) => (
                Some(pl.linking.value),
                Some(pl.linking.raw),
                Some(pl.line_a.drift.max(pl.line_b.drift)),
                None,
            ),
            Err(e) => (None, None, None, Some(e.to_string())),
        };
    Ok(ChargeReport {
        q_whitehead,
        q_linking,
        q_rounded: q_whitehead.round() as i64,
        linking_raw,
        residuals: Residuals { div_b, curl_mismatch, tracer_drift },
        linking_error,
    })
}
