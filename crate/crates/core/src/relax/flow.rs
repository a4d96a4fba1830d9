use serde::{Deserialize, Serialize};

use crate::energy::{energy_and_gradient_with, energy_with, EnergyReport, Stencil};
use crate::error::{Error, Result};
use crate::lattice::{DirectorField, Grid, VectorField3};
use crate::topology::{compute_h, hopf_charge_whitehead_from, PotentialMethod};
use crate::vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxParams {
    pub ds0: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    /// Threshold on `max |δE/δn|` per unit volume.
    pub grad_tol: f64,
    /// Threshold on `(E(s - Δs) - E(s)) / (E Δs)` over the trailing window.
    pub energy_flat_tol: f64,
    /// Accepted steps in the flatness window.
    pub flat_window: usize,
    pub max_steps: usize,
    /// Zero disables charge monitoring.
    pub charge_check_every: usize,
    /// Zero disables checkpoints.
    pub checkpoint_every: usize,
    pub seed: u64,
    /// Lattice energy the flow descends.
    #[serde(default)]
    pub stencil: Stencil,
}

impl RelaxParams {
    /// Defaults scaled to the grid spacing: `ds0 = 0.01 h²`, `ds_max = 0.2 h²`.
    pub fn for_grid(grid: &Grid) -> Self {
        let h2 = grid.h * grid.h;
        RelaxParams {
            ds0: 0.01 * h2,
            ds_min: 1e-6 * h2,
            ds_max: 0.2 * h2,
            grad_tol: 1e-4,
            energy_flat_tol: DEFAULT_ENERGY_FLAT_TOL,
            flat_window: 50,
            max_steps: 20_000,
            charge_check_every: 100,
            checkpoint_every: 0,
            seed: 0,
            stencil: Stencil::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("relax parameters: {what}")));
        if !(self.ds_min > 0.0 && self.ds_min <= self.ds0 && self.ds0 <= self.ds_max) || !self.ds_max.is_finite() {
            return bad("need 0 < ds_min <= ds0 <= ds_max");
        }
        if !(self.grad_tol > 0.0) || !(self.energy_flat_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.flat_window == 0 {
            return bad("flat_window must be at least 1");
        }
        Ok(())
    }
}

/// Relative energy decrease per unit pseudo-time below which a run is
/// declared converged.
pub const DEFAULT_ENERGY_FLAT_TOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Running,
    Converged,
    Stalled,
    ChargeJump,
    FieldCollapse,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub s: f64,
    pub e2: f64,
    pub e4: f64,
}

impl EnergySample {
    pub fn total(&self) -> f64 {
        self.e2 + self.e4
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeSample {
    pub s: f64,
    pub q: f64,
}

/// One accepted step, as written to the run log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub s: f64,
    pub ds: f64,
    pub e2: f64,
    pub e4: f64,
    pub grad_max: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct RelaxState {
    pub n: DirectorField,
    pub s: f64,
    pub step: usize,
    /// Step size for the next attempt.
    pub ds: f64,
    pub energy_history: Vec<EnergySample>,
    pub charge_history: Vec<ChargeSample>,
    pub status: Status,
    /// Consecutive accepted steps without backtracking.
    pub clean_streak: u32,
    pub stencil: Stencil,
    current: Option<(EnergyReport, VectorField3)>,
}

impl RelaxState {
    pub fn new(n: DirectorField, params: &RelaxParams) -> Self {
        RelaxState {
            n,
            s: 0.0,
            step: 0,
            ds: params.ds0,
            energy_history: Vec::new(),
            charge_history: Vec::new(),
            status: Status::Running,
            clean_streak: 0,
            stencil: params.stencil,
            current: None,
        }
    }

    /// Energy and gradient of the current field, computed once and cached.
    pub fn evaluate(&mut self, a: f64, b: f64) -> &(EnergyReport, VectorField3) {
        let stale = match &self.current {
            Some((rep, _)) => rep.a != a || rep.b != b || rep.stencil != self.stencil,
            None => true,
        };
        if stale {
            self.current = Some(energy_and_gradient_with(&self.n, a, b, self.stencil));
        }
        self.current.as_ref().expect("just filled")
    }

    /// `max |g|` over nodes, with `g` the per-volume tangential gradient.
    pub fn grad_max(&mut self, a: f64, b: f64) -> f64 {
        let vol = self.n.grid.cell_volume();
        let (_, g) = self.evaluate(a, b);
        g.data.iter().map(|v| vec3::norm(*v)).fold(0.0, f64::max) / vol
    }

    pub fn energy(&mut self, a: f64, b: f64) -> EnergyReport {
        self.evaluate(a, b).0.clone()
    }

    /// Rounded charge of the first recorded sample.
    pub fn sector(&self) -> Option<i64> {
        self.charge_history.first().map(|c| c.q.round() as i64)
    }
}

fn check_couplings(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("couplings a = {a}, b = {b} must be positive")));
    }
    Ok(())
}

/// One explicit Euler step of `dn/ds = -δE/δn` followed by renormalization,
/// with backtracking on energy increase.
pub fn flow_step(state: &mut RelaxState, params: &RelaxParams, a: f64, b: f64) -> Result<()> {
    if state.status != Status::Running {
        return Err(Error::NotRunning);
    }
    check_couplings(a, b)?;
    let vol = state.n.grid.cell_volume();
    let (e_before, grad) = {
        let (rep, g) = state.evaluate(a, b);
        (rep.total, g.clone())
    };
    let mut ds = state.ds.max(params.ds_min);
    let mut backtracked = false;
    let trial = loop {
        let mut trial = state.n.clone();
        for (v, g) in trial.data.iter_mut().zip(&grad.data) {
            *v = vec3::sub(*v, vec3::scale(*g, ds / vol));
        }
        if trial.normalize_in_place().is_err() {
            state.status = Status::FieldCollapse;
            return Ok(());
        }
        if energy_with(&trial, a, b, state.stencil).total <= e_before {
            break trial;
        }
        backtracked = true;
        ds *= 0.5;
        if ds < params.ds_min {
            state.status = Status::Stalled;
            return Ok(());
        }
    };

    let (report, trial_grad) = energy_and_gradient_with(&trial, a, b, state.stencil);
    state.n = trial;
    state.s += ds;
    state.step += 1;
    state.energy_history.push(EnergySample { s: state.s, e2: report.e2, e4: report.e4 });
    state.current = Some((report, trial_grad));
    state.ds = ds;
    if backtracked {
        state.clean_streak = 0;
    } else {
        state.clean_streak += 1;
        if state.clean_streak >= 2 {
            state.ds = (1.2 * ds).min(params.ds_max);
            state.clean_streak = 0;
        }
    }
    Ok(())
}

/// Relative energy decrease per unit pseudo-time over the trailing window,
/// or `None` while the history is shorter than the window.
pub fn flatness(history: &[EnergySample], window: usize) -> Option<f64> {
    if history.len() <= window {
        return None;
    }
    let new = history[history.len() - 1];
    let old = history[history.len() - 1 - window];
    let ds = new.s - old.s;
    let e = new.total().abs();
    if ds <= 0.0 {
        return None;
    }
    if e == 0.0 {
        return Some(0.0);
    }
    Some((old.total() - new.total()) / (e * ds))
}

fn charge_of(n: &DirectorField) -> Result<f64> {
    let h = compute_h(n);
    if h.is_zero() {
        return Ok(0.0);
    }
    Ok(hopf_charge_whitehead_from(&h, PotentialMethod::Spectral)?.0)
}

pub fn relax(n_init: DirectorField, params: &RelaxParams, a: f64, b: f64) -> Result<RelaxState> {
    relax_observed(n_init, params, a, b, |_, _| Ok(()))
}

/// Runs the flow from `n_init`; `observer` sees every accepted step.
pub fn relax_observed<F>(n_init: DirectorField, params: &RelaxParams, a: f64, b: f64, observer: F) -> Result<RelaxState>
where
    F: FnMut(&StepRecord, &RelaxState) -> Result<()>,
{
    params.validate()?;
    check_couplings(a, b)?;
    let n = n_init.normalize()?;
    resume(RelaxState::new(n, params), params, a, b, observer)
}

/// Continues a run (fresh or restored from a checkpoint) until it leaves
/// the `Running` status or hits `max_steps`.
pub fn resume<F>(mut state: RelaxState, params: &RelaxParams, a: f64, b: f64, mut observer: F) -> Result<RelaxState>
where
    F: FnMut(&StepRecord, &RelaxState) -> Result<()>,
{
    params.validate()?;
    check_couplings(a, b)?;
    if state.status != Status::Running {
        return Ok(state);
    }
    let monitor = params.charge_check_every > 0;
    if monitor && state.charge_history.is_empty() {
        state.charge_history.push(ChargeSample { s: state.s, q: charge_of(&state.n)? });
    }
    if state.energy_history.is_empty() {
        let rep = state.energy(a, b);
        state.energy_history.push(EnergySample { s: state.s, e2: rep.e2, e4: rep.e4 });
    }
    if state.grad_max(a, b) <= params.grad_tol {
        state.status = Status::Converged;
        return Ok(state);
    }

    while state.status == Status::Running && state.step < params.max_steps {
        flow_step(&mut state, params, a, b)?;
        if state.status != Status::Running {
            break;
        }
        let grad_max = state.grad_max(a, b);
        let converged = grad_max <= params.grad_tol
            || flatness(&state.energy_history, params.flat_window).is_some_and(|r| r <= params.energy_flat_tol);
        let mut q = None;
        if monitor && (state.step % params.charge_check_every == 0 || converged) {
            match charge_of(&state.n) {
                Ok(value) => {
                    state.charge_history.push(ChargeSample { s: state.s, q: value });
                    if Some(value.round() as i64) != state.sector() {
                        state.status = Status::ChargeJump;
                    }
                    q = Some(value);
                }
                // B has stopped being a curl on this lattice: the field has
                // developed cell-scale defects and no longer has a
                // measurable charge, which only happens on the way out of
                // the sector.
                Err(Error::NotClosed { .. }) => state.status = Status::ChargeJump,
                Err(e) => return Err(e),
            }
        }
        if converged && state.status == Status::Running {
            state.status = Status::Converged;
        }
        let hist = &state.energy_history;
        let (last, prev) = (hist[hist.len() - 1], hist[hist.len() - 2]);
        let record = StepRecord { step: state.step, s: state.s, ds: last.s - prev.s, e2: last.e2, e4: last.e4, grad_max, q };
        observer(&record, &state)?;
    }
    Ok(state)
}
