//! Run configuration: one TOML file with a section per concern. Every key is
//! optional; command-line flags override the file.

use std::path::{Path, PathBuf};

use hopfion::ansatz::{AnsatzSpec, Profile};
use hopfion::energy::Stencil;
use hopfion::lattice::Interpolation;
use hopfion::relax::RelaxParams;
use hopfion::topology::TraceParams;
use hopfion::Grid;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub ansatz: AnsatzSection,
    #[serde(default)]
    pub couplings: Couplings,
    #[serde(default)]
    pub relax: RelaxSection,
    #[serde(default)]
    pub trace: TraceSection,
    #[serde(default)]
    pub output: OutputSection,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nodes: Option<usize>,
    pub half_width: Option<f64>,
    pub boundary: Option<Boundary>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    FixedVacuum,
    Periodic,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSection {
    pub m: Option<i32>,
    pub k: Option<i32>,
    pub profile: Option<ProfileName>,
    pub core_radius: Option<f64>,
    /// Tangential noise added after the ansatz, at most 0.2.
    pub perturbation: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    Polynomial,
    Exponential,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Couplings {
    pub a: f64,
    pub b: f64,
}

impl Default for Couplings {
    fn default() -> Self {
        Couplings { a: 1.0, b: 1.0 }
    }
}

/// Overrides on top of [`RelaxParams::for_grid`]. Step sizes are given in
/// units of `h²`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelaxSection {
    pub ds0: Option<f64>,
    pub ds_min: Option<f64>,
    pub ds_max: Option<f64>,
    pub grad_tol: Option<f64>,
    pub energy_flat_tol: Option<f64>,
    pub flat_window: Option<usize>,
    pub max_steps: Option<usize>,
    pub charge_check_every: Option<usize>,
    pub checkpoint_every: Option<usize>,
    pub stencil: Option<StencilName>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StencilName {
    Compact,
    Central,
    Improved,
}

impl From<StencilName> for Stencil {
    fn from(s: StencilName) -> Self {
        match s {
            StencilName::Compact => Stencil::Compact,
            StencilName::Central => Stencil::Central,
            StencilName::Improved => Stencil::Improved,
        }
    }
}

/// Tracer overrides; lengths in units of `h`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSection {
    pub step: Option<f64>,
    pub max_steps: Option<usize>,
    pub closure_tol: Option<f64>,
    pub trilinear: Option<bool>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn grid(&self) -> CliResult<Grid> {
        let nodes = self.grid.nodes.unwrap_or(48);
        let half_width = self.grid.half_width.unwrap_or(6.0);
        let grid = match self.grid.boundary.unwrap_or(Boundary::FixedVacuum) {
            Boundary::FixedVacuum => Grid::cube(nodes, half_width)?,
            Boundary::Periodic => Grid::periodic_cube(nodes, 2.0 * half_width)?,
        };
        Ok(grid)
    }

    pub fn ansatz(&self) -> CliResult<AnsatzSpec> {
        let half_width = self.grid.half_width.unwrap_or(6.0);
        let mut spec = AnsatzSpec::new(self.ansatz.m.unwrap_or(1), self.ansatz.k.unwrap_or(1), half_width);
        if let Some(p) = self.ansatz.profile {
            spec.profile = match p {
                ProfileName::Polynomial => Profile::PolynomialDecay,
                ProfileName::Exponential => Profile::ExponentialDecay,
            };
        }
        if let Some(r) = self.ansatz.core_radius {
            spec.core_radius = r;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn relax_params(&self, grid: &Grid) -> CliResult<RelaxParams> {
        let h2 = grid.h * grid.h;
        let r = &self.relax;
        let mut p = RelaxParams::for_grid(grid);
        if let Some(v) = r.ds0 {
            p.ds0 = v * h2;
        }
        if let Some(v) = r.ds_min {
            p.ds_min = v * h2;
        }
        if let Some(v) = r.ds_max {
            p.ds_max = v * h2;
        }
        if let Some(v) = r.grad_tol {
            p.grad_tol = v;
        }
        if let Some(v) = r.energy_flat_tol {
            p.energy_flat_tol = v;
        }
        if let Some(v) = r.flat_window {
            p.flat_window = v;
        }
        if let Some(v) = r.max_steps {
            p.max_steps = v;
        }
        if let Some(v) = r.charge_check_every {
            p.charge_check_every = v;
        }
        if let Some(v) = r.checkpoint_every {
            p.checkpoint_every = v;
        }
        if let Some(s) = r.stencil {
            p.stencil = s.into();
        }
        p.seed = self.seed.unwrap_or(0);
        p.validate()?;
        Ok(p)
    }

    pub fn trace_params(&self, grid: &Grid) -> CliResult<TraceParams> {
        let mut p = TraceParams::for_grid(grid);
        if let Some(v) = self.trace.step {
            p.step = v * grid.h;
        }
        if let Some(v) = self.trace.max_steps {
            p.max_steps = v;
        }
        if let Some(v) = self.trace.closure_tol {
            p.closure_tol = v * grid.h;
        }
        if self.trace.trilinear == Some(true) {
            p.interpolation = Interpolation::Trilinear;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn couplings(&self) -> CliResult<(f64, f64)> {
        let Couplings { a, b } = self.couplings;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(CliError::Validation(format!("couplings a = {a}, b = {b} must be positive")));
        }
        Ok((a, b))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

/// Parses `x,y,z` and normalizes it.
pub fn parse_value(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    let [x, y, z] = parts[..] else {
        return Err(format!("expected three comma-separated numbers, got '{text}'"));
    };
    let norm = (x * x + y * y + z * z).sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(format!("value '{text}' has no direction"));
    }
    Ok([x / norm, y / norm, z / norm])
}
