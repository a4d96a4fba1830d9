use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use hopfion::ansatz::{build_ansatz, perturb, AnsatzSpec};
use hopfion::glmap::{identity_check, random_gauge, random_grid, random_smooth_fields, GLFields, IdentityReport};
use hopfion::lattice::io::{load_director, save_director, write_atomic, RawField};
use hopfion::lattice::vtk::write_raw;
use hopfion::relax::{
    checkpoint_paths, load_checkpoint, resume, write_checkpoint, RelaxState, RunLog, Status, StepRecord,
};
use hopfion::topology::export::{write_csv, write_vtk_polylines};
use hopfion::topology::{charge_report, compute_h, linking_number, trace_preimage, ChargeOptions, ChargeReport, FieldLine};
use hopfion::{DirectorField, Grid};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// Amplitude of the gauge function used by `glcheck`.
const GAUGE_AMPLITUDE: f64 = 0.8;

fn json_to(path: &Path, value: &impl Serialize) -> CliResult<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")?;
        Ok(())
    })?;
    Ok(())
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn load_field(path: &Path) -> CliResult<DirectorField> {
    load_director(path).map_err(|e| match CliError::from(e) {
        CliError::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[derive(Serialize)]
struct Provenance<'a> {
    command: &'a str,
    version: &'a str,
    grid: Grid,
    ansatz: AnsatzSpec,
    perturbation: f64,
    seed: u64,
}

#[derive(Serialize)]
pub struct InitReport {
    pub field: PathBuf,
    pub sidecar: PathBuf,
    pub target_charge: i64,
}

pub fn init(cfg: &RunConfig, name: &str) -> CliResult<InitReport> {
    let grid = cfg.grid()?;
    let spec = cfg.ansatz()?;
    let amplitude = cfg.ansatz.perturbation.unwrap_or(0.0);
    if !(0.0..=hopfion::ansatz::MAX_PERTURBATION).contains(&amplitude) {
        return Err(CliError::Validation(format!("perturbation {amplitude} outside [0, 0.2]")));
    }
    let seed = cfg.seed.unwrap_or(0);
    let dir = cfg.out_dir();
    ensure_dir(&dir)?;
    let stem = dir.join(name);
    let (field_path, sidecar_path) = (stem.with_extension("hpfn"), stem.with_extension("json"));

    let n = perturb(&build_ansatz(grid, &spec)?, amplitude, seed)?;
    save_director(&n, &field_path)?;
    let prov = Provenance { command: "init", version: env!("CARGO_PKG_VERSION"), grid, ansatz: spec, perturbation: amplitude, seed };
    json_to(&sidecar_path, &prov)?;
    Ok(InitReport { field: field_path, sidecar: sidecar_path, target_charge: spec.charge() })
}

#[derive(Serialize)]
pub struct RelaxReport {
    pub status: Status,
    pub steps: usize,
    pub s: f64,
    pub e2: f64,
    pub e4: f64,
    pub total: f64,
    pub virial_ratio: Option<f64>,
    pub charge: Option<f64>,
    pub checkpoint: PathBuf,
    pub log: PathBuf,
}

impl RelaxReport {
    pub fn failed(&self) -> bool {
        matches!(self.status, Status::Stalled | Status::ChargeJump | Status::FieldCollapse)
    }
}

pub enum RelaxInput<'a> {
    Field(&'a Path),
    Resume(&'a Path),
}

pub fn relax(cfg: &RunConfig, input: RelaxInput, name: &str) -> CliResult<RelaxReport> {
    let (a, b) = cfg.couplings()?;
    // Step sizes scale with h², so the relations between them can be checked
    // before the field is read.
    cfg.relax_params(&Grid::cube(8, 1.0)?)?;
    let dir = cfg.out_dir();
    ensure_dir(&dir)?;
    let stem = dir.join(name);
    let log_path = stem.with_extension("log.jsonl");

    let (state, params, mut log) = match input {
        RelaxInput::Field(path) => {
            let n = load_field(path)?;
            let params = cfg.relax_params(&n.grid)?;
            (RelaxState::new(n.normalize()?, &params), params, RunLog::create(&log_path)?)
        }
        RelaxInput::Resume(from) => {
            let (state, meta) = load_checkpoint(from)?;
            if (meta.a, meta.b) != (a, b) {
                return Err(CliError::Validation(format!(
                    "checkpoint was written with a = {}, b = {}; the config asks for a = {a}, b = {b}",
                    meta.a, meta.b
                )));
            }
            // The run keeps its own parameters; only the budget and the
            // checkpoint schedule can be changed on resume.
            let mut params = meta.params;
            params.max_steps = cfg.relax.max_steps.unwrap_or(params.max_steps);
            params.checkpoint_every = cfg.relax.checkpoint_every.unwrap_or(params.checkpoint_every);
            (state, params, RunLog::append(&log_path)?)
        }
    };

    let every = params.checkpoint_every;
    let observer = |rec: &StepRecord, st: &RelaxState| {
        log.record(rec)?;
        if every > 0 && st.step % every == 0 {
            log.flush()?;
            write_checkpoint(&stem, st, &params, a, b)?;
        }
        Ok(())
    };
    let mut state = resume(state, &params, a, b, observer)?;
    log.flush()?;
    write_checkpoint(&stem, &state, &params, a, b)?;

    let rep = state.energy(a, b);
    Ok(RelaxReport {
        status: state.status,
        steps: state.step,
        s: state.s,
        e2: rep.e2,
        e4: rep.e4,
        total: rep.total,
        virial_ratio: rep.virial_ratio,
        charge: state.charge_history.last().map(|c| c.q),
        checkpoint: checkpoint_paths(&stem).0,
        log: log_path,
    })
}

pub fn charge(cfg: &RunConfig, input: &Path) -> CliResult<ChargeReport> {
    let n = load_field(input)?;
    if n.data.iter().all(|v| *v == n.vacuum) {
        return Ok(ChargeReport {
            q_whitehead: 0.0,
            q_linking: Some(0),
            q_rounded: 0,
            linking_raw: None,
            residuals: Default::default(),
            linking_error: None,
        });
    }
    let opts = ChargeOptions { trace: Some(cfg.trace_params(&n.grid)?), ..ChargeOptions::default() };
    Ok(charge_report(&n, &opts)?)
}

#[derive(Serialize)]
pub struct LineSummary {
    pub value: [f64; 3],
    pub closed: bool,
    pub vertices: usize,
    pub length: f64,
    pub drift: f64,
    pub csv: PathBuf,
}

#[derive(Serialize)]
pub struct TraceReport {
    pub lines: Vec<LineSummary>,
    pub vtk: PathBuf,
    /// Present when exactly two values were traced.
    pub linking: Option<i64>,
    pub linking_raw: Option<f64>,
}

pub fn trace(cfg: &RunConfig, input: &Path, values: &[[f64; 3]], name: &str) -> CliResult<TraceReport> {
    if values.is_empty() {
        return Err(CliError::Validation("at least one --value is required".into()));
    }
    let n = load_field(input)?;
    let params = cfg.trace_params(&n.grid)?;
    let dir = cfg.out_dir();
    ensure_dir(&dir)?;
    let h = compute_h(&n);
    let lines: Vec<FieldLine> = values.iter().map(|v| trace_preimage(&h, *v, &params)).collect::<Result<_, _>>()?;

    let mut summaries = Vec::new();
    for (i, (line, value)) in lines.iter().zip(values).enumerate() {
        let csv = dir.join(format!("{name}_{i}.csv"));
        write_atomic(&csv, |w| write_csv(w, line))?;
        summaries.push(LineSummary {
            value: *value,
            closed: line.closed,
            vertices: line.points.len(),
            length: line.length(),
            drift: line.drift,
            csv,
        });
    }
    let vtk = dir.join(format!("{name}.vtk"));
    write_atomic(&vtk, |w| write_vtk_polylines(w, "preimage lines", &lines))?;
    let (linking, linking_raw) = match lines.as_slice() {
        [l1, l2] => {
            let lk = linking_number(l1, l2)?;
            (Some(lk.value), Some(lk.raw))
        }
        _ => (None, None),
    };
    Ok(TraceReport { lines: summaries, vtk, linking, linking_raw })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ExportFormat {
    Vtk,
    Csv,
    Hpfn,
}

pub fn export(cfg: &RunConfig, input: &Path, format: ExportFormat, name: &str) -> CliResult<PathBuf> {
    let raw = RawField::load(input)?;
    let dir = cfg.out_dir();
    ensure_dir(&dir)?;
    let out = dir.join(match format {
        ExportFormat::Vtk => format!("{name}.vtk"),
        ExportFormat::Csv => format!("{name}.csv"),
        ExportFormat::Hpfn => format!("{name}.hpfn"),
    });
    match format {
        ExportFormat::Vtk => write_atomic(&out, |w| write_raw(w, name, &raw))?,
        ExportFormat::Csv => write_atomic(&out, |w| write_csv_grid(w, &raw))?,
        ExportFormat::Hpfn => raw.save(&out)?,
    }
    Ok(out)
}

/// One row per node: `i,j,k,x,y,z` followed by the components.
fn write_csv_grid(w: &mut BufWriter<File>, raw: &RawField) -> hopfion::Result<()> {
    let grid = raw.grid;
    let c = raw.components;
    let header: Vec<String> = (0..c).map(|k| format!("c{k}")).collect();
    writeln!(w, "i,j,k,x,y,z,{}", header.join(","))?;
    for idx in 0..grid.len() {
        let [i, j, k] = grid.coords(idx);
        let p = grid.position(i, j, k);
        write!(w, "{i},{j},{k},{:e},{:e},{:e}", p[0], p[1], p[2])?;
        for v in &raw.data[idx * c..(idx + 1) * c] {
            write!(w, ",{v:e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[derive(Serialize)]
pub struct GlCheckEntry {
    pub source: String,
    pub report: IdentityReport,
}

pub enum GlSource<'a> {
    Files(&'a [PathBuf]),
    Random { count: usize },
}

pub fn glcheck(cfg: &RunConfig, source: GlSource) -> CliResult<Vec<GlCheckEntry>> {
    let seed = cfg.seed.unwrap_or(0);
    let mut out = Vec::new();
    match source {
        GlSource::Files(paths) => {
            if paths.is_empty() {
                return Err(CliError::Validation("no input files".into()));
            }
            for p in paths {
                let f = GLFields::from_raw(RawField::load(p)?)?;
                let lambda = random_gauge(f.grid, seed, GAUGE_AMPLITUDE);
                out.push(GlCheckEntry { source: p.display().to_string(), report: identity_check(&f, &lambda)? });
            }
        }
        GlSource::Random { count } => {
            if count == 0 {
                return Err(CliError::Validation("--random needs at least one field".into()));
            }
            let grid = random_grid();
            for i in 0..count as u64 {
                let s = seed.wrapping_add(i);
                let f = random_smooth_fields(grid, s)?;
                let lambda = random_gauge(grid, s, GAUGE_AMPLITUDE);
                out.push(GlCheckEntry { source: format!("random seed {s}"), report: identity_check(&f, &lambda)? });
            }
        }
    }
    Ok(out)
}
