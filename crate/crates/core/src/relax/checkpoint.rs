//! Checkpoints (field container plus JSON sidecar) and the JSON-lines run log.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::flow::{ChargeSample, EnergySample, RelaxParams, RelaxState, Status, StepRecord};
use crate::error::Result;
use crate::lattice::io::{load_director, save_director, write_atomic};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub params: RelaxParams,
    pub a: f64,
    pub b: f64,
    pub s: f64,
    pub step: usize,
    pub ds: f64,
    pub clean_streak: u32,
    pub status: Status,
    pub energy_history: Vec<EnergySample>,
    pub charge_history: Vec<ChargeSample>,
}

/// `<stem>.hpfn` and `<stem>.json`.
pub fn checkpoint_paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("hpfn"), stem.with_extension("json"))
}

/// Writes the field first and the sidecar second, each atomically, so a
/// sidecar on disk always describes a complete field file.
pub fn write_checkpoint(stem: &Path, state: &RelaxState, params: &RelaxParams, a: f64, b: f64) -> Result<()> {
    let (field, sidecar) = checkpoint_paths(stem);
    save_director(&state.n, &field)?;
    let meta = Sidecar {
        params: *params,
        a,
        b,
        s: state.s,
        step: state.step,
        ds: state.ds,
        clean_streak: state.clean_streak,
        status: state.status,
        energy_history: state.energy_history.clone(),
        charge_history: state.charge_history.clone(),
    };
    write_atomic(&sidecar, |w| {
        serde_json::to_writer_pretty(&mut *w, &meta)?;
        w.write_all(b"\n")?;
        Ok(())
    })
}

/// Restores a state and the parameters it was written with.
pub fn load_checkpoint(stem: &Path) -> Result<(RelaxState, Sidecar)> {
    let (field, sidecar) = checkpoint_paths(stem);
    let meta: Sidecar = serde_json::from_reader(std::io::BufReader::new(File::open(sidecar)?))?;
    let mut state = RelaxState::new(load_director(&field)?, &meta.params);
    state.s = meta.s;
    state.step = meta.step;
    state.ds = meta.ds;
    state.clean_streak = meta.clean_streak;
    state.status = meta.status;
    state.energy_history = meta.energy_history.clone();
    state.charge_history = meta.charge_history.clone();
    Ok((state, meta))
}

/// Append-only JSON-lines log, one [`StepRecord`] per line.
pub struct RunLog {
    out: BufWriter<File>,
}

impl RunLog {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(RunLog { out: BufWriter::new(File::create(path)?) })
    }

    pub fn append(path: &Path) -> Result<Self> {
        Ok(RunLog { out: BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?) })
    }

    pub fn record(&mut self, rec: &StepRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, rec)?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn read_run_log(path: &Path) -> Result<Vec<StepRecord>> {
    let text = std::fs::read_to_string(path)?;
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}
