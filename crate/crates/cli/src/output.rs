//! CSV tables and run manifests.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use boltzecho_core::analysis::{CellFit, DecayFit, SweepResult};
use boltzecho_core::torus::CENTER_GENERATOR;
use boltzecho_core::{DecoherenceKernel, EchoSeries, SeriesKind};
use serde::{Deserialize, Serialize};

use crate::config::{fit_rule, FileConfig};
use crate::error::CliError;

pub const SERIES_HEADER: [&str; 4] = ["t", "value", "stderr", "kind"];
pub const SWEEP_HEADER: [&str; 14] = [
    "model",
    "N",
    "a",
    "b",
    "k",
    "epsilon",
    "sigma",
    "sigma_over_hbar",
    "gamma",
    "gamma_sigma",
    "gamma_epsilon",
    "r_squared",
    "n_s",
    "seed",
];
pub const KERNEL_HEADER: [&str; 5] = ["q", "p", "weight", "eigenvalue_re", "eigenvalue_im"];

/// 17 significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    let file = File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

pub fn write_series_csv(path: &Path, series: &[EchoSeries]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(SERIES_HEADER)?;
    for s in series {
        for (t, (v, e)) in s.values.iter().zip(&s.stderr).enumerate() {
            w.write_record([t.to_string(), fmt_float(*v), fmt_float(*e), s.kind.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv(path: &Path, result: &SweepResult) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(SWEEP_HEADER)?;
    for r in &result.rows {
        w.write_record([
            r.model.to_string(),
            r.dim.to_string(),
            r.a.to_string(),
            r.b.to_string(),
            fmt_float(r.k),
            fmt_float(r.epsilon),
            fmt_float(r.sigma),
            fmt_float(r.sigma_over_hbar),
            fmt_float(r.gamma),
            fmt_float(r.gamma_sigma),
            fmt_float(r.gamma_epsilon),
            fmt_float(r.r_squared),
            r.n_s.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_kernel_csv(path: &Path, kernel: &DecoherenceKernel) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(KERNEL_HEADER)?;
    let lambda = kernel.eigenvalues();
    for ((q, p), weight) in kernel.weights().indexed_iter() {
        let z = lambda[[q, p]];
        w.write_record([q.to_string(), p.to_string(), fmt_float(*weight), fmt_float(z.re), fmt_float(z.im)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunState {
    Running,
    Complete,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    pub kind: SeriesKind,
    pub fit: Option<DecayFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub created_unix: u64,
    pub center_generator: String,
    pub fit_rule: String,
    pub effective_config: FileConfig,
    pub outputs: Vec<String>,
    pub state: RunState,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesFit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cells: Vec<CellFit>,
}

impl Manifest {
    pub fn new(command: &str, effective_config: FileConfig, outputs: Vec<String>) -> Self {
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            created_unix,
            center_generator: CENTER_GENERATOR.into(),
            fit_rule: fit_rule(),
            effective_config,
            outputs,
            state: RunState::Running,
            series: Vec::new(),
            cells: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Writes to a sibling temporary file first so an interrupted run never
    /// leaves a truncated manifest behind.
    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let tmp = PathBuf::from(format!("{}.tmp", path.display()));
        let mut f = File::create(&tmp)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n")?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}
