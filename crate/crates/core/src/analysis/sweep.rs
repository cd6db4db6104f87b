use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_decay_rate, DecayFit};
use crate::channels::KernelModel;
use crate::echo::{boltzmann_echo_fast, EchoConfig};
use crate::error::{invalid, Error, Result};

/// Exact identity of a cell: every parameter that changes its series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub model: KernelModel,
    pub dim: usize,
    pub a: i64,
    pub b: i64,
    pub k_bits: u64,
    pub k_prime_bits: u64,
    pub epsilon_bits: u64,
    pub gdm_tail_tol_bits: u64,
    pub ldm_images: usize,
    pub t_max: usize,
    pub n_s: usize,
    pub seed: u64,
}

pub fn cell_key(cfg: &EchoConfig) -> CellKey {
    CellKey {
        model: cfg.kernel.model,
        dim: cfg.dim,
        a: cfg.map.a,
        b: cfg.map.b,
        k_bits: cfg.map.k.to_bits(),
        k_prime_bits: cfg.k_prime.to_bits(),
        epsilon_bits: cfg.kernel.epsilon.to_bits(),
        gdm_tail_tol_bits: cfg.kernel.gdm_tail_tol.to_bits(),
        ldm_images: cfg.kernel.ldm_images,
        t_max: cfg.t_max,
        n_s: cfg.n_s,
        seed: cfg.seed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Unfittable { t_lo: usize, t_hi: usize, points: usize },
    Failed { message: String },
}

impl CellStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, CellStatus::Ok)
    }
}

/// Outcome of one echo series and its fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFit {
    pub config: EchoConfig,
    pub status: CellStatus,
    pub fit: Option<DecayFit>,
}

impl CellFit {
    pub fn gamma(&self) -> f64 {
        self.fit.map_or(f64::NAN, |f| f.gamma)
    }
}

/// One output line: a cell's rate with the two marginal rates beside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub model: KernelModel,
    pub dim: usize,
    pub a: i64,
    pub b: i64,
    pub k: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub sigma_over_hbar: f64,
    /// Rate of the cell, `NaN` when unfittable.
    pub gamma: f64,
    /// Rate of the same cell without decoherence.
    pub gamma_sigma: f64,
    /// Rate of the same cell without perturbation mismatch.
    pub gamma_epsilon: f64,
    pub r_squared: f64,
    pub n_s: usize,
    pub seed: u64,
    pub t_max: usize,
    pub window: Option<(usize, usize)>,
    pub status: CellStatus,
}

impl SweepRow {
    fn order(&self, other: &Self) -> Ordering {
        (self.model, self.dim, self.a, self.b)
            .cmp(&(other.model, other.dim, other.a, other.b))
            .then(self.k.total_cmp(&other.k))
            .then(self.epsilon.total_cmp(&other.epsilon))
            .then(self.sigma.total_cmp(&other.sigma))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// True when every row, including its marginals, was fitted.
    pub fn is_complete(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.status.is_ok() && r.gamma_sigma.is_finite() && r.gamma_epsilon.is_finite())
    }
}

fn without_decoherence(cfg: &EchoConfig) -> EchoConfig {
    cfg.with_epsilon(0.0)
}

fn without_mismatch(cfg: &EchoConfig) -> EchoConfig {
    EchoConfig { k_prime: cfg.map.k, ..*cfg }
}

/// Every series a sweep over `cells` needs: the cells, their `epsilon = 0` and
/// `sigma = 0` marginals and the doubly trivial cell the marginal rows refer
/// to, deduplicated and in key order.
pub fn required_cells(cells: &[EchoConfig]) -> Vec<EchoConfig> {
    let mut all: Vec<(CellKey, EchoConfig)> = cells
        .iter()
        .flat_map(|c| [*c, without_decoherence(c), without_mismatch(c), without_mismatch(&without_decoherence(c))])
        .map(|c| (cell_key(&c), c))
        .collect();
    all.sort_by_key(|(k, _)| *k);
    all.dedup_by_key(|(k, _)| *k);
    all.into_iter().map(|(_, c)| c).collect()
}

/// Computes and fits one Boltzmann echo series.
pub fn fit_cell(cfg: &EchoConfig) -> CellFit {
    let series = match boltzmann_echo_fast(cfg) {
        Ok(s) => s,
        Err(e) => return CellFit { config: *cfg, status: CellStatus::Failed { message: e.to_string() }, fit: None },
    };
    match fit_decay_rate(&series) {
        Ok(fit) => CellFit { config: *cfg, status: CellStatus::Ok, fit: Some(fit) },
        Err(Error::Unfittable { t_lo, t_hi, points }) => {
            CellFit { config: *cfg, status: CellStatus::Unfittable { t_lo, t_hi, points }, fit: None }
        }
        Err(e) => CellFit { config: *cfg, status: CellStatus::Failed { message: e.to_string() }, fit: None },
    }
}

/// Fits `cells` on a pool of `workers` threads. Results come back in input
/// order and do not depend on the worker count.
pub fn fit_cells(cells: &[EchoConfig], workers: usize) -> Result<Vec<CellFit>> {
    if workers == 0 {
        return invalid("worker count must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| cells.par_iter().map(fit_cell).collect()))
}

/// Builds rows for `cells` and any marginal cells not among them from
/// already computed fits. Rows are sorted by their coordinates.
pub fn assemble_rows(cells: &[EchoConfig], fits: &[CellFit]) -> Result<SweepResult> {
    let by_key: HashMap<CellKey, &CellFit> = fits.iter().map(|f| (cell_key(&f.config), f)).collect();
    let lookup = |c: &EchoConfig| {
        by_key
            .get(&cell_key(c))
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("no fit for cell {:?}", cell_key(c))))
    };
    let mut listed: Vec<EchoConfig> = cells.to_vec();
    let requested: std::collections::HashSet<CellKey> = cells.iter().map(cell_key).collect();
    for extra in required_cells(cells) {
        if !requested.contains(&cell_key(&extra)) {
            listed.push(extra);
        }
    }
    let mut rows = Vec::with_capacity(listed.len());
    for cfg in &listed {
        let own = lookup(cfg)?;
        let sigma = cfg.sigma();
        rows.push(SweepRow {
            model: cfg.kernel.model,
            dim: cfg.dim,
            a: cfg.map.a,
            b: cfg.map.b,
            k: cfg.map.k,
            epsilon: cfg.kernel.epsilon,
            sigma,
            sigma_over_hbar: cfg.sigma_over_hbar(),
            gamma: own.gamma(),
            gamma_sigma: lookup(&without_decoherence(cfg))?.gamma(),
            gamma_epsilon: lookup(&without_mismatch(cfg))?.gamma(),
            r_squared: own.fit.map_or(f64::NAN, |f| f.r_squared),
            n_s: cfg.n_s,
            seed: cfg.seed,
            t_max: cfg.t_max,
            window: own.fit.map(|f| (f.t_lo, f.t_hi)),
            status: own.status.clone(),
        });
    }
    rows.sort_by(|a, b| a.order(b));
    Ok(SweepResult { rows })
}

/// Runs every cell with its marginals and assembles the rows. Invalid
/// configurations abort the sweep; failures inside a cell are recorded in its
/// row status.
pub fn run_sweep(cells: &[EchoConfig], workers: usize) -> Result<SweepResult> {
    for c in cells {
        c.validate()?;
    }
    let needed = required_cells(cells);
    let fits = fit_cells(&needed, workers)?;
    assemble_rows(cells, &fits)
}
