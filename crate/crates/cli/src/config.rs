//! Layered configuration: defaults, preset, file, `--desk`, flags.

use std::path::Path;

use boltzecho_core::analysis::{FIT_T_LO, WINDOW_TIERS};
use boltzecho_core::channels::{DEFAULT_GDM_TAIL_TOL, DEFAULT_LDM_IMAGES};
use boltzecho_core::{ClassicalMapParams, EchoConfig, KernelModel, KernelSpec, SeriesKind};
use serde::{Deserialize, Serialize};

use crate::cli::RunArgs;
use crate::error::CliError;

pub const DESK_DIM: usize = 200;
pub const DESK_ENSEMBLE: usize = 4;

/// Every key a config file may set. The effective configuration of a run is
/// written back in the same shape, so a manifest doubles as a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(rename = "N", alias = "dim", skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_over_hbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gdm_tail_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ldm_images: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kinds: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub epsilon: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_over_hbar: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_prime: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn defaults() -> Self {
        Self {
            model: Some("gdm".into()),
            dim: Some(800),
            a: Some(2),
            b: Some(2),
            k: Some(0.001),
            k_prime: None,
            sigma_over_hbar: Some(1.0),
            epsilon: Some(0.01),
            t_max: Some(40),
            n_s: Some(10),
            seed: Some(1),
            gdm_tail_tol: Some(DEFAULT_GDM_TAIL_TOL),
            ldm_images: Some(DEFAULT_LDM_IMAGES),
            kinds: Some(vec!["be".into()]),
            grid: None,
            workers: Some(1),
        }
    }

    /// Values set in `top` replace those here. Setting either perturbation key
    /// clears the other, and likewise inside the grid.
    pub fn overlay(&mut self, top: FileConfig) {
        macro_rules! take {
            ($($f:ident),*) => {$(if top.$f.is_some() { self.$f = top.$f; })*};
        }
        if top.k_prime.is_some() {
            self.sigma_over_hbar = None;
        }
        if top.sigma_over_hbar.is_some() {
            self.k_prime = None;
        }
        take!(model, dim, a, b, k, k_prime, sigma_over_hbar, epsilon, t_max, n_s, seed);
        take!(gdm_tail_tol, ldm_images, kinds, grid, workers);
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Parses a config file, or the `effective_config` of a manifest.
    pub fn parse(text: &str) -> Result<Self, String> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if let Some(inner) = value.get("effective_config") {
            return serde_json::from_value(inner.clone()).map_err(|e| format!("effective_config: {e}"));
        }
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn from_flags(run: &RunArgs) -> Self {
        Self {
            model: run.model.clone(),
            dim: run.dim,
            a: run.a,
            b: run.b,
            k: run.k,
            k_prime: run.k_prime,
            sigma_over_hbar: run.sigma_over_hbar,
            epsilon: run.epsilon,
            t_max: run.t_max,
            n_s: run.n_s,
            seed: run.seed,
            gdm_tail_tol: run.gdm_tail_tol,
            ldm_images: run.ldm_images,
            ..Self::default()
        }
    }

    /// Defaults, then `preset`, then the config file, then `--desk`, then flags.
    pub fn resolve(run: &RunArgs, preset: Option<FileConfig>, flags: FileConfig) -> Result<Self, CliError> {
        let mut cfg = Self::defaults();
        if let Some(p) = preset {
            cfg.overlay(p);
        }
        if let Some(path) = &run.config {
            cfg.overlay(Self::load(path)?);
        }
        if run.desk {
            cfg.overlay(FileConfig { dim: Some(DESK_DIM), n_s: Some(DESK_ENSEMBLE), ..Self::default() });
        }
        cfg.overlay(flags);
        Ok(cfg)
    }

    pub fn model(&self) -> Result<KernelModel, CliError> {
        let name = self.model.as_deref().unwrap_or("gdm");
        match name.parse::<KernelModel>() {
            Ok(m) => Ok(m),
            Err(e) => Err(CliError::Config(e.to_string())),
        }
    }

    pub fn kinds(&self) -> Result<Vec<SeriesKind>, CliError> {
        let names = self.kinds.clone().unwrap_or_else(|| vec!["be".into()]);
        if names.is_empty() {
            return Err(CliError::Config("at least one series kind is required".into()));
        }
        names
            .iter()
            .map(|s| s.parse::<SeriesKind>().map_err(|e| CliError::Config(e.to_string())))
            .collect()
    }

    /// The single cell described by the scalar keys.
    pub fn echo_config(&self) -> Result<EchoConfig, CliError> {
        let need = |name: &str| CliError::Config(format!("missing value for `{name}`"));
        let mut spec = KernelSpec::new(self.model()?, self.epsilon.ok_or_else(|| need("epsilon"))?);
        spec.gdm_tail_tol = self.gdm_tail_tol.unwrap_or(DEFAULT_GDM_TAIL_TOL);
        spec.ldm_images = self.ldm_images.unwrap_or(DEFAULT_LDM_IMAGES);
        let map = ClassicalMapParams {
            a: self.a.ok_or_else(|| need("a"))?,
            b: self.b.ok_or_else(|| need("b"))?,
            k: self.k.ok_or_else(|| need("k"))?,
        };
        let base = EchoConfig {
            map,
            k_prime: map.k,
            kernel: spec,
            dim: self.dim.ok_or_else(|| need("N"))?,
            t_max: self.t_max.ok_or_else(|| need("t_max"))?,
            n_s: self.n_s.ok_or_else(|| need("n_s"))?,
            seed: self.seed.ok_or_else(|| need("seed"))?,
        };
        let cfg = match (self.k_prime, self.sigma_over_hbar) {
            (Some(kp), _) => EchoConfig { k_prime: kp, ..base },
            (None, Some(s)) => base.with_sigma_over_hbar(s),
            (None, None) => base,
        };
        if let Some(s) = self.sigma_over_hbar {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(CliError::Config(format!("sigma_over_hbar must be finite and non-negative, got {s}")));
            }
        }
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// The cells of the sweep grid, epsilon-major.
    pub fn sweep_cells(&self) -> Result<Vec<EchoConfig>, CliError> {
        let grid = self.grid.clone().ok_or_else(|| {
            CliError::Config("a sweep needs a grid: give --preset, --epsilons with --sigmas-over-hbar, or a `grid` key".into())
        })?;
        let base = FileConfig { k_prime: None, sigma_over_hbar: None, ..self.clone() }.echo_config()?;
        let mut cells = Vec::new();
        for &eps in &grid.epsilon {
            let with_eps = base.with_epsilon(eps);
            match (&grid.sigma_over_hbar, &grid.k_prime) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Config("grid sets both sigma_over_hbar and k_prime".into()));
                }
                (Some(sigmas), None) => {
                    for &s in sigmas {
                        if !(s >= 0.0) || !s.is_finite() {
                            return Err(CliError::Config(format!("sigma_over_hbar values must be non-negative, got {s}")));
                        }
                        cells.push(with_eps.with_sigma_over_hbar(s));
                    }
                }
                (None, Some(kps)) => cells.extend(kps.iter().map(|&kp| EchoConfig { k_prime: kp, ..with_eps })),
                (None, None) => return Err(CliError::Config("grid needs sigma_over_hbar or k_prime values".into())),
            }
        }
        for c in &cells {
            c.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(cells)
    }
}

/// The figure grids: twelve sigma values from 0.25 to 3 and the epsilon
/// values of each figure caption. At desk scale figure 1 keeps four of them.
pub fn preset(name: &str, desk: bool) -> Result<FileConfig, CliError> {
    let sigmas: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();
    let (model, epsilon) = match (name, desk) {
        ("fig1", false) => ("gdm", vec![0.0, 0.003, 0.0035, 0.004, 0.005, 0.01]),
        ("fig1", true) => ("gdm", vec![0.0, 0.003, 0.005, 0.01]),
        ("fig2", _) => ("dc", vec![0.0, 0.1, 0.22, 0.4, 0.7]),
        ("fig3", _) => ("ldm", vec![0.0, 0.001, 0.002, 0.005, 0.01]),
        _ => return Err(CliError::Config(format!("unknown preset `{name}`; expected one of fig1, fig2, fig3"))),
    };
    Ok(FileConfig {
        model: Some(model.into()),
        grid: Some(GridConfig { epsilon, sigma_over_hbar: Some(sigmas), k_prime: None }),
        ..FileConfig::default()
    })
}

/// Human-readable statement of the fit window rule, stored in manifests.
pub fn fit_rule() -> String {
    let tiers: Vec<String> = WINDOW_TIERS.iter().map(|(f, m)| format!("{f}x floor with >= {m} points")).collect();
    format!(
        "ln(value) vs t from t = {FIT_T_LO} while value > cutoff; floor = max(1/N, final-quarter mean); cutoffs tried: {}; unsaturated series fitted to t_max",
        tiers.join(", ")
    )
}
