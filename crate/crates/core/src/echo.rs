//! Echo and purity time series.
//!
//! One time step is `rho -> D(U rho U^dag)`. The Boltzmann echo follows two
//! trajectories from the same coherent projector, one under `U_k` and one
//! under `U_k'`, each with its own decoherence, and records `tr(rho_bar rho)`.
//! Ensemble members run in parallel and are reduced in member order.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_channel_in_place, DecoherenceKernel, KernelModel, KernelSpec};
use crate::error::{check_dim, invalid, Error, Result};
use crate::maps::{perturbed_cat_quantum, ClassicalMapParams, KickedMap};
use crate::torus::{coherent_state, overlap, purity, random_coherent_centers, DensityMatrix, PureState, TorusSpace};

/// Which observable a series holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// Boltzmann echo `tr(rho_bar_t rho_t)`.
    Be,
    /// Loschmidt echo `|<psi_bar_t|psi_t>|^2`.
    Le,
    /// `tr(rho_t^2)`.
    Purity,
}

impl SeriesKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesKind::Be => "be",
            SeriesKind::Le => "le",
            SeriesKind::Purity => "purity",
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeriesKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "be" => Ok(SeriesKind::Be),
            "le" => Ok(SeriesKind::Le),
            "purity" => Ok(SeriesKind::Purity),
            _ => invalid(format!("unknown series kind `{s}`; expected one of be, le, purity")),
        }
    }
}

/// Parameters of one echo computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoConfig {
    /// Forward map `(a, b, k)`.
    pub map: ClassicalMapParams,
    /// Perturbation of the second map; `sigma = |k_prime - k|`.
    pub k_prime: f64,
    pub kernel: KernelSpec,
    /// Hilbert dimension `N`.
    pub dim: usize,
    pub t_max: usize,
    /// Ensemble size.
    pub n_s: usize,
    pub seed: u64,
}

impl EchoConfig {
    /// Sets `k_prime = k + sigma_over_hbar * hbar`.
    pub fn with_sigma_over_hbar(mut self, sigma_over_hbar: f64) -> Self {
        self.k_prime = self.map.k + sigma_over_hbar / (std::f64::consts::TAU * self.dim as f64);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.kernel.epsilon = epsilon;
        self
    }

    pub fn sigma(&self) -> f64 {
        (self.k_prime - self.map.k).abs()
    }

    pub fn sigma_over_hbar(&self) -> f64 {
        self.sigma() * std::f64::consts::TAU * self.dim as f64
    }

    pub fn epsilon(&self) -> f64 {
        self.kernel.epsilon
    }

    pub fn model(&self) -> KernelModel {
        self.kernel.model
    }

    pub fn space(&self) -> Result<TorusSpace> {
        TorusSpace::new(self.dim)
    }

    pub fn validate(&self) -> Result<()> {
        TorusSpace::new(self.dim)?;
        self.map.validate()?;
        self.kernel.validate()?;
        if !self.k_prime.is_finite() {
            return invalid("k_prime must be finite");
        }
        if self.t_max < 1 {
            return invalid("t_max must be at least 1");
        }
        if self.n_s < 1 {
            return invalid("ensemble size n_s must be at least 1");
        }
        Ok(())
    }

    fn forward_map(&self, space: TorusSpace) -> KickedMap {
        perturbed_cat_quantum(self.map.a, self.map.b, self.map.k, space)
    }

    fn perturbed_map(&self, space: TorusSpace) -> KickedMap {
        perturbed_cat_quantum(self.map.a, self.map.b, self.k_prime, space)
    }
}

/// Ensemble mean and standard error of an observable at `t = 0..=t_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoSeries {
    pub kind: SeriesKind,
    /// Hilbert dimension, which sets the `1/N` saturation floor.
    pub dim: usize,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl EchoSeries {
    /// Reduces per-member series (all the same length) in the given order.
    pub fn from_members(kind: SeriesKind, dim: usize, members: &[Vec<f64>]) -> Self {
        assert!(!members.is_empty(), "at least one member");
        let len = members[0].len();
        let m = members.len() as f64;
        let mut values = vec![0.0; len];
        let mut stderr = vec![0.0; len];
        for t in 0..len {
            let mean = members.iter().map(|s| s[t]).sum::<f64>() / m;
            values[t] = mean;
            if members.len() > 1 {
                let var = members.iter().map(|s| (s[t] - mean).powi(2)).sum::<f64>() / (m - 1.0);
                stderr[t] = (var / m).sqrt();
            }
        }
        Self { kind, dim, values, stderr }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn times(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.t_max()
    }
}

/// Reusable buffers for repeated steps.
#[derive(Debug, Default)]
pub struct StepScratch {
    chords: Vec<C64>,
}

/// `D(U rho U^dag)`.
pub fn evolve_step(map: &KickedMap, kernel: &DecoherenceKernel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let mut out = rho.clone();
    evolve_step_in_place(map, kernel, &mut out, &mut StepScratch::default())?;
    Ok(out)
}

pub fn evolve_step_in_place(
    map: &KickedMap,
    kernel: &DecoherenceKernel,
    rho: &mut DensityMatrix,
    scratch: &mut StepScratch,
) -> Result<()> {
    check_dim(map.space().dim(), kernel.space().dim())?;
    map.conjugate_in_place(rho)?;
    apply_channel_in_place(kernel, rho, &mut scratch.chords)
}

fn ensemble_states(cfg: &EchoConfig, space: TorusSpace) -> Result<Vec<PureState>> {
    random_coherent_centers(cfg.n_s, cfg.seed)?
        .into_iter()
        .map(|(q, p)| coherent_state(q, p, space))
        .collect()
}

fn run_members<F>(cfg: &EchoConfig, kind: SeriesKind, member: F) -> Result<EchoSeries>
where
    F: Fn(PureState) -> Result<Vec<f64>> + Sync,
{
    cfg.validate()?;
    let space = cfg.space()?;
    let states = ensemble_states(cfg, space)?;
    let members = states
        .into_par_iter()
        .map(&member)
        .collect::<Result<Vec<_>>>()?;
    Ok(EchoSeries::from_members(kind, cfg.dim, &members))
}

/// `M_B(t) = tr(rho_bar_t rho_t)` on density matrices, for any `epsilon`.
pub fn boltzmann_echo_series(cfg: &EchoConfig) -> Result<EchoSeries> {
    cfg.validate()?;
    let space = cfg.space()?;
    let kernel = cfg.kernel.build(space)?;
    let forward = cfg.forward_map(space);
    let perturbed = cfg.perturbed_map(space);
    run_members(cfg, SeriesKind::Be, |psi| {
        let mut rho = psi.projector();
        let mut rho_bar = rho.clone();
        let mut scratch = StepScratch::default();
        let mut values = Vec::with_capacity(cfg.t_max + 1);
        values.push(overlap(&rho_bar, &rho)?);
        for _ in 0..cfg.t_max {
            evolve_step_in_place(&forward, &kernel, &mut rho, &mut scratch)?;
            evolve_step_in_place(&perturbed, &kernel, &mut rho_bar, &mut scratch)?;
            values.push(overlap(&rho_bar, &rho)?);
        }
        Ok(values)
    })
}

/// `M(t) = |<psi_0| U_k'^{-t} U_k^t |psi_0>|^2` on state vectors. Requires
/// `epsilon = 0`.
pub fn loschmidt_echo_series(cfg: &EchoConfig) -> Result<EchoSeries> {
    if cfg.epsilon() != 0.0 {
        return invalid(format!("the Loschmidt echo needs epsilon = 0, got {}", cfg.epsilon()));
    }
    let space = cfg.space()?;
    let forward = cfg.forward_map(space);
    let perturbed = cfg.perturbed_map(space);
    run_members(cfg, SeriesKind::Le, |psi| {
        let mut a = psi.clone();
        let mut b = psi;
        let mut values = Vec::with_capacity(cfg.t_max + 1);
        values.push(b.inner(&a)?.norm_sqr());
        for _ in 0..cfg.t_max {
            forward.apply_in_place(&mut a)?;
            perturbed.apply_in_place(&mut b)?;
            values.push(b.inner(&a)?.norm_sqr());
        }
        Ok(values)
    })
}

/// `P(t) = tr(rho_t^2)` along the forward map with decoherence; `k_prime` is
/// ignored.
pub fn purity_series(cfg: &EchoConfig) -> Result<EchoSeries> {
    cfg.validate()?;
    let space = cfg.space()?;
    let kernel = cfg.kernel.build(space)?;
    let forward = cfg.forward_map(space);
    run_members(cfg, SeriesKind::Purity, |psi| {
        let mut rho = psi.projector();
        let mut scratch = StepScratch::default();
        let mut values = Vec::with_capacity(cfg.t_max + 1);
        values.push(purity(&rho));
        for _ in 0..cfg.t_max {
            evolve_step_in_place(&forward, &kernel, &mut rho, &mut scratch)?;
            values.push(purity(&rho));
        }
        Ok(values)
    })
}

/// Boltzmann echo through the cheapest exact route: state vectors when
/// `epsilon = 0`, a single trajectory when `sigma = 0`.
pub fn boltzmann_echo_fast(cfg: &EchoConfig) -> Result<EchoSeries> {
    let mut series = if cfg.epsilon() == 0.0 {
        loschmidt_echo_series(cfg)?
    } else if cfg.k_prime == cfg.map.k {
        purity_series(cfg)?
    } else {
        return boltzmann_echo_series(cfg);
    };
    series.kind = SeriesKind::Be;
    Ok(series)
}
