//! Irreversibility measures of quantized chaotic maps on the torus.
//!
//! A density matrix evolves in two steps per unit of time: conjugation by a
//! quantized perturbed cat map, then a decoherence channel that applies every
//! phase-space translation with a kernel-given probability. From two such
//! evolutions that differ only in the map perturbation the crate computes the
//! Boltzmann echo, with the Loschmidt echo (no decoherence) and the purity (no
//! perturbation mismatch) as its limits, and extracts exponential decay rates.
//!
//! Modules, bottom up:
//! - [`torus`]: states, bases, translations, coherent states, chord transform.
//! - [`maps`]: classical and quantum perturbed cat maps, Lyapunov exponents.
//! - [`channels`]: Gaussian, depolarizing and Lorentzian kernels and the
//!   superoperator built from them.
//! - [`echo`]: time series of echoes and purity over coherent-state ensembles.
//! - [`analysis`]: decay-rate fits, sum-law residuals, parameter sweeps.

pub mod analysis;
pub mod channels;
mod dft;
pub mod echo;
pub mod error;
pub mod maps;
pub mod torus;

pub use channels::{DecoherenceKernel, KernelModel, KernelSpec};
pub use echo::{EchoConfig, EchoSeries, SeriesKind};
pub use error::{Error, Result};
pub use maps::{ClassicalMapParams, KickedMap};
pub use torus::{DensityMatrix, PureState, TorusSpace};

/// `ln(3 + 2 sqrt 2)`, the Lyapunov exponent of the `a = b = 2` cat map.
pub const LAMBDA_CAT_22: f64 = 1.762_747_174_039_086;
