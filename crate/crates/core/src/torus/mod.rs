//! Finite Hilbert space of a quantized 2-torus.
//!
//! Position and momentum labels are integers `0..N`; grid point `j` stands for
//! the phase-space coordinate `j/N`, and the effective Planck constant is
//! `1/(2 pi N)`.

mod chord;
mod coherent;
mod fourier;
mod state;
mod translation;

pub use chord::{chord_transform, chord_transform_naive, inverse_chord_transform, ChordCoefficients};
pub(crate) use chord::{gather_diagonals, scatter_diagonals};
pub use coherent::{coherent_state, random_coherent_centers, CENTER_GENERATOR};
pub use fourier::{fourier_transform, Direction};
pub use state::{overlap, purity, DensityMatrix, PureState};
pub use translation::{translation_operator, translation_operator_with, PhaseConvention, Translation};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Hilbert space of dimension `N` on the unit torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusSpace {
    dim: usize,
}

impl TorusSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return invalid(format!("Hilbert dimension must be at least 2, got {dim}"));
        }
        Ok(Self { dim })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Effective Planck constant `1/(2 pi N)`.
    #[inline]
    pub fn hbar(&self) -> f64 {
        1.0 / (std::f64::consts::TAU * self.dim as f64)
    }
}
