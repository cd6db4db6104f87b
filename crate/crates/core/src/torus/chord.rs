//! Expansion of operators in the translation basis.
//!
//! `coeffs(a) = tr(T_a^dag rho) / sqrt(N)` and `rho = N^{-1/2} sum_a coeffs(a) T_a`.
//! With this normalization the map is unitary, so `sum |coeffs|^2 = tr(rho^2)`.
//!
//! A fixed chord `a_q` only touches the cyclic diagonal `rho[q + a_q, q]`, and
//! the sum over `a_p` is a DFT along that diagonal. The fast path therefore
//! gathers the N diagonals into rows and runs one batched FFT.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::{DensityMatrix, TorusSpace, Translation};
use crate::dft::{half_root_of_unity, DftPlan};

/// Operator coefficients indexed by translation label `[a_q, a_p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordCoefficients {
    space: TorusSpace,
    coeffs: Array2<C64>,
}

impl ChordCoefficients {
    pub fn space(&self) -> TorusSpace {
        self.space
    }

    pub fn coeffs(&self) -> &Array2<C64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<C64> {
        &mut self.coeffs
    }

    /// `sum_a |coeffs(a)|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `out[a_q, q] = rho[q + a_q mod N, q]`, both buffers row-major `N x N`.
pub(crate) fn gather_diagonals(rho: &[C64], out: &mut [C64], n: usize) {
    for aq in 0..n {
        let row = &mut out[aq * n..(aq + 1) * n];
        for (q, slot) in row.iter_mut().enumerate() {
            let i = if q + aq >= n { q + aq - n } else { q + aq };
            *slot = rho[i * n + q];
        }
    }
}

/// Inverse of [`gather_diagonals`].
pub(crate) fn scatter_diagonals(diag: &[C64], rho: &mut [C64], n: usize) {
    for aq in 0..n {
        let row = &diag[aq * n..(aq + 1) * n];
        for (q, &v) in row.iter().enumerate() {
            let i = if q + aq >= n { q + aq - n } else { q + aq };
            rho[i * n + q] = v;
        }
    }
}

/// `e^{-i pi a_q a_p / N}`: the conjugate Weyl phase combined with the kick
/// phase picked up from the shifted row index.
fn chord_phase(aq: usize, ap: usize, n: usize) -> C64 {
    half_root_of_unity(-(((aq * ap) % (2 * n)) as i64), n)
}

pub fn chord_transform(rho: &DensityMatrix) -> ChordCoefficients {
    let space = rho.space();
    let n = space.dim();
    let src = rho.elements().as_standard_layout();
    let src = src.as_slice().expect("standard layout");
    let mut buf = vec![C64::new(0.0, 0.0); n * n];
    gather_diagonals(src, &mut buf, n);
    DftPlan::new(n).forward(&mut buf);
    let scale = 1.0 / (n as f64).sqrt();
    for aq in 0..n {
        for ap in 0..n {
            buf[aq * n + ap] *= chord_phase(aq, ap, n) * scale;
        }
    }
    ChordCoefficients {
        space,
        coeffs: Array2::from_shape_vec((n, n), buf).expect("n*n buffer"),
    }
}

/// Explicit `tr(T_a^dag rho)/sqrt(N)` for every chord, `O(N^3)`.
pub fn chord_transform_naive(rho: &DensityMatrix) -> ChordCoefficients {
    let space = rho.space();
    let n = space.dim();
    let e = rho.elements();
    let scale = 1.0 / (n as f64).sqrt();
    let coeffs = Array2::from_shape_fn((n, n), |(aq, ap)| {
        let t = Translation::new(aq, ap, space).expect("labels in range");
        (0..n)
            .map(|q| {
                let (target, phase) = t.image(q);
                phase.conj() * e[[target, q]]
            })
            .sum::<C64>()
            * scale
    });
    ChordCoefficients { space, coeffs }
}

/// Reassembles `N^{-1/2} sum_a coeffs(a) T_a` as a dense operator.
pub fn inverse_chord_transform(chords: &ChordCoefficients) -> Array2<C64> {
    let n = chords.space.dim();
    let scale = 1.0 / (n as f64).sqrt();
    let mut buf: Vec<C64> = chords
        .coeffs
        .indexed_iter()
        .map(|((aq, ap), &c)| c * chord_phase(aq, ap, n).conj() * scale)
        .collect();
    DftPlan::new(n).inverse(&mut buf);
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    scatter_diagonals(&buf, &mut out, n);
    Array2::from_shape_vec((n, n), out).expect("n*n buffer")
}
