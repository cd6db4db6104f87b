//! Batched length-N transforms over contiguous rows.
//!
//! All transforms here are unnormalized; callers apply `1/N` or `1/sqrt(N)`
//! where the basis change requires it.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub(crate) struct DftPlan {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for DftPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DftPlan").field("n", &self.n).finish()
    }
}

impl DftPlan {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// `x_k -> sum_j x_j e^{-2 pi i jk/N}` on every length-N chunk.
    pub(crate) fn forward(&self, data: &mut [C64]) {
        debug_assert_eq!(data.len() % self.n, 0);
        self.forward.process(data);
    }

    /// `x_k -> sum_j x_j e^{+2 pi i jk/N}` on every length-N chunk.
    pub(crate) fn inverse(&self, data: &mut [C64]) {
        debug_assert_eq!(data.len() % self.n, 0);
        self.inverse.process(data);
    }
}

/// In-place transpose of a row-major `n x n` buffer.
pub(crate) fn transpose_square(data: &mut [C64], n: usize) {
    debug_assert_eq!(data.len(), n * n);
    const BLOCK: usize = 32;
    for ib in (0..n).step_by(BLOCK) {
        for jb in (ib..n).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(n) {
                let j0 = if ib == jb { i + 1 } else { jb };
                for j in j0..(jb + BLOCK).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

/// `e^{i pi m / n}` for an integer numerator, reduced modulo `2n` first so the
/// angle stays exact for large products.
pub(crate) fn half_root_of_unity(m: i64, n: usize) -> C64 {
    let two_n = 2 * n as i64;
    let r = m.rem_euclid(two_n);
    C64::from_polar(1.0, std::f64::consts::PI * r as f64 / n as f64)
}
