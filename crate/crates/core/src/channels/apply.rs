use num_complex::Complex64 as C64;

use super::DecoherenceKernel;
use crate::error::{check_dim, invalid, Result};
use crate::torus::{gather_diagonals, scatter_diagonals, DensityMatrix, Translation};

/// Largest dimension the `O(N^4)` Kraus sum accepts without forcing.
pub const KRAUS_MAX_DIM: usize = 64;

/// `sum_a w(a) T_a rho T_a^dag`, summed literally over all translations.
pub fn apply_channel_kraus(kernel: &DecoherenceKernel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.space().dim() > KRAUS_MAX_DIM {
        return invalid(format!(
            "Kraus application is O(N^4); N = {} exceeds {KRAUS_MAX_DIM} (use the unchecked variant to force)",
            rho.space().dim()
        ));
    }
    apply_channel_kraus_unchecked(kernel, rho)
}

/// [`apply_channel_kraus`] without the size guard.
pub fn apply_channel_kraus_unchecked(kernel: &DecoherenceKernel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let space = kernel.space();
    let n = space.dim();
    check_dim(n, rho.space().dim())?;
    let src = rho.elements();
    let mut out = ndarray::Array2::<C64>::zeros((n, n));
    for ((aq, ap), &w) in kernel.weights().indexed_iter() {
        if w == 0.0 {
            continue;
        }
        let t = Translation::new(aq, ap, space)?;
        // T|q> = phi_q |q + a_q>, so (T rho T^dag)[q + a_q, q' + a_q] = phi_q rho[q, q'] conj(phi_q').
        for q in 0..n {
            let (i, phi_i) = t.image(q);
            let left = phi_i * w;
            for qp in 0..n {
                let (j, phi_j) = t.image(qp);
                out[[i, j]] += left * src[[q, qp]] * phi_j.conj();
            }
        }
    }
    Ok(DensityMatrix::from_raw(space, out))
}

/// Chord-diagonal application: transform, scale by `lambda_b`, transform back.
pub fn apply_channel_fast(kernel: &DecoherenceKernel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let mut out = rho.clone();
    let mut scratch = Vec::new();
    apply_channel_in_place(kernel, &mut out, &mut scratch)?;
    Ok(out)
}

/// In-place fast path reusing `scratch` between calls.
///
/// The Weyl phases of the forward and inverse chord transforms cancel, so only
/// the diagonal DFTs and the eigenvalue multiply remain.
pub(crate) fn apply_channel_in_place(
    kernel: &DecoherenceKernel,
    rho: &mut DensityMatrix,
    scratch: &mut Vec<C64>,
) -> Result<()> {
    let n = kernel.space().dim();
    check_dim(n, rho.space().dim())?;
    if kernel.is_identity() {
        return Ok(());
    }
    scratch.resize(n * n, C64::new(0.0, 0.0));
    let buf = rho.elements_mut().as_slice_mut().expect("standard layout");
    gather_diagonals(buf, scratch, n);
    kernel.plan.forward(scratch);
    let scale = 1.0 / n as f64;
    let lambda = kernel.eigenvalues().as_slice().expect("standard layout");
    scratch.iter_mut().zip(lambda).for_each(|(z, l)| *z *= l * scale);
    kernel.plan.inverse(scratch);
    scatter_diagonals(scratch, buf, n);
    Ok(())
}
