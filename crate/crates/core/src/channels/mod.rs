//! Decoherence superoperator `D(rho) = sum_a w(a) T_a rho T_a^dag`.
//!
//! Every translation `T_a` is an eigen-operator of conjugation by any other
//! translation, so `D` is diagonal in the chord basis:
//! `D(T_b) = lambda_b T_b` with `lambda_b = sum_a w(a) e^{2 pi i (a_p b_q - a_q b_p)/N}`.
//! The fast path multiplies chord coefficients by `lambda_b`; the Kraus path
//! applies the sum literally and serves as the oracle.

mod apply;
mod kernels;

pub(crate) use apply::apply_channel_in_place;
pub use apply::{apply_channel_fast, apply_channel_kraus, apply_channel_kraus_unchecked, KRAUS_MAX_DIM};
pub use kernels::{
    channel_eigenvalues, kernel_dc, kernel_gdm, kernel_ldm, ldm_weights_brute_force, DecoherenceKernel,
    KernelModel, KernelSpec, DEFAULT_GDM_TAIL_TOL, DEFAULT_LDM_IMAGES,
};
