//! Perturbed cat maps: the classical two-shear map, its quantization as a
//! product of two diagonal kicks, and Lyapunov exponents.

mod classical;
mod quantum;

pub use classical::{
    classical_jacobian, classical_lyapunov_numeric, classical_step, classical_step_inverse,
    lyapunov_formula, ClassicalMapParams, LyapunovEstimate,
};
pub use quantum::{perturbed_cat_quantum, KickedMap};
