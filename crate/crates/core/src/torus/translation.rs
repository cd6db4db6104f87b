use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::TorusSpace;
use crate::dft::half_root_of_unity;
use crate::error::{invalid, Result};

/// Global phase attached to a translation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// `e^{-i pi a_q a_p / N}`, which makes `T_a^dag = T_{-a}` for integer labels.
    #[default]
    Weyl,
    /// No prefactor.
    Plain,
}

/// Phase-space translation `T_(a_q, a_p) = phase * Z^{a_p} X^{a_q}`, where `X`
/// shifts `|q> -> |q+1 mod N>` and `Z = diag(e^{2 pi i q/N})`.
///
/// `T` is a monomial matrix: it sends `|q>` to `phase(q) |q + a_q>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    shift: usize,
    phases: Vec<C64>,
}

impl Translation {
    pub fn new(a_q: usize, a_p: usize, space: TorusSpace) -> Result<Self> {
        Self::with_convention(a_q, a_p, space, PhaseConvention::Weyl)
    }

    pub fn with_convention(
        a_q: usize,
        a_p: usize,
        space: TorusSpace,
        convention: PhaseConvention,
    ) -> Result<Self> {
        let n = space.dim();
        if a_q >= n || a_p >= n {
            return invalid(format!("translation ({a_q}, {a_p}) out of range for N = {n}"));
        }
        let global = match convention {
            PhaseConvention::Weyl => -(((a_q * a_p) % (2 * n)) as i64),
            PhaseConvention::Plain => 0,
        };
        let phases = (0..n)
            .map(|q| {
                let target = (q + a_q) % n;
                half_root_of_unity(global + 2 * ((a_p * target) % n) as i64, n)
            })
            .collect();
        Ok(Self { shift: a_q, phases })
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    /// Image of `|q>` as `(target label, amplitude)`.
    #[inline]
    pub fn image(&self, q: usize) -> (usize, C64) {
        ((q + self.shift) % self.dim(), self.phases[q])
    }

    pub fn to_matrix(&self) -> Array2<C64> {
        let n = self.dim();
        let mut m = Array2::zeros((n, n));
        for q in 0..n {
            let (target, phase) = self.image(q);
            m[[target, q]] = phase;
        }
        m
    }
}

/// Dense `T_(a_q, a_p)` under the Weyl phase convention.
pub fn translation_operator(a_q: usize, a_p: usize, space: TorusSpace) -> Result<Array2<C64>> {
    translation_operator_with(a_q, a_p, space, PhaseConvention::Weyl)
}

pub fn translation_operator_with(
    a_q: usize,
    a_p: usize,
    space: TorusSpace,
    convention: PhaseConvention,
) -> Result<Array2<C64>> {
    Ok(Translation::with_convention(a_q, a_p, space, convention)?.to_matrix())
}
