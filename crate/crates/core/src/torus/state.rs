use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rand::Rng;

use super::TorusSpace;
use crate::error::{check_dim, Error, Result};

const NORM_TOL: f64 = 1e-12;
const STATE_TOL: f64 = 1e-10;

/// Normalized state vector in the position basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: TorusSpace,
    amps: Array1<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized.
    pub fn new(space: TorusSpace, amps: Array1<C64>) -> Result<Self> {
        check_dim(space.dim(), amps.len())?;
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
        }
        Ok(Self { space, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(space: TorusSpace, mut amps: Array1<C64>) -> Result<Self> {
        check_dim(space.dim(), amps.len())?;
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        amps.mapv_inplace(|z| z / norm);
        Ok(Self { space, amps })
    }

    /// Position eigenstate `|q>`.
    pub fn basis(space: TorusSpace, q: usize) -> Result<Self> {
        if q >= space.dim() {
            return Err(Error::InvalidArgument(format!("basis label {q} out of range")));
        }
        let mut amps = Array1::zeros(space.dim());
        amps[q] = C64::new(1.0, 0.0);
        Ok(Self { space, amps })
    }

    /// Random state with independent uniform real and imaginary parts.
    pub fn random<R: Rng + ?Sized>(space: TorusSpace, rng: &mut R) -> Self {
        let amps = Array1::from_shape_fn(space.dim(), |_| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        Self::normalized(space, amps).expect("random vector is nonzero")
    }

    pub fn space(&self) -> TorusSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut Array1<C64> {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        check_dim(self.space.dim(), other.space.dim())?;
        Ok(self.amps.iter().zip(other.amps.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> DensityMatrix {
        let n = self.space.dim();
        let elements = Array2::from_shape_fn((n, n), |(i, j)| self.amps[i] * self.amps[j].conj());
        DensityMatrix { space: self.space, elements }
    }
}

/// Hermitian, unit-trace operator in the position basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: TorusSpace,
    elements: Array2<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and the purity range.
    pub fn from_matrix(space: TorusSpace, elements: Array2<C64>) -> Result<Self> {
        let n = space.dim();
        if elements.dim() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: elements.nrows() });
        }
        let rho = Self { space, elements };
        let herm = rho.hermiticity_error();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (max deviation {herm:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let p = purity(&rho);
        if p < 1.0 / n as f64 - STATE_TOL || p > 1.0 + STATE_TOL {
            return Err(Error::InvalidState(format!("purity {p} outside [1/N, 1]")));
        }
        Ok(rho)
    }

    pub fn maximally_mixed(space: TorusSpace) -> Self {
        let n = space.dim();
        let elements = Array2::from_diag_elem(n, C64::new(1.0 / n as f64, 0.0));
        Self { space, elements }
    }

    /// Random full-rank state `A A^dag / tr(A A^dag)`.
    pub fn random<R: Rng + ?Sized>(space: TorusSpace, rng: &mut R) -> Self {
        let n = space.dim();
        let a = Array2::from_shape_fn((n, n), |_| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let a_dag = a.t().mapv(|z| z.conj());
        let mut elements = a.dot(&a_dag);
        let tr: f64 = elements.diag().iter().map(|z| z.re).sum();
        elements.mapv_inplace(|z| z / tr);
        let mut rho = Self { space, elements };
        rho.symmetrize();
        rho
    }

    pub(crate) fn from_raw(space: TorusSpace, elements: Array2<C64>) -> Self {
        Self { space, elements }
    }

    pub fn space(&self) -> TorusSpace {
        self.space
    }

    pub fn elements(&self) -> &Array2<C64> {
        &self.elements
    }

    pub fn into_elements(self) -> Array2<C64> {
        self.elements
    }

    pub(crate) fn elements_mut(&mut self) -> &mut Array2<C64> {
        &mut self.elements
    }

    pub fn trace(&self) -> C64 {
        self.elements.diag().sum()
    }

    /// Largest elementwise `|rho - rho^dag|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.space.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.elements[[i, j]] - self.elements[[j, i]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Replaces `rho` by `(rho + rho^dag)/2`.
    pub(crate) fn symmetrize(&mut self) {
        let n = self.space.dim();
        let e = &mut self.elements;
        for i in 0..n {
            e[[i, i]].im = 0.0;
            for j in (i + 1)..n {
                let avg = (e[[i, j]] + e[[j, i]].conj()) * 0.5;
                e[[i, j]] = avg;
                e[[j, i]] = avg.conj();
            }
        }
    }

    /// Largest elementwise difference to another operator.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.elements
            .iter()
            .zip(other.elements.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `tr(rho^2)`, in `[1/N, 1]` for valid states.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.elements.iter().map(|z| z.norm_sqr()).sum()
}

/// `Re tr(rho1 rho2)`.
///
/// Fails when the imaginary part exceeds `1e-10`, which signals that an input
/// was not Hermitian.
pub fn overlap(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    let n = rho1.space.dim();
    check_dim(n, rho2.space.dim())?;
    let a = &rho1.elements;
    let b = &rho2.elements;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[[i, j]] * b[[j, i]];
        }
    }
    if acc.im.abs() > STATE_TOL {
        return Err(Error::InvalidState(format!(
            "tr(rho1 rho2) has imaginary part {:e}",
            acc.im
        )));
    }
    Ok(acc.re)
}
