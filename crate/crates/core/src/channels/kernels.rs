use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dft::{transpose_square, DftPlan};
use crate::error::{invalid, Error, Result};
use crate::torus::TorusSpace;

pub const DEFAULT_GDM_TAIL_TOL: f64 = 1e-12;
pub const DEFAULT_LDM_IMAGES: usize = 100;

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Shape of the translation distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelModel {
    /// Periodized Gaussian.
    Gdm,
    /// Uniform over all translations plus identity weight.
    Dc,
    /// Periodized 2D Lorentzian.
    Ldm,
    /// User-supplied weight grid.
    Custom,
}

impl KernelModel {
    pub const NAMED: [KernelModel; 3] = [KernelModel::Gdm, KernelModel::Dc, KernelModel::Ldm];

    pub fn as_str(&self) -> &'static str {
        match self {
            KernelModel::Gdm => "gdm",
            KernelModel::Dc => "dc",
            KernelModel::Ldm => "ldm",
            KernelModel::Custom => "custom",
        }
    }
}

impl fmt::Display for KernelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gdm" => Ok(KernelModel::Gdm),
            "dc" => Ok(KernelModel::Dc),
            "ldm" => Ok(KernelModel::Ldm),
            _ => invalid(format!("unknown model `{s}`; expected one of gdm, dc, ldm")),
        }
    }
}

/// Everything needed to build a kernel once the Hilbert dimension is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub model: KernelModel,
    pub epsilon: f64,
    pub gdm_tail_tol: f64,
    pub ldm_images: usize,
}

impl KernelSpec {
    pub fn new(model: KernelModel, epsilon: f64) -> Self {
        Self {
            model,
            epsilon,
            gdm_tail_tol: DEFAULT_GDM_TAIL_TOL,
            ldm_images: DEFAULT_LDM_IMAGES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return invalid(format!("epsilon must be finite and non-negative, got {}", self.epsilon));
        }
        match self.model {
            KernelModel::Dc if self.epsilon > 1.0 => {
                invalid(format!("depolarizing epsilon must lie in [0, 1], got {}", self.epsilon))
            }
            KernelModel::Custom => invalid("custom kernels cannot be built from a spec"),
            _ => Ok(()),
        }
    }

    pub fn build(&self, space: TorusSpace) -> Result<DecoherenceKernel> {
        self.validate()?;
        match self.model {
            KernelModel::Gdm => kernel_gdm(self.epsilon, space, self.gdm_tail_tol),
            KernelModel::Dc => kernel_dc(self.epsilon, space),
            KernelModel::Ldm => kernel_ldm(self.epsilon, space, self.ldm_images),
            KernelModel::Custom => unreachable!("rejected by validate"),
        }
    }
}

/// Translation weights `w(q, p)` together with the channel eigenvalues.
#[derive(Debug, Clone)]
pub struct DecoherenceKernel {
    space: TorusSpace,
    model: KernelModel,
    epsilon: f64,
    weights: Array2<f64>,
    eigenvalues: Array2<C64>,
    identity: bool,
    pub(crate) plan: DftPlan,
}

impl DecoherenceKernel {
    /// Wraps an arbitrary non-negative weight grid that sums to one.
    pub fn from_weights(space: TorusSpace, weights: Array2<f64>) -> Result<Self> {
        Self::assemble(space, KernelModel::Custom, f64::NAN, weights)
    }

    fn assemble(space: TorusSpace, model: KernelModel, epsilon: f64, weights: Array2<f64>) -> Result<Self> {
        let n = space.dim();
        if weights.dim() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: weights.nrows() });
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return invalid("kernel weights must be finite and non-negative");
        }
        let total = compensated_sum(weights.iter().copied());
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return invalid(format!("kernel weights sum to {total}, not 1"));
        }
        let identity = weights[[0, 0]] == 1.0;
        let plan = DftPlan::new(n);
        let eigenvalues = eigenvalues_fft(&weights, &plan);
        Ok(Self { space, model, epsilon, weights, eigenvalues, identity, plan })
    }

    /// The trivial channel `D(rho) = rho`.
    pub fn identity(space: TorusSpace, model: KernelModel) -> Self {
        let n = space.dim();
        let mut weights = Array2::zeros((n, n));
        weights[[0, 0]] = 1.0;
        Self::assemble(space, model, 0.0, weights).expect("delta kernel is valid")
    }

    pub fn space(&self) -> TorusSpace {
        self.space
    }

    pub fn model(&self) -> KernelModel {
        self.model
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `w[a_q, a_p]`.
    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    /// `lambda[b_q, b_p]`.
    pub fn eigenvalues(&self) -> &Array2<C64> {
        &self.eigenvalues
    }

    /// True for the delta kernel, where the channel is skipped outright.
    pub fn is_identity(&self) -> bool {
        self.identity
    }
}

/// `lambda_b = sum_a w(a) e^{2 pi i (a_p b_q - a_q b_p)/N}`.
pub fn channel_eigenvalues(kernel: &DecoherenceKernel) -> Array2<C64> {
    eigenvalues_fft(&kernel.weights, &kernel.plan)
}

fn eigenvalues_fft(weights: &Array2<f64>, plan: &DftPlan) -> Array2<C64> {
    let n = weights.nrows();
    let mut buf: Vec<C64> = weights.iter().map(|&w| C64::new(w, 0.0)).collect();
    // sum over a_p with e^{+i a_p b_q}: buf[a_q, b_q]
    plan.inverse(&mut buf);
    transpose_square(&mut buf, n);
    // sum over a_q with e^{-i a_q b_p}: buf[b_q, b_p]
    plan.forward(&mut buf);
    Array2::from_shape_vec((n, n), buf).expect("n*n buffer")
}

/// Representative of `q` in `(-N/2, N/2]`. Image windows are centred on it so
/// that truncated sums keep the exact `q -> -q` symmetry.
fn centred(q: usize, n: usize) -> f64 {
    if 2 * q > n {
        q as f64 - n as f64
    } else {
        q as f64
    }
}

/// Neumaier summation; plain sums of `N^2` weights drift by more than the
/// normalization tolerance.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn normalize(mut weights: Array2<f64>) -> Array2<f64> {
    let total = compensated_sum(weights.iter().copied());
    weights.mapv_inplace(|w| w / total);
    weights
}

/// Periodized Gaussian with standard deviation `epsilon N / (2 pi)` lattice
/// sites per axis.
///
/// Images are added until the neglected ones carry less than `tail_tol` of the
/// mass.
pub fn kernel_gdm(epsilon: f64, space: TorusSpace, tail_tol: f64) -> Result<DecoherenceKernel> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return invalid(format!("epsilon must be finite and non-negative, got {epsilon}"));
    }
    if !(tail_tol > 0.0) {
        return invalid("tail tolerance must be positive");
    }
    if epsilon == 0.0 {
        return Ok(DecoherenceKernel::identity(space, KernelModel::Gdm));
    }
    let n = space.dim();
    let nf = n as f64;
    let width = epsilon * nf / TAU;
    let gauss = |d: f64| (-d * d / (2.0 * width * width)).exp();
    // The nearest neglected image sits at least (x - 1) N + 1 sites away.
    let mut images = 1usize;
    while gauss(((images - 1) * n + 1) as f64) * (2.0 * nf) >= tail_tol * 1e-3 {
        images += 1;
    }
    let x = images as i64;
    let profile: Vec<f64> = (0..n)
        .map(|q| {
            let c = centred(q, n);
            (-x..=x).map(|j| gauss(c - (j * n as i64) as f64)).sum()
        })
        .collect();
    let weights = Array2::from_shape_fn((n, n), |(q, p)| profile[q] * profile[p]);
    DecoherenceKernel::assemble(space, KernelModel::Gdm, epsilon, normalize(weights))
}

/// Generalized depolarizing channel.
///
/// Every translation, identity included, gets `epsilon/N^2`, and the identity
/// additionally keeps `1 - epsilon`.
pub fn kernel_dc(epsilon: f64, space: TorusSpace) -> Result<DecoherenceKernel> {
    if !(0.0..=1.0).contains(&epsilon) {
        return invalid(format!("depolarizing epsilon must lie in [0, 1], got {epsilon}"));
    }
    if epsilon == 0.0 {
        return Ok(DecoherenceKernel::identity(space, KernelModel::Dc));
    }
    let n = space.dim();
    let uniform = epsilon / (n * n) as f64;
    let mut weights = Array2::from_elem((n, n), uniform);
    weights[[0, 0]] = 1.0 - epsilon + uniform;
    DecoherenceKernel::assemble(space, KernelModel::Dc, epsilon, weights)
}

/// Periodized 2D Lorentzian with half-width `epsilon N / (2 pi)`, image sum
/// over `j, m` in `[-x_images, x_images]` around the centred representative of
/// `(q, p)`.
///
/// The truncated sum is evaluated per row: the sum over `m` has a closed form
/// for the full lattice, and the two tails beyond `x_images` are subtracted
/// with an Euler-Maclaurin estimate. Cost is `O(x N^2)` instead of `O(x^2 N^2)`.
pub fn kernel_ldm(epsilon: f64, space: TorusSpace, x_images: usize) -> Result<DecoherenceKernel> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return invalid(format!("epsilon must be finite and non-negative, got {epsilon}"));
    }
    if x_images < 1 {
        return invalid("the Lorentzian image sum needs x_images >= 1");
    }
    if epsilon == 0.0 {
        return Ok(DecoherenceKernel::identity(space, KernelModel::Ldm));
    }
    let weights = ldm_weights(epsilon, space.dim(), x_images);
    DecoherenceKernel::assemble(space, KernelModel::Ldm, epsilon, normalize(weights))
}

const DIRECT_ROW_IMAGES: usize = 16;

/// `sum_{m=-x}^{x} 1/(c + (p - mN)^2)`: the full periodic sum in closed form
/// minus the two tails beyond `|m| = x`.
fn lorentz_row(c: f64, p: f64, n: f64, x: usize) -> f64 {
    // The tail expansion needs the first omitted image far from the origin.
    if x < DIRECT_ROW_IMAGES {
        let x = x as i64;
        return (-x..=x).map(|m| 1.0 / (c + (p - m as f64 * n).powi(2))).sum();
    }
    let root = c.sqrt();
    let z = TAU * root / n;
    let e = (-z).exp();
    let one_minus_e = -(-z).exp_m1();
    let s = (PI * p / n).sin();
    // sinh z / (cosh z - cos theta), written to stay finite for large z
    let ratio = one_minus_e * (1.0 + e) / (one_minus_e * one_minus_e + 4.0 * e * s * s);
    let full = PI / (n * root) * ratio;
    let m0 = (x + 1) as f64;
    full - lorentz_tail(c, m0 * n - p, n) - lorentz_tail(c, m0 * n + p, n)
}

/// `sum_{i>=0} 1/(c + (w + i n)^2)` for `w >> n`, by Euler-Maclaurin.
fn lorentz_tail(c: f64, w: f64, n: f64) -> f64 {
    let root = c.sqrt();
    let d = c + w * w;
    let integral = (root / w).atan() / (n * root);
    let g = 1.0 / d;
    let g1 = -2.0 * n * w / (d * d);
    let g3 = 24.0 * n * n * n * w * (c - w * w) / (d * d * d * d);
    integral + 0.5 * g - g1 / 12.0 + g3 / 720.0
}

fn ldm_weights(epsilon: f64, n: usize, x_images: usize) -> Array2<f64> {
    let nf = n as f64;
    let width = epsilon * nf / TAU;
    let x = x_images as i64;
    // Centred windows make rows symmetric under q -> N - q and p -> N - p.
    let half = n / 2 + 1;
    let mut rows = Array2::<f64>::zeros((half, n));
    for q in 0..half {
        for j in -x..=x {
            let u = q as f64 - (j * n as i64) as f64;
            let c = width * width + u * u;
            for p in 0..=n / 2 {
                rows[[q, p]] += lorentz_row(c, p as f64, nf, x_images);
            }
        }
        for p in n / 2 + 1..n {
            rows[[q, p]] = rows[[q, n - p]];
        }
    }
    Array2::from_shape_fn((n, n), |(q, p)| {
        let qq = if q < half { q } else { n - q };
        rows[[qq, p]] * width / PI
    })
}

/// Direct `(2x+1)^2`-image Lorentzian sum, normalized. Reference for small `N`.
pub fn ldm_weights_brute_force(epsilon: f64, n: usize, x_images: usize) -> Array2<f64> {
    let width = epsilon * n as f64 / TAU;
    let x = x_images as i64;
    let ni = n as i64;
    let weights = Array2::from_shape_fn((n, n), |(q, p)| {
        let mut acc = 0.0;
        for j in -x..=x {
            let dq = centred(q, n) - (j * ni) as f64;
            for m in -x..=x {
                let dp = centred(p, n) - (m * ni) as f64;
                acc += width / (width * width + dq * dq + dp * dp);
            }
        }
        acc
    });
    normalize(weights)
}
