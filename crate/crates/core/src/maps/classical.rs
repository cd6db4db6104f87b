use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Integer shears `a`, `b` and the sinusoidal perturbation strength `k` of
/// `p' = p + a q - 2 pi k sin(2 pi q)`, `q' = q + b p' - 2 pi k sin(2 pi p')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalMapParams {
    pub a: i64,
    pub b: i64,
    pub k: f64,
}

impl ClassicalMapParams {
    pub fn new(a: i64, b: i64, k: f64) -> Result<Self> {
        let params = Self { a, b, k };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a * self.b <= 0 {
            return Err(Error::NotHyperbolic(self.a * self.b));
        }
        if !(self.k >= 0.0) || !self.k.is_finite() {
            return invalid(format!("perturbation k must be finite and non-negative, got {}", self.k));
        }
        Ok(())
    }
}

/// One iteration of the perturbed cat map, reduced to `[0,1)^2`.
pub fn classical_step(params: &ClassicalMapParams, (q, p): (f64, f64)) -> (f64, f64) {
    let p1 = p + params.a as f64 * q - TAU * params.k * (TAU * q).sin();
    let p1 = p1.rem_euclid(1.0);
    let q1 = q + params.b as f64 * p1 - TAU * params.k * (TAU * p1).sin();
    (q1.rem_euclid(1.0), p1)
}

/// Undoes [`classical_step`] by reversing the two shears.
pub fn classical_step_inverse(params: &ClassicalMapParams, (q1, p1): (f64, f64)) -> (f64, f64) {
    let q = q1 - params.b as f64 * p1 + TAU * params.k * (TAU * p1).sin();
    let q = q.rem_euclid(1.0);
    let p = p1 - params.a as f64 * q + TAU * params.k * (TAU * q).sin();
    (q, p.rem_euclid(1.0))
}

/// Tangent map `d(q', p')/d(q, p)` as `[[dq'/dq, dq'/dp], [dp'/dq, dp'/dp]]`.
pub fn classical_jacobian(params: &ClassicalMapParams, (q, p): (f64, f64)) -> [[f64; 2]; 2] {
    let kk = TAU * TAU * params.k;
    let alpha = params.a as f64 - kk * (TAU * q).cos();
    let p1 = (p + params.a as f64 * q - TAU * params.k * (TAU * q).sin()).rem_euclid(1.0);
    let beta = params.b as f64 - kk * (TAU * p1).cos();
    [[1.0 + beta * alpha, beta], [alpha, 1.0]]
}

/// `ln((2 + ab + sqrt(ab(4 + ab)))/2)`, the log of the expanding eigenvalue of
/// the unperturbed cat matrix.
pub fn lyapunov_formula(a: i64, b: i64) -> Result<f64> {
    let ab = a * b;
    if ab <= 0 {
        return Err(Error::NotHyperbolic(ab));
    }
    let ab = ab as f64;
    Ok(((2.0 + ab + (ab * (4.0 + ab)).sqrt()) / 2.0).ln())
}

/// Mean and standard error of the largest Lyapunov exponent over several
/// trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trajectories: usize,
    pub iterations: usize,
}

const BURN_IN: usize = 100;
const RENORM_EVERY: usize = 10;
const MIN_ITERATIONS: usize = 10_000;
const MIN_TRAJECTORIES: usize = 10;

/// Largest Lyapunov exponent from tangent-vector products, renormalized every
/// 10 steps after a 100-step burn-in.
pub fn classical_lyapunov_numeric(
    params: &ClassicalMapParams,
    n_iter: usize,
    trajectories: usize,
    seed: u64,
) -> Result<LyapunovEstimate> {
    params.validate()?;
    if n_iter < MIN_ITERATIONS {
        return invalid(format!("need at least {MIN_ITERATIONS} iterations, got {n_iter}"));
    }
    if trajectories < MIN_TRAJECTORIES {
        return invalid(format!("need at least {MIN_TRAJECTORIES} trajectories, got {trajectories}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rates: Vec<f64> = (0..trajectories)
        .map(|_| {
            let mut x = (rng.random::<f64>(), rng.random::<f64>());
            for _ in 0..BURN_IN {
                x = classical_step(params, x);
            }
            let mut v = [1.0, 1.0];
            let mut log_growth = 0.0;
            for step in 1..=n_iter {
                let j = classical_jacobian(params, x);
                v = [j[0][0] * v[0] + j[0][1] * v[1], j[1][0] * v[0] + j[1][1] * v[1]];
                x = classical_step(params, x);
                if step % RENORM_EVERY == 0 || step == n_iter {
                    let norm = v[0].hypot(v[1]);
                    log_growth += norm.ln();
                    v = [v[0] / norm, v[1] / norm];
                }
            }
            log_growth / n_iter as f64
        })
        .collect();
    let m = rates.len() as f64;
    let mean = rates.iter().sum::<f64>() / m;
    let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(LyapunovEstimate {
        mean,
        stderr: (var / m).sqrt(),
        trajectories,
        iterations: n_iter,
    })
}
