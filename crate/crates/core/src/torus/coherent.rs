use ndarray::Array1;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PureState, TorusSpace};
use crate::error::{invalid, Result};

/// Name of the generator behind [`random_coherent_centers`], recorded in run
/// metadata.
pub const CENTER_GENERATOR: &str = "rand_chacha::ChaCha8Rng::seed_from_u64(seed), stream = member index";

const IMAGE_TOL: f64 = 1e-14;

/// Periodized symmetric Gaussian centred at `(q0, p0)` in the unit cell.
///
/// `<q_j|q0,p0> ~ sum_m exp(-pi N (j/N - q0 + m)^2) exp(2 pi i N p0 j/N)`, so
/// both widths equal `sqrt(hbar/2)`.
pub fn coherent_state(q0: f64, p0: f64, space: TorusSpace) -> Result<PureState> {
    if !(0.0..1.0).contains(&q0) || !(0.0..1.0).contains(&p0) {
        return invalid(format!("coherent centre ({q0}, {p0}) outside the unit cell"));
    }
    let n = space.dim();
    let nf = n as f64;
    // Images further than `images - 1` cells away contribute < IMAGE_TOL.
    let mut images = 1i64;
    while (-std::f64::consts::PI * nf * (images - 1) as f64 * (images - 1) as f64).exp() >= IMAGE_TOL {
        images += 1;
    }
    let amps = Array1::from_shape_fn(n, |j| {
        let x = j as f64 / nf - q0;
        let envelope: f64 = (-images..=images)
            .map(|m| {
                let d = x + m as f64;
                (-std::f64::consts::PI * nf * d * d).exp()
            })
            .sum();
        C64::from_polar(envelope, std::f64::consts::TAU * p0 * j as f64)
    });
    PureState::normalized(space, amps)
}

/// `n` centres drawn uniformly on `[0,1)^2`.
///
/// Member `i` reads the first two draws of ChaCha8 stream `i` under `seed`, so
/// its centre depends on nothing but `(seed, i)` and a smaller ensemble is a
/// prefix of a larger one.
pub fn random_coherent_centers(n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return invalid("ensemble size must be at least 1");
    }
    Ok((0..n as u64).map(|i| member_center(seed, i)).collect())
}

fn member_center(seed: u64, member: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member);
    (rng.random::<f64>(), rng.random::<f64>())
}
