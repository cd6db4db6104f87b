use serde::{Deserialize, Serialize};

use crate::echo::EchoSeries;
use crate::error::{invalid, Error, Result};

/// First step of every fit window; earlier steps carry the short-time
/// transient.
pub const FIT_T_LO: usize = 2;

/// `(cutoff factor over the floor, minimum points)`, tried in order. A window
/// runs from [`FIT_T_LO`] while the series stays above `factor * floor`.
///
/// The strict first tier keeps the floor's pull on the log-slope small; the
/// looser ones only engage when the decay reaches the floor within a few steps.
pub const WINDOW_TIERS: [(f64, usize); 3] = [(10.0, 4), (5.0, 4), (2.0, 3)];

/// Exponential decay rate of a series together with the window it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Per-step rate, minus the slope of `ln value` against `t`.
    pub gamma: f64,
    pub t_lo: usize,
    pub t_hi: usize,
    pub r_squared: f64,
    /// `max(1/N, mean of the final quarter)`.
    pub floor_estimate: f64,
}

impl DecayFit {
    pub fn points(&self) -> usize {
        self.t_hi - self.t_lo + 1
    }
}

/// Least-squares line through `(t, ln y)`; returns `(slope, r_squared)`.
pub fn fit_log_linear(t: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if t.len() != y.len() || t.len() < 2 {
        return invalid("log-linear fit needs at least two paired points");
    }
    if y.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return invalid("log-linear fit needs finite positive values");
    }
    let n = t.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mt = t.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|x| (x - mt).powi(2)).sum();
    let sty: f64 = t.iter().zip(&ly).map(|(x, v)| (x - mt) * (v - my)).sum();
    let syy: f64 = ly.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sty / stt;
    let ss_res: f64 = t.iter().zip(&ly).map(|(x, v)| (v - my - slope * (x - mt)).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok((slope, r_squared))
}

/// Fits `ln value = c - gamma t` over an automatically chosen window.
///
/// The window starts at [`FIT_T_LO`] and runs while the series stays above a
/// multiple of the floor estimate, using the first of [`WINDOW_TIERS`] that
/// leaves enough points. A series whose final quarter sits more than ten times
/// above `1/N` has not saturated; it is fitted over `[FIT_T_LO, t_max]`.
pub fn fit_decay_rate(series: &EchoSeries) -> Result<DecayFit> {
    let v = &series.values;
    let len = v.len();
    if len < 6 {
        return invalid(format!("fitting needs at least 6 time points, got {len}"));
    }
    let quarter = len.div_ceil(4);
    let tail = v[len - quarter..].iter().sum::<f64>() / quarter as f64;
    let asymptote = 1.0 / series.dim as f64;
    let floor = tail.max(asymptote);

    let mut longest = 0;
    for &(factor, min_points) in &WINDOW_TIERS {
        let end = run_end(v, factor * floor);
        let points = end.map_or(0, |e| e + 1 - FIT_T_LO);
        longest = longest.max(points);
        if points >= min_points {
            return window_fit(v, FIT_T_LO, FIT_T_LO + points - 1, floor);
        }
    }
    if tail > WINDOW_TIERS[0].0 * asymptote {
        return window_fit(v, FIT_T_LO, len - 1, floor);
    }
    Err(Error::Unfittable {
        t_lo: FIT_T_LO,
        t_hi: (FIT_T_LO + longest).saturating_sub(1).max(FIT_T_LO),
        points: longest,
    })
}

/// Last index of the contiguous run above `cutoff` starting at `FIT_T_LO`.
fn run_end(v: &[f64], cutoff: f64) -> Option<usize> {
    let run = v[FIT_T_LO..].iter().take_while(|&&x| x > cutoff).count();
    (run > 0).then(|| FIT_T_LO + run - 1)
}

fn window_fit(v: &[f64], t_lo: usize, t_hi: usize, floor: f64) -> Result<DecayFit> {
    let window = &v[t_lo..=t_hi];
    if let Some(bad) = window.iter().position(|&x| !(x > 0.0)) {
        let points = bad;
        if points < 4 {
            return Err(Error::Unfittable { t_lo, t_hi: t_lo + points.max(1) - 1, points });
        }
        return window_fit(v, t_lo, t_lo + points - 1, floor);
    }
    let t: Vec<f64> = (t_lo..=t_hi).map(|x| x as f64).collect();
    let (slope, r_squared) = fit_log_linear(&t, window)?;
    Ok(DecayFit { gamma: 0.0 - slope, t_lo, t_hi, r_squared, floor_estimate: floor })
}

/// `gamma - (gamma_sigma + gamma_epsilon)`: zero when the two decay channels
/// add independently.
pub fn sum_law_residual(gamma: f64, gamma_sigma: f64, gamma_epsilon: f64) -> f64 {
    gamma - (gamma_sigma + gamma_epsilon)
}
