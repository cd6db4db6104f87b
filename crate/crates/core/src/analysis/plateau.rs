use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest relative spread `(max - min) / mean` of a flat segment.
pub const PLATEAU_FLAT_TOL: f64 = 0.1;
/// Relative distance to the reference rate under which a plateau counts as
/// sitting at it.
pub const PLATEAU_NEAR_TOL: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PlateauVerdict {
    None,
    Plateau {
        level: f64,
        /// Index of the first point on the flat segment.
        onset: usize,
        near_reference: bool,
    },
}

impl PlateauVerdict {
    pub fn is_plateau(&self) -> bool {
        matches!(self, PlateauVerdict::Plateau { .. })
    }
}

/// Two-segment test for saturation of a rate curve `y(x)`.
///
/// Every split into a rising line on the left and a constant on the right is
/// tried and the one with the smallest squared error kept. A plateau is
/// reported when that constant segment has at least three points, is flat to
/// [`PLATEAU_FLAT_TOL`], lies above everything before it, and the split beats a
/// single straight line by a factor of four.
pub fn detect_plateau(x: &[f64], y: &[f64], reference: f64) -> Result<PlateauVerdict> {
    if x.len() != y.len() {
        return invalid("plateau detection needs paired points");
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("plateau detection needs strictly increasing abscissae");
    }
    if y.iter().any(|v| !v.is_finite()) {
        return invalid("plateau detection needs finite rates");
    }
    let n = x.len();
    if n < 5 {
        return Ok(PlateauVerdict::None);
    }
    let single = line_sse(x, y);
    let mut best: Option<(f64, usize)> = None;
    for k in 2..=n - 3 {
        let sse = line_sse(&x[..k], &y[..k]) + const_sse(&y[k..]);
        if best.is_none_or(|(b, _)| sse < b) {
            best = Some((sse, k));
        }
    }
    let (sse, onset) = best.expect("n >= 5 leaves a split");
    let right = &y[onset..];
    let level = right.iter().sum::<f64>() / right.len() as f64;
    let (lo, hi) = right.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let flat = level > 0.0 && (hi - lo) / level <= PLATEAU_FLAT_TOL;
    let rises_into = y[..onset].iter().all(|&v| v < lo);
    let better = sse * 4.0 <= single;
    if flat && rises_into && better {
        let near_reference = ((level - reference) / reference).abs() <= PLATEAU_NEAR_TOL;
        Ok(PlateauVerdict::Plateau { level, onset, near_reference })
    } else {
        Ok(PlateauVerdict::None)
    }
}

fn line_sse(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum()
}

fn const_sse(y: &[f64]) -> f64 {
    let m = y.iter().sum::<f64>() / y.len() as f64;
    y.iter().map(|v| (v - m).powi(2)).sum()
}
