use serde::{Deserialize, Serialize};

use super::PureState;
use crate::dft::DftPlan;

/// Which way a basis change goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    PositionToMomentum,
    MomentumToPosition,
}

/// Basis change with kernel `<p|q> = N^{-1/2} e^{-2 pi i pq/N}`.
pub fn fourier_transform(state: &PureState, direction: Direction) -> PureState {
    let n = state.space().dim();
    let plan = DftPlan::new(n);
    let mut out = state.clone();
    let buf = out
        .amplitudes_mut()
        .as_slice_mut()
        .expect("state vectors are contiguous");
    match direction {
        Direction::PositionToMomentum => plan.forward(buf),
        Direction::MomentumToPosition => plan.inverse(buf),
    }
    let scale = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|z| *z *= scale);
    out
}
