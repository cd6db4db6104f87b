//! Decay-rate extraction and parameter sweeps.

mod fit;
mod plateau;
mod sweep;

pub use fit::{fit_decay_rate, fit_log_linear, sum_law_residual, DecayFit, FIT_T_LO, WINDOW_TIERS};
pub use plateau::{detect_plateau, PlateauVerdict, PLATEAU_FLAT_TOL, PLATEAU_NEAR_TOL};
pub use sweep::{
    cell_key, fit_cell, fit_cells, required_cells, run_sweep, assemble_rows, CellFit, CellKey, CellStatus,
    SweepResult, SweepRow,
};
