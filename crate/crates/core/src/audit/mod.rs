//! Diagnostics for inference bias: threshold sweeps with representation
//! ratios, a fixed-threshold model comparison, and the simulated weight grid.

mod dirichlet;
mod grid;
mod snapshot;
mod sweep;

pub use dirichlet::dirichlet_sample;
pub use grid::{weight_grid, GridCell, SimulationGrid};
pub use snapshot::{model_snapshot, write_snapshot_csv, SnapshotEntry};
pub use sweep::{
    standard_models, sweep_baseline, threshold_grid, threshold_sweep, write_sweep_csv, Model,
    SweepRow, EXPECTED_LABEL,
};
