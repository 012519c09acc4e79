//! Configuration-driven Monte-Carlo experiments: receivers, seeded trials,
//! operation counts, CSV tables and SVG plots.

mod complexity;
mod plot;
mod receiver;
mod runner;
mod spec;
mod table;

pub use complexity::{complexity_counts, OpCounts, COMPLEXITY_TAGS};
pub use plot::{render_plots, LOG_FLOOR};
pub use receiver::{Receiver, StepInfo, TrialOracle};
pub use runner::{
    provenance, run_experiment, run_experiment_with_threads, trial_rng, AlgorithmResult, ExperimentResult, PointResult,
    Traces,
};
pub use spec::{
    Algorithm, AlgorithmSpec, BranchDetection, BranchSearch, DataMode, ExperimentSpec, OrderSearch, Preset,
    SaabfParams, Sweep, SweepAxis, Tolerance,
};
pub use table::{export_csv, format_value, read_csv, result_table, round_value, write_table, Table};
