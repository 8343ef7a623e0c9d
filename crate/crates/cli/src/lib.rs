//! Experiment runners, result tables and the invariant suite behind the
//! `rblse` command-line tool.

pub mod experiments;
pub mod table;
pub mod verify;

pub use experiments::{
    run_accuracy, run_benchmark, run_perturbation, run_recovery, trial_seed, ExperimentConfig,
};
pub use table::{Format, Table};
