//! The adaptive sampling-and-filtering maximizer and its guess ladder.

mod params;
mod run;
mod sampling;
mod steps;

pub use params::{
    build_guess_ladder, derive_params, sample_counts, sample_size, validate_eps, AlgoParams, Mode, MAX_EPS,
    SLACK_DIVISOR,
};
pub use run::{
    maximize, maximize_with, run_phase, run_with_guess, singleton_max, Branch, LadderReport, MaximizeOptions,
    PhaseEnd, RunResult, TraceRecord, GUESS_STREAM,
};
pub use sampling::{sample_uniform_subset, SubsetSampler};
pub use steps::{filter_step, gain_step, FilterEstimates, FilterOutcome, GainOutcome, PhaseState};
