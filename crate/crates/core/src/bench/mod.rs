//! Experiment harness: configs, runs, and CSV/JSON/plot-data reports.

pub mod cli;
mod config;
mod report;
mod run;

pub use config::{parse_seed_range, Algorithm, ExperimentConfig, InstanceSource};
pub use report::{
    csv_string, emit_report, format_g17, parse_csv, ratio_vs_eps, read_csv, rounds_vs_n, write_csv, write_json,
    ReportRow, CSV_HEADER,
};
pub use run::{run_algorithm, run_batch, run_experiment};
