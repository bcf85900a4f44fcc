//! Experiment orchestration: config files, checkpointed ensemble runs,
//! criteria reports, angle scans, oracle validation, and reference-table
//! reproduction.

mod commands;
mod spec;
mod tables;

pub use commands::{
    angle_distance_deg, cmd_analyze, cmd_oracle_check, cmd_reproduce, cmd_scan_angle,
    cmd_simulate, parse_criterion_spec, render_report, AnalyzeOutcome, CliError, ComparisonRow,
    OracleCheckOutcome, ReproduceOutcome, ScanOutcome, SimulateOutcome,
};
pub use spec::{ExperimentSpec, SpecFile};
pub use tables::{reference_table, table_ids, ReferenceEntry, ReferenceTable};
