//! Experiment harness behind the `dcqs` binary.

mod commands;
mod config;
mod run;

pub use commands::{
    cmd_exact, cmd_fit_temp, cmd_generate, cmd_run, cmd_throughput, instance_metadata, FitReport, ThroughputReport,
    GROUND_ENERGY_MAX_QUBITS, REFERENCE_UPDATES_PER_SECOND,
};
pub use config::{
    file_stem, log_spaced, resolve, AdaptiveLadder, DcqsBlock, Experiment, ExperimentConfig, InstanceSource,
    LadderSpec, LogSpaced, MethodBlock, MhBlock, OracleChoice, PpBlock, PpParams, PtBlock, TemperatureGrid,
    SCHEMA_VERSION,
};
pub use run::{
    instance_hash, observables_csv, report_body_json, run_experiment, write_outputs, ExactRow, ExactTable,
    ExperimentReport, ExperimentRun, InstanceSummary, IterationReport, LadderReport, MethodPools, MethodReport,
    ReportBody, ReportMetadata, Software, TemperatureRow, TraceSummary, EXACT_CSV_HEADER, OBSERVABLES_CSV_HEADER,
    REPORT_FILE, THROUGHPUT_FILE, T_EFF_BRACKET,
};
