//! Graphon sampling, seeded experiments, CSV output and the verification
//! suite.

mod config;
mod csv;
mod experiments;
mod family;
mod sampling;
mod verify;

pub use config::{default_signals, Experiment, ExperimentConfig, ExperimentKind};
pub use csv::{csv_string, write_csv, Row, CSV_HEADER};
pub use experiments::{
    check_filter_gate, decreasing_with_exceptions, loglog_rate, run_convergence, run_laplace, run_scnn_transfer,
    run_transfer_bound, ConvergenceParams, ConvergenceReport, LaplaceParams, LaplaceReport, ScnnParams, ScnnReport,
    ScnnTrial, TransferParams, TransferReport, TransferTrial, FILTER_BOUND_SLACK, SCNN_BOUND_SLACK,
};
pub use family::GraphonFamily;
pub use sampling::{derive_seed, node_positions, sample_graph, sample_signal, GraphSample, Sampling, SignalFn};
pub use verify::{
    random_graph, random_kernel, random_polynomial, random_signal, random_spec, verify_suite, CheckResult, Fault,
    VerifyReport, IDENTITY_TOL, INEQUALITY_SLACK,
};
