//! Experiment configuration, orchestration and report output.

mod config;
mod emit;
mod experiments;
mod paper;

pub use config::{AesConfig, DnaConfig, ExperimentConfig, GraphConfig, MicrobenchConfig, AES_NS_PER_HOST_BYTE};
pub use emit::{emit_report, recompute_ratio, render_comparisons, render_table, Report};
pub use experiments::{run_aes, run_dna, run_graph, run_microbench_suite, Outcome, ReportRow};
pub use paper::{against, compare, comparisons_pass, measure, Comparison, Measurements, PaperConstants, PaperMetric};
