//! Experiments over quantized Legendrian states: kernel checks, transverse
//! profiles, decay tests, quadrature convergence, and their reports.

// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod fit;
pub mod report;
pub mod setup;
pub mod svg;

pub use config::{ExperimentConfig, OutputFormat, WGrid};
pub use experiments::{run, run_convergence, run_decay, run_kernel_check, run_profile, run_quantize};
pub use fit::{fit_rate, RateFit};
pub use report::{evaluate, verdicts_from_csv, ExperimentKind, ExperimentReport, Row, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot parse configuration: {0}")]
    Parse(String),
    #[error("cannot read configuration: {0}")]
    Io(String),
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Module(#[from] bsq_core::Error),
    #[error("at k = {k}, w = {re}{im:+}i: {source}", re = w[0], im = w[1])]
    At {
        k: u32,
        w: [f64; 2],
        #[source]
        source: bsq_core::Error,
    },
    #[error("rate fit needs {need} positive samples, have {have}")]
    TooFewSamples { have: usize, need: usize },
    #[error("report i/o: {0}")]
    Io(String),
}

impl From<csv::Error> for ExperimentError {
    fn from(e: csv::Error) -> Self {
        ExperimentError::Io(e.to_string())
    }
}
