//! Configuration, solution caching, study orchestration and reporting.

mod cache;
mod config;
mod report;
mod runner;
mod selftest;
mod studies;

use thiserror::Error;

use crate::bounds::BoundsError;
use crate::fem::FemError;
use crate::quadrature::QuadratureError;

pub use cache::{cache_key, decode_entry, encode_entry, CacheEntry, SolutionCache, CACHE_VERSION};
pub use config::{
    apply_env_overrides, BoundsConfig, ExperimentConfig, MeshConfig, PathsConfig, RuleKind, SolveConfig, SolverConfig,
    StudyConfig, ENV_PREFIX,
};
pub use report::{
    emit_report, fmt_f64, least_squares, parse_report_csv, report_csv, Abscissa, LineFit, StudyReport, StudyRow, CSV_HEADER,
};
pub use runner::{PicardStats, Solver};
pub use selftest::{selftest, SelfCheck};
pub use studies::{
    generating_vector, run_gl_study, run_mc_study, run_mms_study, run_qmc_study, run_verify_bounds, verify_config,
    with_workers, write_verify_outputs, MmsReport, QmcOutcome,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("I/O: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("study: {0}")]
    Study(String),
    #[error("Picard iteration did not contract at y = {y:?}: increments {increments:?}")]
    NonContraction { y: Vec<f64>, increments: Vec<f64> },
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}
