//! Kernel least-squares learning with tail-averaged mini-batch SGD and batch GD
//! in a scale of Hilbert spaces.
//!
//! The recursion for the space `H_s` runs on the kernel obtained from the base
//! kernel by [`scale_shift`]; fitted models are coefficient vectors over the
//! training inputs.

pub mod error;
pub mod harness;
pub mod kernel;
pub mod linalg;
pub mod schedule;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use harness::{
    fit_rate, run_replicated, ExperimentConfig, ExperimentKind, ExperimentResult, ResultRow, Status,
};
pub use kernel::{
    cross_gram, eval_kernel, gram, kappa_sq, scale_shift, GramMatrix, KernelFamily, KernelSpec,
    MaternOrder, Points,
};
pub use linalg::{apply_filter, effective_dimension, eig_sym, estimate_nu, SymmetricSpectrum};
pub use schedule::{
    beta, choose_params, critical_batchsize, sample_size_check, theoretical_rate, Benchmark, Mode,
    Schedule, SmoothnessSpec, Strategy,
};
pub use solver::{
    filter_gd, gd_fit, predict, sgd_fit, spectral_fit, stepsize_check, FilterValue, FitModel,
    Sampling, SgdConfig, Trajectory,
};
pub use synth::{eval_target, excess_risk, sample_dataset, Dataset, TargetFunction};

/// Outcome of a diagnostic: fine, or a warning message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    Ok,
    Warn(String),
}

impl Check {
    pub fn is_ok(&self) -> bool {
        matches!(self, Check::Ok)
    }
}
