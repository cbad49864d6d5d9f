//! Convergence analysis for backward products `A(k) ... A(1)` of stochastic
//! matrices.
//!
//! The crate checks whether a finite sequence of factors satisfies the four
//! hypotheses under which the products converge to rank one (bounded positive
//! entries, eventual positivity, complete reducibility, and a common
//! aperiodic sink-free subgraph), and when it does, emits a contraction
//! certificate: an index `K` and a factor `1 - n alpha^(n (W(n) + 1))` that
//! bounds the consensus semi-norm of every block of `K` factors.
//!
//! Modules:
//! - [`digraph`]: SCCs, periods, exponents and time-varying walks.
//! - [`stochastic`]: validated matrices and the consensus semi-norm.
//! - [`hypotheses`]: the four condition checks.
//! - [`convergence`]: products, supports, certificates, trajectories.
//! - [`seqfile`], [`generate`], [`report`]: file format, fixture presets and
//!   report rendering used by the command-line tool.

pub mod convergence;
pub mod digraph;
pub mod error;
pub mod generate;
pub mod hypotheses;
pub mod report;
pub mod seqfile;
pub mod stochastic;

pub use convergence::{
    backward_products, contraction_certificate, disagreement_trajectory, find_saturation_index,
    partial_product, run_to_tolerance, seminorm_trajectory, support_profile, CertifyOptions,
    ConvergenceCertificate, ProductState, RunOutcome, SupportProfile,
};
pub use digraph::{Digraph, SccPartition};
pub use error::{Error, Result};
pub use hypotheses::{
    analyze, AnalysisOptions, HypothesisReport, MatrixSequence, PositivityStarts, Verdict,
    Violation,
};
pub use stochastic::{matrix_seminorm, vector_seminorm, StochasticMatrix, Tolerances};
