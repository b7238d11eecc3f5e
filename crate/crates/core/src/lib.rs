//! Computational toolkit for homogeneous ideals in the free algebra and the
//! operator algebras they determine.
//!
//! Everything is computed at a finite degree truncation:
//!
//! * [`ncpoly`]: free noncommutative polynomials with the Fock inner product.
//! * [`polyparse`]: the textual polynomial and ideal-file language.
//! * [`ideal`]: graded components `J_n` of two-sided homogeneous ideals.
//! * [`subproduct`]: the subproduct system `X_n = J_n^⊥` and similarity certificates.
//! * [`fock`]: truncated Fock space, shift matrices, grading projections.
//! * [`ncvariety`]: matrix points, evaluation, variety membership and search.
//! * [`experiments`]: the counterexample ideal, the RFD gap and Nullstellensatz witnesses.

pub mod error;
pub mod experiments;
pub mod fock;
pub mod ideal;
pub mod linalg;
pub mod ncpoly;
pub mod ncvariety;
pub mod polyparse;
pub mod subproduct;

pub use error::{Error, Result};
pub use experiments::{
    counterexample_ideal, counterexample_norm, counterexample_poly, nilpotency_cascade,
    nullstellensatz_witnesses, relation_residuals, rfd_gap, CascadeReport, GapReport,
    RelationCheck, Witness, WitnessSet,
};
pub use fock::{FockEval, FockNorm, FockOperator, FockTruncation};
pub use ideal::{GradedIdeal, IdealConfig, Membership};
pub use linalg::{Subspace, C64};
pub use ncpoly::{HomDecomposition, NcPoly, Word};
pub use ncvariety::{
    eval_at_point, in_variety, sample_variety, search_max_on_variety, separating_point,
    zero_pad_extend, MatrixPoint, SearchConfig, SeparatingPoint, VarietyCheck, VarietyReport,
    VarietySample,
};
pub use polyparse::{format_poly, parse_ideal_file, parse_poly, IdealFile};
pub use subproduct::{
    induced_conjugation, verify_similarity, SimilarityCertificate, SimilarityReport,
    SubproductSystem,
};

/// Crate version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
