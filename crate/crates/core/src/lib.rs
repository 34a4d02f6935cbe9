//! Exact-arithmetic toolkit for torus-equivariant vector bundles on smooth
//! complete toric varieties.
//!
//! The crate builds an atlas of torus-invariant affine charts from a fan,
//! turns per-ray filtration data (Klyachko data) into per-cone weight
//! decompositions and an explicit transition cocycle, equips the bundle with
//! its canonical logarithmic connection, and verifies every claimed identity
//! (cocycle laws, gauge compatibility, flatness, residue spectra, pullback
//! invariance) as exact symbolic equalities over the rationals.  There is no
//! floating point anywhere in the verification path.
//!
//! Layering, bottom to top:
//!
//! * [`algebra`] — rationals, integer matrices (Smith normal form), Laurent
//!   polynomials and matrices, logarithmic differential forms.
//! * [`fan`] — fans, chart atlas, monomial transition maps.
//! * [`log_tangent`] — the torus-action frame of the log tangent bundle.
//! * [`klyachko`] — filtration data, cone decompositions, cocycles,
//!   torus pullback and the split-rank coboundary solver.
//! * [`connection`] — the canonical logarithmic connection and its checks.
//! * [`pipeline`] — end-to-end verification runs and machine reports.

pub mod algebra;
pub mod builtins;
pub mod connection;
pub mod fan;
pub mod jsonio;
pub mod klyachko;
pub mod log_tangent;
pub mod pipeline;

pub use algebra::forms::{LogOneForm, LogTwoForm};
pub use algebra::intmat::{IntMat, Snf};
pub use algebra::laurent::Laurent;
pub use algebra::matrix::LaurentMat;
pub use algebra::rational::Rat;
pub use connection::{LogConnection, ResidueSpectrum, CONNECTION_SIGN};
pub use fan::{Atlas, Chart, Fan, TransitionMap};
pub use klyachko::{Cocycle, ConeDecomposition, EquivariantBundle, KlyachkoData};
pub use pipeline::{
    run_pipeline, stage_exit_code, CheckSet, PipelineInput, PipelineOutcome, Stage,
    VerificationReport,
};
