//! Exact-arithmetic invariants and embedding decisions for closed manifolds.
//!
//! `crembed` decides three questions about a closed smooth manifold given as a
//! [`ManifoldDescriptor`] (Betti ranks, characteristic-class pairing data, and
//! certified flags):
//!
//! - is the tangent bundle trivial (Kervaire's criteria: the Euler
//!   characteristic in even dimensions, the semi-characteristic in odd ones),
//! - does a codimension-two pseudo-holomorphic embedding into almost-complex
//!   Euclidean space exist,
//! - does a CR regular embedding into complex space exist.
//!
//! Every verdict comes with a replayable certificate citing the classical
//! criteria it used. The [`surgery`] module executes a construction that
//! realizes any finitely presented group as the fundamental group of a closed
//! parallelizable manifold embedded in codimension two, logging each step.
//!
//! All arithmetic is exact: Betti entries are integers or an explicit
//! [`Betti::Unknown`] marker, Smith normal forms are computed over
//! arbitrary-precision integers internally, and overflow is detected and
//! reported rather than wrapped. Values are immutable after construction and
//! every operation is a pure function, so the library is safe to use from
//! concurrent batch drivers without synchronization.

#![forbid(unsafe_code)]

pub mod charclass;
pub mod cli;
pub mod decide;
pub mod descriptor;
pub mod format;
pub mod groups;
pub mod homology;
pub mod matrix;
pub mod obstruction;
pub mod surgery;

pub use charclass::{CharClassData, LaiPairingData};
pub use decide::{Decision, Verdict};
pub use descriptor::{EmbeddingData, EmbeddingEvidence, ManifoldDescriptor, ValidationReport};
pub use groups::{AbelianInvariants, GroupPresentation};
pub use homology::{Betti, BettiTable};
pub use matrix::{IntegerMatrix, SmithDecomposition};
pub use surgery::{ProvenanceLog, SphereProductExpression};
