//! Exact finite-dimensional verification of complementary measurement
//! families, BB84/E91 quantum key distribution and the Mean King problem.
//!
//! All equations between surface diagrams are evaluated as classically
//! indexed tensors over small Hilbert spaces (dimensions 2 through 9) and
//! compared entrywise against brute-force oracles; no claim is checked
//! symbolically or statistically.

pub mod cli;
pub mod diagrams;
pub mod error;
pub mod families;
pub mod gf;
pub mod meanking;
pub mod numerics;
pub mod qkd;

pub use diagrams::{ClassicalSystem, IndexedTensor, PhaseCell};
pub use error::{Error, Result};
pub use families::{ComplementarityReport, ControlledFamily, Method};
pub use gf::{FieldElement, FieldSpec, FunctionFamily};
pub use meanking::{BipartiteState, MeanKingScheme, MkReport};
pub use numerics::{Complex64, ComplexMatrix};
pub use qkd::{QkdProtocol, QkdReport};

/// Default absolute tolerance for all entrywise comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;
