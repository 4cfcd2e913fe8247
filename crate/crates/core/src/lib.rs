//! Byzantine-resilient gradient coding with interactive identification of
//! malicious workers.
//!
//! Workers hold replicated data samples and answer linear queries about
//! their partial gradients with Reed-Solomon-style coded responses. The main
//! node compares groups of workers that should decode the same value, runs a
//! binary-search match whenever two groups disagree, and convicts liars with
//! a single local gradient computation per match.

pub mod adversary;
pub mod algebra;
pub mod assignment;
pub mod coding;
pub mod harness;
pub mod par;
pub mod protocol;

pub use algebra::{FieldElement, Matrix, PrimeField};
pub use assignment::{AssignmentKind, AssignmentMatrix};
pub use coding::CodeContext;
pub use protocol::{run_protocol, ProtocolConfig, ProtocolError, ProtocolOutcome};
