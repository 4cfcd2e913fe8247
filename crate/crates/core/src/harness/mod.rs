//! Configuration, single runs, parameter sweeps and the verification suite.

mod config;
mod run;
mod sweep;
mod verify;

use thiserror::Error;

pub use config::{
    AdversarySpec, AssignmentSource, ControlledRule, SimulationConfig, StrategyName,
};
pub use run::{
    metrics_csv, random_gradients, simulate, simulate_with, RunMetrics, SimulationOutcome,
    CSV_HEADER,
};
pub use sweep::{sweep, Aggregates, GridSpec, Rejection, SweepReport};
pub use verify::{
    verify, verify_cauchy, verify_ecc, verify_lemma3, verify_optimality, verify_remark1,
    verify_shuffled_grouping, verify_vandermonde, VerifyReport, VerifyTarget, LEMMA3_INSTANCES,
};

use crate::assignment::AssignmentError;
use crate::coding::CodingError;
use crate::protocol::ProtocolError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}
