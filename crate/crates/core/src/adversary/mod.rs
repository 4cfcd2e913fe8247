//! Byzantine strategies. A strategy controls a fixed set of workers and
//! decides, query by query, what each of them transmits; every other worker
//! is honest by construction of the simulated channel.

mod strategies;
mod symmetrization;

use std::collections::BTreeSet;

pub use strategies::{
    worked_example, Honest, LiePlan, Persistence, RandomCorruption, Symmetrizing, TournamentLiar,
};
pub use symmetrization::{choose_attack_set, symmetrization_attack, SymmetrizationOutcome};

use crate::algebra::{FieldElement, Matrix};
use crate::assignment::AssignmentMatrix;
use crate::coding::{CodeContext, EncodingMatrix};
use crate::protocol::{GroupingOrder, Query};

/// What the adversary knows before the first query: the whole setup,
/// including the data. It never sees the main node's decisions in advance.
pub struct AdversaryView<'a> {
    pub ctx: &'a CodeContext,
    pub assignment: &'a AssignmentMatrix,
    /// The all-one encoding.
    pub encoding: &'a EncodingMatrix,
    /// `d x p`.
    pub gradients: &'a Matrix,
    pub grouping: GroupingOrder,
}

pub trait Adversary {
    fn name(&self) -> String;

    /// 0-based controlled workers. Fixed once `prepare` has returned.
    fn controlled(&self) -> &BTreeSet<usize>;

    fn prepare(&mut self, _view: &AdversaryView<'_>) {}

    /// What `worker` transmits for `query`, given the honest value. Must
    /// return a vector of the same length. Called in query order, workers in
    /// ascending order within a query.
    fn respond(&mut self, worker: usize, query: &Query, honest: &[FieldElement])
        -> Vec<FieldElement>;
}
