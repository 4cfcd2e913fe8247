//! The main node's view of the workers and of its own local computations.

use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::adversary::Adversary;
use crate::algebra::{FieldElement, Matrix};
use crate::coding::{interval_mask, restrict_encoding, EncodingMatrix, ResponseMatrix};
use crate::par::{self, Execution};

/// A request for `G a` with `a` the indicator of a contiguous sample range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    /// Protocol round; `0` for the initial responses.
    pub round: usize,
    /// Depth of the requested node in the match tree; `0` for the initial responses.
    pub level: usize,
    /// Inclusive 0-based sample range.
    pub lo: usize,
    pub hi: usize,
    /// Only this gradient coordinate is requested; `None` asks for all of them.
    pub coordinate: Option<usize>,
}

impl Query {
    pub fn initial(p: usize) -> Self {
        Self {
            round: 0,
            level: 0,
            lo: 0,
            hi: p - 1,
            coordinate: None,
        }
    }

    pub fn is_initial(&self) -> bool {
        self.level == 0
    }

    pub fn contains(&self, sample: usize) -> bool {
        self.lo <= sample && sample <= self.hi
    }
}

pub trait WorkerChannel {
    /// Every worker's response to the all-one query.
    fn initial_responses(&mut self) -> Result<ResponseMatrix, ProtocolError>;

    /// Asks `workers` for a single coordinate of `query`; one symbol each, in order.
    fn query(
        &mut self,
        query: &Query,
        workers: &[usize],
    ) -> Result<Vec<FieldElement>, ProtocolError>;
}

pub trait GradientOracle {
    /// Computes partial gradient `sample` at the main node.
    fn partial_gradient(&mut self, sample: usize) -> Result<Vec<FieldElement>, ProtocolError>;
}

/// Ground truth held by the simulation.
pub struct TrueGradients<'a> {
    gradients: &'a Matrix,
}

impl<'a> TrueGradients<'a> {
    pub fn new(gradients: &'a Matrix) -> Self {
        Self { gradients }
    }
}

impl GradientOracle for TrueGradients<'_> {
    fn partial_gradient(&mut self, sample: usize) -> Result<Vec<FieldElement>, ProtocolError> {
        Ok(self.gradients.column(sample))
    }
}

/// Simulated workers: honest responses from the encoding, with the
/// adversary substituting the transmissions of the workers it controls.
pub struct SimulatedWorkers<'a> {
    gradients: &'a Matrix,
    full: &'a EncodingMatrix,
    adversary: &'a mut dyn Adversary,
    execution: Execution,
}

impl<'a> SimulatedWorkers<'a> {
    pub fn new(
        gradients: &'a Matrix,
        full: &'a EncodingMatrix,
        adversary: &'a mut dyn Adversary,
        execution: Execution,
    ) -> Self {
        Self {
            gradients,
            full,
            adversary,
            execution,
        }
    }

    fn transmit(
        &mut self,
        worker: usize,
        query: &Query,
        honest: Vec<FieldElement>,
    ) -> Result<Vec<FieldElement>, ProtocolError> {
        if !self.adversary.controlled().contains(&worker) {
            return Ok(honest);
        }
        let sent = self.adversary.respond(worker, query, &honest);
        if sent.len() != honest.len() {
            return Err(ProtocolError::InvalidResponse(format!(
                "worker {} sent {} symbols, expected {}",
                worker + 1,
                sent.len(),
                honest.len()
            )));
        }
        Ok(sent)
    }
}

impl WorkerChannel for SimulatedWorkers<'_> {
    fn initial_responses(&mut self) -> Result<ResponseMatrix, ProtocolError> {
        let mut responses = ResponseMatrix::honest(self.gradients, self.full);
        let query = Query::initial(self.full.samples());
        for j in 0..responses.z.cols() {
            let sent = self.transmit(j, &query, responses.worker(j))?;
            responses.z.set_column(j, &sent);
        }
        Ok(responses)
    }

    fn query(
        &mut self,
        query: &Query,
        workers: &[usize],
    ) -> Result<Vec<FieldElement>, ProtocolError> {
        let c = query.coordinate.ok_or_else(|| {
            ProtocolError::InvalidResponse("tournament queries name one coordinate".into())
        })?;
        let encoding = restrict_encoding(
            self.full,
            &interval_mask(self.full.samples(), query.lo, query.hi),
        );
        let row = self.gradients.row(c);
        let field = self.gradients.field();
        let honest = par::map(self.execution, workers, |&j| {
            row.iter()
                .enumerate()
                .fold(field.zero(), |acc, (i, g)| acc + *g * encoding.coefficient(i, j))
        });
        workers
            .iter()
            .zip(honest)
            .map(|(&j, h)| Ok(self.transmit(j, query, vec![h])?[0]))
            .collect()
    }
}
