//! The main node: grouping, contradiction detection, elimination matches and
//! the final decode.

mod channel;
mod grouping;
mod tournament;
mod transcript;
mod tree;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use channel::{GradientOracle, Query, SimulatedWorkers, TrueGradients, WorkerChannel};
pub use grouping::{form_groups, Group, GroupingOrder, GroupingPlan};
pub use tournament::{local_compute, run_match, MatchResult, MatchSetup};
pub use transcript::{
    replay, DecodeMethod, Direction, Event, LeafClaim, Totals, Transcript, WorkerValue,
};
pub use tree::{ceil_log2, MatchTree, NodeId, TreeNode};

use crate::adversary::{Adversary, AdversaryView};
use crate::algebra::{FieldElement, Matrix};
use crate::assignment::AssignmentMatrix;
use crate::coding::{
    build_decoding_matrix, build_full_encoding, ecc_decode, group_response, CodeContext,
    CodingError, EncodingMatrix,
};
use crate::par::Execution;
use transcript::{one_based, residues};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("infeasible protocol state: {0}")]
    InfeasibleState(String),
    #[error("adversary exceeded its budget: {0}")]
    AdversaryBudgetExceeded(String),
    #[error("protocol invariant violated: {0}")]
    ProtocolInvariantViolation(String),
    #[error("invalid worker response: {0}")]
    InvalidResponse(String),
    #[error("replay failed: {0}")]
    Replay(String),
    #[error(transparent)]
    Coding(#[from] CodingError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    #[serde(default)]
    pub grouping: GroupingOrder,
    /// How honest worker responses to a query are computed. Never changes the result.
    #[serde(default)]
    pub execution: Execution,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolState {
    pub round: usize,
    pub active: BTreeSet<usize>,
    pub eliminated: BTreeSet<usize>,
    /// Malicious workers that may still be unidentified.
    pub s_t: usize,
}

impl ProtocolState {
    pub fn new(n: usize, s: usize) -> Self {
        Self {
            round: 1,
            active: (0..n).collect(),
            eliminated: BTreeSet::new(),
            s_t: s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contradiction {
    Agreement(Vec<FieldElement>),
    /// 0-based group indices `first < second` and the first differing coordinate.
    Conflict {
        first: usize,
        second: usize,
        coordinate: usize,
    },
}

/// Lowest differing pair, first differing coordinate.
pub fn detect_contradiction(responses: &[Vec<FieldElement>]) -> Contradiction {
    assert!(!responses.is_empty(), "no group responses");
    let base = &responses[0];
    for (k, other) in responses.iter().enumerate().skip(1) {
        if let Some(c) = base.iter().zip(other).position(|(x, y)| x != y) {
            return Contradiction::Conflict {
                first: 0,
                second: k,
                coordinate: c,
            };
        }
    }
    Contradiction::Agreement(base.clone())
}

/// The main node's side of the protocol, independent of where responses come from.
pub struct MainNode<'a> {
    ctx: &'a CodeContext,
    assignment: &'a AssignmentMatrix,
    full: &'a EncodingMatrix,
    d: usize,
    config: ProtocolConfig,
}

impl<'a> MainNode<'a> {
    pub fn new(
        ctx: &'a CodeContext,
        assignment: &'a AssignmentMatrix,
        full: &'a EncodingMatrix,
        d: usize,
        config: ProtocolConfig,
    ) -> Self {
        Self {
            ctx,
            assignment,
            full,
            d,
            config,
        }
    }

    pub fn run(
        &self,
        channel: &mut dyn WorkerChannel,
        oracle: &mut dyn GradientOracle,
        transcript: &mut Transcript,
    ) -> Result<Vec<FieldElement>, ProtocolError> {
        let ctx = self.ctx;
        let n = ctx.workers();
        let p = self.full.samples();
        let mut state = ProtocolState::new(n, ctx.byzantine_budget());

        transcript.push(Event::Query {
            round: 0,
            level: 0,
            interval: [1, p],
            coordinate: None,
            workers: one_based(0..n),
        });
        let initial = channel.initial_responses()?;
        if initial.z.rows() != self.d || initial.z.cols() != n {
            return Err(ProtocolError::InvalidResponse(format!(
                "initial responses are {}x{}, expected {}x{n}",
                initial.z.rows(),
                initial.z.cols(),
                self.d
            )));
        }
        transcript.push(Event::ResponseSet {
            round: 0,
            level: 0,
            responses: (0..n)
                .map(|j| WorkerValue {
                    worker: j + 1,
                    value: residues(&initial.worker(j)),
                })
                .collect(),
        });

        let gradient = loop {
            if state.s_t < ctx.extra_redundancy() {
                let g = ecc_decode(ctx, &initial, &state.eliminated).map_err(|e| match e {
                    CodingError::DecodeFailure => ProtocolError::AdversaryBudgetExceeded(
                        "responses of the remaining workers are not decodable".into(),
                    ),
                    other => other.into(),
                })?;
                transcript.push(Event::Decode {
                    round: state.round,
                    method: DecodeMethod::Ecc,
                    groups: Vec::new(),
                    values: vec![residues(&g)],
                    identified: one_based(state.eliminated.iter().copied()),
                });
                break g;
            }

            let plan = form_groups(
                &state.active,
                ctx.r(),
                state.s_t,
                self.config.grouping,
                state.round,
            )?;
            let decoding = build_decoding_matrix(ctx, &plan.groups());
            let values: Vec<Vec<FieldElement>> = (0..decoding.groups.len())
                .map(|k| group_response(&initial, &decoding.column(k)))
                .collect();
            transcript.push(Event::Decode {
                round: state.round,
                method: DecodeMethod::Groups,
                groups: decoding.groups.iter().map(Group::display_members).collect(),
                values: values.iter().map(|v| residues(v)).collect(),
                identified: one_based(state.eliminated.iter().copied()),
            });

            let (first, second, coordinate) = match detect_contradiction(&values) {
                Contradiction::Agreement(g) => break g,
                Contradiction::Conflict {
                    first,
                    second,
                    coordinate,
                } => (first, second, coordinate),
            };
            transcript.push(Event::Conflict {
                round: state.round,
                groups: [first + 1, second + 1],
                coordinate,
            });
            let setup = MatchSetup {
                round: state.round,
                assignment: self.assignment,
                full: self.full,
                decoding: &decoding,
                initial: &initial,
                pair: (first, second),
                coordinate,
            };
            let result = run_match(&setup, channel, oracle, transcript)?;

            let x = result.malicious.len();
            if state.eliminated.len() + x > ctx.byzantine_budget() {
                return Err(ProtocolError::AdversaryBudgetExceeded(format!(
                    "{} workers proven malicious with s = {}",
                    state.eliminated.len() + x,
                    ctx.byzantine_budget()
                )));
            }
            for j in &result.malicious {
                state.active.remove(j);
                state.eliminated.insert(*j);
            }
            state.s_t -= x;
            state.round += 1;
            transcript.totals.rounds += 1;
        };

        transcript.totals.eliminated = state.eliminated.clone();
        let totals = &transcript.totals;
        let final_event = Event::Final {
            gradient: residues(&gradient),
            c: totals.c,
            c_oh: totals.c_oh,
            rounds: totals.rounds,
            downlink_bits: totals.downlink_bits,
            eliminated: one_based(state.eliminated.iter().copied()),
        };
        transcript.push(final_event);
        Ok(gradient)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolOutcome {
    pub gradient: Vec<FieldElement>,
    pub transcript: Transcript,
}

/// `setup` record for a run; the first line of every transcript.
pub fn setup_event(
    ctx: &CodeContext,
    assignment: &AssignmentMatrix,
    d: usize,
    config: &ProtocolConfig,
) -> Event {
    Event::Setup {
        n: ctx.workers(),
        s: ctx.byzantine_budget(),
        u: ctx.extra_redundancy(),
        p: assignment.samples(),
        d,
        q: ctx.field().modulus(),
        eval_points: residues(ctx.points()),
        grouping: config.grouping,
        assignment: assignment.row_strings(),
    }
}

/// Runs the protocol once against simulated workers. `gradients` is `d x p`.
pub fn run_protocol(
    ctx: &CodeContext,
    assignment: &AssignmentMatrix,
    gradients: &Matrix,
    adversary: &mut dyn Adversary,
    config: ProtocolConfig,
) -> Result<ProtocolOutcome, ProtocolError> {
    if gradients.cols() != assignment.samples() {
        return Err(ProtocolError::InfeasibleState(format!(
            "{} gradient columns for {} samples",
            gradients.cols(),
            assignment.samples()
        )));
    }
    if gradients.rows() == 0 {
        return Err(ProtocolError::InfeasibleState("gradient dimension is zero".into()));
    }
    let full = build_full_encoding(ctx, assignment)?;
    adversary.prepare(&AdversaryView {
        ctx,
        assignment,
        encoding: &full,
        gradients,
        grouping: config.grouping,
    });
    let controlled = adversary.controlled();
    if controlled.len() > ctx.byzantine_budget() {
        return Err(ProtocolError::AdversaryBudgetExceeded(format!(
            "adversary controls {} workers, s = {}",
            controlled.len(),
            ctx.byzantine_budget()
        )));
    }
    if let Some(&j) = controlled.iter().find(|&&j| j >= ctx.workers()) {
        return Err(ProtocolError::InfeasibleState(format!(
            "adversary controls nonexistent worker {}",
            j + 1
        )));
    }

    let mut transcript = Transcript::default();
    transcript.push(setup_event(ctx, assignment, gradients.rows(), &config));
    let node = MainNode::new(ctx, assignment, &full, gradients.rows(), config);
    let mut channel = SimulatedWorkers::new(gradients, &full, adversary, config.execution);
    let mut oracle = TrueGradients::new(gradients);
    let gradient = node.run(&mut channel, &mut oracle, &mut transcript)?;
    Ok(ProtocolOutcome {
        gradient,
        transcript,
    })
}

/// `G 1`.
pub fn true_gradient(gradients: &Matrix) -> Vec<FieldElement> {
    let field = gradients.field();
    (0..gradients.rows())
        .map(|c| gradients.row(c).iter().fold(field.zero(), |acc, x| acc + *x))
        .collect()
}

/// Guaranteed limits on one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub c: usize,
    pub c_oh: usize,
    pub rounds: usize,
}

impl Bounds {
    pub fn for_params(s: usize, u: usize, r: usize, p: usize) -> Self {
        let rounds = s + 1 - u;
        Self {
            c: rounds,
            c_oh: (r + 2) * rounds * ceil_log2(p),
            rounds,
        }
    }

    pub fn holds(&self, totals: &Totals) -> bool {
        totals.c <= self.c && totals.c_oh <= self.c_oh && totals.rounds <= self.rounds
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeField;

    #[test]
    fn agreement_on_identical_responses() {
        let f = PrimeField::new(7).unwrap();
        let v = vec![f.elem(3), f.elem(4)];
        assert_eq!(
            detect_contradiction(&[v.clone(), v.clone(), v.clone()]),
            Contradiction::Agreement(v)
        );
    }

    #[test]
    fn lowest_pair_and_first_coordinate() {
        let f = PrimeField::new(7).unwrap();
        let a = vec![f.elem(1), f.elem(2)];
        let b = vec![f.elem(1), f.elem(5)];
        assert_eq!(
            detect_contradiction(&[a.clone(), a.clone(), b]),
            Contradiction::Conflict {
                first: 0,
                second: 2,
                coordinate: 1
            }
        );
    }

    #[test]
    fn bounds_formula() {
        // n=3, s=1, u=1, p=3: r=1.
        let b = Bounds::for_params(1, 1, 1, 3);
        assert_eq!((b.c, b.c_oh, b.rounds), (1, 6, 1));
        assert_eq!(Bounds::for_params(2, 3, 0, 9).c_oh, 0);
    }
}
