//! Protocol transcripts as JSON Lines.
//!
//! One JSON object per line, tagged by `"event"`. Worker and sample indices
//! are 1-based; field elements are written as their residues. Records appear
//! in the order the main node produced them:
//!
//! | event           | fields (in order)                                                   |
//! |-----------------|---------------------------------------------------------------------|
//! | `setup`         | `n s u p d q eval_points grouping assignment`                       |
//! | `query`         | `round level interval coordinate workers`                           |
//! | `response_set`  | `round level responses[{worker, value}]`                            |
//! | `decode`        | `round method groups values identified`                             |
//! | `conflict`      | `round groups coordinate`                                           |
//! | `match_level`   | `round level interval claims direction symbols`                     |
//! | `local_compute` | `round sample value`                                                |
//! | `elimination`   | `round sample truth claims[{worker, assigned, claim, malicious}] workers` |
//! | `final`         | `gradient c c_oh rounds downlink_bits eliminated`                   |
//!
//! `coordinate` is 0-based like a vector index. The `initial` responses are
//! the `response_set` with `round = 0`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::channel::{GradientOracle, Query, WorkerChannel};
use super::grouping::GroupingOrder;
use super::{MainNode, ProtocolConfig, ProtocolError};
use crate::algebra::{FieldElement, Matrix, PrimeField};
use crate::assignment::AssignmentMatrix;
use crate::coding::{build_full_encoding, CodeContext, ResponseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeMethod {
    Groups,
    Ecc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerValue {
    pub worker: usize,
    pub value: Vec<u64>,
}

/// A worker's committed value at the contested leaf.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafClaim {
    pub worker: usize,
    pub assigned: bool,
    /// For assigned workers the claimed partial gradient coordinate; for
    /// unassigned workers the committed contribution, which must be zero.
    pub claim: u64,
    pub malicious: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Setup {
        n: usize,
        s: usize,
        u: usize,
        p: usize,
        d: usize,
        q: u64,
        eval_points: Vec<u64>,
        grouping: GroupingOrder,
        assignment: Vec<String>,
    },
    Query {
        round: usize,
        level: usize,
        interval: [usize; 2],
        coordinate: Option<usize>,
        workers: Vec<usize>,
    },
    ResponseSet {
        round: usize,
        level: usize,
        responses: Vec<WorkerValue>,
    },
    Decode {
        round: usize,
        method: DecodeMethod,
        groups: Vec<Vec<usize>>,
        values: Vec<Vec<u64>>,
        identified: Vec<usize>,
    },
    Conflict {
        round: usize,
        groups: [usize; 2],
        coordinate: usize,
    },
    MatchLevel {
        round: usize,
        level: usize,
        interval: [usize; 2],
        claims: [u64; 2],
        direction: Direction,
        symbols: usize,
    },
    LocalCompute {
        round: usize,
        sample: usize,
        value: Vec<u64>,
    },
    Elimination {
        round: usize,
        sample: usize,
        truth: u64,
        claims: Vec<LeafClaim>,
        workers: Vec<usize>,
    },
    Final {
        gradient: Vec<u64>,
        c: usize,
        c_oh: usize,
        rounds: usize,
        downlink_bits: usize,
        eliminated: Vec<usize>,
    },
}

/// Figures of merit accumulated over one run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    /// Local computations at the main node.
    pub c: usize,
    /// Field symbols sent worker-to-main during the interactive part.
    pub c_oh: usize,
    pub rounds: usize,
    /// One bit per tournament level; not part of `c_oh`.
    pub downlink_bits: usize,
    /// 0-based.
    pub eliminated: BTreeSet<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub events: Vec<Event>,
    pub totals: Totals,
}

pub(crate) fn residues(v: &[FieldElement]) -> Vec<u64> {
    v.iter().map(FieldElement::value).collect()
}

pub(crate) fn one_based(v: impl IntoIterator<Item = usize>) -> Vec<usize> {
    v.into_iter().map(|j| j + 1).collect()
}

impl Transcript {
    pub fn push(&mut self, event: Event) {
        self.events.push(event);
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn parse_jsonl(text: &str) -> Result<Vec<Event>, ProtocolError> {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(k, line)| {
                serde_json::from_str(line)
                    .map_err(|e| ProtocolError::Replay(format!("line {}: {e}", k + 1)))
            })
            .collect()
    }

    pub fn final_gradient(&self) -> Option<&[u64]> {
        self.events.iter().rev().find_map(|e| match e {
            Event::Final { gradient, .. } => Some(gradient.as_slice()),
            _ => None,
        })
    }
}

struct ReplayChannel {
    initial: ResponseMatrix,
    queries: VecDeque<(Query, Vec<usize>, Vec<FieldElement>)>,
}

impl WorkerChannel for ReplayChannel {
    fn initial_responses(&mut self) -> Result<ResponseMatrix, ProtocolError> {
        Ok(self.initial.clone())
    }

    fn query(
        &mut self,
        query: &Query,
        workers: &[usize],
    ) -> Result<Vec<FieldElement>, ProtocolError> {
        let (recorded, asked, values) = self
            .queries
            .pop_front()
            .ok_or_else(|| ProtocolError::Replay("transcript has no more queries".into()))?;
        if recorded != *query || asked != workers {
            return Err(ProtocolError::Replay(format!(
                "main node issued {query:?} to {:?}, transcript recorded {recorded:?} to {:?}",
                one_based(workers.iter().copied()),
                one_based(asked)
            )));
        }
        Ok(values)
    }
}

struct ReplayOracle {
    field: PrimeField,
    values: BTreeMap<usize, Vec<u64>>,
}

impl GradientOracle for ReplayOracle {
    fn partial_gradient(&mut self, sample: usize) -> Result<Vec<FieldElement>, ProtocolError> {
        self.values
            .get(&sample)
            .map(|v| v.iter().map(|&x| self.field.elem(x)).collect())
            .ok_or_else(|| {
                ProtocolError::Replay(format!("no local computation recorded for sample {}", sample + 1))
            })
    }
}

/// Re-runs the main node on the recorded worker responses and local
/// computations. Succeeds only if the regenerated transcript is identical to
/// the recorded one; returns the final gradient.
pub fn replay(text: &str) -> Result<Vec<FieldElement>, ProtocolError> {
    let events = Transcript::parse_jsonl(text)?;
    let Some(Event::Setup {
        n,
        s,
        u,
        p,
        d,
        q,
        eval_points,
        grouping,
        assignment,
    }) = events.first().cloned()
    else {
        return Err(ProtocolError::Replay("first record must be `setup`".into()));
    };
    let field = PrimeField::new(q).map_err(|e| ProtocolError::Replay(e.to_string()))?;
    let points = eval_points.iter().map(|&x| field.elem(x)).collect();
    let ctx = CodeContext::with_points(field, s, u, points)?;
    let a = AssignmentMatrix::from_row_strings(&assignment)
        .map_err(|e| ProtocolError::Replay(e.to_string()))?;
    if ctx.workers() != n || a.workers() != n || a.samples() != p {
        return Err(ProtocolError::Replay("setup dimensions disagree".into()));
    }
    let full = build_full_encoding(&ctx, &a)?;

    let mut initial = None;
    let mut queries = VecDeque::new();
    let mut pending_query: Option<(Query, Vec<usize>)> = None;
    let mut local = BTreeMap::new();
    for e in &events[1..] {
        match e {
            Event::Query {
                round,
                level,
                interval,
                coordinate,
                workers,
            } => {
                let query = Query {
                    round: *round,
                    level: *level,
                    lo: interval[0] - 1,
                    hi: interval[1] - 1,
                    coordinate: *coordinate,
                };
                pending_query = Some((query, workers.iter().map(|j| j - 1).collect()));
            }
            Event::ResponseSet {
                round: 0,
                responses,
                ..
            } => {
                let mut z = Matrix::zeros(field, d, n);
                for wv in responses {
                    if wv.value.len() != d {
                        return Err(ProtocolError::Replay("initial response of wrong length".into()));
                    }
                    let col: Vec<_> = wv.value.iter().map(|&x| field.elem(x)).collect();
                    z.set_column(wv.worker - 1, &col);
                }
                initial = Some(ResponseMatrix {
                    z,
                    query: vec![field.one(); p],
                    present: vec![true; n],
                });
                pending_query = None;
            }
            Event::ResponseSet { responses, .. } => {
                let (query, workers) = pending_query
                    .take()
                    .ok_or_else(|| ProtocolError::Replay("responses without a query".into()))?;
                let values = responses
                    .iter()
                    .map(|wv| field.elem(wv.value[0]))
                    .collect();
                queries.push_back((query, workers, values));
            }
            Event::LocalCompute { sample, value, .. } => {
                local.insert(sample - 1, value.clone());
            }
            _ => {}
        }
    }
    let initial =
        initial.ok_or_else(|| ProtocolError::Replay("no initial responses recorded".into()))?;

    let mut channel = ReplayChannel { initial, queries };
    let mut oracle = ReplayOracle {
        field,
        values: local,
    };
    let config = ProtocolConfig {
        grouping,
        ..Default::default()
    };
    let node = MainNode::new(&ctx, &a, &full, d, config);
    let mut regenerated = Transcript::default();
    regenerated.push(events[0].clone());
    let gradient = node.run(&mut channel, &mut oracle, &mut regenerated)?;
    if regenerated.events != events {
        let at = regenerated
            .events
            .iter()
            .zip(&events)
            .position(|(a, b)| a != b)
            .unwrap_or(events.len().min(regenerated.events.len()));
        return Err(ProtocolError::Replay(format!(
            "replayed transcript diverges at record {}",
            at + 1
        )));
    }
    Ok(gradient)
}
