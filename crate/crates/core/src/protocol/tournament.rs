//! The elimination match between two contradicting groups.
//!
//! Every worker of the two groups has committed to a value for the root
//! label (its initial response). At each level the main node asks for the
//! left child's sum; a worker's claim for the right child follows from its
//! own parent commitment. The match descends into a child on which the two
//! group claims differ until it reaches a single sample, computes that sample
//! locally and convicts every worker whose committed value disagrees.

use std::collections::BTreeSet;

use super::channel::{GradientOracle, Query, WorkerChannel};
use super::transcript::{one_based, residues, Direction, Event, LeafClaim, Transcript, WorkerValue};
use super::tree::MatchTree;
use super::ProtocolError;
use crate::algebra::FieldElement;
use crate::assignment::AssignmentMatrix;
use crate::coding::{DecodingMatrix, EncodingMatrix, ResponseMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchResult {
    /// 0-based contested sample.
    pub leaf: usize,
    pub claims: Vec<LeafClaim>,
    /// 0-based workers proven malicious.
    pub malicious: BTreeSet<usize>,
    pub levels: usize,
}

/// Everything a match needs to know about the current round.
pub struct MatchSetup<'a> {
    pub round: usize,
    pub assignment: &'a AssignmentMatrix,
    pub full: &'a EncodingMatrix,
    pub decoding: &'a DecodingMatrix,
    pub initial: &'a ResponseMatrix,
    /// Indices into `decoding.groups`.
    pub pair: (usize, usize),
    pub coordinate: usize,
}

fn combine(b: &[FieldElement], workers: &[usize], claims: &[FieldElement]) -> FieldElement {
    let field = claims
        .first()
        .map(FieldElement::field)
        .or_else(|| b.first().map(FieldElement::field))
        .expect("non-empty match");
    workers
        .iter()
        .zip(claims)
        .fold(field.zero(), |acc, (&j, c)| acc + b[j] * *c)
}

pub fn run_match(
    setup: &MatchSetup<'_>,
    channel: &mut dyn WorkerChannel,
    oracle: &mut dyn GradientOracle,
    transcript: &mut Transcript,
) -> Result<MatchResult, ProtocolError> {
    let (k1, k2) = setup.pair;
    let c = setup.coordinate;
    let p = setup.full.samples();
    let b1 = setup.decoding.column(k1);
    let b2 = setup.decoding.column(k2);
    let g1 = &setup.decoding.groups[k1];
    let g2 = &setup.decoding.groups[k2];
    let competing: Vec<usize> = g1
        .members()
        .iter()
        .chain(g2.members())
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    // Per-worker commitments for the current node.
    let mut committed: Vec<FieldElement> = competing
        .iter()
        .map(|&j| setup.initial.z[(c, j)])
        .collect();
    if combine(&b1, &competing, &committed) == combine(&b2, &competing, &committed) {
        return Err(ProtocolError::ProtocolInvariantViolation(
            "match started between groups that agree".into(),
        ));
    }

    let tree = MatchTree::new(p);
    let mut node = tree.root();
    let mut levels = 0;
    while let Some((left, right)) = tree.children(node) {
        levels += 1;
        let l = tree.node(left);
        let query = Query {
            round: setup.round,
            level: l.depth,
            lo: l.lo,
            hi: l.hi,
            coordinate: Some(c),
        };
        transcript.push(Event::Query {
            round: setup.round,
            level: l.depth,
            interval: [l.lo + 1, l.hi + 1],
            coordinate: Some(c),
            workers: one_based(competing.iter().copied()),
        });
        let left_claims = channel.query(&query, &competing)?;
        if left_claims.len() != competing.len() {
            return Err(ProtocolError::InvalidResponse(format!(
                "expected {} responses, got {}",
                competing.len(),
                left_claims.len()
            )));
        }
        transcript.push(Event::ResponseSet {
            round: setup.round,
            level: l.depth,
            responses: competing
                .iter()
                .zip(&left_claims)
                .map(|(&j, v)| WorkerValue {
                    worker: j + 1,
                    value: vec![v.value()],
                })
                .collect(),
        });
        transcript.totals.c_oh += competing.len();
        transcript.totals.downlink_bits += 1;

        let left1 = combine(&b1, &competing, &left_claims);
        let left2 = combine(&b2, &competing, &left_claims);
        let direction = if left1 != left2 {
            node = left;
            committed = left_claims;
            Direction::Left
        } else {
            let right_claims: Vec<FieldElement> = committed
                .iter()
                .zip(&left_claims)
                .map(|(parent, l)| *parent - *l)
                .collect();
            if combine(&b1, &competing, &right_claims) == combine(&b2, &competing, &right_claims) {
                return Err(ProtocolError::ProtocolInvariantViolation(format!(
                    "groups agree on both children of samples {}..={}",
                    tree.node(node).lo + 1,
                    tree.node(node).hi + 1
                )));
            }
            node = right;
            committed = right_claims;
            Direction::Right
        };
        transcript.push(Event::MatchLevel {
            round: setup.round,
            level: l.depth,
            interval: [l.lo + 1, l.hi + 1],
            claims: [left1.value(), left2.value()],
            direction,
            symbols: competing.len(),
        });
    }

    let leaf = tree.node(node).lo;
    let truth_vec = local_compute(oracle, leaf, setup.round, transcript)?;
    let truth = truth_vec[c];

    let mut claims = Vec::with_capacity(competing.len());
    let mut malicious = BTreeSet::new();
    for (&j, &value) in competing.iter().zip(&committed) {
        let coefficient = setup.full.coefficient(leaf, j);
        let assigned = setup.assignment.holds(j, leaf);
        let (claim, bad) = if assigned {
            let inv = coefficient.inv().map_err(|_| {
                ProtocolError::ProtocolInvariantViolation(format!(
                    "worker {} holds sample {} with a zero coefficient",
                    j + 1,
                    leaf + 1
                ))
            })?;
            let claim = value * inv;
            (claim, claim != truth)
        } else {
            (value, !value.is_zero())
        };
        if bad {
            malicious.insert(j);
        }
        claims.push(LeafClaim {
            worker: j + 1,
            assigned,
            claim: claim.value(),
            malicious: bad,
        });
    }
    if malicious.is_empty() {
        return Err(ProtocolError::ProtocolInvariantViolation(format!(
            "contested sample {} convicted nobody",
            leaf + 1
        )));
    }
    transcript.push(Event::Elimination {
        round: setup.round,
        sample: leaf + 1,
        truth: truth.value(),
        claims: claims.clone(),
        workers: one_based(malicious.iter().copied()),
    });
    Ok(MatchResult {
        leaf,
        claims,
        malicious,
        levels,
    })
}

/// One local computation at the main node; counted in `totals.c`.
pub fn local_compute(
    oracle: &mut dyn GradientOracle,
    sample: usize,
    round: usize,
    transcript: &mut Transcript,
) -> Result<Vec<FieldElement>, ProtocolError> {
    let value = oracle.partial_gradient(sample)?;
    transcript.totals.c += 1;
    transcript.push(Event::LocalCompute {
        round,
        sample: sample + 1,
        value: residues(&value),
    });
    Ok(value)
}
