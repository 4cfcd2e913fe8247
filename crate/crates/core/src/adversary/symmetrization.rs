//! Error patterns that make several groups decode the same wrong value.
//!
//! With combining vectors `B` (`n x m`) and errors `E` supported on `S`, the
//! groups decode `G 1 + E B`. All of them agree on `G 1 + lambda 1` exactly
//! when `B_{S,.}^T x = lambda 1` has a solution `x`; the attack writes `x`
//! into every coordinate.

use std::collections::BTreeSet;

use crate::algebra::{solve_linear, FieldElement, Matrix};
use crate::coding::{CodeContext, DecodingMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymmetrizationOutcome {
    /// `d x n` error matrix, zero outside the attack set.
    Attack(Matrix),
    Infeasible,
}

impl SymmetrizationOutcome {
    pub fn is_attack(&self) -> bool {
        matches!(self, SymmetrizationOutcome::Attack(_))
    }
}

/// Solves for errors on `attack_set` shifting every group response by `lambda`.
pub fn symmetrization_attack(
    ctx: &CodeContext,
    decoding: &DecodingMatrix,
    attack_set: &[usize],
    lambda: FieldElement,
    d: usize,
) -> SymmetrizationOutcome {
    let field = ctx.field();
    let m = decoding.b.cols();
    if attack_set.is_empty() || m == 0 || lambda.is_zero() {
        return SymmetrizationOutcome::Infeasible;
    }
    let system = decoding.b.select_rows(attack_set).transpose();
    let rhs = Matrix::from_fn(field, m, 1, |_, _| lambda);
    let out = solve_linear(&system, &rhs).expect("dimensions agree");
    let Some(x) = out.solution else {
        return SymmetrizationOutcome::Infeasible;
    };
    let mut e = Matrix::zeros(field, d, ctx.workers());
    for (k, &j) in attack_set.iter().enumerate() {
        for c in 0..d {
            e[(c, j)] = x[(k, 0)];
        }
    }
    SymmetrizationOutcome::Attack(e)
}

/// One worker per group, preferring workers that appear in few groups
/// (satellites before root members), lowest index first. If the groups
/// share too many members for that, tops up with workers that extend the
/// row rank of `B`. Never returns more than `budget` workers.
pub fn choose_attack_set(decoding: &DecodingMatrix, budget: usize) -> Vec<usize> {
    let groups = &decoding.groups;
    let usage = |j: usize| groups.iter().filter(|g| g.contains(j)).count();
    let mut chosen = BTreeSet::new();
    for g in groups {
        if chosen.len() >= budget {
            break;
        }
        if g.members().iter().any(|j| chosen.contains(j)) {
            continue;
        }
        let pick = g
            .members()
            .iter()
            .copied()
            .min_by_key(|&j| (usage(j), j))
            .expect("non-empty group");
        chosen.insert(pick);
    }

    let candidates: Vec<usize> = (0..decoding.b.rows())
        .filter(|&j| usage(j) > 0 && !chosen.contains(&j))
        .collect();
    for j in candidates {
        if chosen.len() >= budget {
            break;
        }
        let current: Vec<usize> = chosen.iter().copied().collect();
        let before = decoding.b.select_rows(&current).rank();
        let mut extended = current.clone();
        extended.push(j);
        if decoding.b.select_rows(&extended).rank() > before {
            chosen.insert(j);
        }
    }
    chosen.into_iter().collect()
}
