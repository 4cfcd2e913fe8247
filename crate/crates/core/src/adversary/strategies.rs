use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::symmetrization::{choose_attack_set, symmetrization_attack, SymmetrizationOutcome};
use super::{Adversary, AdversaryView};
use crate::algebra::{FieldElement, Matrix, PrimeField};
use crate::coding::build_decoding_matrix;
use crate::protocol::{form_groups, Query};

fn random_nonzero_vector(field: PrimeField, len: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    loop {
        let v: Vec<_> = (0..len).map(|_| field.random(rng)).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

fn add(honest: &[FieldElement], offset: &[FieldElement]) -> Vec<FieldElement> {
    honest.iter().zip(offset).map(|(h, e)| *h + *e).collect()
}

/// The offset vector restricted to what `query` asks for.
fn restrict(offset: &[FieldElement], query: &Query) -> Vec<FieldElement> {
    match query.coordinate {
        Some(c) => vec![offset[c]],
        None => offset.to_vec(),
    }
}

#[derive(Clone, Debug, Default)]
pub struct Honest {
    none: BTreeSet<usize>,
}

impl Honest {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Adversary for Honest {
    fn name(&self) -> String {
        "honest".into()
    }

    fn controlled(&self) -> &BTreeSet<usize> {
        &self.none
    }

    fn respond(&mut self, _: usize, _: &Query, honest: &[FieldElement]) -> Vec<FieldElement> {
        honest.to_vec()
    }
}

/// When a random-corruption worker deviates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Persistence {
    /// On every query.
    #[default]
    Always,
    /// Only in the initial responses; honest during matches.
    InitialOnly,
    /// Independently with probability 1/2 per query.
    PerQueryCoin,
}

/// Adds fresh uniformly random nonzero errors.
#[derive(Clone, Debug)]
pub struct RandomCorruption {
    controlled: BTreeSet<usize>,
    persistence: Persistence,
    rng: ChaCha8Rng,
    field: Option<PrimeField>,
}

impl RandomCorruption {
    pub fn new(controlled: BTreeSet<usize>, seed: u64, persistence: Persistence) -> Self {
        Self {
            controlled,
            persistence,
            rng: ChaCha8Rng::seed_from_u64(seed),
            field: None,
        }
    }
}

impl Adversary for RandomCorruption {
    fn name(&self) -> String {
        match self.persistence {
            Persistence::Always => "random-always",
            Persistence::InitialOnly => "random-initial-only",
            Persistence::PerQueryCoin => "random-coin",
        }
        .into()
    }

    fn controlled(&self) -> &BTreeSet<usize> {
        &self.controlled
    }

    fn prepare(&mut self, view: &AdversaryView<'_>) {
        self.field = Some(view.ctx.field());
    }

    fn respond(&mut self, _: usize, query: &Query, honest: &[FieldElement]) -> Vec<FieldElement> {
        let corrupt = match self.persistence {
            Persistence::Always => true,
            Persistence::InitialOnly => query.is_initial(),
            Persistence::PerQueryCoin => self.rng.gen_bool(0.5),
        };
        if !corrupt {
            return honest.to_vec();
        }
        let field = self
            .field
            .or_else(|| honest.first().map(FieldElement::field))
            .expect("non-empty response");
        let e = random_nonzero_vector(field, honest.len(), &mut self.rng);
        add(honest, &e)
    }
}

/// How a tournament liar deviates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "levels", rename_all = "snake_case")]
pub enum LiePlan {
    /// Each controlled worker answers as if one of its samples had a
    /// different partial gradient. Its answers are mutually consistent, so a
    /// match against it runs to full depth.
    Consistent,
    /// Adds a fixed per-worker offset at the listed tree levels only
    /// (level 0 is the initial response) and answers honestly elsewhere.
    Levels(BTreeSet<usize>),
}

#[derive(Clone, Debug)]
pub struct TournamentLiar {
    controlled: BTreeSet<usize>,
    plan: LiePlan,
    seed: u64,
    fixed_offset: Option<u64>,
    /// Per worker: error vector and, for consistent lies, the fake sample
    /// and the worker's coefficient for it.
    offsets: BTreeMap<usize, Vec<FieldElement>>,
    targets: BTreeMap<usize, (usize, FieldElement)>,
}

impl TournamentLiar {
    pub fn new(controlled: BTreeSet<usize>, plan: LiePlan, seed: u64) -> Self {
        Self {
            controlled,
            plan,
            seed,
            fixed_offset: None,
            offsets: BTreeMap::new(),
            targets: BTreeMap::new(),
        }
    }

    /// Uses `offset` in every coordinate instead of a random error.
    pub fn with_offset(mut self, offset: u64) -> Self {
        self.fixed_offset = Some(offset);
        self
    }

    pub fn plan(&self) -> &LiePlan {
        &self.plan
    }
}

impl Adversary for TournamentLiar {
    fn name(&self) -> String {
        "tournament-liar".into()
    }

    fn controlled(&self) -> &BTreeSet<usize> {
        &self.controlled
    }

    fn prepare(&mut self, view: &AdversaryView<'_>) {
        let field = view.ctx.field();
        let d = view.gradients.rows();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        self.offsets.clear();
        self.targets.clear();
        for &j in &self.controlled {
            let offset = match self.fixed_offset {
                Some(x) if x % field.modulus() != 0 => vec![field.elem(x); d],
                _ => random_nonzero_vector(field, d, &mut rng),
            };
            self.offsets.insert(j, offset);
            if self.plan == LiePlan::Consistent {
                let held: Vec<usize> = (0..view.assignment.samples())
                    .filter(|&i| view.assignment.holds(j, i))
                    .collect();
                if let Some(&i) = held.choose(&mut rng) {
                    self.targets.insert(j, (i, view.encoding.coefficient(i, j)));
                }
            }
        }
    }

    fn respond(&mut self, worker: usize, query: &Query, honest: &[FieldElement]) -> Vec<FieldElement> {
        let Some(offset) = self.offsets.get(&worker) else {
            return honest.to_vec();
        };
        match &self.plan {
            LiePlan::Levels(levels) if levels.contains(&query.level) => {
                add(honest, &restrict(offset, query))
            }
            LiePlan::Levels(_) => honest.to_vec(),
            LiePlan::Consistent => match self.targets.get(&worker) {
                Some(&(i, w)) if query.contains(i) => {
                    let scaled: Vec<_> = offset.iter().map(|x| *x * w).collect();
                    add(honest, &restrict(&scaled, query))
                }
                _ => honest.to_vec(),
            },
        }
    }
}

/// The scripted adversary of the three-worker example: worker 3 adds `e`
/// to its initial response and to its first match answer, then answers
/// honestly.
pub fn worked_example(e: u64) -> TournamentLiar {
    TournamentLiar::new(
        BTreeSet::from([2]),
        LiePlan::Levels(BTreeSet::from([0, 1])),
        0,
    )
    .with_offset(e)
}

/// Makes the first `m` groups of the main node's first-round grouping decode
/// the same wrong gradient. The grouping uses `s + 1` groups, so the last
/// group still disagrees and the attack is caught; with `m = s` it is the
/// strongest error pattern the adversary has.
#[derive(Clone, Debug)]
pub struct Symmetrizing {
    budget_groups: Option<usize>,
    lambda: u64,
    controlled: BTreeSet<usize>,
    errors: Option<Matrix>,
    full_grouping: Option<SymmetrizationOutcome>,
}

impl Symmetrizing {
    /// `groups`: how many groups to fool; defaults to `s`.
    pub fn new(groups: Option<usize>, lambda: u64) -> Self {
        Self {
            budget_groups: groups,
            lambda,
            controlled: BTreeSet::new(),
            errors: None,
            full_grouping: None,
        }
    }

    /// Outcome of the attack against all `s + 1` first-round groups.
    pub fn full_grouping_outcome(&self) -> Option<&SymmetrizationOutcome> {
        self.full_grouping.as_ref()
    }

    pub fn errors(&self) -> Option<&Matrix> {
        self.errors.as_ref()
    }
}

impl Adversary for Symmetrizing {
    fn name(&self) -> String {
        "symmetrization".into()
    }

    fn controlled(&self) -> &BTreeSet<usize> {
        &self.controlled
    }

    fn prepare(&mut self, view: &AdversaryView<'_>) {
        let ctx = view.ctx;
        let s = ctx.byzantine_budget();
        let d = view.gradients.rows();
        let lambda = ctx.field().elem(self.lambda);
        self.controlled.clear();
        self.errors = None;
        let active = (0..ctx.workers()).collect();
        let Ok(plan) = form_groups(&active, ctx.r(), s, view.grouping, 1) else {
            return;
        };
        let full = build_decoding_matrix(ctx, &plan.groups());
        let set = choose_attack_set(&full, s);
        self.full_grouping = Some(symmetrization_attack(ctx, &full, &set, lambda, d));

        let m = self.budget_groups.unwrap_or(s).min(s);
        if m == 0 {
            return;
        }
        let partial = build_decoding_matrix(ctx, &plan.truncated(m).groups());
        let set = choose_attack_set(&partial, s);
        if let SymmetrizationOutcome::Attack(e) = symmetrization_attack(ctx, &partial, &set, lambda, d)
        {
            self.controlled = set.into_iter().collect();
            self.errors = Some(e);
        }
    }

    fn respond(&mut self, worker: usize, query: &Query, honest: &[FieldElement]) -> Vec<FieldElement> {
        match &self.errors {
            Some(e) if query.is_initial() => add(honest, &e.column(worker)),
            _ => honest.to_vec(),
        }
    }
}
