//! Exhaustive and randomized checks of the scheme's algebraic claims.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{AdversarySpec, SimulationConfig, StrategyName};
use super::run::{random_gradients, simulate_with};
use super::HarnessError;
use crate::adversary::{choose_attack_set, symmetrization_attack, SymmetrizationOutcome};
use crate::algebra::{
    cauchy_like_det, solve_linear, vandermonde, vandermonde_last_column_of_inverse, FieldElement,
    Matrix, PrimeField, DEFAULT_MODULUS,
};
use crate::assignment::{AssignmentKind, AssignmentMatrix};
use crate::coding::{
    build_decoding_matrix, build_encoding_matrix, build_full_encoding, combining_vector,
    ecc_decode, group_response, restrict_encoding, CodeContext, ResponseMatrix,
};
use crate::par::{self, Execution};
use crate::protocol::{form_groups, Group, GroupingOrder, GroupingPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyTarget {
    Lemma2,
    Lemma3,
    TheoremOptimality,
    Vandermonde,
    Cauchy,
    Ecc,
    Remark1,
    ShuffledGrouping,
}

impl VerifyTarget {
    pub const ALL: [VerifyTarget; 8] = [
        VerifyTarget::Lemma2,
        VerifyTarget::Lemma3,
        VerifyTarget::TheoremOptimality,
        VerifyTarget::Vandermonde,
        VerifyTarget::Cauchy,
        VerifyTarget::Ecc,
        VerifyTarget::Remark1,
        VerifyTarget::ShuffledGrouping,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VerifyTarget::Lemma2 => "lemma2",
            VerifyTarget::Lemma3 => "lemma3",
            VerifyTarget::TheoremOptimality => "theorem-optimality",
            VerifyTarget::Vandermonde => "vandermonde",
            VerifyTarget::Cauchy => "cauchy",
            VerifyTarget::Ecc => "ecc",
            VerifyTarget::Remark1 => "remark1",
            VerifyTarget::ShuffledGrouping => "shuffled-grouping",
        }
    }
}

impl fmt::Display for VerifyTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VerifyTarget {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                HarnessError::Config(format!(
                    "unknown check `{s}`; expected one of {}",
                    Self::ALL.map(VerifyTarget::as_str).join(", ")
                ))
            })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub target: String,
    pub checks: usize,
    /// Serialized failing instances; empty on success.
    pub counterexamples: Vec<String>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    fn new(target: VerifyTarget) -> Self {
        Self {
            target: target.to_string(),
            ..Self::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && self.checks > 0
    }

    fn absorb(&mut self, part: Part) {
        self.checks += part.checks;
        self.counterexamples.extend(part.counterexamples);
    }
}

/// Partial results from one parallel work item.
#[derive(Default)]
struct Part {
    checks: usize,
    counterexamples: Vec<String>,
}

impl Part {
    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.counterexamples.push(describe());
        }
    }
}

pub fn verify(target: VerifyTarget, execution: Execution) -> VerifyReport {
    match target {
        VerifyTarget::Lemma2 => verify_lemma2(execution),
        VerifyTarget::Lemma3 => verify_lemma3(&LEMMA3_INSTANCES, execution),
        VerifyTarget::TheoremOptimality => verify_optimality(&LEMMA3_INSTANCES, execution),
        VerifyTarget::Vandermonde => verify_vandermonde(200, &[101, DEFAULT_MODULUS], execution),
        VerifyTarget::Cauchy => verify_cauchy(1000, execution),
        VerifyTarget::Ecc => verify_ecc(execution),
        VerifyTarget::Remark1 => verify_remark1(500, execution),
        VerifyTarget::ShuffledGrouping => {
            verify_shuffled_grouping(&LEMMA3_INSTANCES, 500, execution)
        }
    }
}

/// `(n, s, u)` instances for the grouping checks.
pub const LEMMA3_INSTANCES: [(usize, usize, usize); 2] = [(5, 2, 1), (6, 2, 2)];

fn field(q: u64) -> PrimeField {
    PrimeField::new(q).expect("built-in moduli are prime")
}

/// Every grouping of the protocol's shape: any `r`-worker root, any set of
/// `m` satellites among the other workers.
fn all_groupings(n: usize, r: usize, m: usize) -> Vec<GroupingPlan> {
    let mut plans = Vec::new();
    for root in (0..n).combinations(r) {
        let rest: Vec<usize> = (0..n).filter(|j| !root.contains(j)).collect();
        for satellites in rest.into_iter().combinations(m) {
            plans.push(GroupingPlan {
                root: root.clone(),
                satellites,
            });
        }
    }
    plans
}

fn random_instance(rng: &mut ChaCha8Rng, q: u64) -> (CodeContext, AssignmentMatrix) {
    loop {
        let n = rng.gen_range(3..=7);
        let s = rng.gen_range(1..n - 1);
        let u = rng.gen_range(1..=(s + 1).min(n - s));
        let p = rng.gen_range(n..=12);
        let kind = [AssignmentKind::Cyclic, AssignmentKind::Random][rng.gen_range(0..2)];
        if let Ok(a) = kind.generate(n, p, s + u, rng.gen()) {
            let ctx = CodeContext::new(n, s, u, q).expect("valid parameters");
            return (ctx, a);
        }
    }
}

/// Zero pattern and span: `W` vanishes off the assignment and every
/// `(r+1)`-subset of workers recovers `a` with its combining vector.
fn verify_lemma2(execution: Execution) -> VerifyReport {
    let mut report = VerifyReport::new(VerifyTarget::Lemma2);
    let seeds: Vec<u64> = (0..60).collect();
    for part in par::map(execution, &seeds, |&seed| {
        let mut part = Part::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = if seed % 2 == 0 { 101 } else { DEFAULT_MODULUS };
        let (ctx, a) = random_instance(&mut rng, q);
        let f = ctx.field();
        let query: Vec<FieldElement> = (0..a.samples()).map(|_| f.random(&mut rng)).collect();
        let w = build_encoding_matrix(&ctx, &a, &query).expect("regular assignment");
        for (i, j) in (0..a.samples()).cartesian_product(0..ctx.workers()) {
            if !a.holds(j, i) {
                part.check(w.coefficient(i, j).is_zero(), || {
                    format!("seed {seed}: W[{}][{}] nonzero off the assignment", i + 1, j + 1)
                });
            }
        }
        for members in (0..ctx.workers()).combinations(ctx.r() + 1) {
            let group = Group::new(members);
            let b = combining_vector(&ctx, &group);
            let got = w.w.mul_vec(&b).expect("dimensions");
            part.check(got == query, || {
                format!("seed {seed}: group {:?} does not recover a", group.display_members())
            });
        }
        part
    }) {
        report.absorb(part);
    }
    report
}

/// With `s_t + 1` groups, no `s_t` workers can make all groups shift by the
/// same nonzero amount: `B_{S,.}^T x = 1` is inconsistent for every `S`.
pub fn verify_lemma3(instances: &[(usize, usize, usize)], execution: Execution) -> VerifyReport {
    let mut report = VerifyReport::new(VerifyTarget::Lemma3);
    for &(n, s, u) in instances {
        let ctx = CodeContext::new(n, s, u, DEFAULT_MODULUS).expect("valid instance");
        let f = ctx.field();
        for s_t in u..=s {
            let plans = all_groupings(n, ctx.r(), s_t + 1);
            for part in par::map(execution, &plans, |plan| {
                let mut part = Part::default();
                let dec = build_decoding_matrix(&ctx, &plan.groups());
                let ones = Matrix::from_fn(f, dec.b.cols(), 1, |_, _| f.one());
                for set in (0..n).combinations(s_t) {
                    let system = dec.b.select_rows(&set).transpose();
                    let out = solve_linear(&system, &ones).expect("dimensions");
                    part.check(out.pivot_in_augmented_last_column, || {
                        format!(
                            "n={n} s={s} u={u} s_t={s_t} root={:?} satellites={:?} S={:?} is consistent",
                            plan.root.iter().map(|j| j + 1).collect_vec(),
                            plan.satellites.iter().map(|j| j + 1).collect_vec(),
                            set.iter().map(|j| j + 1).collect_vec()
                        )
                    });
                }
                part
            }) {
                report.absorb(part);
            }
        }
        report
            .notes
            .push(format!("n={n} s={s} u={u}: every root, satellite set and malicious set"));
    }
    report
}

/// With only `s_t` groups the symmetrization attack succeeds: recomputing
/// every group response gives one common, wrong value.
pub fn verify_optimality(instances: &[(usize, usize, usize)], execution: Execution) -> VerifyReport {
    let mut report = VerifyReport::new(VerifyTarget::TheoremOptimality);
    for &(n, s, u) in instances {
        let ctx = CodeContext::new(n, s, u, DEFAULT_MODULUS).expect("valid instance");
        let f = ctx.field();
        let a = AssignmentKind::Cyclic
            .generate(n, n, s + u, 0)
            .expect("n = p cyclic layout is regular");
        let full = build_full_encoding(&ctx, &a).expect("regular assignment");
        for s_t in u..=s {
            let plans = all_groupings(n, ctx.r(), s_t);
            for part in par::map(execution, &plans, |plan| {
                let mut part = Part::default();
                let dec = build_decoding_matrix(&ctx, &plan.groups());
                let set = choose_attack_set(&dec, s_t);
                let d = 2;
                let g = random_gradients(f, d, n, plan.satellites.iter().sum::<usize>() as u64);
                let truth: Vec<FieldElement> = (0..d)
                    .map(|c| g.row(c).iter().fold(f.zero(), |acc, x| acc + *x))
                    .collect();
                let describe = || {
                    format!(
                        "n={n} s={s} u={u} m={s_t} root={:?} satellites={:?}",
                        plan.root.iter().map(|j| j + 1).collect_vec(),
                        plan.satellites.iter().map(|j| j + 1).collect_vec()
                    )
                };
                match symmetrization_attack(&ctx, &dec, &set, f.one(), d) {
                    SymmetrizationOutcome::Infeasible => part.check(false, describe),
                    SymmetrizationOutcome::Attack(e) => {
                        let support: BTreeSet<usize> =
                            (0..n).filter(|&j| !e.column(j).iter().all(|x| x.is_zero())).collect();
                        let z = ResponseMatrix::honest(&g, &full).with_errors(&e);
                        let values: Vec<Vec<FieldElement>> = (0..dec.b.cols())
                            .map(|k| group_response(&z, &dec.column(k)))
                            .collect();
                        let identical = values.iter().all_equal();
                        let wrong = values[0] != truth;
                        part.check(
                            identical && wrong && support.len() <= s_t,
                            describe,
                        );
                    }
                }
                part
            }) {
                report.absorb(part);
            }
        }
        report
            .notes
            .push(format!("n={n} s={s} u={u}: every grouping with s_t groups"));
    }
    report
}

/// How often an attack built against the lowest-index grouping of `s_t`
/// groups still fools a main node that shuffles its grouping instead.
///
/// No guarantee is claimed here, so the rates go into the notes. The one
/// hard check is that a shuffle reproducing the targeted grouping is fooled.
pub fn verify_shuffled_grouping(
    instances: &[(usize, usize, usize)],
    trials: u64,
    execution: Execution,
) -> VerifyReport {
    let mut report = VerifyReport::new(VerifyTarget::ShuffledGrouping);
    for &(n, s, u) in instances {
        let ctx = CodeContext::new(n, s, u, DEFAULT_MODULUS).expect("valid instance");
        let f = ctx.field();
        let a = AssignmentKind::Cyclic
            .generate(n, n, s + u, 0)
            .expect("n = p cyclic layout is regular");
        let full = build_full_encoding(&ctx, &a).expect("regular assignment");
        let everyone: BTreeSet<usize> = (0..n).collect();
        let d = 2;
        let g = random_gradients(f, d, n, 17);
        let truth: Vec<FieldElement> = (0..d)
            .map(|c| g.row(c).iter().fold(f.zero(), |acc, x| acc + *x))
            .collect();
        for s_t in u..=s {
            let target = form_groups(&everyone, ctx.r(), s_t - 1, GroupingOrder::Lowest, 1)
                .expect("enough workers");
            let dec = build_decoding_matrix(&ctx, &target.groups());
            let set = choose_attack_set(&dec, s_t);
            let SymmetrizationOutcome::Attack(e) =
                symmetrization_attack(&ctx, &dec, &set, f.one(), d)
            else {
                report.counterexamples.push(format!(
                    "n={n} s={s} u={u} m={s_t}: no attack against the lowest grouping"
                ));
                continue;
            };
            let z = ResponseMatrix::honest(&g, &full).with_errors(&e);
            let key = |plan: &GroupingPlan| -> BTreeSet<BTreeSet<usize>> {
                plan.groups()
                    .iter()
                    .map(|grp| grp.members().iter().copied().collect())
                    .collect()
            };
            let targeted = key(&target);
            let seeds: Vec<u64> = (0..trials).collect();
            let outcomes = par::map(execution, &seeds, |&seed| {
                let plan = form_groups(
                    &everyone,
                    ctx.r(),
                    s_t - 1,
                    GroupingOrder::Shuffled { seed },
                    1,
                )
                .expect("enough workers");
                let dec = build_decoding_matrix(&ctx, &plan.groups());
                let values: Vec<Vec<FieldElement>> = (0..dec.b.cols())
                    .map(|k| group_response(&z, &dec.column(k)))
                    .collect();
                let fooled = values.iter().all_equal() && values[0] != truth;
                (key(&plan) == targeted, fooled)
            });
            let mut part = Part::default();
            for (seed, &(same, fooled)) in outcomes.iter().enumerate() {
                if same {
                    part.check(fooled, || {
                        format!("n={n} s={s} u={u} m={s_t} seed={seed}: targeted grouping not fooled")
                    });
                }
            }
            let fooled = outcomes.iter().filter(|o| o.1).count();
            let same = outcomes.iter().filter(|o| o.0).count();
            report.notes.push(format!(
                "n={n} s={s} u={u} m={s_t}: attack fooled {fooled}/{trials} shuffled groupings ({same} reproduced the targeted one)"
            ));
            report.checks += trials as usize - part.checks;
            report.absorb(part);
        }
    }
    report
}

fn distinct_points(rng: &mut ChaCha8Rng, f: PrimeField, k: usize) -> Vec<FieldElement> {
    let q = f.modulus();
    if q <= u32::MAX as u64 {
        sample(rng, q as usize, k)
            .into_iter()
            .map(|x| f.elem(x as u64))
            .collect()
    } else {
        let mut seen = BTreeSet::new();
        while seen.len() < k {
            seen.insert(rng.gen_range(0..q));
        }
        let mut v: Vec<u64> = seen.into_iter().collect();
        use rand::seq::SliceRandom;
        v.shuffle(rng);
        v.into_iter().map(|x| f.elem(x)).collect()
    }
}

/// Closed-form inverse coefficients against Gaussian elimination.
pub fn verify_vandermonde(trials: usize, moduli: &[u64], execution: Execution) -> VerifyReport {
    let mut report = VerifyReport::new(VerifyTarget::Vandermonde);
    let jobs: Vec<(u64, usize)> = moduli
        .iter()
        .flat_map(|&q| (1..=8).map(move |k| (q, k)))
        .collect();
    for part in par::map(execution, &jobs, |&(q, k)| {
        let mut part = Part::default();
        let f = field(q);
        let mut rng = ChaCha8Rng::seed_from_u64(q ^ k as u64);
        for t in 0..trials {
            let points = distinct_points(&mut rng, f, k);
            let closed = vandermonde_last_column_of_inverse(&points).expect("distinct points");
            let inv = vandermonde(f, &points).inverse().expect("distinct points");
            let last_row = inv.row(k - 1).to_vec();
            part.check(closed == last_row, || {
                format!(
                    "q={q} k={k} trial {t}: points {:?}",
                    points.iter().map(FieldElement::value).collect_vec()
                )
            });
        }
        part
    }) {
        report.absorb(part);
    }
    report
}

/// Nonzero Cauchy-like determinants: random tuples and every tuple over a small field.
pub fn verify_cauchy(trials: usize, execution: Execution) -> VerifyReport {
    let mut report = VerifyReport::new(VerifyTarget::Cauchy);
    let ks: Vec<usize> = (1..=5).collect();
    for part in par::map(execution, &ks, |&k| {
        let mut part = Part::default();
        let f = field(DEFAULT_MODULUS);
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        for t in 0..trials.div_ceil(5) {
            let all = distinct_points(&mut rng, f, 2 * k + 1);
            let det = cauchy_like_det(f, &all[..k], &all[k..]).expect("distinct inputs");
            part.check(!det.is_zero(), || {
                format!(
                    "q={} k={k} trial {t}: {:?}",
                    f.modulus(),
                    all.iter().map(FieldElement::value).collect_vec()
                )
            });
        }
        part
    }) {
        report.absorb(part);
    }

    let f = field(11);
    for k in 0..=2 {
        let mut part = Part::default();
        for all in f.elements().collect_vec().into_iter().permutations(2 * k + 1) {
            let det = cauchy_like_det(f, &all[..k], &all[k..]).expect("distinct inputs");
            part.check(!det.is_zero(), || {
                format!("q=11 k={k}: {:?}", all.iter().map(FieldElement::value).collect_vec())
            });
        }
        report.absorb(part);
    }
    report.notes.push(format!(
        "{trials} random tuples over q={DEFAULT_MODULUS}, all tuples over q=11 with k <= 2"
    ));
    report
}

/// Errors-and-erasures decoding, exhaustively over one small instance, and
/// the interaction-free path of the full protocol when `u = s + 1`.
pub fn verify_ecc(execution: Execution) -> VerifyReport {
    let mut report = VerifyReport::new(VerifyTarget::Ecc);
    let (n, s, u) = (7, 2, 2);
    let ctx = CodeContext::new(n, s, u, 11).expect("valid instance");
    let f = ctx.field();
    let a = AssignmentKind::Cyclic
        .generate(n, n, s + u, 0)
        .expect("regular");
    let full = build_full_encoding(&ctx, &a).expect("regular");
    let pairs: Vec<(usize, usize)> = (0..n)
        .cartesian_product(0..n)
        .filter(|(x, y)| x != y)
        .collect();
    for part in par::map(execution, &pairs, |&(identified, corrupt)| {
        let mut part = Part::default();
        let g = random_gradients(f, 1, n, (identified * n + corrupt) as u64);
        let truth = vec![g.row(0).iter().fold(f.zero(), |acc, x| acc + *x)];
        for e in 1..11 {
            let mut errors = Matrix::zeros(f, 1, n);
            errors[(0, corrupt)] = f.elem(e);
            // The identified worker's answer is arbitrary garbage.
            errors[(0, identified)] = f.elem(e * 3 + 1);
            let z = ResponseMatrix::honest(&g, &full).with_errors(&errors);
            let got = ecc_decode(&ctx, &z, &BTreeSet::from([identified]));
            part.check(got.as_ref() == Ok(&truth), || {
                format!(
                    "n={n} s={s} u={u} q=11 identified={} corrupt={} e={e}: {got:?}",
                    identified + 1,
                    corrupt + 1
                )
            });
        }
        part
    }) {
        report.absorb(part);
    }
    report
        .notes
        .push("n=7 s=2 u=2 q=11: every identified worker, corrupt worker and error value".into());

    let mut part = Part::default();
    for (n, s) in [(3, 1), (5, 2), (7, 2), (7, 3), (8, 3)] {
        for seed in 0..10 {
            let cfg = SimulationConfig {
                n,
                s,
                u: s + 1,
                p: 9,
                d: 2,
                seed,
                assignment: crate::harness::AssignmentSource::Generated(AssignmentKind::Random),
                adversary: AdversarySpec::named(StrategyName::RandomAlways),
                ..SimulationConfig::default()
            };
            let m = simulate_with(&cfg, None, Execution::Sequential).map(|o| o.metrics);
            part.check(
                matches!(&m, Ok(m) if m.correct && m.rounds == 0 && m.c == 0 && m.c_oh == 0),
                || format!("u=s+1 run n={n} s={s} seed={seed}: {m:?}"),
            );
        }
    }
    report.absorb(part);
    report
}

/// Zeroing rows of the all-one encoding equals solving for the 0/1 query.
pub fn verify_remark1(trials: usize, execution: Execution) -> VerifyReport {
    let mut report = VerifyReport::new(VerifyTarget::Remark1);
    let seeds: Vec<u64> = (0..trials as u64).collect();
    for part in par::map(execution, &seeds, |&seed| {
        let mut part = Part::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = if seed % 2 == 0 { 101 } else { DEFAULT_MODULUS };
        let (ctx, a) = random_instance(&mut rng, q);
        let f = ctx.field();
        let mask: Vec<bool> = (0..a.samples()).map(|_| rng.gen_bool(0.5)).collect();
        let indicator: Vec<FieldElement> = mask
            .iter()
            .map(|&b| if b { f.one() } else { f.zero() })
            .collect();
        let full = build_full_encoding(&ctx, &a).expect("regular");
        let restricted = restrict_encoding(&full, &mask);
        let solved = build_encoding_matrix(&ctx, &a, &indicator).expect("regular");
        part.check(restricted == solved, || {
            format!("seed {seed}: mask {mask:?} on rows {:?}", a.row_strings())
        });
        part
    }) {
        report.absorb(part);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_names_round_trip() {
        for t in VerifyTarget::ALL {
            assert_eq!(t.as_str().parse::<VerifyTarget>().unwrap(), t);
        }
    }

    #[test]
    fn lemma3_smallest_instance() {
        let r = verify_lemma3(&[(3, 1, 1)], Execution::Sequential);
        assert!(r.passed(), "{r:?}");
        // one root, two satellites, three single-worker sets.
        assert_eq!(r.checks, 3 * 3);
    }

    #[test]
    fn shuffled_grouping_reports_rates() {
        let r = verify_shuffled_grouping(&[(5, 2, 1)], 50, Execution::Sequential);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checks, 100);
        assert_eq!(r.notes.len(), 2);
    }

    #[test]
    fn optimality_smallest_instance() {
        let r = verify_optimality(&[(3, 1, 1)], Execution::Sequential);
        assert!(r.passed(), "{r:?}");
    }
}
