use std::collections::BTreeSet;

use bgc_core::adversary::{
    worked_example, Adversary, Honest, LiePlan, Persistence, RandomCorruption, Symmetrizing,
    SymmetrizationOutcome, TournamentLiar,
};
use bgc_core::algebra::{Matrix, PrimeField};
use bgc_core::assignment::{make_cyclic, make_random_regular};
use bgc_core::coding::CodeContext;
use bgc_core::protocol::{
    ceil_log2, replay, true_gradient, Bounds, Event, GroupingOrder, ProtocolConfig,
};
use bgc_core::run_protocol;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_gradients(f: PrimeField, d: usize, p: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(f, d, p, |_, _| f.random(&mut rng))
}

#[test]
fn three_worker_example_convicts_worker_three() {
    let ctx = CodeContext::new(3, 1, 1, 7).unwrap();
    let a = make_cyclic(3, 3, 2).unwrap();
    let g = Matrix::from_u64_rows(ctx.field(), &[vec![1, 2, 3]]).unwrap();
    let mut adv = worked_example(1);
    let out = run_protocol(&ctx, &a, &g, &mut adv, ProtocolConfig::default()).unwrap();
    assert_eq!(out.gradient, true_gradient(&g));
    let t = &out.transcript.totals;
    assert_eq!(t.eliminated, BTreeSet::from([2]));
    assert_eq!((t.c, t.rounds), (1, 1));
    assert!(t.c_oh <= 6);
    assert_eq!(t.downlink_bits, 2);
}

#[test]
fn honest_run_costs_nothing() {
    let ctx = CodeContext::new(6, 2, 1, 101).unwrap();
    let a = make_cyclic(6, 9, 3).unwrap();
    let g = random_gradients(ctx.field(), 3, 9, 4);
    let out = run_protocol(&ctx, &a, &g, &mut Honest::new(), ProtocolConfig::default()).unwrap();
    assert_eq!(out.gradient, true_gradient(&g));
    let t = &out.transcript.totals;
    assert_eq!((t.c, t.c_oh, t.rounds, t.downlink_bits), (0, 0, 0, 0));
    assert!(t.eliminated.is_empty());
}

#[test]
fn full_redundancy_decodes_without_interaction() {
    let ctx = CodeContext::new(7, 2, 3, 101).unwrap();
    let a = make_cyclic(7, 7, 5).unwrap();
    let g = random_gradients(ctx.field(), 2, 7, 9);
    let mut adv = RandomCorruption::new(BTreeSet::from([1, 5]), 3, Persistence::Always);
    let out = run_protocol(&ctx, &a, &g, &mut adv, ProtocolConfig::default()).unwrap();
    assert_eq!(out.gradient, true_gradient(&g));
    let t = &out.transcript.totals;
    assert_eq!((t.c, t.c_oh, t.rounds), (0, 0, 0));
}

#[test]
fn consistent_liar_forces_full_depth() {
    let ctx = CodeContext::new(5, 1, 1, 101).unwrap();
    let p = 8;
    let a = make_cyclic(5, p, 2).unwrap();
    let g = random_gradients(ctx.field(), 1, p, 2);
    let mut adv = TournamentLiar::new(BTreeSet::from([0]), LiePlan::Consistent, 11);
    let out = run_protocol(&ctx, &a, &g, &mut adv, ProtocolConfig::default()).unwrap();
    assert_eq!(out.gradient, true_gradient(&g));
    let levels = out
        .transcript
        .events
        .iter()
        .filter(|e| matches!(e, Event::MatchLevel { .. }))
        .count();
    assert_eq!(levels, ceil_log2(p));
    assert_eq!(out.transcript.totals.c_oh, (ctx.r() + 2) * ceil_log2(p));
    assert_eq!(out.transcript.totals.eliminated, BTreeSet::from([0]));
}

#[test]
fn symmetrization_is_caught_by_the_extra_group() {
    let ctx = CodeContext::new(6, 2, 1, 101).unwrap();
    let a = make_cyclic(6, 4, 3).unwrap();
    let g = random_gradients(ctx.field(), 2, 4, 1);
    let mut adv = Symmetrizing::new(None, 1);
    let out = run_protocol(&ctx, &a, &g, &mut adv, ProtocolConfig::default()).unwrap();
    assert_eq!(out.gradient, true_gradient(&g));
    assert_eq!(
        adv.full_grouping_outcome(),
        Some(&SymmetrizationOutcome::Infeasible)
    );
    assert!(!adv.controlled().is_empty());
    assert!(out.transcript.totals.c >= 1);
}

#[test]
fn transcripts_replay_and_are_deterministic() {
    let ctx = CodeContext::new(7, 3, 1, 2_147_483_647).unwrap();
    let a = make_random_regular(7, 9, 4, 5).unwrap();
    let g = random_gradients(ctx.field(), 3, 9, 8);
    let run = || {
        let mut adv = RandomCorruption::new(BTreeSet::from([0, 3, 6]), 21, Persistence::PerQueryCoin);
        let config = ProtocolConfig {
            grouping: GroupingOrder::Shuffled { seed: 5 },
            ..Default::default()
        };
        run_protocol(&ctx, &a, &g, &mut adv, config).unwrap()
    };
    let first = run();
    let text = first.transcript.to_jsonl();
    assert_eq!(text, run().transcript.to_jsonl());
    assert_eq!(replay(&text).unwrap(), first.gradient);

    // Tampering with a recorded response breaks the replay.
    let tampered = text.replacen("\"worker\":1,\"value\":[", "\"worker\":1,\"value\":[1", 1);
    if tampered != text {
        assert!(replay(&tampered).is_err());
    }
}

#[test]
fn over_budget_adversary_is_rejected() {
    let ctx = CodeContext::new(5, 1, 1, 101).unwrap();
    let a = make_cyclic(5, 5, 2).unwrap();
    let g = random_gradients(ctx.field(), 1, 5, 0);
    let mut adv = RandomCorruption::new(BTreeSet::from([0, 1]), 0, Persistence::Always);
    assert!(run_protocol(&ctx, &a, &g, &mut adv, ProtocolConfig::default()).is_err());
}

fn adversary(kind: u8, controlled: BTreeSet<usize>, seed: u64) -> Box<dyn Adversary> {
    match kind {
        0 => Box::new(RandomCorruption::new(controlled, seed, Persistence::Always)),
        1 => Box::new(RandomCorruption::new(controlled, seed, Persistence::InitialOnly)),
        2 => Box::new(RandomCorruption::new(controlled, seed, Persistence::PerQueryCoin)),
        3 => Box::new(TournamentLiar::new(controlled, LiePlan::Consistent, seed)),
        _ => Box::new(TournamentLiar::new(
            controlled,
            LiePlan::Levels(BTreeSet::from([0, 2])),
            seed,
        )),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn output_is_exact_and_within_bounds(
        n in 4usize..9,
        s_raw in 1usize..4,
        u_raw in 1usize..5,
        p in 1usize..17,
        d in 1usize..4,
        kind in 0u8..5,
        seed in any::<u64>(),
        shuffled in any::<bool>(),
    ) {
        let s = s_raw.min(n - 2);
        let u = u_raw.min(s + 1).min(n - s);
        let ctx = CodeContext::new(n, s, u, 101).unwrap();
        let rho = s + u;
        let a = make_random_regular(n, p.max(n), rho, seed).unwrap();
        let p = a.samples();
        let g = random_gradients(ctx.field(), d, p, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let controlled: BTreeSet<usize> =
            rand::seq::index::sample(&mut rng, n, s).into_iter().collect();
        let mut adv = adversary(kind, controlled.clone(), seed);
        let config = ProtocolConfig {
            grouping: if shuffled { GroupingOrder::Shuffled { seed } } else { GroupingOrder::Lowest },
            ..Default::default()
        };
        let out = run_protocol(&ctx, &a, &g, adv.as_mut(), config).unwrap();
        prop_assert_eq!(&out.gradient, &true_gradient(&g));
        let t = &out.transcript.totals;
        prop_assert!(Bounds::for_params(s, u, ctx.r(), p).holds(t), "{:?}", t);
        prop_assert!(t.eliminated.is_subset(&controlled));
        prop_assert_eq!(t.downlink_bits * (ctx.r() + 2), t.c_oh);
    }
}
