//! Distributional and structural properties of lazy sampling and the game.

use std::collections::BTreeSet;

use cascade_lab::equivalence::{lazy_eager_equivalence_check, SIGNIFICANCE};
use cascade_lab::game::{build_world_for_trial, Operator, OracleBudget, Oracles, World};
use cascade_lab::stats::chi_square_uniform;
use cascade_lab::transcript::{bad_trace, Entry};
use cascade_lab::{eager_sample, new_ideal_cipher, CipherParams};
use proptest::prelude::*;

fn params(kappa: u32, n: u32) -> CipherParams {
    CipherParams::new(kappa, n).unwrap()
}

/// Lexicographic rank of a permutation of `0..len`, computed by counting
/// smaller unused values at each position.
fn perm_rank(p: &[u64]) -> usize {
    let len = p.len();
    let mut rank = 0;
    for i in 0..len {
        let smaller = p[i + 1..].iter().filter(|&&v| v < p[i]).count();
        rank = rank * (len - i) + smaller;
    }
    rank
}

#[test]
fn perm_rank_is_a_bijection_on_s4() {
    let mut ranks = BTreeSet::new();
    for a in 0..4u64 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if p.iter().collect::<BTreeSet<_>>().len() == 4 {
                        ranks.insert(perm_rank(&p));
                    }
                }
            }
        }
    }
    assert_eq!(ranks, (0..24).collect());
    assert_eq!(perm_rank(&[0, 1, 2, 3]), 0);
    assert_eq!(perm_rank(&[3, 2, 1, 0]), 23);
}

#[test]
fn fresh_forward_and_inverse_answers_are_uniform() {
    let p = params(2, 2);
    let mut fwd = [0u64; 4];
    let mut inv = [0u64; 4];
    for seed in 0..100_000u64 {
        let mut c = new_ideal_cipher(p, seed);
        fwd[c.f_forward(1, 2).unwrap() as usize] += 1;
        let mut c = new_ideal_cipher(p, seed ^ (1 << 40));
        inv[c.f_inverse(3, 0).unwrap() as usize] += 1;
    }
    for counts in [fwd, inv] {
        let chi = chi_square_uniform(&counts);
        assert!(!chi.rejects(SIGNIFICANCE), "{counts:?} p={}", chi.p_value);
    }
}

#[test]
fn answers_after_a_fixed_point_avoid_it_and_are_uniform() {
    let p = params(1, 2);
    let mut counts = [[0u64; 4]; 4];
    for seed in 0..80_000u64 {
        let mut c = new_ideal_cipher(p, seed);
        let y0 = c.f_forward(0, 0).unwrap();
        let y1 = c.f_forward(0, 1).unwrap();
        assert_ne!(y0, y1);
        counts[y0 as usize][y1 as usize] += 1;
    }
    for (y0, row) in counts.iter().enumerate() {
        assert_eq!(row[y0], 0);
        let others: Vec<u64> = (0..4).filter(|&v| v != y0).map(|v| row[v]).collect();
        let chi = chi_square_uniform(&others);
        assert!(!chi.rejects(SIGNIFICANCE), "y0={y0} {others:?}");
    }
}

#[test]
fn eager_rows_are_uniform_over_all_24_permutations() {
    let p = params(2, 2);
    let mut counts = vec![0u64; 24];
    let mut other_row = vec![0u64; 24];
    for seed in 0..100_000u64 {
        let table = eager_sample(p, seed).unwrap();
        counts[perm_rank(&table.rows()[0])] += 1;
        other_row[perm_rank(&table.rows()[3])] += 1;
    }
    for c in [&counts, &other_row] {
        let chi = chi_square_uniform(c);
        assert!(!chi.rejects(SIGNIFICANCE), "p={}", chi.p_value);
    }
}

#[test]
fn smallest_cipher_has_four_equally_likely_tables() {
    let p = params(1, 1);
    let mut eager = [0u64; 4];
    let mut lazy = [0u64; 4];
    for seed in 0..40_000u64 {
        let t = eager_sample(p, seed).unwrap();
        eager[(t.get(0, 0) * 2 + t.get(1, 0)) as usize] += 1;
        let mut c = new_ideal_cipher(p, seed);
        let a = c.f_forward(0, 0).unwrap();
        let b = c.f_inverse(1, 1).unwrap();
        // F(1, 0) is the other block whenever F^-1(1, 1) is not 0
        let b0 = if b == 0 { 1 } else { 0 };
        lazy[(a * 2 + b0) as usize] += 1;
    }
    for counts in [eager, lazy] {
        assert!(counts.iter().all(|&c| c > 0));
        let chi = chi_square_uniform(&counts);
        assert!(!chi.rejects(SIGNIFICANCE), "{counts:?}");
    }
}

#[test]
fn lazy_and_eager_agree_in_distribution() {
    for (kappa, n) in [(1, 2), (2, 1)] {
        let report = lazy_eager_equivalence_check(params(kappa, n), 100_000, 17).unwrap();
        assert!(
            report.passed(),
            "kappa={kappa} n={n}: {} cells rejected",
            report.rejected_cells()
        );
        assert!(report.joint.is_some());
    }
}

#[test]
fn eager_sampling_refuses_large_parameters() {
    assert!(eager_sample(params(9, 2), 0).is_err());
    assert!(lazy_eager_equivalence_check(params(2, 9), 1, 0).is_err());
}

#[derive(Clone, Copy, Debug)]
enum Op {
    E(u64),
    F(u64, u64),
    FInv(u64, u64),
}

fn op_strategy(kappa: u32, n: u32) -> impl Strategy<Value = Op> {
    let (ks, bs) = (1u64 << kappa, 1u64 << n);
    prop_oneof![
        (0..bs).prop_map(Op::E),
        (0..ks, 0..bs).prop_map(|(k, x)| Op::F(k, x)),
        (0..ks, 0..bs).prop_map(|(k, y)| Op::FInv(k, y)),
    ]
}

fn play(oracles: &mut dyn Oracles, ops: &[Op]) {
    for op in ops {
        match *op {
            Op::E(x) => oracles.e(x).unwrap(),
            Op::F(k, x) => oracles.f(k, x).unwrap(),
            Op::FInv(k, y) => oracles.f_inv(k, y).unwrap(),
        };
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn interleaved_queries_build_a_bijection(seed in any::<u64>(), ops in prop::collection::vec(
        (0u64..4, 0u64..16, any::<bool>()), 1..48)) {
        let mut c = new_ideal_cipher(params(2, 4), seed);
        let mut seen: std::collections::HashMap<(u64, u64), u64> = Default::default();
        for &(k, v, forward) in &ops {
            if forward {
                let y = c.f_forward(k, v).unwrap();
                if let Some(&prev) = seen.get(&(k, v)) {
                    prop_assert_eq!(prev, y);
                }
                seen.insert((k, v), y);
                prop_assert_eq!(c.f_inverse(k, y).unwrap(), v);
            } else {
                let x = c.f_inverse(k, v).unwrap();
                if let Some(&prev) = seen.get(&(k, x)) {
                    prop_assert_eq!(prev, v);
                }
                seen.insert((k, x), v);
                prop_assert_eq!(c.f_forward(k, x).unwrap(), v);
            }
        }
        for k in 0..4u64 {
            let outputs: Vec<u64> = seen.iter().filter(|((kk, _), _)| *kk == k).map(|(_, &y)| y).collect();
            let distinct: BTreeSet<u64> = outputs.iter().copied().collect();
            prop_assert_eq!(distinct.len(), outputs.len());
            if let Some(row) = c.row(k) {
                prop_assert!(row.check_consistency().is_ok());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn bad_event_is_monotone_and_matches_key_sighting(
        seed in any::<u64>(),
        trial in 0u64..1000,
        world in 1u8..=2,
        triple in any::<bool>(),
        ops in prop::collection::vec(op_strategy(2, 3), 0..40),
    ) {
        let op = if triple { Operator::TwoKeyTriple } else { Operator::Double };
        let mut game = build_world_for_trial(
            World::from_number(world).unwrap(), op, params(2, 3), OracleBudget::new(64, 64), seed, trial,
        ).unwrap();
        play(&mut game, &ops);
        let crucial = game.crucial().0.clone();
        let tr = game.transcript();
        let trace = bad_trace(tr, &crucial).unwrap();
        prop_assert_eq!(trace.len(), tr.len() + 1);
        for i in 1..trace.len() {
            prop_assert!(trace[i] >= trace[i - 1]);
            if i % 2 == 0 {
                prop_assert_eq!(trace[i], trace[i - 1]);
            }
        }
        let queried: BTreeSet<u64> = ops.iter().filter_map(|o| match *o {
            Op::F(k, _) | Op::FInv(k, _) => Some(k),
            Op::E(_) => None,
        }).collect();
        let expected = crucial.iter().all(|k| queried.contains(k));
        // a query the adversary could already answer is never recorded, but
        // the key it names was then recorded earlier
        prop_assert_eq!(*trace.last().unwrap(), expected);
    }

    #[test]
    fn world_one_replies_are_the_composition(
        seed in any::<u64>(),
        which in 0usize..4,
        ops in prop::collection::vec(op_strategy(2, 3), 0..40),
    ) {
        let op = [Operator::Single, Operator::Double, Operator::TwoKeyTriple, Operator::Cascade(3)][which];
        let mut game = build_world_for_trial(World::Composed, op, params(2, 3), OracleBudget::new(64, 64), seed, 0).unwrap();
        play(&mut game, &ops);
        prop_assert!(game.e_replies_match_composition().unwrap());
        let mut queries = std::collections::HashSet::new();
        for m in game.transcript().moves() {
            if m.entry.is_query() {
                prop_assert!(queries.insert(m.entry), "repeated query {}", m.entry);
            }
        }
        let e_count = game.transcript().moves().iter().filter(|m| matches!(m.entry, Entry::EQuery { .. })).count();
        let distinct_e: BTreeSet<u64> = ops.iter().filter_map(|o| if let Op::E(x) = o { Some(*x) } else { None }).collect();
        prop_assert_eq!(e_count, distinct_e.len());
    }
}

#[test]
fn world_two_e_is_a_permutation_independent_of_the_cipher() {
    let p = params(1, 2);
    let mut counts = [0u64; 4];
    for trial in 0..40_000u64 {
        let mut g =
            build_world_for_trial(World::Random, Operator::Double, p, OracleBudget::new(4, 0), 5, trial).unwrap();
        let ys: BTreeSet<u64> = (0..4).map(|x| g.e_query(x).unwrap()).collect();
        assert_eq!(ys.len(), 4);
        let mut g =
            build_world_for_trial(World::Random, Operator::Double, p, OracleBudget::new(1, 0), 5, trial).unwrap();
        counts[g.e_query(2).unwrap() as usize] += 1;
    }
    assert!(!chi_square_uniform(&counts).rejects(SIGNIFICANCE), "{counts:?}");
}
