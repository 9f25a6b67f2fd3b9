mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use iad::dynamics::{
    is_local_equilibrium, is_strong_consistent, resolve_edge_inconsistencies, run, run_observed,
    DynamicsConfig, Mode,
};
use iad::generators::{
    is_automorphism, mirror_attack, planted_scenario, CheaterStrategy, HonestStrategy,
    MirrorAccusations, ScenarioSpec,
};
use iad::io::{read_edge_list, write_edge_list, Dedup, SymbolTable};
use iad::motif::{inconsistent_implications, Depth};
use iad::observer::{implication_screen, Verdict};
use iad::{NodeId, Sign, SignedDigraph};

type EdgeSpec = (usize, usize, bool, u8);

fn build(n: usize, edges: &[EdgeSpec]) -> SignedDigraph {
    let mut g = SignedDigraph::new(n);
    for &(u, v, accuse, w) in edges {
        let (u, v) = (u % n, v % n);
        if u != v {
            let sign = if accuse { Sign::Accuse } else { Sign::Endorse };
            g.add_edge(u, v, sign, f64::from(w.max(1))).unwrap();
        }
    }
    g
}

fn graph_strategy(max_n: usize) -> impl Strategy<Value = SignedDigraph> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, any::<bool>(), 1u8..10), 0..n * n)
            .prop_map(move |e| build(n, &e))
    })
}

fn edge_set(g: &SignedDigraph) -> BTreeSet<(NodeId, NodeId, Sign, u64)> {
    g.edges()
        .map(|(u, v, e)| (u, v, e.sign, e.weight.to_bits()))
        .collect()
}

fn cheater_strategy() -> impl Strategy<Value = CheaterStrategy> {
    prop_oneof![
        Just(CheaterStrategy::Silent),
        Just(CheaterStrategy::Mirror),
        (0.0..0.5f64, 0.0..0.5f64)
            .prop_map(|(p_pos, p_neg)| CheaterStrategy::RandomMixed { p_pos, p_neg }),
        (0.0..1.0f64).prop_map(|rate| CheaterStrategy::AccuseHonest { rate }),
    ]
}

fn scenario_strategy() -> impl Strategy<Value = ScenarioSpec> {
    (
        1usize..9,
        0usize..5,
        0.5..4.0f64,
        cheater_strategy(),
        any::<u64>(),
    )
        .prop_map(
            |(n_honest, n_cheaters, expected_degree, cheater, seed)| ScenarioSpec {
                n_honest,
                n_cheaters,
                honest: vec![HonestStrategy::RandomEndorse { expected_degree }],
                cheater,
                shuffle: true,
                seed,
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn census_agrees_with_brute_force(g in graph_strategy(7)) {
        prop_assert!(common::census_matches(&g));
    }

    #[test]
    fn mixed_dyad_sweep_ignores_insertion_order(
        n in 2usize..8,
        edges in prop::collection::vec((0usize..8, 0usize..8, any::<bool>(), 1u8..4), 0..40),
        seed in any::<u64>(),
    ) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        // Later duplicates win, so keep only the last spec per ordered pair.
        let last_per_pair = |es: &[EdgeSpec]| {
            let mut seen = BTreeSet::new();
            let mut kept: Vec<EdgeSpec> = es.iter().rev().filter(|e| seen.insert((e.0 % n, e.1 % n))).copied().collect();
            kept.reverse();
            kept
        };
        let a_edges = last_per_pair(&edges);
        let mut b_edges = a_edges.clone();
        rand::seq::SliceRandom::shuffle(b_edges.as_mut_slice(), &mut rng);
        let (mut a, mut b) = (build(n, &a_edges), build(n, &b_edges));
        resolve_edge_inconsistencies(&mut a);
        resolve_edge_inconsistencies(&mut b);
        prop_assert_eq!(edge_set(&a), edge_set(&b));
    }

    #[test]
    fn dynamics_conserve_edges(g in graph_strategy(8), seed in any::<u64>(), strong in any::<bool>()) {
        let cfg = DynamicsConfig {
            mode: if strong { Mode::Strong } else { Mode::Local },
            max_steps: 300,
            seed,
            ..DynamicsConfig::default()
        };
        let edges = g.edge_count();
        let pairs: BTreeSet<(NodeId, NodeId)> = g.edges().map(|(u, v, _)| (u, v)).collect();
        let (last, _) = run_observed(&g, &cfg, |state, _| {
            assert_eq!(state.edge_count(), edges);
        }).unwrap();
        let after: BTreeSet<(NodeId, NodeId)> = last.edges().map(|(u, v, _)| (u, v)).collect();
        prop_assert_eq!(pairs, after);
    }

    #[test]
    fn strong_consistency_implies_local_equilibrium(g in graph_strategy(8), seed in any::<u64>()) {
        let cfg = DynamicsConfig { mode: Mode::Strong, max_steps: 2000, seed, ..DynamicsConfig::default() };
        let (last, stats) = run(&g, &cfg).unwrap();
        if stats.converged {
            prop_assert!(is_strong_consistent(&last));
        }
        for state in [&g, &last] {
            if is_strong_consistent(state) {
                prop_assert!(is_local_equilibrium(state));
            }
        }
    }

    #[test]
    fn deep_implications_extend_local_ones(g in graph_strategy(7)) {
        let local: BTreeSet<NodeId> = inconsistent_implications(&g, Depth::Local).iter().map(|i| i.implicated).collect();
        let deep: BTreeSet<NodeId> = inconsistent_implications(&g, Depth::Deep).iter().map(|i| i.implicated).collect();
        prop_assert!(local.is_subset(&deep));
        for imp in inconsistent_implications(&g, Depth::Deep) {
            prop_assert!(imp.replay(&g));
        }
    }

    #[test]
    fn screen_never_marks_honest_nodes(spec in scenario_strategy(), deep in any::<bool>()) {
        let (g, part) = planted_scenario(&spec).unwrap();
        let labels = implication_screen(&g, if deep { Depth::Deep } else { Depth::Local });
        for u in labels.nodes_with(Verdict::ImplicatedC) {
            prop_assert!(!part.is_honest(u), "honest node {} marked", u);
        }
    }

    #[test]
    fn honest_edges_survive_dynamics(spec in scenario_strategy(), seed in any::<u64>(), strong in any::<bool>()) {
        let (g, part) = planted_scenario(&spec).unwrap();
        let cfg = DynamicsConfig {
            mode: if strong { Mode::Strong } else { Mode::Local },
            max_steps: 500,
            seed,
            ..DynamicsConfig::default()
        };
        let (last, _) = run(&g, &cfg).unwrap();
        for h in part.honest() {
            prop_assert_eq!(g.out_endorsements(h), last.out_endorsements(h));
            prop_assert_eq!(g.out_accusations(h), last.out_accusations(h));
        }
        prop_assert!(part.honest_constraint_holds(&last));
    }

    #[test]
    fn edge_list_round_trips(g in graph_strategy(12)) {
        let labels = SymbolTable::numeric(g.node_count());
        let mut buf = Vec::new();
        write_edge_list(&g, Some(&labels), &mut buf).unwrap();
        let loaded = read_edge_list(buf.as_slice(), Dedup::Error).unwrap();
        let back: BTreeSet<(String, String, Sign, u64)> = loaded
            .graph
            .edges()
            .map(|(u, v, e)| (loaded.labels.label(u).to_string(), loaded.labels.label(v).to_string(), e.sign, e.weight.to_bits()))
            .collect();
        let orig: BTreeSet<(String, String, Sign, u64)> = g
            .edges()
            .map(|(u, v, e)| (u.to_string(), v.to_string(), e.sign, e.weight.to_bits()))
            .collect();
        prop_assert_eq!(back, orig);
    }

    #[test]
    fn mirror_swap_survives_reload(k in 1usize..7, p in 0.3..0.9f64, rate in 0.0..0.5f64, doppelganger in any::<bool>(), seed in any::<u64>()) {
        let g_h = iad::generators::er_endorsement(k, p, 0, seed).unwrap();
        let (g, _, swap) = mirror_attack(&g_h, MirrorAccusations { doppelganger, random_rate: rate }, seed).unwrap();
        prop_assert!(is_automorphism(&g, &swap));
        if g.nodes().all(|u| !g.out_endorsements(u).is_empty() || !g.in_endorsements(u).is_empty()
            || !g.out_accusations(u).is_empty() || !g.in_accusations(u).is_empty())
        {
            let mut buf = Vec::new();
            write_edge_list(&g, Some(&SymbolTable::numeric(g.node_count())), &mut buf).unwrap();
            let loaded = read_edge_list(buf.as_slice(), Dedup::Error).unwrap();
            let id = |u: NodeId| loaded.labels.id(&u.to_string()).unwrap();
            let mut mapped = vec![0; g.node_count()];
            for u in g.nodes() {
                mapped[id(u)] = id(swap[u]);
            }
            prop_assert!(is_automorphism(&loaded.graph, &mapped));
        }
    }
}
