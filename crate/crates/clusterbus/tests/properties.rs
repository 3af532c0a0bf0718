use std::collections::BTreeSet;

use proptest::prelude::*;

use clusterbus::geometry::{LatticeParams, Site};
use clusterbus::graphs::{boundary, build_cluster_decoding, build_surface_decoding, cycle_decompose, is_ext_path, is_simple_loop, BoundaryGraph, EdgeSet};
use clusterbus::matching::{brute_force_min_match, min_match};
use clusterbus::noise::{derive_gl, derive_surface_supports, trial_rng, NoiseModel};
use clusterbus::oracle::{cluster_generator, oracle_run};
use clusterbus::protocols::run_trials;
use clusterbus::{Context, Decoder, PauliError};

fn edge_set(g: &BoundaryGraph, bits: &[bool]) -> EdgeSet {
    let mut e = g.empty_edges();
    for (i, &b) in bits.iter().take(g.num_edges()).enumerate() {
        e.set(i, b);
    }
    e
}

fn graphs() -> Vec<BoundaryGraph> {
    let (a, b) = build_surface_decoding(&LatticeParams::surface(4).unwrap()).unwrap();
    let (c, d) = build_cluster_decoding(&LatticeParams::cluster(3, 5).unwrap()).unwrap();
    vec![a, b, c, d]
}

fn small_graphs() -> Vec<BoundaryGraph> {
    let (a, b) = build_surface_decoding(&LatticeParams::surface(3).unwrap()).unwrap();
    let (c, d) = build_cluster_decoding(&LatticeParams::cluster(2, 5).unwrap()).unwrap();
    vec![a, b, c, d]
}

fn pauli_on(sites: &[Site], codes: &[u8]) -> PauliError {
    let mut e = PauliError::identity();
    for (s, &c) in sites.iter().zip(codes) {
        if c & 1 == 1 {
            e.xsupp.insert(*s);
        }
        if c & 2 == 2 {
            e.zsupp.insert(*s);
        }
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_is_linear(gi in 0usize..4, a in prop::collection::vec(any::<bool>(), 300), b in prop::collection::vec(any::<bool>(), 300)) {
        let g = &graphs()[gi];
        let (ea, eb) = (edge_set(g, &a), edge_set(g, &b));
        let mut sum = ea.clone();
        sum.symmetric_difference_with(&eb);
        let mut want = boundary(g, &ea).unwrap();
        want.symmetric_difference_with(&boundary(g, &eb).unwrap());
        prop_assert_eq!(boundary(g, &sum).unwrap(), want);
    }

    #[test]
    fn min_match_is_a_smallest_matching(gi in 0usize..4, bits in prop::collection::vec(prop::bool::weighted(0.2), 300)) {
        let g = &graphs()[gi];
        let e = edge_set(g, &bits);
        let s = boundary(g, &e).unwrap();
        let m = min_match(g, &s).unwrap();
        prop_assert_eq!(boundary(g, &m).unwrap(), s);
        prop_assert!(m.count_ones(..) <= e.count_ones(..));
    }

    #[test]
    fn min_match_equals_brute_force(gi in 0usize..4, bits in prop::collection::vec(any::<bool>(), 24)) {
        let g = &small_graphs()[gi];
        let s = boundary(g, &edge_set(g, &bits)).unwrap();
        let a = min_match(g, &s).unwrap();
        let b = brute_force_min_match(g, &s).unwrap();
        prop_assert_eq!(a.count_ones(..), b.count_ones(..));
    }

    #[test]
    fn cycles_split_into_loops_and_paths(gi in 0usize..4, bits in prop::collection::vec(prop::bool::weighted(0.3), 300)) {
        let g = &graphs()[gi];
        let e = edge_set(g, &bits);
        let mut cyc = min_match(g, &boundary(g, &e).unwrap()).unwrap();
        cyc.symmetric_difference_with(&e);
        let parts = cycle_decompose(g, &cyc).unwrap();
        let mut union = g.empty_edges();
        for p in &parts {
            prop_assert!(union.is_disjoint(p));
            prop_assert!(is_simple_loop(g, p) || is_ext_path(g, p));
            union.union_with(p);
        }
        prop_assert_eq!(union, cyc);
    }

    #[test]
    fn cluster_stabilizers_do_not_change_outcome(codes in prop::collection::vec(prop::bool::weighted(0.1).prop_flat_map(|on| if on { (1u8..4).boxed() } else { Just(0u8).boxed() }), 200), u in 0usize..1000) {
        let ctx = Context::cluster(3, 5).unwrap();
        let qs = &ctx.lattice.qubits;
        let e = pauli_on(qs, &codes);
        let set: BTreeSet<Site> = qs.iter().copied().collect();
        let g = cluster_generator(&qs[u % qs.len()], &set);
        let stab = PauliError { xsupp: g.x, zsupp: g.z };
        let mut dec = Decoder::new(&ctx);
        prop_assert_eq!(dec.outcome(&e).unwrap(), dec.outcome(&e.compose(&stab)).unwrap());
    }

    #[test]
    fn errors_commuting_with_measurements_are_ignored(codes in prop::collection::vec(0u8..4, 50), extra in prop::collection::vec(any::<bool>(), 50)) {
        let ctx = Context::surface(4).unwrap();
        let e = pauli_on(&ctx.lattice.qubits, &codes);
        let out = ctx.output_qubit();
        let mut silent = PauliError::identity();
        for (s, &on) in ctx.measured_qubits().iter().zip(&extra) {
            if !on || *s == out {
                continue;
            }
            if ctx.partition.set_x.contains(s) {
                silent.xsupp.insert(*s);
            } else if ctx.partition.set_z.contains(s) {
                silent.zsupp.insert(*s);
            }
        }
        let mut dec = Decoder::new(&ctx);
        prop_assert_eq!(dec.outcome(&e).unwrap(), dec.outcome(&e.compose(&silent)).unwrap());
    }

    #[test]
    fn measured_syndrome_is_boundary_of_error(codes in prop::collection::vec(0u8..4, 21), seed in any::<u64>()) {
        for ctx in [Context::surface(2).unwrap(), Context::surface(3).unwrap(), Context::cluster(2, 3).unwrap()] {
            let e = pauli_on(&ctx.lattice.qubits, &codes);
            let run = oracle_run(&ctx, &e, &mut trial_rng(seed, 0)).unwrap();
            let dec = Decoder::new(&ctx);
            let (s, sd) = dec.syndromes(&run.outcomes).unwrap();
            let (w, wd) = match ctx.kind() {
                clusterbus::LatticeKind::Surface => derive_surface_supports(&e, &ctx).unwrap(),
                clusterbus::LatticeKind::Cluster => derive_gl(&e, &ctx).unwrap(),
            };
            prop_assert_eq!(s, boundary(&ctx.dec, &w).unwrap());
            prop_assert_eq!(sd, boundary(&ctx.dec_dual, &wd).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn trial_counts_ignore_thread_count(seed in any::<u64>(), threads in 2usize..6) {
        let ctx = Context::surface(3).unwrap();
        let model = NoiseModel::Depolarizing(0.05);
        let a = run_trials(&ctx, &model, 5000, seed, 1).unwrap();
        let b = run_trials(&ctx, &model, 5000, seed, threads).unwrap();
        prop_assert_eq!(a.counts, b.counts);
    }
}
