mod common;

use basispath::ingest::{parse_json_cfg, to_json_cfg};
use basispath::verify::gen::{random_cfg, GenConfig};
use basispath::verify::{BitMatrix, PathVector};
use basispath::{
    brute_force_basis, close_graph, compute_paths, cyclomatic_complexity, decompose,
    path_to_vector, purify, rank_gf2, run_pipeline, verify_basis, Cfg,
};
use common::*;
use proptest::prelude::*;

fn graph(seed: u64) -> Cfg {
    purify(&random_cfg(seed, &GenConfig::default()))
        .unwrap()
        .cfg
}

fn small_graph(seed: u64) -> Cfg {
    purify(&random_cfg(
        seed,
        &GenConfig {
            max_nodes: 25,
            max_edges: 50,
        },
    ))
    .unwrap()
    .cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn path_count_equals_rank_equals_complexity(seed in any::<u64>()) {
        let g = graph(seed);
        let closed = close_graph(&g).unwrap();
        let c = cyclomatic_complexity(&closed);
        let ps = compute_paths(&g).unwrap();
        let rows: Vec<Vec<bool>> = ps.paths.iter().map(|p| oracle_vector(&g, &p.edges)).collect();
        prop_assert_eq!(ps.len() as i64, c);
        prop_assert_eq!(naive_rank(&rows) as i64, c);
    }

    #[test]
    fn paths_are_walks_covering_every_edge(seed in any::<u64>()) {
        let g = graph(seed);
        let ps = compute_paths(&g).unwrap();
        let mut seen = vec![false; g.edge_count()];
        for p in &ps.paths {
            prop_assert!(walk_ok(&g, &p.edges));
            for e in &p.edges {
                seen[e.0] = true;
            }
            for s in &p.loops {
                prop_assert!(s.start < s.end && s.end <= p.len());
                prop_assert_eq!(g.edge(p.edges[s.start]).from, g.edge(p.edges[s.end - 1]).to);
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn backbone_is_a_shortest_path(seed in any::<u64>()) {
        let g = graph(seed);
        let ps = compute_paths(&g).unwrap();
        prop_assert_eq!(ps.backbone, 0);
        prop_assert_eq!(Some(ps.backbone_path().len()), bfs_distance(&g));
    }

    #[test]
    fn odd_subsets_keep_the_virtual_bit(seed in any::<u64>(), mask in any::<u64>()) {
        let g = graph(seed);
        let closed = close_graph(&g).unwrap();
        let ps = compute_paths(&g).unwrap();
        let mut acc = PathVector::zeros(closed.edge_count());
        let mut picked = 0;
        for (i, p) in ps.paths.iter().enumerate() {
            if mask >> (i % 64) & 1 == 1 {
                acc.xor_assign(&path_to_vector(p, &closed).unwrap());
                picked += 1;
            }
        }
        prop_assert_eq!(acc.get(closed.virtual_edge().0), picked % 2 == 1);
    }

    #[test]
    fn certificate_accounts_for_every_region(seed in any::<u64>()) {
        let g = graph(seed);
        let closed = close_graph(&g).unwrap();
        let d = decompose(&g).unwrap();
        let cert = verify_basis(&compute_paths(&g).unwrap(), &closed, Some(&d));
        prop_assert!(cert.is_basis, "{}", cert.summary());
        let acc = cert.accounting.unwrap();
        prop_assert_eq!(acc.residual, 0);
        prop_assert!(acc.unlocalized.is_empty());
        for r in &acc.regions {
            prop_assert_eq!(r.expected, r.observed, "{:?}", r.region);
        }
    }

    #[test]
    fn purify_is_idempotent_and_only_adds(seed in any::<u64>()) {
        let raw = random_cfg(seed, &GenConfig::default());
        let once = purify(&raw).unwrap();
        prop_assert!(once.cfg.node_count() >= raw.node_count());
        prop_assert!(once.cfg.edge_count() >= raw.edge_count());
        for (a, b) in raw.edges().iter().zip(once.cfg.edges()) {
            prop_assert_eq!(a.from, b.from);
            prop_assert_eq!(a.to, b.to);
        }
        let twice = purify(&once.cfg).unwrap();
        prop_assert_eq!(&once.cfg, &twice.cfg);
        prop_assert!(twice.resolved.is_empty());
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let g = random_cfg(seed, &GenConfig::default());
        prop_assert_eq!(parse_json_cfg(&to_json_cfg(&g)).unwrap(), g);
    }

    #[test]
    fn pipeline_is_deterministic(seed in any::<u64>()) {
        let g = graph(seed);
        let a = run_pipeline(&g).unwrap();
        let b = run_pipeline(&g).unwrap();
        prop_assert_eq!(a.paths, b.paths);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn span_matches_brute_force(seed in any::<u64>()) {
        let g = small_graph(seed);
        let closed = close_graph(&g).unwrap();
        let ours: Vec<Vec<bool>> = compute_paths(&g).unwrap().paths.iter().map(|p| oracle_vector(&g, &p.edges)).collect();
        let oracle = brute_force_basis(&closed, 200_000).unwrap();
        let theirs: Vec<Vec<bool>> = oracle.paths.iter().map(|p| oracle_vector(&g, &p.edges)).collect();
        prop_assert!(spans_equal(&ours, &theirs));
    }

    #[test]
    fn rank_matches_textbook_elimination(rows in 1usize..=64, cols in 1usize..=64, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let density = rng.gen_range(0.05..0.95);
        let m: Vec<Vec<bool>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_bool(density)).collect()).collect();
        let packed = BitMatrix::from_rows(cols, m.iter().map(|r| PathVector::from_bits(r)).collect());
        prop_assert_eq!(rank_gf2(&packed), naive_rank(&m));
    }
}
