mod common;

use basispath::ingest::{self, Format};
use basispath::{
    close_graph, cyclomatic_complexity, detect_flaws, normalize_entries_exits, purify, reach_sets,
    run_pipeline, FlawKind, PipelineError,
};
use common::*;

fn degree_zero_counts(g: &basispath::Cfg) -> (usize, usize) {
    let ind = g.in_degrees();
    let outd = g.out_degrees();
    (
        ind.iter().filter(|&&d| d == 0).count(),
        outd.iter().filter(|&&d| d == 0).count(),
    )
}

#[test]
fn each_fixture_yields_its_kind() {
    let cases = [
        (
            "flaws/unreachable.json",
            vec![FlawKind::UnreachableCode],
            true,
        ),
        ("flaws/deadend.json", vec![FlawKind::DeadEnd], true),
        (
            "flaws/two_entries.json",
            vec![FlawKind::MultipleEntries],
            false,
        ),
        (
            "flaws/three_exits.json",
            vec![FlawKind::MultipleExits],
            false,
        ),
        (
            "flaws/intersecting.json",
            vec![FlawKind::HorribleLoop],
            true,
        ),
        (
            "flaws/jump_into_loop.json",
            vec![FlawKind::IrreducibleLoop],
            true,
        ),
    ];
    for (name, kinds, blocking) in cases {
        let r = detect_flaws(&fixture(name));
        assert_eq!(r.kinds(), kinds, "{name}");
        assert_eq!(r.blocking, blocking, "{name}");
        assert!(
            r.flaws
                .iter()
                .all(|f| !f.nodes.is_empty() || !f.edges.is_empty()),
            "{name}"
        );
    }
}

#[test]
fn unreachable_locus_is_the_orphan() {
    let g = fixture("flaws/unreachable.json");
    let r = detect_flaws(&g);
    assert_eq!(r.flaws[0].nodes, vec![g.find("u").unwrap()]);
}

#[test]
fn entries_and_exits_are_normalized() {
    for name in ["flaws/two_entries.json", "flaws/three_exits.json"] {
        let g = fixture(name);
        let p = purify(&g).unwrap();
        assert!(p.report.is_empty(), "{name}: {:?}", p.report);
        assert_eq!(degree_zero_counts(&p.cfg), (1, 1), "{name}");
        assert!(!p.resolved.is_empty());
        // Never removes anything.
        assert!(p.cfg.edge_count() >= g.edge_count() && p.cfg.node_count() >= g.node_count());
    }
}

#[test]
fn two_entries_grow_by_two_edges_one_node() {
    let g = fixture("flaws/two_entries.json");
    let n = normalize_entries_exits(&g).unwrap();
    assert_eq!(n.edge_count(), g.edge_count() + 2);
    assert_eq!(n.node_count(), g.node_count() + 1);
}

#[test]
fn three_exits_raise_complexity_by_two() {
    let g = fixture("flaws/three_exits.json");
    let before = g.edge_count() as i64 - g.node_count() as i64 + 2;
    let n = normalize_entries_exits(&g).unwrap();
    let after = cyclomatic_complexity(&close_graph(&n).unwrap());
    assert_eq!(after - before, 2);
}

#[test]
fn purify_is_idempotent() {
    for name in CLEAN
        .iter()
        .chain(&["flaws/unreachable.json", "flaws/intersecting.json"])
    {
        let once = purify(&fixture(name)).unwrap();
        let twice = purify(&once.cfg).unwrap();
        assert_eq!(once.cfg, twice.cfg, "{name}");
        assert_eq!(once.report, twice.report, "{name}");
    }
}

#[test]
fn blocking_flaws_stop_the_pipeline() {
    let err = run_pipeline(&fixture("flaws/intersecting.json")).unwrap_err();
    match err {
        PipelineError::Blocked(r) => assert_eq!(r.kinds(), vec![FlawKind::HorribleLoop]),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn unreachable_statement_after_goto() {
    let src = fixture_text("flaws/goto_unreachable.mini");
    let g = ingest::load(&src, Format::Mini, "goto").unwrap();
    let s2 = g.find("s2").unwrap();
    assert!(!reach_sets(&g).unwrap().forward[s2.0]);
    let r = detect_flaws(&g);
    assert_eq!(r.kinds(), vec![FlawKind::UnreachableCode]);
    assert_eq!(r.flaws[0].nodes, vec![s2]);
}

#[test]
fn report_json_shape() {
    let r = detect_flaws(&fixture("flaws/intersecting.json"));
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["blocking"], true);
    let f = &v["flaws"][0];
    assert_eq!(f["kind"], "HorribleLoop");
    assert!(f["nodes"].is_array() && f["edges"].is_array() && f["message"].is_string());
}

#[test]
fn nested_and_consecutive_loops_are_clean() {
    for name in ["nested.json", "two_loops.json"] {
        assert!(detect_flaws(&fixture(name)).is_empty(), "{name}");
    }
    for (name, src) in mini_programs() {
        let g = ingest::load(&src, Format::Mini, &name).unwrap();
        assert!(!detect_flaws(&g).blocking, "{name}");
    }
}
