mod common;

use basispath::decompose::{extended_loop_graph, find_loops, loopless_part, Region};
use basispath::{close_graph, compute_paths, cyclomatic_complexity, decompose};
use common::*;

#[test]
fn loops_and_stems() {
    let g = fixture("two_loops.json");
    let d = decompose(&g).unwrap();
    let headers: Vec<&str> = d.loops.iter().map(|l| g.node_name(l.header)).collect();
    assert_eq!(headers, ["K", "P"]);
    assert_eq!(
        d.loops.iter().map(|l| l.complexity()).collect::<Vec<_>>(),
        [1, 1]
    );
    let stems: Vec<String> = d.extended.iter().map(|x| labels(&g, &x.stem)).collect();
    assert_eq!(stems, ["xagilnpy", "xknpy"]);
    for x in &d.extended {
        assert!(walk_ok(&g, &x.stem.edges));
        let at = g.edge(x.stem.edges[x.splice_at - 1]).to;
        assert_eq!(at, x.header);
    }
    assert!(extended_loop_graph(&d, 2).is_err());
    let paths: Vec<String> = compute_paths(&g)
        .unwrap()
        .paths
        .iter()
        .map(|p| labels(&g, p))
        .collect();
    assert_eq!(paths.len(), 4);
    assert_eq!(paths[0], "xknpy");
    assert!(paths.contains(&"xknopy".to_string()));
    assert!(paths.contains(&"xabefgilnpy".to_string()));
}

#[test]
fn nested_loops_count_inside_the_outer() {
    let g = fixture("nested.json");
    let d = decompose(&g).unwrap();
    assert_eq!(d.loops.len(), 1);
    assert_eq!(d.loops[0].complexity(), 2);
    assert_eq!(d.loopless_complexity(), 1);
    let c = cyclomatic_complexity(&close_graph(&g).unwrap());
    assert_eq!(c, 3);
    let ps = compute_paths(&g).unwrap();
    assert_eq!(ps.len(), 3);
    for p in &ps.paths {
        assert!(walk_ok(&g, &p.edges));
    }
    assert_eq!(ps.paths.iter().filter(|p| !p.loops.is_empty()).count(), 2);
}

#[test]
fn while_loop_paths() {
    let g = fixture("while.json");
    let ps = compute_paths(&g).unwrap();
    let texts: Vec<String> = ps.paths.iter().map(|p| labels(&g, p)).collect();
    assert_eq!(texts, ["xy", "xzwy"]);
    assert_eq!(ps.paths[1].loops.len(), 1);
}

#[test]
fn loopless_parts_are_acyclic() {
    for (name, g) in purified_fixtures() {
        let loops = find_loops(&g).unwrap();
        let part = loopless_part(&g, &loops).unwrap();
        assert!(acyclic(&part.cfg), "{name}");
        assert_eq!(part.routes.len(), part.cfg.edge_count(), "{name}");
    }
}

#[test]
fn every_edge_is_accounted_once() {
    for (name, g) in purified_fixtures() {
        let d = decompose(&g).unwrap();
        for e in g.edge_ids() {
            let in_block = d.block_of_edge(e).is_some();
            let in_loop = d.loop_of_edge(e).is_some();
            let routed = d.loopless.routes.iter().any(|r| r.contains(&e));
            assert!(in_block ^ in_loop || routed, "{name}: edge {}", e.0);
        }
        let c = cyclomatic_complexity(&close_graph(&g).unwrap());
        let blocks: i64 = d.chain.blocks.iter().map(|b| b.complexity() - 1).sum();
        let loops: i64 = d.loops.iter().map(|l| l.complexity()).sum();
        assert_eq!(1 + blocks + loops, c, "{name}");
        assert_eq!(d.hosts.len(), d.loops.len());
        for h in &d.hosts {
            match *h {
                Region::Block(b) => assert!(b < d.chain.blocks.len()),
                Region::Loop(l) => assert!(l < d.loops.len()),
            }
        }
    }
}

#[test]
fn json_view_uses_names() {
    let g = fixture("two_loops.json");
    let v = decompose(&g).unwrap().to_json(&g);
    assert!(v["blocks"].is_array());
    assert_eq!(v["loops"][0]["header"], "K");
}
