//! Fixture loading and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::PathBuf;

use basispath::ingest::{self, Format};
use basispath::{Cfg, EdgeId, Path};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture(name: &str) -> Cfg {
    let path = fixture_dir().join(name);
    ingest::load_file(&path, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(name)).unwrap()
}

/// Clean graph fixtures (no blocking flaws).
pub const CLEAN: &[&str] = &[
    "example.json",
    "example.dot",
    "diamond.json",
    "while.json",
    "nested.json",
    "two_loops.json",
    "two_diamonds.json",
    "flaws/two_entries.json",
    "flaws/three_exits.json",
];

pub fn mini_programs() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(fixture_dir().join("mini"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

/// Every clean fixture, graphs and lowered programs, after purification.
pub fn purified_fixtures() -> Vec<(String, Cfg)> {
    let mut out: Vec<(String, Cfg)> = CLEAN
        .iter()
        .map(|n| (n.to_string(), basispath::purify(&fixture(n)).unwrap().cfg))
        .collect();
    for (name, src) in mini_programs() {
        let g = ingest::load(&src, Format::Mini, &name).unwrap();
        out.push((name, basispath::purify(&g).unwrap().cfg));
    }
    out
}

pub fn labels(cfg: &Cfg, p: &Path) -> String {
    p.edges.iter().map(|&e| cfg.edge_token(e)).collect()
}

/// Indicator vector with the closing edge as last coordinate, computed
/// without the library.
pub fn oracle_vector(cfg: &Cfg, edges: &[EdgeId]) -> Vec<bool> {
    let mut v = vec![false; cfg.edge_count() + 1];
    for e in edges {
        v[e.0] = !v[e.0];
    }
    v[cfg.edge_count()] = true;
    v
}

/// Textbook Gaussian elimination with row swaps.
pub fn naive_rank(rows: &[Vec<bool>]) -> usize {
    let mut m: Vec<Vec<bool>> = rows.to_vec();
    let width = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..m.len()).find(|&r| m[r][col]) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][col] {
                let pivot = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn naive_in_span(rows: &[Vec<bool>], v: &[bool]) -> bool {
    let mut with = rows.to_vec();
    with.push(v.to_vec());
    naive_rank(&with) == naive_rank(rows)
}

pub fn spans_equal(a: &[Vec<bool>], b: &[Vec<bool>]) -> bool {
    a.iter().all(|v| naive_in_span(b, v)) && b.iter().all(|v| naive_in_span(a, v))
}

/// Consecutive edges share endpoints; starts at begin, stops at end.
pub fn walk_ok(cfg: &Cfg, edges: &[EdgeId]) -> bool {
    let mut at = cfg.begin().unwrap();
    for &e in edges {
        if cfg.edge(e).from != at {
            return false;
        }
        at = cfg.edge(e).to;
    }
    at == cfg.end().unwrap()
}

/// Fewest edges on any begin-end path, by plain BFS.
pub fn bfs_distance(cfg: &Cfg) -> Option<usize> {
    let (b, t) = (cfg.begin()?, cfg.end()?);
    let mut dist = vec![usize::MAX; cfg.node_count()];
    dist[b.0] = 0;
    let mut q = VecDeque::from([b]);
    while let Some(u) = q.pop_front() {
        for e in cfg.edges().iter().filter(|e| e.from == u) {
            if dist[e.to.0] == usize::MAX {
                dist[e.to.0] = dist[u.0] + 1;
                q.push_back(e.to);
            }
        }
    }
    (dist[t.0] != usize::MAX).then_some(dist[t.0])
}

/// Kahn's algorithm; true when the graph has no cycle.
pub fn acyclic(cfg: &Cfg) -> bool {
    let mut indeg = vec![0; cfg.node_count()];
    for e in cfg.edges() {
        indeg[e.to.0] += 1;
    }
    let mut q: Vec<usize> = (0..cfg.node_count()).filter(|&u| indeg[u] == 0).collect();
    let mut seen = 0;
    while let Some(u) = q.pop() {
        seen += 1;
        for e in cfg.edges().iter().filter(|e| e.from.0 == u) {
            indeg[e.to.0] -= 1;
            if indeg[e.to.0] == 0 {
                q.push(e.to.0);
            }
        }
    }
    seen == cfg.node_count()
}

/// `e - v + 2` read straight from the `// expect:` header of a program.
pub fn expected_counts(src: &str) -> (usize, usize, i64) {
    let line = src
        .lines()
        .find(|l| l.contains("expect:"))
        .expect("expect header");
    let get = |key: &str| -> i64 {
        line.split_whitespace()
            .find_map(|w| w.strip_prefix(key))
            .unwrap()
            .parse()
            .unwrap()
    };
    (get("e=") as usize, get("v=") as usize, get("C="))
}
