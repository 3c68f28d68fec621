//! Backbone and basis-path computation.
//!
//! The loopless part is solved block by block: serial blocks are combined,
//! parallel parts are united, and trivial blocks enumerate their arms. Each
//! outermost loop is solved as a problem of its own (header split into entry
//! and exit) and every one of its paths is spliced once into a stem walk.

use serde::{Deserialize, Serialize};

use crate::cfg::{Cfg, EdgeId};
use crate::decompose::{parallel_parts, split_header, Chain, Level};
use crate::error::{Error, Result};
use crate::net::Net;

/// Half-open range of `Path::edges` walked as one loop traversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LoopSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub edges: Vec<EdgeId>,
    /// Segments traversed as a single loop iteration, outermost first.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loops: Vec<LoopSpan>,
}

impl Path {
    pub fn new(edges: Vec<EdgeId>) -> Self {
        Path {
            edges,
            loops: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `self` followed by `other`; annotations of `other` are shifted.
    pub fn concat(&self, other: &Path) -> Path {
        let shift = self.edges.len();
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        let mut loops = self.loops.clone();
        loops.extend(other.loops.iter().map(|s| LoopSpan {
            start: s.start + shift,
            end: s.end + shift,
        }));
        Path { edges, loops }
    }

    /// Checks that consecutive edges share endpoints and the walk runs from
    /// `begin` to `end` of `cfg`.
    pub fn validate(&self, cfg: &Cfg) -> Result<()> {
        let (b, t) = cfg.terminals()?;
        let mut at = b;
        for (i, &e) in self.edges.iter().enumerate() {
            if e.0 >= cfg.edge_count() {
                return Err(Error::InvalidPath(format!("edge {e} out of range")));
            }
            let edge = cfg.edge(e);
            if edge.from != at {
                return Err(Error::InvalidPath(format!(
                    "edge {} at position {i} leaves `{}`, walk stands on `{}`",
                    cfg.edge_token(e),
                    cfg.node_name(edge.from),
                    cfg.node_name(at)
                )));
            }
            at = edge.to;
        }
        if at != t {
            return Err(Error::InvalidPath(format!(
                "walk stops at `{}`, not at `{}`",
                cfg.node_name(at),
                cfg.node_name(t)
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSet {
    pub paths: Vec<Path>,
    pub backbone: usize,
}

impl PathSet {
    pub fn backbone_path(&self) -> &Path {
        &self.paths[self.backbone]
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// Shortest begin-end path; ties go to the smallest edge sequence.
pub fn backbone(cfg: &Cfg) -> Result<Path> {
    let (b, t) = cfg.terminals()?;
    let net = Net::from_cfg(cfg, b.0, t.0);
    let arcs = net
        .shortest(net.begin, net.end, |_| true)
        .ok_or(Error::NoPath)?;
    Ok(Path::new(net.expand(&arcs)))
}

/// Paths of a block whose parallel parts are all simple arms: one per arm.
pub fn count_trivial(block: &Cfg) -> Result<PathSet> {
    let (b, t) = block.terminals()?;
    let net = Net::from_cfg(block, b.0, t.0);
    let all: Vec<usize> = (0..net.arcs.len()).collect();
    let parts = parallel_parts(&net, &all, net.begin, net.end);
    let mut arms = Vec::with_capacity(parts.len());
    for p in &parts {
        arms.push(
            arm(&net, p, net.begin, net.end)
                .ok_or_else(|| Error::Contract("block is not trivial".into()))?,
        );
    }
    let backbone = min_index(&net, &arms);
    Ok(PathSet {
        paths: arms.iter().map(|a| Path::new(net.expand(a))).collect(),
        backbone,
    })
}

/// Serial combination: backbone with backbone first, then every other path
/// of `p1` followed by the backbone of `p2`, then the backbone of `p1`
/// followed by every other path of `p2`.
pub fn combine_paths(cfg: &Cfg, p1: &PathSet, p2: &PathSet) -> Result<PathSet> {
    let last = p1
        .paths
        .iter()
        .filter_map(|p| p.edges.last())
        .map(|&e| cfg.edge(e).to);
    let first = p2
        .paths
        .iter()
        .filter_map(|p| p.edges.first())
        .map(|&e| cfg.edge(e).from);
    let mut joints = last.chain(first);
    if let Some(j) = joints.next() {
        if joints.any(|x| x != j) {
            return Err(Error::Contract("path sets do not meet at one node".into()));
        }
    }
    let (paths, backbone) = combine(&p1.paths, p1.backbone, &p2.paths, p2.backbone, |a, b| {
        a.concat(b)
    });
    Ok(PathSet { paths, backbone })
}

fn combine<T>(
    p1: &[T],
    b1: usize,
    p2: &[T],
    b2: usize,
    cat: impl Fn(&T, &T) -> T,
) -> (Vec<T>, usize) {
    let mut out = Vec::with_capacity(p1.len() + p2.len() - 1);
    out.push(cat(&p1[b1], &p2[b2]));
    for (i, a) in p1.iter().enumerate() {
        if i != b1 {
            out.push(cat(a, &p2[b2]));
        }
    }
    for (j, a) in p2.iter().enumerate() {
        if j != b2 {
            out.push(cat(&p1[b1], a));
        }
    }
    (out, 0)
}

/// Basis of independent begin-end paths, backbone first, then ordered by
/// where each path leaves the backbone.
pub fn compute_paths(cfg: &Cfg) -> Result<PathSet> {
    let (b, t) = cfg.terminals()?;
    let rs = crate::cfg::reach_sets(cfg)?;
    if !rs.forward[t.0] {
        return Err(Error::NoPath);
    }
    if let Some(u) = (0..cfg.node_count()).find(|&u| !(rs.forward[u] && rs.backward[u])) {
        return Err(Error::Contract(format!(
            "node `{}` is not on any begin-end path; run purify first",
            cfg.node_name(crate::cfg::NodeId(u))
        )));
    }
    let net = Net::from_cfg(cfg, b.0, t.0);
    let level = Level::analyze(&net)?;
    let solved = solve_level(&net, &level)?;
    let region = edge_regions(&net, &level);
    let bb = solved.paths[solved.backbone].clone();
    let mut rest: Vec<(RegionKey, EdgeId, Path)> = solved
        .paths
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| i != solved.backbone)
        .map(|(_, p)| {
            let k = p
                .edges
                .iter()
                .zip(&bb.edges)
                .take_while(|(x, y)| x == y)
                .count();
            let first = p.edges.get(k).copied().unwrap_or(EdgeId(usize::MAX));
            let r = region.get(first.0).copied().unwrap_or((usize::MAX, 0, 0));
            (r, first, p)
        })
        .collect();
    rest.sort_by(|x, y| (x.0, x.1, &x.2.edges).cmp(&(y.0, y.1, &y.2.edges)));
    let mut paths = vec![bb];
    paths.extend(rest.into_iter().map(|(_, _, p)| p));
    Ok(PathSet { paths, backbone: 0 })
}

/// (cut or block index, 0 for a cut-hosted loop / 1 for a block, loop index)
type RegionKey = (usize, usize, usize);

fn edge_regions(net: &Net, level: &Level) -> Vec<RegionKey> {
    let mut region = vec![(usize::MAX, 0, 0); net.arcs.len()];
    for arc in &level.g0.arcs {
        region[arc.id.0] = (level.chain.segment_of(arc.from), 1, 0);
    }
    for i in 0..level.outer.len() {
        let lp = level.outer_loop(i);
        let h = lp.header;
        let key = match level.chain.cuts.iter().position(|&c| c == h) {
            Some(j) => (j, 0, i),
            None => (level.chain.segment_of(h), 1, 0),
        };
        for a in lp.internal_arcs(net) {
            region[net.arcs[a].id.0] = key;
        }
    }
    region
}

pub(crate) struct Solved {
    pub paths: Vec<Path>,
    pub backbone: usize,
}

pub(crate) fn solve(net: &Net) -> Result<Solved> {
    let level = Level::analyze(net)?;
    solve_level(net, &level)
}

fn solve_level(net: &Net, level: &Level) -> Result<Solved> {
    let g0 = &level.g0;
    let all: Vec<usize> = (0..g0.arcs.len()).collect();
    let dag = solve_dag(g0, &all, g0.begin, g0.end)?;
    let bb_arcs = dag.0[dag.1].clone();
    let mut paths: Vec<Path> = dag.0.iter().map(|p| Path::new(g0.expand(p))).collect();
    for i in 0..level.outer.len() {
        let lp = level.outer_loop(i);
        let stem = level.stem(i, &bb_arcs)?;
        let (stem_edges, at) = level.expand_with_anchor(&stem, lp.header);
        let inner = solve(&split_header(net, lp))?;
        for p in &inner.paths {
            paths.push(splice(&stem_edges, at, p));
        }
    }
    debug_assert_eq!(
        paths.len() as i64,
        net.arcs.len() as i64 - net.live_nodes().iter().filter(|&&l| l).count() as i64 + 2
    );
    Ok(Solved {
        paths,
        backbone: dag.1,
    })
}

fn splice(stem: &[EdgeId], at: usize, p: &Path) -> Path {
    let mut edges = stem[..at].to_vec();
    edges.extend_from_slice(&p.edges);
    edges.extend_from_slice(&stem[at..]);
    let mut loops = vec![LoopSpan {
        start: at,
        end: at + p.edges.len(),
    }];
    loops.extend(p.loops.iter().map(|s| LoopSpan {
        start: s.start + at,
        end: s.end + at,
    }));
    Path { edges, loops }
}

type ArcPaths = (Vec<Vec<usize>>, usize);

fn key(net: &Net, p: &[usize]) -> (usize, Vec<EdgeId>) {
    (net.weight_of(p), net.expand(p))
}

fn min_index(net: &Net, paths: &[Vec<usize>]) -> usize {
    (0..paths.len())
        .min_by_key(|&i| key(net, &paths[i]))
        .expect("non-empty path set")
}

/// Paths over the acyclic arc set `arcs` from `b` to `t`.
fn solve_dag(net: &Net, arcs: &[usize], b: usize, t: usize) -> Result<ArcPaths> {
    if arcs.len() == 1 {
        return Ok((vec![arcs.to_vec()], 0));
    }
    let chain = Chain::of(net, arcs, b, t);
    let mut acc: Option<ArcPaths> = None;
    for (k, block) in chain.blocks.iter().enumerate() {
        let (c0, c1) = (chain.cuts[k], chain.cuts[k + 1]);
        let here = if chain.blocks.len() == 1 {
            solve_block(net, block, c0, c1)?
        } else {
            solve_dag(net, block, c0, c1)?
        };
        acc = Some(match acc {
            None => here,
            Some((p1, b1)) => combine(&p1, b1, &here.0, here.1, |x, y| {
                let mut v = x.clone();
                v.extend_from_slice(y);
                v
            }),
        });
    }
    acc.ok_or(Error::NoPath)
}

/// A block with no interior cut vertex.
fn solve_block(net: &Net, arcs: &[usize], b: usize, t: usize) -> Result<ArcPaths> {
    let parts = parallel_parts(net, arcs, b, t);
    let arms: Option<Vec<Vec<usize>>> = parts.iter().map(|p| arm(net, p, b, t)).collect();
    if let Some(arms) = arms {
        let bb = min_index(net, &arms);
        return Ok((arms, bb));
    }
    if parts.len() > 1 {
        let mut all = Vec::new();
        let mut bbs = Vec::new();
        for p in &parts {
            let (paths, bb) = solve_dag(net, p, b, t)?;
            bbs.push(all.len() + bb);
            all.extend(paths);
        }
        let bb = bbs
            .into_iter()
            .min_by_key(|&i| key(net, &all[i]))
            .expect("at least one part");
        return Ok((all, bb));
    }
    ears(net, arcs, b, t)
}

/// The arcs of `part` as a single b-to-t walk, if they form one.
fn arm(net: &Net, part: &[usize], b: usize, t: usize) -> Option<Vec<usize>> {
    let mut seq = Vec::with_capacity(part.len());
    let mut at = b;
    while at != t {
        let mut next = part.iter().copied().filter(|&a| net.arcs[a].from == at);
        let a = next.next()?;
        if next.next().is_some() {
            return None;
        }
        seq.push(a);
        at = net.arcs[a].to;
        if seq.len() > part.len() {
            return None;
        }
    }
    (seq.len() == part.len()).then_some(seq)
}

/// Ear decomposition of a block that is neither serial nor parallel: start
/// from its backbone and add, for the smallest uncovered arc leaving the
/// covered subgraph, the walk that runs through new ground back into it.
fn ears(net: &Net, arcs: &[usize], b: usize, t: usize) -> Result<ArcPaths> {
    let mut in_block = vec![false; net.arcs.len()];
    for &a in arcs {
        in_block[a] = true;
    }
    let bb = net.shortest(b, t, |a| in_block[a]).ok_or(Error::NoPath)?;
    let mut h_arc = vec![false; net.arcs.len()];
    let mut h_node = vec![false; net.n];
    h_node[b] = true;
    for &a in &bb {
        h_arc[a] = true;
        h_node[net.arcs[a].to] = true;
    }
    let mut order = arcs.to_vec();
    order.sort_by_key(|&a| net.arcs[a].id);
    let outs = net.out_arcs();
    let mut paths = vec![bb];
    while let Some(a) = order
        .iter()
        .copied()
        .find(|&a| !h_arc[a] && h_node[net.arcs[a].from])
    {
        let u = net.arcs[a].from;
        let mut ear = vec![a];
        let w = net.arcs[a].to;
        if !h_node[w] {
            ear.extend(reach_covered(net, &outs, &in_block, &h_node, w).ok_or(Error::NoPath)?);
        }
        let y = net.arcs[*ear.last().unwrap()].to;
        let pre = net.shortest(b, u, |x| h_arc[x]).ok_or(Error::NoPath)?;
        let post = net.shortest(y, t, |x| h_arc[x]).ok_or(Error::NoPath)?;
        for &x in &ear {
            h_arc[x] = true;
            h_node[net.arcs[x].to] = true;
        }
        let mut p = pre;
        p.extend(ear);
        p.extend(post);
        paths.push(p);
    }
    if let Some(&a) = arcs.iter().find(|&&a| !h_arc[a]) {
        return Err(Error::Contract(format!(
            "edge {} left uncovered",
            net.arcs[a].id
        )));
    }
    Ok((paths, 0))
}

/// Fewest-arc walk from `w` through uncovered nodes to the covered subgraph.
fn reach_covered(
    net: &Net,
    outs: &[Vec<usize>],
    in_block: &[bool],
    h_node: &[bool],
    w: usize,
) -> Option<Vec<usize>> {
    let mut via = vec![usize::MAX; net.n];
    let mut seen = vec![false; net.n];
    seen[w] = true;
    let mut queue = std::collections::VecDeque::from([w]);
    while let Some(u) = queue.pop_front() {
        let mut sorted: Vec<usize> = outs[u].iter().copied().filter(|&a| in_block[a]).collect();
        sorted.sort_by_key(|&a| net.arcs[a].id);
        for a in sorted {
            let x = net.arcs[a].to;
            if seen[x] {
                continue;
            }
            seen[x] = true;
            via[x] = a;
            if h_node[x] {
                let mut walk = vec![a];
                let mut at = net.arcs[a].from;
                while at != w {
                    let p = via[at];
                    walk.push(p);
                    at = net.arcs[p].from;
                }
                walk.reverse();
                return Some(walk);
            }
            queue.push_back(x);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfg::NodeKind;

    fn graph(names: &[&str], edges: &[(&str, &str, &str)]) -> Cfg {
        let mut g = Cfg::new("t");
        for (i, n) in names.iter().enumerate() {
            let kind = if i == 0 {
                NodeKind::Begin
            } else if i == names.len() - 1 {
                NodeKind::End
            } else {
                NodeKind::Action
            };
            g.add_node(*n, kind).unwrap();
        }
        for (f, t, l) in edges {
            let (f, t) = (g.find(f).unwrap(), g.find(t).unwrap());
            g.add_edge(f, t, Some(l.to_string())).unwrap();
        }
        g.set_begin(g.find(names[0]).unwrap());
        g.set_end(g.find(names[names.len() - 1]).unwrap());
        g
    }

    fn labels(g: &Cfg, p: &Path) -> String {
        p.edges.iter().map(|&e| g.edge_token(e)).collect()
    }

    #[test]
    fn while_loop_has_two_paths() {
        let g = graph(
            &["b", "c", "s", "e"],
            &[
                ("b", "c", "x"),
                ("c", "e", "y"),
                ("c", "s", "z"),
                ("s", "c", "w"),
            ],
        );
        let ps = compute_paths(&g).unwrap();
        let got: Vec<String> = ps.paths.iter().map(|p| labels(&g, p)).collect();
        assert_eq!(got, vec!["xy", "xzwy"]);
        assert_eq!(ps.paths[1].loops, vec![LoopSpan { start: 1, end: 3 }]);
    }

    #[test]
    fn prime_block_uses_ears() {
        // Wheatstone bridge: s->a, s->b, a->b, a->t, b->t
        let g = graph(
            &["s", "a", "b", "t"],
            &[
                ("s", "a", "p"),
                ("s", "b", "q"),
                ("a", "b", "r"),
                ("a", "t", "u"),
                ("b", "t", "v"),
            ],
        );
        let ps = compute_paths(&g).unwrap();
        assert_eq!(ps.len(), 3);
        for p in &ps.paths {
            p.validate(&g).unwrap();
        }
    }

    #[test]
    fn combine_rejects_mismatched_sets() {
        let g = graph(&["s", "a", "t"], &[("s", "a", "x"), ("a", "t", "y")]);
        let p = PathSet {
            paths: vec![Path::new(vec![EdgeId(1)])],
            backbone: 0,
        };
        assert!(combine_paths(&g, &p, &p).is_err());
    }
}
