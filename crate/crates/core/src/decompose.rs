//! Loop and block decomposition of a purified graph.
//!
//! Outermost natural loops are contracted into their headers to obtain the
//! loopless part; an arc that leaves a loop from a node other than the header
//! keeps the shortest in-body route from the header as a prefix. The loopless
//! part is then cut at its articulation points into a chain of blocks, and
//! each block into edge-disjoint parallel parts.

use std::collections::HashMap;

use serde::Serialize;

use crate::basis::Path;
use crate::cfg::{Cfg, EdgeId, NodeId};
use crate::error::{Error, Result};
use crate::net::{separating_cut_vertices, topo_positions, Arc, LoopAnalysis, NaturalLoop, Net};

/// Top-level chain of a DAG view: cut vertices in order and, per block, the
/// arcs it owns.
#[derive(Clone, Debug)]
pub(crate) struct Chain {
    pub cuts: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
    pos: Vec<usize>,
}

impl Chain {
    pub fn of(net: &Net, arcs: &[usize], begin: usize, end: usize) -> Chain {
        let cuts = separating_cut_vertices(net, arcs, begin, end);
        let pos = topo_positions(net, arcs);
        let mut blocks = vec![Vec::new(); cuts.len() - 1];
        let mut chain = Chain {
            cuts,
            blocks: Vec::new(),
            pos,
        };
        for &a in arcs {
            let k = chain.segment_of(net.arcs[a].from);
            blocks[k].push(a);
        }
        chain.blocks = blocks;
        chain
    }

    /// Block whose interior (or entry cut vertex) holds `u`.
    pub fn segment_of(&self, u: usize) -> usize {
        let p = self.pos[u];
        // Last cut vertex at or before u in topological order.
        let k = self.cuts.partition_point(|&c| self.pos[c] <= p);
        k.saturating_sub(1).min(self.cuts.len() - 2)
    }

    pub fn is_cut(&self, u: usize) -> bool {
        self.cuts.contains(&u)
    }
}

/// Edge-disjoint parallel parts of a block with no interior cut vertex:
/// components of the interior after removing the two delimiting vertices;
/// each direct entry-to-exit arc is a part of its own. Ordered by smallest
/// edge id.
pub(crate) fn parallel_parts(
    net: &Net,
    arcs: &[usize],
    entry: usize,
    exit: usize,
) -> Vec<Vec<usize>> {
    let mut parent: HashMap<usize, usize> = HashMap::new();
    fn find(parent: &mut HashMap<usize, usize>, x: usize) -> usize {
        let p = *parent.entry(x).or_insert(x);
        if p == x {
            return x;
        }
        let r = find(parent, p);
        parent.insert(x, r);
        r
    }
    let interior = |u: usize| u != entry && u != exit;
    for &a in arcs {
        let arc = &net.arcs[a];
        for u in [arc.from, arc.to] {
            if interior(u) {
                find(&mut parent, u);
            }
        }
        if interior(arc.from) && interior(arc.to) {
            let (x, y) = (find(&mut parent, arc.from), find(&mut parent, arc.to));
            if x != y {
                parent.insert(x, y);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut by_root: HashMap<usize, usize> = HashMap::new();
    for &a in arcs {
        let arc = &net.arcs[a];
        let anchor = if interior(arc.from) {
            Some(arc.from)
        } else if interior(arc.to) {
            Some(arc.to)
        } else {
            None
        };
        match anchor {
            Some(u) => {
                let r = find(&mut parent, u);
                let slot = *by_root.entry(r).or_insert_with(|| {
                    groups.push((r, Vec::new()));
                    groups.len() - 1
                });
                groups[slot].1.push(a);
            }
            None => groups.push((usize::MAX, vec![a])),
        }
    }
    let mut parts: Vec<Vec<usize>> = groups.into_iter().map(|(_, g)| g).collect();
    parts.sort_by_key(|p| p.iter().map(|&a| net.arcs[a].id).min());
    parts
}

/// Per-level analysis: loops, their contraction and the top-level chain.
pub(crate) struct Level {
    pub analysis: LoopAnalysis,
    /// Outermost loops, indices into `analysis.loops`.
    pub outer: Vec<usize>,
    /// Loopless part; body nodes of contracted loops are left isolated.
    pub g0: Net,
    pub chain: Chain,
}

impl Level {
    pub fn analyze(net: &Net) -> Result<Level> {
        let analysis = LoopAnalysis::compute(net, net.begin);
        if let Some(&a) = analysis.irreducible.first() {
            return Err(Error::Irreducible(net.arcs[a].id.0));
        }
        check_flow(net)?;
        if let Some(lp) = analysis.loops.iter().find(|l| l.contains(net.end)) {
            return Err(Error::Contract(format!(
                "end node lies on the loop headed by node {}",
                lp.header
            )));
        }
        let outer = analysis.outermost();
        let loops: Vec<&NaturalLoop> = outer.iter().map(|&i| &analysis.loops[i]).collect();
        let g0 = contract(net, &loops)?;
        let all: Vec<usize> = (0..g0.arcs.len()).collect();
        let chain = Chain::of(&g0, &all, g0.begin, g0.end);
        Ok(Level {
            analysis,
            outer,
            g0,
            chain,
        })
    }

    pub fn outer_loop(&self, i: usize) -> &NaturalLoop {
        &self.analysis.loops[self.outer[i]]
    }

    /// g0 arcs of the stem used to attach outer loop `i`: the backbone when
    /// it passes the header, else the backbone outside the header's block
    /// spliced with the shortest block-internal route through the header.
    pub fn stem(&self, i: usize, backbone: &[usize]) -> Result<Vec<usize>> {
        let g0 = &self.g0;
        let h = self.outer_loop(i).header;
        if h == g0.begin || backbone.iter().any(|&a| g0.arcs[a].to == h) {
            return Ok(backbone.to_vec());
        }
        let k = self.chain.segment_of(h);
        let (entry, exit) = (self.chain.cuts[k], self.chain.cuts[k + 1]);
        let in_block: Vec<bool> = {
            let mut m = vec![false; g0.arcs.len()];
            for &a in &self.chain.blocks[k] {
                m[a] = true;
            }
            m
        };
        let unreachable = || Error::Contract(format!("loop header {h} unreachable from its stem"));
        let into = g0
            .shortest(entry, h, |a| in_block[a])
            .ok_or_else(unreachable)?;
        let out = g0
            .shortest(h, exit, |a| in_block[a])
            .ok_or_else(unreachable)?;
        let cut_at = |node: usize| -> usize {
            if node == g0.begin {
                0
            } else {
                backbone
                    .iter()
                    .position(|&a| g0.arcs[a].to == node)
                    .map(|p| p + 1)
                    .expect("cut vertex lies on the backbone")
            }
        };
        let mut stem = backbone[..cut_at(entry)].to_vec();
        stem.extend(into);
        stem.extend(out);
        stem.extend_from_slice(&backbone[cut_at(exit)..]);
        Ok(stem)
    }

    /// Expands a g0 path and reports where the walk first stands on `h`.
    pub fn expand_with_anchor(&self, arcs: &[usize], h: usize) -> (Vec<EdgeId>, usize) {
        let mut out = Vec::new();
        let mut anchor = if h == self.g0.begin { Some(0) } else { None };
        for &a in arcs {
            let arc = &self.g0.arcs[a];
            out.push_arc(arc);
            if anchor.is_none() && arc.to == h {
                anchor = Some(out.len());
            }
        }
        (out, anchor.unwrap_or(0))
    }
}

trait PushArc {
    fn push_arc(&mut self, arc: &Arc);
}

impl PushArc for Vec<EdgeId> {
    fn push_arc(&mut self, arc: &Arc) {
        arc.expand_into(self);
    }
}

/// Every live node must lie on a begin-to-end path.
fn check_flow(net: &Net) -> Result<()> {
    let live = net.live_nodes();
    let fwd = net.reachable_from(net.begin);
    if !fwd[net.end] {
        return Err(Error::NoPath);
    }
    let rev = Net {
        n: net.n,
        arcs: net
            .arcs
            .iter()
            .map(|a| Arc::new(a.id, a.to, a.from))
            .collect(),
        begin: net.end,
        end: net.begin,
    };
    let bwd = rev.reachable_from(net.end);
    for u in 0..net.n {
        if live[u] && !(fwd[u] && bwd[u]) {
            return Err(Error::Contract(format!(
                "node {u} is not on any begin-end path; run purify first"
            )));
        }
    }
    Ok(())
}

/// Contracts each (disjoint, outermost) loop into its header.
pub(crate) fn contract(net: &Net, loops: &[&NaturalLoop]) -> Result<Net> {
    let mut owner: Vec<Option<usize>> = vec![None; net.n];
    for (i, lp) in loops.iter().enumerate() {
        for (u, o) in owner.iter_mut().enumerate() {
            if lp.contains(u) {
                *o = Some(i);
            }
        }
    }
    let mut routes: HashMap<(usize, usize), Vec<EdgeId>> = HashMap::new();
    let mut arcs = Vec::with_capacity(net.arcs.len());
    for arc in &net.arcs {
        debug_assert!(arc.route.is_empty());
        let (fo, to) = (owner[arc.from], owner[arc.to]);
        if fo.is_some() && fo == to {
            continue;
        }
        if let Some(j) = to {
            if arc.to != loops[j].header {
                return Err(Error::Irreducible(arc.id.0));
            }
        }
        let mut out = Arc::new(arc.id, arc.from, arc.to);
        if let Some(i) = fo {
            let h = loops[i].header;
            out.from = h;
            if arc.from != h {
                let lp = loops[i];
                let route = match routes.get(&(i, arc.from)) {
                    Some(r) => r.clone(),
                    None => {
                        let r = net
                            .shortest(h, arc.from, |a| {
                                let x = &net.arcs[a];
                                lp.contains(x.from) && lp.contains(x.to) && x.to != h
                            })
                            .map(|p| net.expand(&p))
                            .ok_or_else(|| {
                                Error::Contract(format!("no in-loop route to node {}", arc.from))
                            })?;
                        routes.insert((i, arc.from), r.clone());
                        r
                    }
                };
                out.route = route;
            }
        }
        arcs.push(out);
    }
    Ok(Net {
        n: net.n,
        arcs,
        begin: net.begin,
        end: net.end,
    })
}

/// The loop as a standalone problem: the header is split into an entry copy
/// (begin) and an exit copy (end) that receives all back arcs.
pub(crate) fn split_header(net: &Net, lp: &NaturalLoop) -> Net {
    let h_out = net.n;
    let arcs = lp
        .internal_arcs(net)
        .into_iter()
        .map(|a| {
            let arc = &net.arcs[a];
            let to = if arc.to == lp.header { h_out } else { arc.to };
            Arc::new(arc.id, arc.from, to)
        })
        .collect();
    Net {
        n: net.n + 1,
        arcs,
        begin: lp.header,
        end: h_out,
    }
}

// ---------------------------------------------------------------------------
// Public surface over `Cfg`.

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopGraph {
    pub header: NodeId,
    pub body: Vec<NodeId>,
    pub back_edges: Vec<EdgeId>,
    pub internal_edges: Vec<EdgeId>,
    /// Loops nested directly inside this one.
    pub inner: Vec<LoopGraph>,
}

impl LoopGraph {
    /// `e - v + 1` of the loop subgraph: paths it adds to the basis.
    pub fn complexity(&self) -> i64 {
        self.internal_edges.len() as i64 - self.body.len() as i64 + 1
    }

    fn build(net: &Net, la: &LoopAnalysis, i: usize) -> LoopGraph {
        let lp = &la.loops[i];
        LoopGraph {
            header: NodeId(lp.header),
            body: (0..net.n).filter(|&u| lp.contains(u)).map(NodeId).collect(),
            back_edges: lp.back_arcs.iter().map(|&a| net.arcs[a].id).collect(),
            internal_edges: lp
                .internal_arcs(net)
                .into_iter()
                .map(|a| net.arcs[a].id)
                .collect(),
            inner: la
                .children(i)
                .into_iter()
                .map(|c| LoopGraph::build(net, la, c))
                .collect(),
        }
    }
}

fn root_net(cfg: &Cfg) -> Result<Net> {
    let (b, t) = cfg.terminals()?;
    Ok(Net::from_cfg(cfg, b.0, t.0))
}

/// Outermost natural loops (nested loops recorded inside), ordered by their
/// first back edge.
pub fn find_loops(cfg: &Cfg) -> Result<Vec<LoopGraph>> {
    let net = root_net(cfg)?;
    let la = LoopAnalysis::compute(&net, net.begin);
    if let Some(&a) = la.irreducible.first() {
        return Err(Error::Irreducible(net.arcs[a].id.0));
    }
    Ok(la
        .outermost()
        .into_iter()
        .map(|i| LoopGraph::build(&net, &la, i))
        .collect())
}

/// The loopless part as a graph of its own with provenance back to `cfg`.
#[derive(Clone, Debug)]
pub struct LooplessPart {
    pub cfg: Cfg,
    /// Original edge of each loopless edge.
    pub edge_origin: Vec<EdgeId>,
    pub node_origin: Vec<NodeId>,
    /// In-loop route walked before each loopless edge (empty for most).
    pub routes: Vec<Vec<EdgeId>>,
}

impl LooplessPart {
    fn from_net(cfg: &Cfg, g0: &Net) -> Result<LooplessPart> {
        let live = g0.live_nodes();
        let mut out = Cfg::new(cfg.name());
        let mut map = vec![None; g0.n];
        let mut node_origin = Vec::new();
        for u in (0..g0.n).filter(|&u| live[u]) {
            let node = cfg.node(NodeId(u));
            let id = out.add_node(node.name.clone(), node.kind)?;
            out.set_span(id, node.span);
            map[u] = Some(id);
            node_origin.push(NodeId(u));
        }
        let mut edge_origin = Vec::new();
        let mut routes = Vec::new();
        for arc in &g0.arcs {
            let label = cfg.edge(arc.id).label.clone();
            out.add_edge(map[arc.from].unwrap(), map[arc.to].unwrap(), label)?;
            edge_origin.push(arc.id);
            routes.push(arc.route.clone());
        }
        out.set_begin(map[g0.begin].unwrap());
        out.set_end(map[g0.end].unwrap());
        Ok(LooplessPart {
            cfg: out,
            edge_origin,
            node_origin,
            routes,
        })
    }
}

/// Contracts every outermost loop of `cfg` into its header.
pub fn loopless_part(cfg: &Cfg, loops: &[LoopGraph]) -> Result<LooplessPart> {
    let net = root_net(cfg)?;
    let natural: Vec<NaturalLoop> = loops
        .iter()
        .map(|l| {
            let mut body = vec![false; net.n];
            for n in &l.body {
                body[n.0] = true;
            }
            NaturalLoop {
                header: l.header.0,
                body,
                back_arcs: l.back_edges.iter().map(|e| e.0).collect(),
            }
        })
        .collect();
    let refs: Vec<&NaturalLoop> = natural.iter().collect();
    let g0 = contract(&net, &refs)?;
    LooplessPart::from_net(cfg, &g0)
}

/// Cut vertices of a loopless graph that every begin-end path crosses, in
/// order, with begin and end as sentinels.
pub fn find_cut_vertices(cfg: &Cfg) -> Result<Vec<NodeId>> {
    let net = root_net(cfg)?;
    let all: Vec<usize> = (0..net.arcs.len()).collect();
    Ok(separating_cut_vertices(&net, &all, net.begin, net.end)
        .into_iter()
        .map(NodeId)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub entry: NodeId,
    pub exit: NodeId,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub parts: Vec<Vec<EdgeId>>,
}

impl Block {
    /// Closed complexity of the block on its own.
    pub fn complexity(&self) -> i64 {
        self.edges.len() as i64 - self.nodes.len() as i64 + 2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockChain {
    pub cut_vertices: Vec<NodeId>,
    pub blocks: Vec<Block>,
}

fn chain_to_public(net: &Net, chain: &Chain) -> BlockChain {
    let blocks = chain
        .blocks
        .iter()
        .enumerate()
        .map(|(k, arcs)| {
            let (entry, exit) = (chain.cuts[k], chain.cuts[k + 1]);
            let mut nodes: Vec<usize> = arcs
                .iter()
                .flat_map(|&a| [net.arcs[a].from, net.arcs[a].to])
                .collect();
            nodes.sort_unstable();
            nodes.dedup();
            let parts = parallel_parts(net, arcs, entry, exit)
                .into_iter()
                .map(|p| p.into_iter().map(|a| net.arcs[a].id).collect())
                .collect();
            Block {
                entry: NodeId(entry),
                exit: NodeId(exit),
                nodes: nodes.into_iter().map(NodeId).collect(),
                edges: arcs.iter().map(|&a| net.arcs[a].id).collect(),
                parts,
            }
        })
        .collect();
    BlockChain {
        cut_vertices: chain.cuts.iter().map(|&c| NodeId(c)).collect(),
        blocks,
    }
}

/// Splits a loopless graph at its cut vertices.
pub fn split_blocks(cfg: &Cfg) -> Result<BlockChain> {
    let net = root_net(cfg)?;
    if net.topo_order().is_none() {
        return Err(Error::Contract(
            "split_blocks needs a loopless graph".into(),
        ));
    }
    let all: Vec<usize> = (0..net.arcs.len()).collect();
    let chain = Chain::of(&net, &all, net.begin, net.end);
    Ok(chain_to_public(&net, &chain))
}

/// Where a loop's paths diverge from the backbone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
pub enum Region {
    Block(usize),
    Loop(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtendedLoopGraph {
    pub loop_index: usize,
    pub header: NodeId,
    /// Begin-to-end walk through the header that carries the loop.
    pub stem: Path,
    /// Position in `stem.edges` at which the walk stands on the header.
    pub splice_at: usize,
}

/// Full decomposition of a purified graph.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub loops: Vec<LoopGraph>,
    pub loopless: LooplessPart,
    /// Chain over the loopless part, in `loopless.cfg` ids.
    pub chain: BlockChain,
    pub extended: Vec<ExtendedLoopGraph>,
    /// Region a loop's paths are accounted to: the block hosting its header,
    /// or the loop itself when the header is a cut vertex.
    pub hosts: Vec<Region>,
    /// Edge count of the analysed graph.
    pub edge_count: usize,
}

pub fn decompose(cfg: &Cfg) -> Result<Decomposition> {
    let net = root_net(cfg)?;
    let level = Level::analyze(&net)?;
    let loops: Vec<LoopGraph> = level
        .outer
        .iter()
        .map(|&i| LoopGraph::build(&net, &level.analysis, i))
        .collect();
    let loopless = LooplessPart::from_net(cfg, &level.g0)?;
    // Renumber the chain into loopless ids.
    let mut compact = HashMap::new();
    for (i, n) in loopless.node_origin.iter().enumerate() {
        compact.insert(n.0, i);
    }
    let g0_local = Net {
        n: loopless.cfg.node_count(),
        arcs: level
            .g0
            .arcs
            .iter()
            .enumerate()
            .map(|(i, a)| Arc::new(EdgeId(i), compact[&a.from], compact[&a.to]))
            .collect(),
        begin: compact[&level.g0.begin],
        end: compact[&level.g0.end],
    };
    let local_chain = Chain {
        cuts: level.chain.cuts.iter().map(|c| compact[c]).collect(),
        blocks: level.chain.blocks.clone(),
        pos: Vec::new(),
    };
    let chain = chain_to_public(&g0_local, &local_chain);

    let backbone = level
        .g0
        .shortest(level.g0.begin, level.g0.end, |_| true)
        .ok_or(Error::NoPath)?;
    let mut extended = Vec::new();
    let mut hosts = Vec::new();
    for i in 0..level.outer.len() {
        let h = level.outer_loop(i).header;
        let stem = level.stem(i, &backbone)?;
        let (edges, splice_at) = level.expand_with_anchor(&stem, h);
        extended.push(ExtendedLoopGraph {
            loop_index: i,
            header: NodeId(h),
            stem: Path::new(edges),
            splice_at,
        });
        hosts.push(if level.chain.is_cut(h) {
            Region::Loop(i)
        } else {
            Region::Block(level.chain.segment_of(h))
        });
    }
    Ok(Decomposition {
        loops,
        loopless,
        chain,
        extended,
        hosts,
        edge_count: cfg.edge_count(),
    })
}

/// Extended loop-graph of loop `index` in a decomposition.
pub fn extended_loop_graph(
    decomposition: &Decomposition,
    index: usize,
) -> Result<&ExtendedLoopGraph> {
    decomposition
        .extended
        .get(index)
        .ok_or_else(|| Error::Contract(format!("no loop with index {index}")))
}

impl Decomposition {
    pub fn loopless_complexity(&self) -> i64 {
        self.loopless.cfg.edge_count() as i64 - self.loopless.cfg.node_count() as i64 + 2
    }

    /// Block (in chain order) owning an original edge of the loopless part.
    pub fn block_of_edge(&self, e: EdgeId) -> Option<usize> {
        let local = self.loopless.edge_origin.iter().position(|&o| o == e)?;
        self.chain
            .blocks
            .iter()
            .position(|b| b.edges.contains(&EdgeId(local)))
    }

    /// Outermost loop whose internal edges include `e`.
    pub fn loop_of_edge(&self, e: EdgeId) -> Option<usize> {
        self.loops
            .iter()
            .position(|l| l.internal_edges.contains(&e))
    }

    /// JSON view in original node/edge ids.
    pub fn to_json(&self, cfg: &Cfg) -> serde_json::Value {
        let name = |n: NodeId| cfg.node_name(n).to_string();
        let lname = |n: NodeId| name(self.loopless.node_origin[n.0]);
        let orig = |e: &EdgeId| self.loopless.edge_origin[e.0].0;
        let blocks: Vec<_> = self
            .chain
            .blocks
            .iter()
            .map(|b| {
                serde_json::json!({
                    "entry": lname(b.entry),
                    "exit": lname(b.exit),
                    "nodes": b.nodes.iter().map(|&n| lname(n)).collect::<Vec<_>>(),
                    "edges": b.edges.iter().map(orig).collect::<Vec<_>>(),
                    "parts": b.parts.iter().map(|p| p.iter().map(orig).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "complexity": b.complexity(),
                })
            })
            .collect();
        let loops: Vec<_> = self
            .loops
            .iter()
            .zip(&self.extended)
            .zip(&self.hosts)
            .map(|((l, x), host)| {
                serde_json::json!({
                    "header": name(l.header),
                    "body": l.body.iter().map(|&n| name(n)).collect::<Vec<_>>(),
                    "back_edges": l.back_edges.iter().map(|e| e.0).collect::<Vec<_>>(),
                    "edges": l.internal_edges.iter().map(|e| e.0).collect::<Vec<_>>(),
                    "complexity": l.complexity(),
                    "host": host,
                    "stem": x.stem.edges.iter().map(|e| e.0).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "cut_vertices": self.chain.cut_vertices.iter().map(|&n| lname(n)).collect::<Vec<_>>(),
            "loopless": {
                "nodes": self.loopless.node_origin.iter().map(|&n| name(n)).collect::<Vec<_>>(),
                "edges": self.loopless.edge_origin.iter().map(|e| e.0).collect::<Vec<_>>(),
                "complexity": self.loopless_complexity(),
            },
            "blocks": blocks,
            "loops": loops,
        })
    }
}
