//! Directed multigraph model of a sequential program's control flow.
//!
//! Nodes and edges are addressed by dense positional ids. Edge order is
//! significant: it fixes the coordinate system of path vectors, so parallel
//! edges stay distinct and serialization preserves the order exactly.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Begin,
    End,
    Action,
    Decision,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Begin => "begin",
            NodeKind::End => "end",
            NodeKind::Action => "action",
            NodeKind::Decision => "decision",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "begin" => Some(NodeKind::Begin),
            "end" => Some(NodeKind::End),
            "action" => Some(NodeKind::Action),
            "decision" => Some(NodeKind::Decision),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    /// Source line range `(first, last)` when the node was lowered from code.
    pub span: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    name: String,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    begin: Option<NodeId>,
    end: Option<NodeId>,
    index: HashMap<String, NodeId>,
}

impl Cfg {
    pub fn new(name: impl Into<String>) -> Self {
        Cfg {
            name: name.into(),
            nodes: Vec::new(),
            edges: Vec::new(),
            begin: None,
            end: None,
            index: HashMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    /// Adds a node; names must be unique within the graph.
    pub fn add_node(&mut self, name: impl Into<String>, kind: NodeKind) -> Result<NodeId> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::Structural(format!("duplicate node `{name}`")));
        }
        let id = NodeId(self.nodes.len());
        self.index.insert(name.clone(), id);
        self.nodes.push(Node {
            name,
            kind,
            span: None,
        });
        Ok(id)
    }

    pub fn add_edge(&mut self, from: NodeId, to: NodeId, label: Option<String>) -> Result<EdgeId> {
        for n in [from, to] {
            if n.0 >= self.nodes.len() {
                return Err(Error::UnknownNode(n.to_string()));
            }
        }
        let id = EdgeId(self.edges.len());
        self.edges.push(Edge { from, to, label });
        Ok(id)
    }

    pub fn set_begin(&mut self, n: NodeId) {
        self.begin = Some(n);
    }

    pub fn set_end(&mut self, n: NodeId) {
        self.end = Some(n);
    }

    pub fn set_kind(&mut self, n: NodeId, kind: NodeKind) {
        self.nodes[n.0].kind = kind;
    }

    pub fn set_span(&mut self, n: NodeId, span: Option<(usize, usize)>) {
        self.nodes[n.0].span = span;
    }

    pub fn begin(&self) -> Option<NodeId> {
        self.begin
    }

    pub fn end(&self) -> Option<NodeId> {
        self.end
    }

    /// Designated begin and end, or a structural error when either is
    /// missing or they coincide.
    pub fn terminals(&self) -> Result<(NodeId, NodeId)> {
        if self.nodes.is_empty() {
            return Err(Error::Structural("graph has no nodes".into()));
        }
        let b = self
            .begin
            .ok_or_else(|| Error::Structural("no begin node designated".into()))?;
        let e = self
            .end
            .ok_or_else(|| Error::Structural("no end node designated".into()))?;
        if b == e {
            return Err(Error::Structural("begin and end are the same node".into()));
        }
        Ok((b, e))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, n: NodeId) -> &Node {
        &self.nodes[n.0]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn find(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn node_name(&self, n: NodeId) -> &str {
        &self.nodes[n.0].name
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for e in &self.edges {
            d[e.to.0] += 1;
        }
        d
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for e in &self.edges {
            d[e.from.0] += 1;
        }
        d
    }

    /// Outgoing edge ids per node, in edge order.
    pub fn successors(&self) -> Vec<Vec<EdgeId>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.from.0].push(EdgeId(i));
        }
        adj
    }

    pub fn predecessors(&self) -> Vec<Vec<EdgeId>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.to.0].push(EdgeId(i));
        }
        adj
    }

    /// Label used when rendering an edge: its own label, or `#index`.
    pub fn edge_token(&self, e: EdgeId) -> String {
        match &self.edges[e.0].label {
            Some(l) if !l.is_empty() => l.clone(),
            _ => format!("#{}", e.0),
        }
    }

    /// The subgraph spanned by `edges`, with fresh dense ids. Node names,
    /// kinds and edge labels are carried over; edge order follows `edges`.
    pub fn edge_subgraph(&self, edges: &[EdgeId], begin: NodeId, end: NodeId) -> Result<Cfg> {
        let mut sub = Cfg::new(self.name.clone());
        let mut map: HashMap<NodeId, NodeId> = HashMap::new();
        let mut intern = |sub: &mut Cfg, n: NodeId| -> Result<NodeId> {
            if let Some(&m) = map.get(&n) {
                return Ok(m);
            }
            let node = &self.nodes[n.0];
            let m = sub.add_node(node.name.clone(), node.kind)?;
            sub.set_span(m, node.span);
            map.insert(n, m);
            Ok(m)
        };
        let b = intern(&mut sub, begin)?;
        for &e in edges {
            let edge = &self.edges[e.0];
            let f = intern(&mut sub, edge.from)?;
            let t = intern(&mut sub, edge.to)?;
            sub.add_edge(f, t, edge.label.clone())?;
        }
        let t = intern(&mut sub, end)?;
        sub.set_begin(b);
        sub.set_end(t);
        Ok(sub)
    }
}

/// A graph closed by the virtual `end -> begin` edge, which is always the
/// last edge in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedCfg {
    base: Cfg,
    virtual_edge: EdgeId,
}

impl ClosedCfg {
    pub fn base(&self) -> &Cfg {
        &self.base
    }

    pub fn virtual_edge(&self) -> EdgeId {
        self.virtual_edge
    }

    /// Edge count including the virtual edge.
    pub fn edge_count(&self) -> usize {
        self.base.edge_count() + 1
    }

    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        if e == self.virtual_edge {
            let (b, t) = self.base.terminals().expect("closed graph has terminals");
            (t, b)
        } else {
            let edge = self.base.edge(e);
            (edge.from, edge.to)
        }
    }

    pub fn into_base(self) -> Cfg {
        self.base
    }
}

pub fn close_graph(cfg: &Cfg) -> Result<ClosedCfg> {
    cfg.terminals()?;
    Ok(ClosedCfg {
        virtual_edge: EdgeId(cfg.edge_count()),
        base: cfg.clone(),
    })
}

/// `(e + 1) - v + 1` over the original edge and node counts, i.e. `e - v + 2`.
///
/// Before closure a strongly connected graph would use `e - v + 1`; only the
/// closed form is exposed.
pub fn cyclomatic_complexity(closed: &ClosedCfg) -> i64 {
    let e = closed.base.edge_count() as i64;
    let v = closed.base.node_count() as i64;
    (e + 1) - v + 1
}

fn closure(n: usize, start: NodeId, adj: &[Vec<NodeId>]) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start.0] = true;
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u.0] {
            if !seen[w.0] {
                seen[w.0] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

pub fn is_strongly_connected(closed: &ClosedCfg) -> bool {
    let cfg = &closed.base;
    let Ok((b, t)) = cfg.terminals() else {
        return false;
    };
    let n = cfg.node_count();
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for e in cfg.edges() {
        fwd[e.from.0].push(e.to);
        bwd[e.to.0].push(e.from);
    }
    fwd[t.0].push(b);
    bwd[b.0].push(t);
    // One root reaching everything both ways is equivalent to all-pairs.
    closure(n, b, &fwd).iter().all(|&x| x) && closure(n, b, &bwd).iter().all(|&x| x)
}

/// Forward closure from `begin` and backward closure from `end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachSets {
    pub forward: Vec<bool>,
    pub backward: Vec<bool>,
}

impl ReachSets {
    pub fn forward_nodes(&self) -> Vec<NodeId> {
        members(&self.forward)
    }

    pub fn backward_nodes(&self) -> Vec<NodeId> {
        members(&self.backward)
    }
}

fn members(mask: &[bool]) -> Vec<NodeId> {
    mask.iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(i, _)| NodeId(i))
        .collect()
}

pub fn reach_sets(cfg: &Cfg) -> Result<ReachSets> {
    let (b, t) = cfg.terminals()?;
    Ok(reach_from(cfg, &[b], &[t]))
}

/// Reach sets from several roots at once; used when a procedure has more
/// than one entry or exit.
pub(crate) fn reach_from(cfg: &Cfg, entries: &[NodeId], exits: &[NodeId]) -> ReachSets {
    let n = cfg.node_count();
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for e in cfg.edges() {
        fwd[e.from.0].push(e.to);
        bwd[e.to.0].push(e.from);
    }
    let union = |roots: &[NodeId], adj: &[Vec<NodeId>]| {
        let mut acc = vec![false; n];
        for &r in roots {
            for (a, s) in acc.iter_mut().zip(closure(n, r, adj)) {
                *a |= s;
            }
        }
        acc
    };
    ReachSets {
        forward: union(entries, &fwd),
        backward: union(exits, &bwd),
    }
}
