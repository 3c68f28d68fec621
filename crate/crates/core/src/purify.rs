//! Design-flaw detection and entry/exit normalization.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cfg::{reach_from, Cfg, EdgeId, NodeId, NodeKind};
use crate::error::{Error, Result};
use crate::net::{Arc, LoopAnalysis, Net};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FlawKind {
    UnreachableCode,
    DeadEnd,
    MultipleEntries,
    MultipleExits,
    HorribleLoop,
    IrreducibleLoop,
}

impl FlawKind {
    pub fn is_blocking(self) -> bool {
        !matches!(self, FlawKind::MultipleEntries | FlawKind::MultipleExits)
    }
}

impl fmt::Display for FlawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flaw {
    pub kind: FlawKind,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlawReport {
    pub flaws: Vec<Flaw>,
    pub blocking: bool,
}

impl FlawReport {
    fn new(flaws: Vec<Flaw>) -> Self {
        let blocking = flaws.iter().any(|f| f.kind.is_blocking());
        FlawReport { flaws, blocking }
    }

    pub fn is_empty(&self) -> bool {
        self.flaws.is_empty()
    }

    pub fn kinds(&self) -> Vec<FlawKind> {
        self.flaws.iter().map(|f| f.kind).collect()
    }

    /// One line per flaw, or `no flaws`.
    pub fn summary(&self) -> String {
        if self.flaws.is_empty() {
            return "no flaws".into();
        }
        self.flaws
            .iter()
            .map(|f| format!("{}: {}", f.kind, f.message))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Entry candidates: in-degree-0 nodes that are the designated begin or of
/// kind begin, plus the designated begin itself. Exits likewise.
fn entries_exits(cfg: &Cfg) -> (Vec<NodeId>, Vec<NodeId>) {
    let ind = cfg.in_degrees();
    let outd = cfg.out_degrees();
    let entries = cfg
        .node_ids()
        .filter(|&n| {
            Some(n) == cfg.begin() || (ind[n.0] == 0 && cfg.node(n).kind == NodeKind::Begin)
        })
        .collect();
    let exits = cfg
        .node_ids()
        .filter(|&n| Some(n) == cfg.end() || (outd[n.0] == 0 && cfg.node(n).kind == NodeKind::End))
        .collect();
    (entries, exits)
}

fn names(cfg: &Cfg, nodes: &[NodeId]) -> String {
    nodes
        .iter()
        .map(|&n| cfg.node_name(n))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn detect_flaws(cfg: &Cfg) -> FlawReport {
    let mut flaws = Vec::new();
    let (entries, exits) = entries_exits(cfg);
    if entries.len() > 1 {
        flaws.push(Flaw {
            kind: FlawKind::MultipleEntries,
            message: format!("{} entries: {}", entries.len(), names(cfg, &entries)),
            nodes: entries.clone(),
            edges: Vec::new(),
        });
    }
    if exits.len() > 1 {
        flaws.push(Flaw {
            kind: FlawKind::MultipleExits,
            message: format!("{} exits: {}", exits.len(), names(cfg, &exits)),
            nodes: exits.clone(),
            edges: Vec::new(),
        });
    }
    let reach = reach_from(cfg, &entries, &exits);
    let unreachable: Vec<NodeId> = cfg.node_ids().filter(|n| !reach.forward[n.0]).collect();
    if !unreachable.is_empty() {
        flaws.push(Flaw {
            kind: FlawKind::UnreachableCode,
            message: format!("never executed: {}", names(cfg, &unreachable)),
            edges: cfg
                .edge_ids()
                .filter(|&e| !reach.forward[cfg.edge(e).from.0])
                .collect(),
            nodes: unreachable,
        });
    }
    let dead: Vec<NodeId> = cfg
        .node_ids()
        .filter(|n| reach.forward[n.0] && !reach.backward[n.0])
        .collect();
    if !dead.is_empty() {
        flaws.push(Flaw {
            kind: FlawKind::DeadEnd,
            message: format!("cannot reach end: {}", names(cfg, &dead)),
            nodes: dead,
            edges: Vec::new(),
        });
    }
    if !entries.is_empty() {
        flaws.extend(loop_flaws(cfg, &entries));
    }
    FlawReport::new(flaws)
}

fn loop_flaws(cfg: &Cfg, entries: &[NodeId]) -> Vec<Flaw> {
    // A super-root in front of all entries gives one dominator tree.
    let root = cfg.node_count();
    let mut net = Net::from_cfg(cfg, root, root);
    net.n += 1;
    for &e in entries {
        net.arcs.push(Arc::new(EdgeId(usize::MAX), root, e.0));
    }
    let la = LoopAnalysis::compute(&net, root);
    let mut flaws = Vec::new();
    for &a in &la.irreducible {
        let arc = &net.arcs[a];
        flaws.push(Flaw {
            kind: FlawKind::IrreducibleLoop,
            nodes: vec![NodeId(arc.to)],
            edges: vec![arc.id],
            message: format!(
                "edge {} enters a loop at `{}`, which does not dominate `{}`",
                cfg.edge_token(arc.id),
                cfg.node_name(NodeId(arc.to)),
                cfg.node_name(NodeId(arc.from))
            ),
        });
    }
    // A back edge to an outer header that leaves from the middle of an
    // inner loop (not its header, not one of its latches).
    for outer in &la.loops {
        for &a in &outer.back_arcs {
            let u = net.arcs[a].from;
            let crossed = la.loops.iter().find(|inner| {
                inner.header != outer.header
                    && outer.contains(inner.header)
                    && inner.contains(u)
                    && u != inner.header
                    && !inner.back_arcs.iter().any(|&b| net.arcs[b].from == u)
            });
            if let Some(inner) = crossed {
                flaws.push(Flaw {
                    kind: FlawKind::HorribleLoop,
                    nodes: vec![NodeId(outer.header), NodeId(inner.header), NodeId(u)],
                    edges: vec![net.arcs[a].id],
                    message: format!(
                        "loops at `{}` and `{}` intersect: edge {} leaves the inner loop mid-body",
                        cfg.node_name(NodeId(outer.header)),
                        cfg.node_name(NodeId(inner.header)),
                        cfg.edge_token(net.arcs[a].id)
                    ),
                });
            }
        }
    }
    flaws
}

fn fresh_name(cfg: &Cfg, base: &str) -> String {
    let mut name = base.to_string();
    let mut k = 1;
    while cfg.find(&name).is_some() {
        name = format!("{base}{k}");
        k += 1;
    }
    name
}

/// Adds a synthetic begin in front of several entries and a synthetic end
/// behind several exits. Never removes nodes or edges.
pub fn normalize_entries_exits(cfg: &Cfg) -> Result<Cfg> {
    let (entries, exits) = entries_exits(cfg);
    if entries.is_empty() {
        return Err(Error::Structural("no entry node".into()));
    }
    if exits.is_empty() {
        return Err(Error::Structural("no exit node".into()));
    }
    let mut g = cfg.clone();
    let demote = |g: &mut Cfg, n: NodeId| {
        let kind = if g.out_degrees()[n.0] >= 2 {
            NodeKind::Decision
        } else {
            NodeKind::Action
        };
        g.set_kind(n, kind);
    };
    if entries.len() > 1 {
        let b = g.add_node(fresh_name(cfg, "__begin"), NodeKind::Decision)?;
        for &e in &entries {
            g.add_edge(b, e, None)?;
            demote(&mut g, e);
        }
        g.set_begin(b);
    } else if g.begin() != Some(entries[0]) {
        g.set_begin(entries[0]);
    }
    if exits.len() > 1 {
        let t = g.add_node(fresh_name(cfg, "__end"), NodeKind::End)?;
        for &x in &exits {
            g.add_edge(x, t, None)?;
            demote(&mut g, x);
        }
        g.set_end(t);
    } else if g.end() != Some(exits[0]) {
        g.set_end(exits[0]);
    }
    Ok(g)
}

#[derive(Clone, Debug)]
pub struct Purified {
    pub cfg: Cfg,
    /// Flaws left after normalization.
    pub report: FlawReport,
    /// Flaws repaired by normalization.
    pub resolved: Vec<Flaw>,
}

pub fn purify(cfg: &Cfg) -> Result<Purified> {
    let before = detect_flaws(cfg);
    let normalized = normalize_entries_exits(cfg)?;
    let report = detect_flaws(&normalized);
    let resolved = before
        .flaws
        .into_iter()
        .filter(|f| !f.kind.is_blocking())
        .collect();
    Ok(Purified {
        cfg: normalized,
        report,
        resolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(nodes: &[(&str, NodeKind)], edges: &[(&str, &str)]) -> Cfg {
        let mut g = Cfg::new("t");
        for (n, k) in nodes {
            let id = g.add_node(*n, *k).unwrap();
            match k {
                NodeKind::Begin if g.begin().is_none() => g.set_begin(id),
                NodeKind::End if g.end().is_none() => g.set_end(id),
                _ => {}
            }
        }
        for (f, t) in edges {
            g.add_edge(g.find(f).unwrap(), g.find(t).unwrap(), None)
                .unwrap();
        }
        g
    }

    use NodeKind::*;

    #[test]
    fn clean_edge_has_no_flaws() {
        let g = build(&[("s", Begin), ("t", End)], &[("s", "t")]);
        let r = detect_flaws(&g);
        assert!(r.is_empty());
        assert!(!r.blocking);
    }

    #[test]
    fn orphan_node_is_unreachable() {
        let g = build(
            &[("s", Begin), ("x", Action), ("t", End)],
            &[("s", "t"), ("x", "t")],
        );
        let r = detect_flaws(&g);
        assert_eq!(r.kinds(), vec![FlawKind::UnreachableCode]);
        assert_eq!(r.flaws[0].nodes, vec![g.find("x").unwrap()]);
        assert!(r.blocking);
    }

    #[test]
    fn self_loop_sink_is_dead_end() {
        let g = build(
            &[("s", Begin), ("d", Decision), ("x", Action), ("t", End)],
            &[("s", "d"), ("d", "t"), ("d", "x"), ("x", "x")],
        );
        assert_eq!(detect_flaws(&g).kinds(), vec![FlawKind::DeadEnd]);
    }

    #[test]
    fn normalization_is_identity_on_clean_graph() {
        let g = build(&[("s", Begin), ("t", End)], &[("s", "t")]);
        assert_eq!(normalize_entries_exits(&g).unwrap(), g);
    }

    #[test]
    fn pure_cycle_has_no_entry() {
        let mut g = build(&[("a", Action), ("b", Action)], &[("a", "b"), ("b", "a")]);
        g.set_name("cycle");
        assert!(matches!(
            normalize_entries_exits(&g),
            Err(Error::Structural(_))
        ));
    }
}
