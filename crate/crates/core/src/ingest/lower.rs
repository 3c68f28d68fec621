//! Lowering of the mini language to a graph.
//!
//! Out-edges are created open and closed when the next node appears. Loop
//! conditions emit their exit edge before their body edge; back edges are
//! closed last. A goto adds no node: it redirects the open edges to its label.

use std::collections::{HashMap, HashSet};

use super::minilang::{MiniAst, Stmt};
use crate::cfg::{Cfg, NodeId, NodeKind};
use crate::error::{Error, Result};

enum LabelState {
    /// Declared; resolves to the next node created.
    Open,
    Resolved(usize),
    /// Not declared yet; these edges wait for it.
    Waiting(Vec<usize>),
}

#[derive(Default)]
struct Lowerer {
    nodes: Vec<(String, NodeKind, usize)>,
    edges: Vec<(usize, Option<usize>)>,
    pending: Vec<usize>,
    labels: HashMap<String, LabelState>,
}

impl Lowerer {
    fn node(&mut self, name: &str, kind: NodeKind, line: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push((name.to_string(), kind, line));
        self.join_to(id);
        id
    }

    /// Closes every open edge and open label at `target`.
    fn join_to(&mut self, target: usize) {
        for e in self.pending.drain(..) {
            self.edges[e].1 = Some(target);
        }
        for state in self.labels.values_mut() {
            if matches!(state, LabelState::Open) {
                *state = LabelState::Resolved(target);
            }
        }
    }

    fn edge(&mut self, from: usize) -> usize {
        self.edges.push((from, None));
        self.edges.len() - 1
    }

    fn stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Stmt { text, line } => {
                let n = self.node(text, NodeKind::Action, *line);
                let e = self.edge(n);
                self.pending = vec![e];
            }
            Stmt::Seq(items) => {
                for i in items {
                    self.stmt(i);
                }
            }
            Stmt::If {
                cond,
                then,
                els,
                line,
            } => {
                let d = self.node(cond, NodeKind::Decision, *line);
                let t = self.edge(d);
                let f = self.edge(d);
                self.pending = vec![t];
                self.stmt(then);
                let after_then = std::mem::take(&mut self.pending);
                self.pending = vec![f];
                if let Some(e) = els {
                    self.stmt(e);
                }
                let mut merged = after_then;
                merged.append(&mut self.pending);
                self.pending = merged;
            }
            Stmt::While { cond, body, line } => {
                let c = self.node(cond, NodeKind::Decision, *line);
                self.loop_body(c, body, None);
            }
            Stmt::For {
                init,
                cond,
                step,
                body,
                line,
            } => {
                if !init.is_empty() {
                    let n = self.node(init, NodeKind::Action, *line);
                    let e = self.edge(n);
                    self.pending = vec![e];
                }
                let cond = if cond.is_empty() { "true" } else { cond };
                let c = self.node(cond, NodeKind::Decision, *line);
                let step = (!step.is_empty()).then_some((step.as_str(), *line));
                self.loop_body(c, body, step);
            }
            Stmt::DoWhile { body, cond, line } => {
                let top = self.nodes.len();
                self.stmt(body);
                let c = self.node(cond, NodeKind::Decision, *line);
                let exit = self.edge(c);
                let back = self.edge(c);
                let target = if top < c { top } else { c };
                self.edges[back].1 = Some(target);
                self.pending = vec![exit];
            }
            Stmt::Label { name, .. } => match self.labels.remove(name) {
                Some(LabelState::Waiting(mut list)) => {
                    self.pending.append(&mut list);
                    self.labels.insert(name.clone(), LabelState::Open);
                }
                _ => {
                    self.labels.insert(name.clone(), LabelState::Open);
                }
            },
            Stmt::Goto { name, .. } => match self.labels.get_mut(name) {
                Some(LabelState::Resolved(n)) => {
                    let n = *n;
                    for e in self.pending.drain(..) {
                        self.edges[e].1 = Some(n);
                    }
                }
                Some(LabelState::Waiting(list)) => list.append(&mut self.pending),
                Some(LabelState::Open) => {}
                None => {
                    let list = std::mem::take(&mut self.pending);
                    self.labels.insert(name.clone(), LabelState::Waiting(list));
                }
            },
        }
    }

    /// Condition node `c` already created: exit edge, body edge, body, step,
    /// back edge.
    fn loop_body(&mut self, c: usize, body: &Stmt, step: Option<(&str, usize)>) {
        let exit = self.edge(c);
        let into = self.edge(c);
        self.pending = vec![into];
        self.stmt(body);
        if let Some((text, line)) = step {
            let s = self.node(text, NodeKind::Action, line);
            let e = self.edge(s);
            self.pending = vec![e];
        }
        self.join_to(c);
        self.pending = vec![exit];
    }
}

pub fn lower_ast(ast: &MiniAst) -> Result<Cfg> {
    let mut l = Lowerer::default();
    let b = l.node("begin", NodeKind::Begin, 0);
    let e = l.edge(b);
    l.pending = vec![e];
    l.stmt(&ast.body);
    let end = l.node("end", NodeKind::End, 0);
    let mut g = Cfg::new("");
    let mut used: HashSet<String> = ["begin".to_string(), "end".to_string()].into();
    for (i, (name, kind, line)) in l.nodes.iter().enumerate() {
        let unique = if i == b || i == end {
            name.clone()
        } else {
            let mut k = 1;
            let mut cand = name.clone();
            while used.contains(&cand) {
                k += 1;
                cand = format!("{name}#{k}");
            }
            used.insert(cand.clone());
            cand
        };
        let id = g.add_node(unique, *kind)?;
        if *line > 0 {
            g.set_span(id, Some((*line, *line)));
        }
    }
    for (from, to) in &l.edges {
        let to = to.ok_or_else(|| Error::Contract("edge left open after lowering".into()))?;
        g.add_edge(NodeId(*from), NodeId(to), None)?;
    }
    g.set_begin(NodeId(b));
    g.set_end(NodeId(end));
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::minilang::parse_minilang;

    fn lower(src: &str) -> Cfg {
        lower_ast(&parse_minilang(src).unwrap()).unwrap()
    }

    fn shape(g: &Cfg) -> (usize, usize) {
        (g.edge_count(), g.node_count())
    }

    #[test]
    fn diamond() {
        let g = lower("if (c) {s1;} else {s2;}");
        assert_eq!(shape(&g), (5, 5));
        assert!(g.out_degrees().iter().filter(|&&d| d == 2).count() == 1);
    }

    #[test]
    fn do_while_back_edge_targets_body() {
        let g = lower("do {s1;} while(c);");
        // begin -> s1 -> c -> end, c -> s1
        assert_eq!(shape(&g), (4, 4));
        let back = g.edge(crate::cfg::EdgeId(3));
        assert_eq!(g.node_name(back.to), "s1");
    }

    #[test]
    fn forward_goto_skips_code() {
        let g = lower("s1; goto L; s2; L: s3;");
        let s2 = g.find("s2").unwrap();
        assert_eq!(g.in_degrees()[s2.0], 0);
        let s1 = g.find("s1").unwrap();
        let out = &g.successors()[s1.0];
        assert_eq!(g.node_name(g.edge(out[0]).to), "s3");
    }

    #[test]
    fn backward_goto_is_back_edge() {
        let g = lower("L: s1; if (c) { goto L; }");
        let s1 = g.find("s1").unwrap();
        assert_eq!(g.in_degrees()[s1.0], 2);
    }

    #[test]
    fn duplicate_statements_get_suffixes() {
        let g = lower("x; x;");
        assert!(g.find("x").is_some());
        assert!(g.find("x#2").is_some());
    }

    #[test]
    fn empty_while_is_self_loop() {
        let g = lower("while (c) {}");
        let c = g.find("c").unwrap();
        assert!(g.edges().iter().any(|e| e.from == c && e.to == c));
    }
}
