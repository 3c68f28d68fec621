//! Seeded random reducible graphs for property checks.
//!
//! Two families: structured programs (random mini-language source with
//! loops and gotos, lowered) and random DAGs with back edges to dominators.
//! Candidates with blocking flaws or over the size limits are discarded.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cfg::{Cfg, NodeId, NodeKind};
use crate::ingest::{lower_ast, parse_minilang};
use crate::net::{Dominators, Net};
use crate::purify::detect_flaws;

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub max_nodes: usize,
    pub max_edges: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_nodes: 60,
            max_edges: 120,
        }
    }
}

fn accept(g: Cfg, limits: &GenConfig) -> Option<Cfg> {
    (g.node_count() <= limits.max_nodes
        && g.edge_count() <= limits.max_edges
        && !detect_flaws(&g).blocking)
        .then_some(g)
}

struct Source<'a, R: Rng> {
    rng: &'a mut R,
    budget: usize,
    labels: usize,
    conds: usize,
}

impl<R: Rng> Source<'_, R> {
    fn cond(&mut self) -> String {
        self.conds += 1;
        format!("c{}", self.conds)
    }

    fn block(&mut self, depth: usize) -> String {
        let n = self.rng.gen_range(0..=3);
        let mut out = String::new();
        for _ in 0..n {
            if self.budget == 0 {
                break;
            }
            out.push_str(&self.stmt(depth));
        }
        out
    }

    fn stmt(&mut self, depth: usize) -> String {
        self.budget = self.budget.saturating_sub(1);
        let pick = if depth >= 3 {
            0
        } else {
            self.rng.gen_range(0..9)
        };
        let id = self.budget;
        match pick {
            0 | 1 => format!("s{id}; "),
            2 => {
                let c = self.cond();
                let then = self.block(depth + 1);
                if self.rng.gen_bool(0.5) {
                    let els = self.block(depth + 1);
                    format!("if ({c}) {{ {then}}} else {{ {els}}} ")
                } else {
                    format!("if ({c}) {{ {then}}} ")
                }
            }
            3 => {
                let c = self.cond();
                format!("while ({c}) {{ {}}} ", self.block(depth + 1))
            }
            4 => {
                let c = self.cond();
                format!("do {{ s{id}; {}}} while ({c}); ", self.block(depth + 1))
            }
            5 => {
                let c = self.cond();
                format!(
                    "for (i{id} = 0; {c}; i{id}++) {{ {}}} ",
                    self.block(depth + 1)
                )
            }
            6 => {
                // Forward jump over a few statements.
                self.labels += 1;
                let l = format!("L{}", self.labels);
                let c = self.cond();
                let skipped = self.block(depth + 1);
                format!("if ({c}) {{ goto {l}; }} {skipped}{l}: ")
            }
            7 => {
                // Backward jump: a loop written with goto.
                self.labels += 1;
                let l = format!("L{}", self.labels);
                let c = self.cond();
                let body = self.block(depth + 1);
                format!("{l}: s{id}; {body}if ({c}) {{ goto {l}; }} ")
            }
            _ => format!("t{id}; "),
        }
    }
}

/// Random structured program, lowered. `None` if it was filtered out.
pub fn random_structured<R: Rng>(rng: &mut R, limits: &GenConfig) -> Option<Cfg> {
    let budget = rng.gen_range(1..=(limits.max_nodes / 3).max(1));
    let mut src = Source {
        rng,
        budget,
        labels: 0,
        conds: 0,
    };
    let mut text = String::new();
    while src.budget > 0 {
        text.push_str(&src.stmt(0));
    }
    let ast = parse_minilang(&text).expect("generated source parses");
    let mut g = lower_ast(&ast).expect("generated source lowers");
    g.set_name("structured");
    accept(g, limits)
}

/// Random DAG in which every node lies on a begin-end path, plus back edges
/// from nodes to their dominators. `None` if it was filtered out.
pub fn random_reducible<R: Rng>(rng: &mut R, limits: &GenConfig) -> Option<Cfg> {
    let n = rng.gen_range(2..=limits.max_nodes.max(2));
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 1..n {
        edges.push((rng.gen_range(0..i), i));
    }
    let mut outd = vec![0usize; n];
    for &(f, _) in &edges {
        outd[f] += 1;
    }
    for (i, &d) in outd.iter().enumerate().take(n - 1) {
        if d == 0 {
            edges.push((i, rng.gen_range(i + 1..n)));
        }
    }
    let room = limits.max_edges.saturating_sub(edges.len());
    let extra = rng.gen_range(0..=room.min(n / 2 + 1));
    for _ in 0..extra {
        let a = rng.gen_range(0..n - 1);
        let b = rng.gen_range(a + 1..n);
        edges.push((a, b));
    }
    edges.shuffle(rng);
    let mut g = Cfg::new("random");
    for i in 0..n {
        g.add_node(format!("n{i}"), NodeKind::Action).ok()?;
    }
    for &(f, t) in &edges {
        g.add_edge(NodeId(f), NodeId(t), None).ok()?;
    }
    g.set_begin(NodeId(0));
    g.set_end(NodeId(n - 1));
    let net = Net::from_cfg(&g, 0, n - 1);
    let dom = Dominators::compute(&net, 0);
    let backs = rng.gen_range(0..=3usize.min(limits.max_edges.saturating_sub(g.edge_count())));
    for _ in 0..backs {
        if n <= 2 {
            break;
        }
        let u = rng.gen_range(1..n - 1);
        let doms: Vec<usize> = (1..n - 1).filter(|&d| dom.dominates(d, u)).collect();
        let d = *doms.choose(rng)?;
        g.add_edge(NodeId(u), NodeId(d), None).ok()?;
    }
    let outd = g.out_degrees();
    for (i, &d) in outd.iter().enumerate() {
        let kind = if i == 0 {
            NodeKind::Begin
        } else if i == n - 1 {
            NodeKind::End
        } else if d >= 2 {
            NodeKind::Decision
        } else {
            NodeKind::Action
        };
        g.set_kind(NodeId(i), kind);
    }
    accept(g, limits)
}

/// First accepted graph of either family for `seed`.
pub fn random_cfg(seed: u64, limits: &GenConfig) -> Cfg {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = if rng.gen_bool(0.5) {
            random_structured(&mut rng, limits)
        } else {
            random_reducible(&mut rng, limits)
        };
        if let Some(g) = g {
            return g;
        }
    }
}

/// `count` graphs for consecutive seeds starting at `seed`.
pub fn random_suite(seed: u64, count: usize, limits: &GenConfig) -> Vec<Cfg> {
    (0..count as u64)
        .map(|i| random_cfg(seed.wrapping_add(i), limits))
        .collect()
}
