//! End-to-end pipeline and plan rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::basis::{compute_paths, LoopSpan, Path, PathSet};
use crate::cfg::{close_graph, cyclomatic_complexity, Cfg, EdgeId, NodeKind};
use crate::decompose::{decompose, Decomposition};
use crate::error::{Error, PipelineError, Result};
use crate::ingest::{self, write_dot_with, Format};
use crate::purify::{purify, FlawReport};
use crate::verify::{verify_basis, VerificationCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Backbone,
    Basis,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanPath {
    pub edges: Vec<usize>,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default = "basis_role")]
    pub role: Role,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loops: Vec<LoopSpan>,
    /// Action and decision nodes in visiting order.
    #[serde(default)]
    pub statements: Vec<String>,
}

fn basis_role() -> Role {
    Role::Basis
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestPlan {
    pub name: String,
    pub complexity: i64,
    pub paths: Vec<PlanPath>,
    pub verification: VerificationCertificate,
    pub flaws: FlawReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<serde_json::Value>,
}

/// Everything the pipeline produced for one graph.
#[derive(Clone, Debug)]
pub struct Analysis {
    /// The purified graph all ids refer to.
    pub cfg: Cfg,
    pub paths: PathSet,
    pub decomposition: Decomposition,
    pub plan: TestPlan,
}

pub fn run_pipeline(cfg: &Cfg) -> Result<Analysis, PipelineError> {
    let purified = purify(cfg)?;
    if purified.report.blocking {
        return Err(PipelineError::Blocked(purified.report));
    }
    let g = purified.cfg;
    let closed = close_graph(&g)?;
    let complexity = cyclomatic_complexity(&closed);
    let decomposition = decompose(&g)?;
    let paths = compute_paths(&g)?;
    let verification = verify_basis(&paths, &closed, Some(&decomposition));
    let mut flaws = purified.resolved;
    flaws.extend(purified.report.flaws);
    let plan = TestPlan {
        name: g.name().to_string(),
        complexity,
        paths: plan_paths(&g, &paths),
        verification,
        flaws: FlawReport {
            flaws,
            blocking: false,
        },
        decomposition: None,
    };
    Ok(Analysis {
        cfg: g,
        paths,
        decomposition,
        plan,
    })
}

/// Ingests `text` and runs the pipeline on it.
pub fn test_pipeline(text: &str, format: Format, name: &str) -> Result<Analysis, PipelineError> {
    let cfg = ingest::load(text, format, name)?;
    run_pipeline(&cfg)
}

pub fn plan_paths(cfg: &Cfg, paths: &PathSet) -> Vec<PlanPath> {
    paths
        .paths
        .iter()
        .enumerate()
        .map(|(i, p)| PlanPath {
            edges: p.edges.iter().map(|e| e.0).collect(),
            labels: p.edges.iter().map(|&e| cfg.edge_token(e)).collect(),
            role: if i == paths.backbone {
                Role::Backbone
            } else {
                Role::Basis
            },
            loops: p.loops.clone(),
            statements: statements(cfg, p),
        })
        .collect()
}

fn statements(cfg: &Cfg, p: &Path) -> Vec<String> {
    let mut out = Vec::new();
    let mut push = |n| {
        if matches!(cfg.node(n).kind, NodeKind::Action | NodeKind::Decision) {
            out.push(cfg.node_name(n).to_string());
        }
    };
    if let Some(&first) = p.edges.first() {
        push(cfg.edge(first).from);
    }
    for &e in &p.edges {
        push(cfg.edge(e).to);
    }
    out
}

/// Edge tokens are glued together when every edge has a one-character label.
fn concatenated(cfg: &Cfg) -> bool {
    cfg.edges().iter().all(|e| {
        e.label
            .as_ref()
            .is_some_and(|l| l.chars().count() == 1 && l != "#" && l != "(" && l != ")")
    })
}

/// A path in label notation; loop traversals are parenthesized.
pub fn path_text(cfg: &Cfg, p: &Path) -> String {
    let glue = concatenated(cfg);
    let mut out = String::new();
    for (i, &e) in p.edges.iter().enumerate() {
        if !glue && i > 0 {
            out.push(' ');
        }
        for _ in p.loops.iter().filter(|s| s.start == i) {
            out.push('(');
        }
        out.push_str(&cfg.edge_token(e));
        for _ in p.loops.iter().filter(|s| s.end == i + 1) {
            out.push(')');
        }
    }
    out
}

pub fn render_text(cfg: &Cfg, plan: &TestPlan, paths: &PathSet) -> String {
    let mut s = String::new();
    if !plan.name.is_empty() {
        writeln!(s, "# graph {}", plan.name).unwrap();
    }
    writeln!(s, "# complexity {}", plan.complexity).unwrap();
    writeln!(s, "# {}", plan.verification.summary()).unwrap();
    for p in &paths.paths {
        writeln!(s, "{}", path_text(cfg, p)).unwrap();
    }
    s
}

pub fn render_json(plan: &TestPlan) -> String {
    let mut s = serde_json::to_string_pretty(plan).expect("plan serializes");
    s.push('\n');
    s
}

/// The graph with a `paths` attribute on every edge naming the basis paths
/// through it.
pub fn render_dot(cfg: &Cfg, paths: &PathSet) -> String {
    let comments: Vec<String> = paths
        .paths
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let role = if i == paths.backbone {
                " (backbone)"
            } else {
                ""
            };
            format!("path {i}{role}: {}", path_text(cfg, p))
        })
        .collect();
    write_dot_with(
        cfg,
        |e| {
            let on: Vec<String> = paths
                .paths
                .iter()
                .enumerate()
                .filter(|(_, p)| p.edges.contains(&e))
                .map(|(i, _)| i.to_string())
                .collect();
            vec![format!("paths=\"{}\"", on.join(","))]
        },
        &comments,
    )
}

#[derive(Deserialize)]
struct PlanDoc {
    paths: Vec<PlanPath>,
}

enum Tok {
    Open,
    Close,
    Word(String),
}

/// Reads a plan: TestPlan JSON, or one path per line in label notation.
/// `#` followed by digits is an edge index; any other `#` starts a comment.
pub fn parse_plan(text: &str, cfg: &Cfg) -> Result<PathSet> {
    if text.trim_start().starts_with('{') {
        let doc: PlanDoc = serde_json::from_str(text).map_err(|e| {
            Error::parse(
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        let mut backbone = None;
        let mut paths = Vec::new();
        for (i, p) in doc.paths.into_iter().enumerate() {
            if p.role == Role::Backbone && backbone.is_none() {
                backbone = Some(i);
            }
            paths.push(Path {
                edges: p.edges.into_iter().map(EdgeId).collect(),
                loops: p.loops,
            });
        }
        let backbone = backbone.unwrap_or_else(|| shortest(&paths));
        return Ok(PathSet { paths, backbone });
    }
    let glue = concatenated(cfg);
    let (begin, _) = cfg.terminals()?;
    let outs = cfg.successors();
    let mut paths = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        let toks = tokenize(line);
        if toks.is_empty() {
            continue;
        }
        let mut edges = Vec::new();
        let mut loops = Vec::new();
        let mut open = Vec::new();
        let mut at = begin;
        let mut step = |tok: &str, edges: &mut Vec<EdgeId>| -> Result<()> {
            let e = resolve(cfg, &outs, at, tok)
                .map_err(|m| Error::parse(format!("line {}", ln + 1), m))?;
            at = cfg.edge(e).to;
            edges.push(e);
            Ok(())
        };
        for t in toks {
            match t {
                Tok::Open => open.push(edges.len()),
                Tok::Close => {
                    let start = open.pop().ok_or_else(|| {
                        Error::parse(format!("line {}", ln + 1), "unbalanced `)`")
                    })?;
                    loops.push(LoopSpan {
                        start,
                        end: edges.len(),
                    });
                }
                Tok::Word(w) if w.starts_with('#') => step(&w, &mut edges)?,
                Tok::Word(w) if glue => {
                    for c in w.chars() {
                        step(&c.to_string(), &mut edges)?;
                    }
                }
                Tok::Word(w) => step(&w, &mut edges)?,
            }
        }
        if !open.is_empty() {
            return Err(Error::parse(format!("line {}", ln + 1), "unbalanced `(`"));
        }
        loops.sort_by_key(|s| (s.start, std::cmp::Reverse(s.end)));
        paths.push(Path { edges, loops });
    }
    if paths.is_empty() {
        return Err(Error::parse("plan", "no paths"));
    }
    let backbone = shortest(&paths);
    Ok(PathSet { paths, backbone })
}

fn shortest(paths: &[Path]) -> usize {
    (0..paths.len())
        .min_by(|&a, &b| (paths[a].len(), &paths[a].edges).cmp(&(paths[b].len(), &paths[b].edges)))
        .unwrap_or(0)
}

fn strip_comment(line: &str) -> &str {
    let b = line.as_bytes();
    for (i, &c) in b.iter().enumerate() {
        if c == b'#' && !b.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
            return &line[..i];
        }
    }
    line
}

fn tokenize(line: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut Vec<Tok>| {
        if !word.is_empty() {
            out.push(Tok::Word(std::mem::take(word)));
        }
    };
    for c in line.chars() {
        match c {
            '(' | ')' => {
                flush(&mut word, &mut out);
                out.push(if c == '(' { Tok::Open } else { Tok::Close });
            }
            c if c.is_whitespace() => flush(&mut word, &mut out),
            '#' if !word.is_empty() => {
                flush(&mut word, &mut out);
                word.push(c);
            }
            c => word.push(c),
        }
    }
    flush(&mut word, &mut out);
    out
}

/// Edge named `tok` leaving `at`; falls back to any edge with that label so
/// the walk check can report where the path breaks.
fn resolve(
    cfg: &Cfg,
    outs: &[Vec<EdgeId>],
    at: crate::cfg::NodeId,
    tok: &str,
) -> Result<EdgeId, String> {
    if let Some(idx) = tok.strip_prefix('#') {
        let i: usize = idx
            .parse()
            .map_err(|_| format!("bad edge reference `{tok}`"))?;
        return if i < cfg.edge_count() {
            Ok(EdgeId(i))
        } else {
            Err(format!("edge {tok} out of range"))
        };
    }
    let label = |e: &EdgeId| cfg.edge(*e).label.as_deref() == Some(tok);
    outs[at.0]
        .iter()
        .copied()
        .find(label)
        .or_else(|| cfg.edge_ids().find(label))
        .ok_or_else(|| format!("unknown label `{tok}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_edge_refs() {
        assert_eq!(strip_comment("#3 #4 # note"), "#3 #4 ");
        assert_eq!(strip_comment("# complexity 4"), "");
        let toks = tokenize("a(bc)#2");
        assert_eq!(toks.len(), 5);
    }
}
