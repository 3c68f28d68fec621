use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cfg::{Cfg, NodeId, NodeKind};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: String,
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfgDocument {
    #[serde(default)]
    pub name: String,
    pub begin: String,
    pub end: String,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
}

impl CfgDocument {
    pub fn from_cfg(cfg: &Cfg) -> Self {
        let name = |n: Option<NodeId>| n.map(|n| cfg.node_name(n).to_string()).unwrap_or_default();
        CfgDocument {
            name: cfg.name().to_string(),
            begin: name(cfg.begin()),
            end: name(cfg.end()),
            nodes: cfg
                .nodes()
                .iter()
                .map(|n| NodeDoc {
                    id: n.name.clone(),
                    kind: n.kind,
                    span: n.span,
                })
                .collect(),
            edges: cfg
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    from: cfg.node_name(e.from).to_string(),
                    to: cfg.node_name(e.to).to_string(),
                    label: e.label.clone(),
                })
                .collect(),
        }
    }

    pub fn to_cfg(&self) -> Result<Cfg> {
        let mut g = Cfg::new(self.name.clone());
        let mut ids = HashMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let id = g
                .add_node(n.id.clone(), n.kind)
                .map_err(|e| Error::parse(format!("nodes[{i}]"), e.to_string()))?;
            g.set_span(id, n.span);
            ids.insert(n.id.as_str(), id);
        }
        let lookup = |name: &str, at: String| {
            ids.get(name)
                .copied()
                .ok_or_else(|| Error::parse(at, format!("unknown node \"{name}\"")))
        };
        for (i, e) in self.edges.iter().enumerate() {
            let from = lookup(&e.from, format!("edges[{i}].from"))?;
            let to = lookup(&e.to, format!("edges[{i}].to"))?;
            g.add_edge(from, to, e.label.clone())?;
        }
        g.set_begin(lookup(&self.begin, "begin".into())?);
        g.set_end(lookup(&self.end, "end".into())?);
        Ok(g)
    }
}

pub fn parse_json_cfg(text: &str) -> Result<Cfg> {
    let doc: CfgDocument = serde_json::from_str(text).map_err(|e| {
        Error::parse(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    doc.to_cfg()
}

pub fn to_json_cfg(cfg: &Cfg) -> String {
    serde_json::to_string_pretty(&CfgDocument::from_cfg(cfg)).expect("document serializes")
}
