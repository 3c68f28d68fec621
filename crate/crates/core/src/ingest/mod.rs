//! Graph input: JSON documents, a DOT subset and the mini language.

mod dot;
mod json;
mod lower;
mod minilang;

use std::path::Path;

pub use dot::{parse_dot_cfg, write_dot, write_dot_with};
pub use json::{parse_json_cfg, to_json_cfg, CfgDocument, EdgeDoc, NodeDoc};
pub use lower::lower_ast;
pub use minilang::{parse_minilang, MiniAst, Stmt};

use crate::cfg::Cfg;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Mini,
}

impl Format {
    pub fn from_extension(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(Format::Json),
            "dot" | "gv" => Some(Format::Dot),
            "mini" => Some(Format::Mini),
            _ => None,
        }
    }
}

/// Parses `text` in the given format. Mini programs are lowered; the graph
/// is named `name` unless the document names itself.
pub fn load(text: &str, format: Format, name: &str) -> Result<Cfg> {
    let mut g = match format {
        Format::Json => parse_json_cfg(text)?,
        Format::Dot => parse_dot_cfg(text)?,
        Format::Mini => lower_ast(&parse_minilang(text)?)?,
    };
    if g.name().is_empty() {
        g.set_name(name);
    }
    Ok(g)
}

/// Reads a file, picking the format from its extension unless given.
pub fn load_file(path: &Path, format: Option<Format>) -> Result<Cfg> {
    let format = format
        .or_else(|| Format::from_extension(path))
        .ok_or_else(|| {
            Error::Unsupported(format!("cannot tell the format of {}", path.display()))
        })?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
    load(&text, format, stem)
}
