//! A small subset of Graphviz DOT: one `digraph`, node and edge statements,
//! `kind` and `label` attributes. Everything structural beyond that is
//! rejected rather than guessed.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cfg::{Cfg, EdgeId, NodeId, NodeKind};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Id(String),
    Arrow,
    Undirected,
    Punct(char),
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.char_indices().peekable(),
            src,
            line: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next().map(|(_, c)| c)?;
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let line = self.line;
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '#' => self.skip_line(),
                '/' if self.peek2() == Some('/') => self.skip_line(),
                '/' if self.peek2() == Some('*') => {
                    self.bump();
                    self.bump();
                    let mut prev = ' ';
                    loop {
                        match self.bump() {
                            Some('/') if prev == '*' => break,
                            Some(c) => prev = c,
                            None => {
                                return Err(Error::parse(
                                    format!("line {line}"),
                                    "unterminated comment",
                                ))
                            }
                        }
                    }
                }
                '-' if self.peek2() == Some('>') => {
                    self.bump();
                    self.bump();
                    out.push((Tok::Arrow, line));
                }
                '-' if self.peek2() == Some('-') => {
                    self.bump();
                    self.bump();
                    out.push((Tok::Undirected, line));
                }
                '"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some('"') => break,
                            Some('\\') => match self.bump() {
                                Some('"') => s.push('"'),
                                Some('\\') => s.push('\\'),
                                Some('n') => s.push('\n'),
                                Some(c) => {
                                    s.push('\\');
                                    s.push(c);
                                }
                                None => break,
                            },
                            Some(c) => s.push(c),
                            None => {
                                return Err(Error::parse(
                                    format!("line {line}"),
                                    "unterminated string",
                                ))
                            }
                        }
                    }
                    out.push((Tok::Id(s), line));
                }
                '{' | '}' | '[' | ']' | ';' | ',' | '=' | ':' => {
                    self.bump();
                    out.push((Tok::Punct(c), line));
                }
                c if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' => {
                    let start = self.chars.peek().unwrap().0;
                    let mut end = start;
                    while let Some(&(i, c)) = self.chars.peek() {
                        if c.is_alphanumeric()
                            || c == '_'
                            || c == '.'
                            || (c == '-' && self.peek2() != Some('>') && self.peek2() != Some('-'))
                        {
                            end = i + c.len_utf8();
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    out.push((Tok::Id(self.src[start..end].to_string()), line));
                }
                '<' => return Err(Error::Unsupported(format!("HTML string at line {line}"))),
                other => {
                    return Err(Error::parse(
                        format!("line {line}"),
                        format!("unexpected character `{other}`"),
                    ))
                }
            }
        }
        Ok(out)
    }

    fn skip_line(&mut self) {
        while let Some(c) = self.bump() {
            if c == '\n' {
                break;
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> String {
        let l = self
            .toks
            .get(self.pos)
            .or(self.toks.last())
            .map(|(_, l)| *l)
            .unwrap_or(1);
        format!("line {l}")
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.next() {
            Some(Tok::Punct(p)) if p == c => Ok(()),
            other => {
                self.pos -= 1;
                Err(Error::parse(
                    self.line(),
                    format!("expected `{c}`, found {other:?}"),
                ))
            }
        }
    }

    fn id(&mut self) -> Result<String> {
        match self.next() {
            Some(Tok::Id(s)) => Ok(s),
            other => {
                self.pos -= 1;
                Err(Error::parse(
                    self.line(),
                    format!("expected identifier, found {other:?}"),
                ))
            }
        }
    }

    fn attrs(&mut self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        while self.peek() == Some(&Tok::Punct('[')) {
            self.next();
            loop {
                match self.peek() {
                    Some(Tok::Punct(']')) => {
                        self.next();
                        break;
                    }
                    Some(Tok::Punct(';' | ',')) => {
                        self.next();
                    }
                    _ => {
                        let k = self.id()?;
                        self.expect('=')?;
                        let v = self.id()?;
                        out.push((k, v));
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Default)]
struct Builder {
    order: Vec<String>,
    index: HashMap<String, usize>,
    kinds: Vec<Option<NodeKind>>,
    edges: Vec<(usize, usize, Option<String>)>,
}

impl Builder {
    fn node(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.order.push(name.to_string());
        self.kinds.push(None);
        self.index.insert(name.to_string(), self.order.len() - 1);
        self.order.len() - 1
    }
}

pub fn parse_dot_cfg(text: &str) -> Result<Cfg> {
    let mut p = Parser {
        toks: Lexer::new(text).tokens()?,
        pos: 0,
    };
    if matches!(p.peek(), Some(Tok::Id(s)) if s.eq_ignore_ascii_case("strict")) {
        p.next();
    }
    match p.next() {
        Some(Tok::Id(s)) if s.eq_ignore_ascii_case("digraph") => {}
        Some(Tok::Id(s)) if s.eq_ignore_ascii_case("graph") => {
            return Err(Error::Unsupported("undirected graph".into()))
        }
        _ => return Err(Error::parse("line 1", "expected `digraph`")),
    }
    let name = match p.peek() {
        Some(Tok::Id(_)) => p.id()?,
        _ => String::new(),
    };
    p.expect('{')?;
    let mut b = Builder::default();
    loop {
        match p.peek() {
            None => return Err(Error::parse(p.line(), "missing `}`")),
            Some(Tok::Punct('}')) => {
                p.next();
                break;
            }
            Some(Tok::Punct(';' | ',')) => {
                p.next();
            }
            Some(Tok::Punct('{')) => {
                return Err(Error::Unsupported(format!(
                    "anonymous subgraph at {}",
                    p.line()
                )))
            }
            Some(Tok::Id(s)) if s.eq_ignore_ascii_case("subgraph") => {
                return Err(Error::Unsupported(format!("subgraph at {}", p.line())))
            }
            Some(Tok::Id(s))
                if ["graph", "node", "edge"]
                    .iter()
                    .any(|k| s.eq_ignore_ascii_case(k))
                    && p.toks.get(p.pos + 1).map(|t| &t.0) == Some(&Tok::Punct('[')) =>
            {
                p.next();
                p.attrs()?;
            }
            Some(Tok::Id(_)) => statement(&mut p, &mut b)?,
            Some(t) => return Err(Error::parse(p.line(), format!("unexpected {t:?}"))),
        }
    }
    if p.peek().is_some() {
        return Err(Error::parse(p.line(), "trailing input after graph"));
    }
    build(name, b)
}

fn statement(p: &mut Parser, b: &mut Builder) -> Result<()> {
    let first = p.id()?;
    match p.peek() {
        Some(Tok::Punct('=')) => {
            p.next();
            p.id()?;
            return Ok(());
        }
        Some(Tok::Punct(':')) => return Err(Error::Unsupported(format!("port at {}", p.line()))),
        _ => {}
    }
    let mut chain = vec![first];
    loop {
        match p.peek() {
            Some(Tok::Arrow) => {
                p.next();
                chain.push(p.id()?);
                if p.peek() == Some(&Tok::Punct(':')) {
                    return Err(Error::Unsupported(format!("port at {}", p.line())));
                }
            }
            Some(Tok::Undirected) => {
                return Err(Error::Unsupported(format!(
                    "undirected edge at {}",
                    p.line()
                )))
            }
            _ => break,
        }
    }
    let attrs = p.attrs()?;
    let ids: Vec<usize> = chain.iter().map(|n| b.node(n)).collect();
    if ids.len() == 1 {
        for (k, v) in attrs {
            if k == "kind" {
                let kind = NodeKind::parse(&v)
                    .ok_or_else(|| Error::parse(p.line(), format!("unknown node kind `{v}`")))?;
                b.kinds[ids[0]] = Some(kind);
            }
        }
    } else {
        let label = attrs
            .into_iter()
            .find(|(k, _)| k == "label")
            .map(|(_, v)| v);
        for w in ids.windows(2) {
            b.edges.push((w[0], w[1], label.clone()));
        }
    }
    Ok(())
}

fn build(name: String, b: Builder) -> Result<Cfg> {
    let n = b.order.len();
    let mut ind = vec![0; n];
    let mut outd = vec![0; n];
    for &(f, t, _) in &b.edges {
        outd[f] += 1;
        ind[t] += 1;
    }
    let pick = |kind: NodeKind, degree: &[usize], what: &str| -> Result<usize> {
        let tagged: Vec<usize> = (0..n).filter(|&i| b.kinds[i] == Some(kind)).collect();
        let found: Vec<usize> = if tagged.is_empty() {
            (0..n).filter(|&i| degree[i] == 0).collect()
        } else {
            tagged
        };
        match found.as_slice() {
            [one] => Ok(*one),
            [] => Err(Error::parse("graph", format!("no {what} node"))),
            many => Err(Error::parse(
                "graph",
                format!(
                    "ambiguous {what}: {}",
                    many.iter()
                        .map(|&i| b.order[i].as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            )),
        }
    };
    let begin = pick(NodeKind::Begin, &ind, "begin")?;
    let end = pick(NodeKind::End, &outd, "end")?;
    let mut g = Cfg::new(name);
    for (i, nm) in b.order.iter().enumerate() {
        let kind = b.kinds[i].unwrap_or(if i == begin {
            NodeKind::Begin
        } else if i == end {
            NodeKind::End
        } else if outd[i] >= 2 {
            NodeKind::Decision
        } else {
            NodeKind::Action
        });
        g.add_node(nm.clone(), kind)?;
    }
    for (f, t, l) in b.edges {
        g.add_edge(NodeId(f), NodeId(t), l)?;
    }
    g.set_begin(NodeId(begin));
    g.set_end(NodeId(end));
    Ok(g)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT text for `cfg`; `extra` adds attributes per edge (already formatted
/// `key=value` pairs).
pub fn write_dot_with(
    cfg: &Cfg,
    extra: impl Fn(EdgeId) -> Vec<String>,
    comments: &[String],
) -> String {
    let mut s = String::new();
    let name = if cfg.name().is_empty() {
        "cfg"
    } else {
        cfg.name()
    };
    writeln!(s, "digraph {} {{", quote(name)).unwrap();
    for c in comments {
        writeln!(s, "  // {c}").unwrap();
    }
    for n in cfg.nodes() {
        writeln!(s, "  {} [kind={}];", quote(&n.name), n.kind.as_str()).unwrap();
    }
    for id in cfg.edge_ids() {
        let e = cfg.edge(id);
        let mut attrs: Vec<String> = e
            .label
            .iter()
            .map(|l| format!("label={}", quote(l)))
            .collect();
        attrs.extend(extra(id));
        let attrs = if attrs.is_empty() {
            String::new()
        } else {
            format!(" [{}]", attrs.join(", "))
        };
        writeln!(
            s,
            "  {} -> {}{};",
            quote(cfg.node_name(e.from)),
            quote(cfg.node_name(e.to)),
            attrs
        )
        .unwrap();
    }
    s.push_str("}\n");
    s
}

pub fn write_dot(cfg: &Cfg) -> String {
    write_dot_with(cfg, |_| Vec::new(), &[])
}
