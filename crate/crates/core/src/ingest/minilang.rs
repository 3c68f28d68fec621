//! Parser for the mini imperative language.
//!
//! ```text
//! program := stmt*
//! stmt    := TEXT ';' | 'if' '(' TEXT ')' block ('else' (block | if))?
//!          | 'while' '(' TEXT ')' block | 'do' block 'while' '(' TEXT ')' ';'
//!          | 'for' '(' TEXT ';' TEXT ';' TEXT ')' block
//!          | 'goto' ID ';' | ID ':'
//! block   := '{' stmt* '}'
//! ```
//! `//` and `/* */` comments are skipped.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Stmt {
    Stmt {
        text: String,
        line: usize,
    },
    Seq(Vec<Stmt>),
    If {
        cond: String,
        then: Box<Stmt>,
        els: Option<Box<Stmt>>,
        line: usize,
    },
    While {
        cond: String,
        body: Box<Stmt>,
        line: usize,
    },
    DoWhile {
        body: Box<Stmt>,
        cond: String,
        line: usize,
    },
    For {
        init: String,
        cond: String,
        step: String,
        body: Box<Stmt>,
        line: usize,
    },
    Label {
        name: String,
        line: usize,
    },
    Goto {
        name: String,
        line: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MiniAst {
    pub body: Stmt,
    /// Declared labels and their lines.
    pub labels: BTreeMap<String, usize>,
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    line: usize,
    col_start: usize,
}

const KEYWORDS: [&str; 6] = ["if", "else", "while", "do", "for", "goto"];

impl<'a> Parser<'a> {
    fn loc(&self) -> String {
        format!(
            "line {} column {}",
            self.line,
            self.pos - self.col_start + 1
        )
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.loc(), msg))
    }

    fn advance(&mut self) {
        if self.src[self.pos] == b'\n' {
            self.line += 1;
            self.col_start = self.pos + 1;
        }
        self.pos += 1;
    }

    fn skip(&mut self) -> Result<()> {
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() {
                self.advance();
            } else if self.src[self.pos..].starts_with(b"//") {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.advance();
                }
            } else if self.src[self.pos..].starts_with(b"/*") {
                let loc = self.loc();
                self.advance();
                self.advance();
                while !self.src[self.pos..].starts_with(b"*/") {
                    if self.pos >= self.src.len() {
                        return Err(Error::parse(loc, "unterminated comment"));
                    }
                    self.advance();
                }
                self.advance();
                self.advance();
            } else {
                break;
            }
        }
        Ok(())
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn word_at(&self, at: usize) -> &'a str {
        let mut end = at;
        while end < self.src.len()
            && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
        {
            end += 1;
        }
        if at < self.src.len() && self.src[at].is_ascii_digit() {
            return "";
        }
        &self.text[at..end]
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if self.word_at(self.pos) == kw {
            for _ in 0..kw.len() {
                self.advance();
            }
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip()?;
        if self.peek() == Some(c) {
            self.advance();
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    /// Raw text up to the matching `)`, the opening `(` already consumed.
    fn paren_text(&mut self) -> Result<String> {
        let start = self.pos;
        let mut depth = 0;
        loop {
            match self.peek() {
                None => return self.err("unclosed `(`"),
                Some(b'(') => depth += 1,
                Some(b')') if depth == 0 => break,
                Some(b')') => depth -= 1,
                Some(b'{' | b'}') => return self.err("brace inside condition"),
                _ => {}
            }
            self.advance();
        }
        let s = self.text[start..self.pos].trim().to_string();
        self.advance();
        Ok(s)
    }

    fn block(&mut self) -> Result<Stmt> {
        self.expect(b'{')?;
        let mut items = Vec::new();
        loop {
            self.skip()?;
            match self.peek() {
                Some(b'}') => {
                    self.advance();
                    return Ok(Stmt::Seq(items));
                }
                None => return self.err("missing `}`"),
                _ => items.push(self.stmt()?),
            }
        }
    }

    fn stmt(&mut self) -> Result<Stmt> {
        self.skip()?;
        let line = self.line;
        if self.keyword("if") {
            self.expect(b'(')?;
            let cond = self.paren_text()?;
            let then = Box::new(self.block()?);
            self.skip()?;
            let els = if self.keyword("else") {
                self.skip()?;
                if self.word_at(self.pos) == "if" {
                    Some(Box::new(Stmt::Seq(vec![self.stmt()?])))
                } else {
                    Some(Box::new(self.block()?))
                }
            } else {
                None
            };
            return Ok(Stmt::If {
                cond,
                then,
                els,
                line,
            });
        }
        if self.keyword("while") {
            self.expect(b'(')?;
            let cond = self.paren_text()?;
            let body = Box::new(self.block()?);
            return Ok(Stmt::While { cond, body, line });
        }
        if self.keyword("do") {
            let body = Box::new(self.block()?);
            self.skip()?;
            if !self.keyword("while") {
                return self.err("expected `while` after do block");
            }
            self.expect(b'(')?;
            let cond = self.paren_text()?;
            self.expect(b';')?;
            return Ok(Stmt::DoWhile { body, cond, line });
        }
        if self.keyword("for") {
            self.expect(b'(')?;
            let header = self.paren_text()?;
            let parts: Vec<&str> = header.split(';').map(str::trim).collect();
            if parts.len() != 3 {
                return self.err("`for` header needs three `;`-separated parts");
            }
            let body = Box::new(self.block()?);
            return Ok(Stmt::For {
                init: parts[0].to_string(),
                cond: parts[1].to_string(),
                step: parts[2].to_string(),
                body,
                line,
            });
        }
        if self.keyword("goto") {
            self.skip()?;
            let name = self.word_at(self.pos).to_string();
            if name.is_empty() {
                return self.err("expected label after `goto`");
            }
            for _ in 0..name.len() {
                self.advance();
            }
            self.expect(b';')?;
            return Ok(Stmt::Goto { name, line });
        }
        if self.word_at(self.pos) == "else" {
            return self.err("`else` without `if`");
        }
        // Label: identifier followed by a single ':'.
        let w = self.word_at(self.pos);
        if !w.is_empty() && !KEYWORDS.contains(&w) {
            let mut after = self.pos + w.len();
            while after < self.src.len()
                && self.src[after].is_ascii_whitespace()
                && self.src[after] != b'\n'
            {
                after += 1;
            }
            if self.src.get(after) == Some(&b':')
                && self.src.get(after + 1) != Some(&b':')
                && self.src.get(after + 1) != Some(&b'=')
            {
                let name = w.to_string();
                while self.pos <= after {
                    self.advance();
                }
                return Ok(Stmt::Label { name, line });
            }
        }
        let start = self.pos;
        loop {
            match self.peek() {
                None => return self.err("missing `;`"),
                Some(b';') => break,
                Some(b'{' | b'}') => return self.err("expected `;`"),
                _ => self.advance(),
            }
        }
        let text = self.text[start..self.pos].trim().to_string();
        self.advance();
        if text.is_empty() {
            return Err(Error::parse(format!("line {line}"), "empty statement"));
        }
        Ok(Stmt::Stmt { text, line })
    }
}

fn collect_labels(
    s: &Stmt,
    labels: &mut BTreeMap<String, usize>,
    gotos: &mut Vec<(String, usize)>,
) -> Result<()> {
    match s {
        Stmt::Label { name, line } => {
            if let Some(prev) = labels.insert(name.clone(), *line) {
                return Err(Error::parse(
                    format!("line {line}"),
                    format!("duplicate label `{name}` (first at line {prev})"),
                ));
            }
        }
        Stmt::Goto { name, line } => gotos.push((name.clone(), *line)),
        Stmt::Seq(items) => {
            for i in items {
                collect_labels(i, labels, gotos)?;
            }
        }
        Stmt::If { then, els, .. } => {
            collect_labels(then, labels, gotos)?;
            if let Some(e) = els {
                collect_labels(e, labels, gotos)?;
            }
        }
        Stmt::While { body, .. } | Stmt::DoWhile { body, .. } | Stmt::For { body, .. } => {
            collect_labels(body, labels, gotos)?
        }
        Stmt::Stmt { .. } => {}
    }
    Ok(())
}

pub fn parse_minilang(source: &str) -> Result<MiniAst> {
    let mut p = Parser {
        src: source.as_bytes(),
        text: source,
        pos: 0,
        line: 1,
        col_start: 0,
    };
    let mut items = Vec::new();
    loop {
        p.skip()?;
        match p.peek() {
            None => break,
            Some(b'}') => return p.err("unbalanced `}`"),
            _ => items.push(p.stmt()?),
        }
    }
    let body = Stmt::Seq(items);
    let mut labels = BTreeMap::new();
    let mut gotos = Vec::new();
    collect_labels(&body, &mut labels, &mut gotos)?;
    if let Some((name, line)) = gotos.iter().find(|(n, _)| !labels.contains_key(n)) {
        return Err(Error::parse(
            format!("line {line}"),
            format!("goto to undeclared label `{name}`"),
        ));
    }
    Ok(MiniAst { body, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(text: &str, line: usize) -> Stmt {
        Stmt::Stmt {
            text: text.into(),
            line,
        }
    }

    #[test]
    fn single_statement() {
        let ast = parse_minilang("s1;").unwrap();
        assert_eq!(ast.body, Stmt::Seq(vec![leaf("s1", 1)]));
    }

    #[test]
    fn do_while() {
        let ast = parse_minilang("do { s1; } while (c);").unwrap();
        assert_eq!(
            ast.body,
            Stmt::Seq(vec![Stmt::DoWhile {
                body: Box::new(Stmt::Seq(vec![leaf("s1", 1)])),
                cond: "c".into(),
                line: 1
            }])
        );
    }

    #[test]
    fn forward_goto_resolves() {
        let ast = parse_minilang("goto L; L: s1;").unwrap();
        assert_eq!(ast.labels.get("L"), Some(&1));
    }

    #[test]
    fn label_errors() {
        assert!(parse_minilang("L: s; L: t;")
            .unwrap_err()
            .to_string()
            .contains("duplicate"));
        assert!(parse_minilang("goto M;")
            .unwrap_err()
            .to_string()
            .contains("undeclared"));
    }

    #[test]
    fn syntax_error_has_location() {
        let err = parse_minilang("s1;\nif (c) s2;").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn else_if_and_for() {
        let ast =
            parse_minilang("if (a) { x; } else if (b) { y; }\nfor (i = 0; i < n; i++) { z; }")
                .unwrap();
        let Stmt::Seq(items) = ast.body else { panic!() };
        assert_eq!(items.len(), 2);
        assert!(
            matches!(&items[1], Stmt::For { init, step, .. } if init == "i = 0" && step == "i++")
        );
    }
}
