//! An independent checker for the restricted DOT dialect the exporter
//! emits: plain digraph, cluster subgraphs, node statements with label,
//! shape, fillcolor and style attributes, and plain edges. The checker
//! shares no code with the emitter.

mod common;

use std::collections::BTreeSet;

use casegen_core::engine::{generate, GenerateOptions};
use casegen_core::export::{export_dot, RenderStyle};

#[derive(Debug, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
    Arrow,
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                chars.next();
            }
            '{' => {
                chars.next();
                tokens.push(Tok::LBrace);
            }
            '}' => {
                chars.next();
                tokens.push(Tok::RBrace);
            }
            '[' => {
                chars.next();
                tokens.push(Tok::LBracket);
            }
            ']' => {
                chars.next();
                tokens.push(Tok::RBracket);
            }
            '=' => {
                chars.next();
                tokens.push(Tok::Eq);
            }
            ';' => {
                chars.next();
                tokens.push(Tok::Semi);
            }
            ',' => {
                chars.next();
                tokens.push(Tok::Comma);
            }
            '-' => {
                chars.next();
                match chars.next() {
                    Some('>') => tokens.push(Tok::Arrow),
                    other => return Err(format!("expected `->`, found `-{other:?}`")),
                }
            }
            '"' => {
                chars.next();
                let mut value = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some(escaped) => value.push(escaped),
                            None => return Err("unterminated escape".into()),
                        },
                        Some(other) => value.push(other),
                        None => return Err("unterminated string".into()),
                    }
                }
                tokens.push(Tok::Str(value));
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut ident = String::new();
                while let Some(&n) = chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        ident.push(n);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Tok::Ident(ident));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(tokens)
}

#[derive(Debug, Default)]
struct DotSummary {
    nodes: BTreeSet<String>,
    edges: Vec<(String, String)>,
    clusters: Vec<String>,
}

struct DotParser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl DotParser {
    fn next(&mut self) -> Result<&Tok, String> {
        let tok = self.tokens.get(self.pos).ok_or("unexpected end of input")?;
        self.pos += 1;
        Ok(tok)
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn expect_ident(&mut self, expected: &str) -> Result<(), String> {
        match self.next()? {
            Tok::Ident(word) if word == expected => Ok(()),
            other => Err(format!("expected `{expected}`, found {other:?}")),
        }
    }

    fn attr_block(&mut self) -> Result<(), String> {
        loop {
            match self.next()? {
                Tok::Ident(_) => {}
                other => return Err(format!("expected attribute name, found {other:?}")),
            }
            if !matches!(self.next()?, Tok::Eq) {
                return Err("expected `=` in attribute".into());
            }
            match self.next()? {
                Tok::Str(_) | Tok::Ident(_) => {}
                other => return Err(format!("expected attribute value, found {other:?}")),
            }
            match self.next()? {
                Tok::Comma => continue,
                Tok::RBracket => return Ok(()),
                other => return Err(format!("expected `,` or `]`, found {other:?}")),
            }
        }
    }

    fn statements(&mut self, summary: &mut DotSummary) -> Result<(), String> {
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    return Ok(());
                }
                Some(Tok::Ident(word)) if word == "subgraph" => {
                    self.pos += 1;
                    let name = match self.next()? {
                        Tok::Str(name) => name.clone(),
                        other => return Err(format!("expected subgraph name, found {other:?}")),
                    };
                    if !matches!(self.next()?, Tok::LBrace) {
                        return Err("expected `{` after subgraph name".into());
                    }
                    summary.clusters.push(name);
                    self.statements(summary)?;
                }
                Some(Tok::Ident(_)) => {
                    // bare attribute assignment: rankdir=TB; label="x";
                    self.pos += 1;
                    if !matches!(self.next()?, Tok::Eq) {
                        return Err("expected `=` in graph attribute".into());
                    }
                    match self.next()? {
                        Tok::Str(_) | Tok::Ident(_) => {}
                        other => return Err(format!("expected value, found {other:?}")),
                    }
                    if !matches!(self.next()?, Tok::Semi) {
                        return Err("expected `;` after graph attribute".into());
                    }
                }
                Some(Tok::Str(_)) => {
                    let id = match self.next()? {
                        Tok::Str(id) => id.clone(),
                        _ => unreachable!(),
                    };
                    match self.next()? {
                        Tok::LBracket => {
                            self.attr_block()?;
                            if !matches!(self.next()?, Tok::Semi) {
                                return Err("expected `;` after node statement".into());
                            }
                            if !summary.nodes.insert(id.clone()) {
                                return Err(format!("node `{id}` declared twice"));
                            }
                        }
                        Tok::Arrow => {
                            let to = match self.next()? {
                                Tok::Str(to) => to.clone(),
                                other => {
                                    return Err(format!("expected edge target, found {other:?}"))
                                }
                            };
                            if !matches!(self.next()?, Tok::Semi) {
                                return Err("expected `;` after edge".into());
                            }
                            summary.edges.push((id, to));
                        }
                        other => return Err(format!("unexpected token {other:?} after id")),
                    }
                }
                other => return Err(format!("unexpected token {other:?}")),
            }
        }
    }
}

fn check_dot(text: &str) -> Result<DotSummary, String> {
    let tokens = lex(text)?;
    let mut parser = DotParser { tokens, pos: 0 };
    parser.expect_ident("digraph")?;
    match parser.next()? {
        Tok::Ident(_) => {}
        other => return Err(format!("expected graph name, found {other:?}")),
    }
    if !matches!(parser.next()?, Tok::LBrace) {
        return Err("expected `{`".into());
    }
    let mut summary = DotSummary::default();
    parser.statements(&mut summary)?;
    if parser.pos != parser.tokens.len() {
        return Err("trailing tokens after closing brace".into());
    }
    for (from, to) in &summary.edges {
        for end in [from, to] {
            if !summary.nodes.contains(end) {
                return Err(format!("edge references undeclared node `{end}`"));
            }
        }
    }
    Ok(summary)
}

#[test]
fn emitted_dot_conforms_to_the_dialect() {
    let fx = common::load_aebs();
    let outcome = generate(
        &fx.spec,
        &fx.model,
        &fx.store,
        None,
        None,
        &GenerateOptions::default(),
    )
    .unwrap();
    let dot = export_dot(&outcome.graph, &RenderStyle::default());
    let summary = check_dot(&dot).expect("emitted DOT parses");
    assert_eq!(summary.nodes.len(), outcome.graph.len());
    assert_eq!(summary.edges.len(), outcome.graph.edge_count());
    assert_eq!(summary.clusters, vec!["cluster_mode1", "cluster_mode2"]);
}

#[test]
fn unrolled_dot_also_conforms_and_grows() {
    let fx = common::load_aebs();
    let outcome = generate(
        &fx.spec,
        &fx.model,
        &fx.store,
        None,
        None,
        &GenerateOptions::default(),
    )
    .unwrap();
    let unrolled = outcome.graph.unroll();
    let dot = export_dot(&unrolled, &RenderStyle::default());
    let summary = check_dot(&dot).expect("unrolled DOT parses");
    assert!(summary.nodes.len() > outcome.graph.len());
    assert_eq!(summary.nodes.len(), unrolled.len());
}

#[test]
fn the_checker_rejects_malformed_documents() {
    assert!(check_dot("graph g { }").is_err());
    assert!(
        check_dot("digraph g { \"a\" -> \"b\"; }").is_err(),
        "undeclared nodes"
    );
    assert!(
        check_dot("digraph g { \"a\" [label=\"x\"] }").is_err(),
        "missing semicolon"
    );
}
