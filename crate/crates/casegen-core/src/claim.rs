//! The structured certification claim: the machine-checkable root of the
//! argument.
//!
//! Claims are written in a small text grammar (see `docs/claim-grammar.ebnf`
//! in the repository root):
//!
//! ```text
//! claim "brake-safety" {
//!   statement: "The follower car keeps a safe distance from the leader";
//!   var obj: bool;
//!   var d_t: real;
//!   var d_min: real;
//!   predicate: (obj == 1) -> (d_t >= d_min);
//!   mode mode1 "Leader stationary, follower moving" active;
//!   mode mode2 "Leader moving, follower moving" active;
//!   targets: obstacle-distance, object-detection, braking-manager;
//! }
//! ```
//!
//! Parsing reports grammar errors with line and column. The first split of
//! every generated case is an OR over the active modes; the second is the
//! conjunctive split over the target components.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::ClaimError;
use crate::evidence::EvidenceStore;
use crate::ids::{ComponentId, ModeId};
use crate::model::SystemModel;

// ============================================================================
// AST
// ============================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarType {
    Real,
    Int,
    Bool,
}

impl VarType {
    fn name(self) -> &'static str {
        match self {
            VarType::Real => "real",
            VarType::Int => "int",
            VarType::Bool => "bool",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub ty: VarType,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Var(String),
    Number(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// Boolean expression over declared variables.
#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    Literal(bool),
    Compare {
        lhs: Operand,
        op: CmpOp,
        rhs: Operand,
    },
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
    Implies(Box<Predicate>, Box<Predicate>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuredClaim {
    pub id: String,
    pub statement: String,
    pub variables: Vec<VarDecl>,
    pub predicate: Predicate,
    /// Components that must jointly establish the predicate, in declaration
    /// order. [`conjunctive_split`] re-sorts lexicographically.
    pub target_components: Vec<ComponentId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatingMode {
    pub id: ModeId,
    pub description: String,
    pub active: bool,
}

/// Parsed claim document. The connective over modes is always OR.
#[derive(Debug, Clone, PartialEq)]
pub struct RootGoalSpec {
    pub claim: StructuredClaim,
    pub modes: Vec<OperatingMode>,
}

impl RootGoalSpec {
    pub fn active_modes(&self) -> Vec<&OperatingMode> {
        self.modes.iter().filter(|m| m.active).collect()
    }
}

// ============================================================================
// Lexer
// ============================================================================

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Number(f64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
    Minus,
    Arrow,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn grammar_error(line: usize, col: usize, message: impl Into<String>) -> ClaimError {
    ClaimError::Grammar {
        line,
        col,
        message: message.into(),
    }
}

fn lex(source: &str) -> Result<Vec<Token>, ClaimError> {
    let mut tokens = Vec::new();
    let mut chars = source.chars().peekable();
    let mut line = 1usize;
    let mut col = 1usize;

    macro_rules! push {
        ($tok:expr, $line:expr, $col:expr) => {
            tokens.push(Token {
                tok: $tok,
                line: $line,
                col: $col,
            })
        };
    }

    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '#' => {
                // comment to end of line
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            '{' => {
                bump(&mut chars);
                push!(Tok::LBrace, tline, tcol);
            }
            '}' => {
                bump(&mut chars);
                push!(Tok::RBrace, tline, tcol);
            }
            '(' => {
                bump(&mut chars);
                push!(Tok::LParen, tline, tcol);
            }
            ')' => {
                bump(&mut chars);
                push!(Tok::RParen, tline, tcol);
            }
            ':' => {
                bump(&mut chars);
                push!(Tok::Colon, tline, tcol);
            }
            ';' => {
                bump(&mut chars);
                push!(Tok::Semi, tline, tcol);
            }
            ',' => {
                bump(&mut chars);
                push!(Tok::Comma, tline, tcol);
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    push!(Tok::Arrow, tline, tcol);
                } else {
                    push!(Tok::Minus, tline, tcol);
                }
            }
            '=' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    push!(Tok::EqEq, tline, tcol);
                } else {
                    return Err(grammar_error(tline, tcol, "expected `==`"));
                }
            }
            '!' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    push!(Tok::NotEq, tline, tcol);
                } else {
                    return Err(grammar_error(tline, tcol, "expected `!=`"));
                }
            }
            '<' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    push!(Tok::Le, tline, tcol);
                } else {
                    push!(Tok::Lt, tline, tcol);
                }
            }
            '>' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    push!(Tok::Ge, tline, tcol);
                } else {
                    push!(Tok::Gt, tline, tcol);
                }
            }
            '&' => {
                bump(&mut chars);
                if chars.peek() == Some(&'&') {
                    bump(&mut chars);
                    push!(Tok::AndAnd, tline, tcol);
                } else {
                    return Err(grammar_error(tline, tcol, "expected `&&`"));
                }
            }
            '|' => {
                bump(&mut chars);
                if chars.peek() == Some(&'|') {
                    bump(&mut chars);
                    push!(Tok::OrOr, tline, tcol);
                } else {
                    return Err(grammar_error(tline, tcol, "expected `||`"));
                }
            }
            '"' => {
                bump(&mut chars);
                let mut text = String::new();
                loop {
                    match bump(&mut chars) {
                        Some('"') => break,
                        Some('\\') => match bump(&mut chars) {
                            Some('"') => text.push('"'),
                            Some('\\') => text.push('\\'),
                            Some(other) => {
                                return Err(grammar_error(
                                    tline,
                                    tcol,
                                    format!("unknown escape `\\{other}` in string"),
                                ))
                            }
                            None => return Err(grammar_error(tline, tcol, "unterminated string")),
                        },
                        Some(other) => text.push(other),
                        None => return Err(grammar_error(tline, tcol, "unterminated string")),
                    }
                }
                push!(Tok::Str(text), tline, tcol);
            }
            c if c.is_ascii_digit() => {
                let mut number = String::new();
                while let Some(&n) = chars.peek() {
                    if n.is_ascii_digit() || n == '.' {
                        number.push(n);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                let value: f64 = number.parse().map_err(|_| {
                    grammar_error(tline, tcol, format!("invalid number `{number}`"))
                })?;
                push!(Tok::Number(value), tline, tcol);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&n) = chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        ident.push(n);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                push!(Tok::Ident(ident), tline, tcol);
            }
            other => {
                return Err(grammar_error(
                    tline,
                    tcol,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
    }
    Ok(tokens)
}

// ============================================================================
// Parser
// ============================================================================

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).cloned();
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    fn eof_error(&self) -> ClaimError {
        let (line, col) = self.tokens.last().map_or((1, 1), |t| (t.line, t.col));
        grammar_error(line, col, "unexpected end of input")
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ClaimError> {
        match self.next() {
            Some(t) if t.tok == tok => Ok(t),
            Some(t) => Err(grammar_error(
                t.line,
                t.col,
                format!("expected {what}, found {:?}", t.tok),
            )),
            None => Err(self.eof_error()),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize), ClaimError> {
        match self.next() {
            Some(Token {
                tok: Tok::Ident(name),
                line,
                col,
            }) => Ok((name, line, col)),
            Some(t) => Err(grammar_error(
                t.line,
                t.col,
                format!("expected {what}, found {:?}", t.tok),
            )),
            None => Err(self.eof_error()),
        }
    }

    fn expect_string(&mut self, what: &str) -> Result<String, ClaimError> {
        match self.next() {
            Some(Token {
                tok: Tok::Str(text),
                ..
            }) => Ok(text),
            Some(t) => Err(grammar_error(
                t.line,
                t.col,
                format!("expected {what}, found {:?}", t.tok),
            )),
            None => Err(self.eof_error()),
        }
    }

    /// Kebab-case component id: IDENT ("-" (IDENT | NUMBER))*.
    fn parse_kebab_id(&mut self) -> Result<String, ClaimError> {
        let (mut id, _, _) = self.expect_ident("a component id")?;
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::Minus)) {
            self.next();
            match self.next() {
                Some(Token {
                    tok: Tok::Ident(part),
                    ..
                }) => {
                    id.push('-');
                    id.push_str(&part);
                }
                Some(Token {
                    tok: Tok::Number(n),
                    ..
                }) => {
                    let _ = write!(id, "-{n}");
                }
                Some(t) => {
                    return Err(grammar_error(
                        t.line,
                        t.col,
                        "expected identifier after `-`",
                    ))
                }
                None => return Err(self.eof_error()),
            }
        }
        Ok(id)
    }

    fn parse_predicate(
        &mut self,
        vars: &mut Vec<(String, usize, usize)>,
    ) -> Result<Predicate, ClaimError> {
        self.parse_implies(vars)
    }

    fn parse_implies(
        &mut self,
        vars: &mut Vec<(String, usize, usize)>,
    ) -> Result<Predicate, ClaimError> {
        let lhs = self.parse_or(vars)?;
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::Arrow)) {
            self.next();
            let rhs = self.parse_implies(vars)?;
            Ok(Predicate::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(
        &mut self,
        vars: &mut Vec<(String, usize, usize)>,
    ) -> Result<Predicate, ClaimError> {
        let mut lhs = self.parse_and(vars)?;
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::OrOr)) {
            self.next();
            let rhs = self.parse_and(vars)?;
            lhs = Predicate::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_and(
        &mut self,
        vars: &mut Vec<(String, usize, usize)>,
    ) -> Result<Predicate, ClaimError> {
        let mut lhs = self.parse_primary(vars)?;
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::AndAnd)) {
            self.next();
            let rhs = self.parse_primary(vars)?;
            lhs = Predicate::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_primary(
        &mut self,
        vars: &mut Vec<(String, usize, usize)>,
    ) -> Result<Predicate, ClaimError> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::LParen) => {
                self.next();
                let inner = self.parse_predicate(vars)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) if name == "true" || name == "false" => {
                self.next();
                Ok(Predicate::Literal(name == "true"))
            }
            Some(Tok::Ident(_)) | Some(Tok::Number(_)) => {
                let lhs = self.parse_operand(vars)?;
                let op = match self.next() {
                    Some(Token { tok: Tok::EqEq, .. }) => CmpOp::Eq,
                    Some(Token {
                        tok: Tok::NotEq, ..
                    }) => CmpOp::Ne,
                    Some(Token { tok: Tok::Lt, .. }) => CmpOp::Lt,
                    Some(Token { tok: Tok::Le, .. }) => CmpOp::Le,
                    Some(Token { tok: Tok::Gt, .. }) => CmpOp::Gt,
                    Some(Token { tok: Tok::Ge, .. }) => CmpOp::Ge,
                    Some(t) => {
                        return Err(grammar_error(
                            t.line,
                            t.col,
                            format!("expected comparison operator, found {:?}", t.tok),
                        ))
                    }
                    None => return Err(self.eof_error()),
                };
                let rhs = self.parse_operand(vars)?;
                Ok(Predicate::Compare { lhs, op, rhs })
            }
            Some(other) => {
                let t = self.peek().unwrap();
                Err(grammar_error(
                    t.line,
                    t.col,
                    format!("expected predicate, found {other:?}"),
                ))
            }
            None => Err(self.eof_error()),
        }
    }

    fn parse_operand(
        &mut self,
        vars: &mut Vec<(String, usize, usize)>,
    ) -> Result<Operand, ClaimError> {
        match self.next() {
            Some(Token {
                tok: Tok::Ident(name),
                line,
                col,
            }) => {
                vars.push((name.clone(), line, col));
                Ok(Operand::Var(name))
            }
            Some(Token {
                tok: Tok::Number(n),
                ..
            }) => Ok(Operand::Number(n)),
            Some(t) => Err(grammar_error(
                t.line,
                t.col,
                format!("expected variable or number, found {:?}", t.tok),
            )),
            None => Err(self.eof_error()),
        }
    }
}

/// Parse a claim document into a [`RootGoalSpec`].
pub fn parse_claim(source: &str) -> Result<RootGoalSpec, ClaimError> {
    let tokens = lex(source)?;
    let mut parser = Parser { tokens, pos: 0 };

    match parser.next() {
        Some(Token {
            tok: Tok::Ident(kw),
            ..
        }) if kw == "claim" => {}
        Some(t) => return Err(grammar_error(t.line, t.col, "expected `claim`")),
        None => return Err(grammar_error(1, 1, "empty claim document")),
    }
    let id = parser.expect_string("the claim id string")?;
    parser.expect(Tok::LBrace, "`{`")?;

    let mut statement: Option<String> = None;
    let mut variables: Vec<VarDecl> = Vec::new();
    let mut predicate: Option<Predicate> = None;
    let mut used_vars: Vec<(String, usize, usize)> = Vec::new();
    let mut modes: Vec<OperatingMode> = Vec::new();
    let mut targets: Vec<ComponentId> = Vec::new();
    let mut saw_targets = false;

    loop {
        match parser.next() {
            Some(Token {
                tok: Tok::RBrace, ..
            }) => break,
            Some(Token {
                tok: Tok::Ident(item),
                line,
                col,
            }) => match item.as_str() {
                "statement" => {
                    parser.expect(Tok::Colon, "`:`")?;
                    statement = Some(parser.expect_string("the statement string")?);
                    parser.expect(Tok::Semi, "`;`")?;
                }
                "var" => {
                    let (name, vline, vcol) = parser.expect_ident("a variable name")?;
                    parser.expect(Tok::Colon, "`:`")?;
                    let (ty_name, tline, tcol) = parser.expect_ident("a type")?;
                    let ty = match ty_name.as_str() {
                        "real" => VarType::Real,
                        "int" => VarType::Int,
                        "bool" => VarType::Bool,
                        other => {
                            return Err(grammar_error(
                                tline,
                                tcol,
                                format!("unknown type `{other}` (expected real, int or bool)"),
                            ))
                        }
                    };
                    if variables.iter().any(|v| v.name == name) {
                        let _ = (vline, vcol);
                        return Err(ClaimError::DuplicateVariable(name));
                    }
                    variables.push(VarDecl { name, ty });
                    parser.expect(Tok::Semi, "`;`")?;
                }
                "predicate" => {
                    parser.expect(Tok::Colon, "`:`")?;
                    predicate = Some(parser.parse_predicate(&mut used_vars)?);
                    parser.expect(Tok::Semi, "`;`")?;
                }
                "mode" => {
                    let (mode_id, _, _) = parser.expect_ident("a mode id")?;
                    let description = parser.expect_string("the mode description")?;
                    let active = if matches!(
                        parser.peek().map(|t| &t.tok),
                        Some(Tok::Ident(kw)) if kw == "active"
                    ) {
                        parser.next();
                        true
                    } else {
                        false
                    };
                    let mode_id = ModeId::new(mode_id);
                    if modes.iter().any(|m| m.id == mode_id) {
                        return Err(ClaimError::DuplicateMode(mode_id));
                    }
                    modes.push(OperatingMode {
                        id: mode_id,
                        description,
                        active,
                    });
                    parser.expect(Tok::Semi, "`;`")?;
                }
                "targets" => {
                    parser.expect(Tok::Colon, "`:`")?;
                    saw_targets = true;
                    loop {
                        targets.push(ComponentId::new(parser.parse_kebab_id()?));
                        match parser.next() {
                            Some(Token {
                                tok: Tok::Comma, ..
                            }) => continue,
                            Some(Token { tok: Tok::Semi, .. }) => break,
                            Some(t) => {
                                return Err(grammar_error(
                                    t.line,
                                    t.col,
                                    "expected `,` or `;` in targets list",
                                ))
                            }
                            None => return Err(parser.eof_error()),
                        }
                    }
                }
                other => return Err(grammar_error(line, col, format!("unknown item `{other}`"))),
            },
            Some(t) => return Err(grammar_error(t.line, t.col, "expected an item or `}`")),
            None => return Err(parser.eof_error()),
        }
    }

    let statement = statement.ok_or_else(|| grammar_error(1, 1, "missing `statement` item"))?;
    let predicate = predicate.ok_or_else(|| grammar_error(1, 1, "missing `predicate` item"))?;
    if !saw_targets || targets.is_empty() {
        return Err(ClaimError::NoTargets);
    }
    for (name, line, col) in &used_vars {
        if !variables.iter().any(|v| &v.name == name) {
            return Err(ClaimError::UndeclaredVariable {
                name: name.clone(),
                line: *line,
                col: *col,
            });
        }
    }
    if !modes.iter().any(|m| m.active) {
        return Err(ClaimError::NoActiveMode);
    }

    Ok(RootGoalSpec {
        claim: StructuredClaim {
            id,
            statement,
            variables,
            predicate,
            target_components: targets,
        },
        modes,
    })
}

pub fn load_claim_file(path: &Path) -> Result<RootGoalSpec, ClaimError> {
    let text = std::fs::read_to_string(path).map_err(|source| ClaimError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_claim(&text)
}

// ============================================================================
// Pretty printing
// ============================================================================

fn print_operand(operand: &Operand, out: &mut String) {
    match operand {
        Operand::Var(name) => out.push_str(name),
        Operand::Number(n) => {
            let _ = write!(out, "{n}");
        }
    }
}

fn print_predicate(predicate: &Predicate, out: &mut String, top: bool) {
    let parens = !top && !matches!(predicate, Predicate::Literal(_) | Predicate::Compare { .. });
    if parens {
        out.push('(');
    }
    match predicate {
        Predicate::Literal(value) => {
            out.push_str(if *value { "true" } else { "false" });
        }
        Predicate::Compare { lhs, op, rhs } => {
            if !top {
                out.push('(');
            }
            print_operand(lhs, out);
            let _ = write!(out, " {} ", op.symbol());
            print_operand(rhs, out);
            if !top {
                out.push(')');
            }
        }
        Predicate::And(lhs, rhs) => {
            print_predicate(lhs, out, false);
            out.push_str(" && ");
            print_predicate(rhs, out, false);
        }
        Predicate::Or(lhs, rhs) => {
            print_predicate(lhs, out, false);
            out.push_str(" || ");
            print_predicate(rhs, out, false);
        }
        Predicate::Implies(lhs, rhs) => {
            print_predicate(lhs, out, false);
            out.push_str(" -> ");
            print_predicate(rhs, out, false);
        }
    }
    if parens {
        out.push(')');
    }
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Canonical text of a predicate alone, e.g. `(obj == 1) -> (d_t >= d_min)`.
pub fn predicate_text(predicate: &Predicate) -> String {
    let mut out = String::new();
    print_predicate(predicate, &mut out, true);
    out
}

/// Regenerate the canonical text form; `parse_claim` is a partial inverse.
pub fn pretty_print(spec: &RootGoalSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "claim \"{}\" {{", escape(&spec.claim.id));
    let _ = writeln!(out, "  statement: \"{}\";", escape(&spec.claim.statement));
    for var in &spec.claim.variables {
        let _ = writeln!(out, "  var {}: {};", var.name, var.ty.name());
    }
    out.push_str("  predicate: ");
    print_predicate(&spec.claim.predicate, &mut out, true);
    out.push_str(";\n");
    for mode in &spec.modes {
        let _ = write!(out, "  mode {} \"{}\"", mode.id, escape(&mode.description));
        if mode.active {
            out.push_str(" active");
        }
        out.push_str(";\n");
    }
    let targets: Vec<&str> = spec
        .claim
        .target_components
        .iter()
        .map(|c| c.as_str())
        .collect();
    let _ = writeln!(out, "  targets: {};", targets.join(", "));
    out.push_str("}\n");
    out
}

// ============================================================================
// Conjunctive split
// ============================================================================

/// Split the claim into one AND-connected sub-claim per target component,
/// in lexicographic component order. Sub-claim text comes from the evidence
/// store when the component has a row, and is synthesized otherwise.
pub fn conjunctive_split(
    claim: &StructuredClaim,
    model: &SystemModel,
    store: &EvidenceStore,
) -> Result<Vec<(String, ComponentId)>, ClaimError> {
    if claim.target_components.is_empty() {
        return Err(ClaimError::NoTargets);
    }
    let targets: BTreeSet<&ComponentId> = claim.target_components.iter().collect();
    let mut split = Vec::with_capacity(targets.len());
    for component in targets {
        if !model.contains_component(component) {
            return Err(ClaimError::UnknownTarget(component.clone()));
        }
        let statement = store
            .component_claim_text(component)
            .map(str::to_string)
            .unwrap_or_else(|| format!("component {component} functions correctly"));
        split.push((statement, component.clone()));
    }
    Ok(split)
}
