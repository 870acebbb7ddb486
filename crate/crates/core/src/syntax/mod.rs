//! Concrete syntax of the demo language: tokenizer with trivia, parser,
//! canonical unparser and roundtrip analysis.
//!
//! The surface forms follow the pretty rules of the bundled spec. Keywords
//! and child order come from the rules; precedence is fixed here:
//!
//! ```text
//! prog        := define* [top (";" top)*]
//! define      := IDENT IDENT* "=" top ";"
//! top         := open | guard
//! guard       := open "," open ";" (open "," open ";")* open ("otherwise" | "else")
//! open        := "\" IDENT "->" open
//!              | app ["if" open ("otherwise" | "else") open]
//! app         := atom atom*                       (left associative)
//! atom        := IDENT | INT | STRING | "(" open ")"
//!              | "{" [open ("," open)*] "}"
//!              | "[" [open ("," open)*] "]"
//!              | "[" open "|" IDENT "<-" open "]"
//!              | "[" open "//" IDENT "<-" open "]"
//!              | "case" open "of" arm* "end"
//!              | "begin" decls* define* open "end"
//! arm         := IDENT "->" open ";"
//! decls       := IDENT ("," IDENT)* ":" IDENT ";"
//! ```
//!
//! `x if c otherwise y` is `if(c, x, y)`. The then-branch and a function
//! position bind at application level, an argument at atom level; every
//! other expression position accepts the open level. The unparser adds
//! exactly the parentheses these levels require.
//!
//! Sugar accepted by the parser and normalised by the unparser: guard
//! cascades (`a, g1; b, g2; c otherwise` becomes nested conditionals), several
//! names in one declaration, `else` for `otherwise`, and parentheses that
//! the precedence levels do not need. Comments start with `||` and run to
//! the end of the line.

mod lexer;
mod parser;
mod roundtrip;
mod unparse;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ast::{AstDoc, AstError, Decoration, NodeId};
use crate::spec::{GrammarSpec, SugarKind};

pub use lexer::{tokenize, unquote, Lexicon, Token, TokenKind, Trivia, TriviaKind};
pub use roundtrip::{roundtrip_check, Category, Difference, RoundtripReport};
pub use unparse::{needs_parens, unparse, unparse_options, unparse_subtree};

/// Indentation step of canonical text.
pub const TAB_WIDTH: usize = 2;

/// Byte range in a text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}..{}]", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError { span, message: message.into() }
    }
}

/// A sugar form met while parsing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SugarEvent {
    /// Name of the spec's sugar rule.
    pub rule: String,
    #[serde(skip)]
    pub kind: SugarKind,
    pub span: Span,
    /// First and last token of the form.
    #[serde(skip)]
    pub tokens: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub doc: AstDoc,
    pub sugar_events: Vec<SugarEvent>,
    pub trivia_attachments: Vec<(NodeId, Decoration)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnparseError {
    #[error("document has placeholders")]
    Incomplete,
    #[error("no pretty rule for {0}")]
    NoRule(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoundtripError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Unparse(#[from] UnparseError),
    #[error("canonical text does not tokenize: {0}")]
    Canonical(ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubtreeError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("text parses as {found}, the slot needs {expected}")]
    ClassMismatch { expected: String, found: String },
    #[error(transparent)]
    Edit(#[from] AstError),
}

/// Parses a whole program (CtoA).
pub fn parse_text(spec: &GrammarSpec, text: &str) -> Result<ParseOutcome, ParseError> {
    let parsed = parser::parse_program(spec, text)?;
    let doc = AstDoc::from_subtree(&spec.name, &parsed.tree);
    let trivia_attachments = parser::attachments(&doc, &parsed.decorations);
    Ok(ParseOutcome { doc, sugar_events: parsed.events, trivia_attachments })
}

#[derive(Debug, Clone)]
pub struct SubtreeOutcome {
    /// Root of the installed subtree.
    pub node: NodeId,
    pub sugar_events: Vec<SugarEvent>,
}

/// Parses `text` as the category of `target`'s slot and installs the result
/// there. On any error the document is left untouched.
pub fn parse_subtree(
    spec: &GrammarSpec,
    doc: &mut AstDoc,
    target: NodeId,
    text: &str,
) -> Result<SubtreeOutcome, SubtreeError> {
    let (ty, _) = doc.slot_type(spec, target)?;
    let (tree, sugar_events) = parser::parse_fragment(spec, text, &ty)?;
    let found = tree.kind.type_name().to_string();
    if !spec.conforms(&found, &ty) {
        return Err(SubtreeError::ClassMismatch { expected: ty, found });
    }
    let node = doc.install_subtree(spec, target, &tree)?;
    Ok(SubtreeOutcome { node, sugar_events })
}
