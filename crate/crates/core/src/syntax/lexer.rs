use std::collections::BTreeSet;

use serde::Serialize;

use crate::spec::{is_identifier, GrammarSpec};

use super::{ParseError, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TokenKind {
    Keyword,
    Ident,
    Int,
    String,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TriviaKind {
    Comment,
    BlankRun,
    NewlineRun,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trivia {
    pub kind: TriviaKind,
    pub text: String,
    pub span: Span,
    /// Index of the token this trivia precedes; the token count at end of
    /// input.
    pub anchor: usize,
}

impl Trivia {
    /// Comment text without the `||` marker and surrounding blanks.
    pub fn comment_payload(&self) -> Option<&str> {
        match self.kind {
            TriviaKind::Comment => Some(self.text.trim_start_matches("||").trim()),
            _ => None,
        }
    }
}

/// Word classification for a language: which identifier-shaped words are
/// keywords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub keywords: BTreeSet<String>,
}

impl Lexicon {
    pub fn for_spec(spec: &GrammarSpec) -> Self {
        Lexicon { keywords: spec.reserved_words() }
    }
}

const PUNCT2: [&str; 3] = ["//", "<-", "->"];
const PUNCT1: &str = "()[]{},;:=|\\";

/// Splits `text` into tokens and trivia. Concatenating both by span gives
/// back the input byte for byte.
pub fn tokenize(text: &str, lexicon: &Lexicon) -> Result<(Vec<Token>, Vec<Trivia>), ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut trivia = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let b = bytes[i];
        let trivia_kind = if b == b'\n' {
            while i < bytes.len() && bytes[i] == b'\n' {
                i += 1;
            }
            Some(TriviaKind::NewlineRun)
        } else if b == b' ' || b == b'\t' || b == b'\r' {
            while i < bytes.len() && matches!(bytes[i], b' ' | b'\t' | b'\r') {
                i += 1;
            }
            Some(TriviaKind::BlankRun)
        } else if text[i..].starts_with("||") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            Some(TriviaKind::Comment)
        } else {
            None
        };
        if let Some(kind) = trivia_kind {
            trivia.push(Trivia {
                kind,
                text: text[start..i].to_string(),
                span: Span::new(start, i),
                anchor: tokens.len(),
            });
            continue;
        }

        let kind = if b.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            TokenKind::Int
        } else if b.is_ascii_alphabetic() || b == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            if lexicon.keywords.contains(&text[start..i]) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            }
        } else if b == b'"' {
            i += 1;
            loop {
                match bytes.get(i) {
                    None | Some(b'\n') => {
                        return Err(ParseError::new(Span::new(start, i), "unterminated string"));
                    }
                    Some(b'"') => {
                        i += 1;
                        break;
                    }
                    Some(b'\\') => match bytes.get(i + 1) {
                        Some(b'"' | b'\\' | b'n') => i += 2,
                        _ => return Err(ParseError::new(Span::new(i, i + 1), "invalid escape in string")),
                    },
                    Some(_) => i += 1,
                }
            }
            TokenKind::String
        } else if let Some(p) = PUNCT2.iter().find(|p| text[i..].starts_with(**p)) {
            i += p.len();
            TokenKind::Punct
        } else if PUNCT1.as_bytes().contains(&b) {
            i += 1;
            TokenKind::Punct
        } else {
            let len = text[i..].chars().next().map_or(1, char::len_utf8);
            return Err(ParseError::new(Span::new(i, i + len), format!("unexpected character {:?}", &text[i..i + len])));
        };
        tokens.push(Token { kind, text: text[start..i].to_string(), span: Span::new(start, i) });
    }
    debug_assert!(tokens.iter().all(|t| t.kind != TokenKind::Ident || is_identifier(&t.text)));
    Ok((tokens, trivia))
}

/// Value of a string token: quotes removed, escapes resolved.
pub fn unquote(token: &str) -> String {
    let inner = &token[1..token.len() - 1];
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some(other) => out.push(other),
                None => {}
            }
        } else {
            out.push(c);
        }
    }
    out
}
