//! Canonical parenthesized text form of documents.
//!
//! ```text
//! (prog
//!   (list (define (ident "f") (list (ident "x")) (variable (ident "x"))))
//!   (?expression*))
//! ```
//!
//! Placeholders are `(?type)` or `(?type*)` for open lists, list slots are
//! `(list ...)` wrappers, and decorations follow the head of a form as
//! `@(comment before "text")`, `@(annotation "text")` or `@(display text)`.

use thiserror::Error;

use crate::spec::{GrammarSpec, Multiplicity, Symbol};

use super::{AstDoc, Decoration, DecorationKind, DisplayState, NodeKind, Position, Subtree};

const WIDTH: usize = 80;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AstTextError {
    #[error("offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("ill-formed document: {0}")]
    Invalid(String),
}

fn quote(text: &str) -> String {
    serde_json::to_string(text).expect("strings serialize")
}

fn head(tree: &Subtree) -> String {
    let mut out = String::from("(");
    match &tree.kind {
        NodeKind::Placeholder { expected, multiplicity } => {
            out.push('?');
            out.push_str(expected);
            if *multiplicity == Multiplicity::List {
                out.push('*');
            }
        }
        NodeKind::Operator { operator } | NodeKind::Leaf { operator, .. } => out.push_str(operator),
        NodeKind::List { .. } => out.push_str("list"),
    }
    match tree.display {
        DisplayState::Expanded => {}
        DisplayState::IconifiedGraphic => out.push_str(" @(display graphic)"),
        DisplayState::IconifiedText => out.push_str(" @(display text)"),
    }
    for d in &tree.decorations {
        match d.kind {
            DecorationKind::Comment => {
                out.push_str(&format!(" @(comment {} {})", d.position.as_str(), quote(&d.payload)))
            }
            DecorationKind::Annotation => out.push_str(&format!(" @(annotation {})", quote(&d.payload))),
        }
    }
    if let NodeKind::Leaf { text, .. } = &tree.kind {
        out.push(' ');
        out.push_str(&quote(text));
    }
    out
}

fn render(tree: &Subtree, indent: usize, out: &mut String) {
    let head = head(tree);
    let children: Vec<String> = tree
        .children
        .iter()
        .map(|c| {
            let mut s = String::new();
            render(c, indent + 2, &mut s);
            s
        })
        .collect();
    let inline_len = indent + head.len() + children.iter().map(|c| c.len() + 1).sum::<usize>() + 1;
    if children.iter().all(|c| !c.contains('\n')) && inline_len <= WIDTH {
        out.push_str(&head);
        for c in children {
            out.push(' ');
            out.push_str(&c);
        }
    } else {
        out.push_str(&head);
        for c in children {
            out.push('\n');
            out.push_str(&" ".repeat(indent + 2));
            out.push_str(&c);
        }
    }
    out.push(')');
}

/// Canonical text of a subtree, LF-terminated. Structurally equal trees
/// produce identical text.
pub fn write_subtree(tree: &Subtree) -> String {
    let mut out = String::new();
    render(tree, 0, &mut out);
    out.push('\n');
    out
}

pub fn write_doc(doc: &AstDoc) -> String {
    write_subtree(&doc.to_subtree())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    At,
    Str(String),
    Atom(String),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, AstTextError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' => {
                out.push((i, Tok::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::Close));
                i += 1;
            }
            b'@' => {
                out.push((i, Tok::At));
                i += 1;
            }
            b'"' => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i] != b'"' {
                    i += if bytes[i] == b'\\' { 2 } else { 1 };
                }
                if i >= bytes.len() {
                    return Err(AstTextError::Syntax { offset: start, message: "unterminated string".into() });
                }
                i += 1;
                let value: String = serde_json::from_str(&text[start..i]).map_err(|e| AstTextError::Syntax {
                    offset: start,
                    message: format!("bad string: {e}"),
                })?;
                out.push((start, Tok::Str(value)));
            }
            _ => {
                let start = i;
                while i < bytes.len() && !b" \t\n\r()@\"".contains(&bytes[i]) {
                    i += 1;
                }
                out.push((start, Tok::Atom(text[start..i].to_string())));
            }
        }
    }
    Ok(out)
}

struct Reader<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    spec: &'a GrammarSpec,
}

/// How the form being read is used by its parent.
#[derive(Clone, Copy)]
enum Expect<'s> {
    Node,
    ListSlot(&'s str),
}

impl<'a> Reader<'a> {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, AstTextError> {
        Err(AstTextError::Syntax { offset: self.offset(), message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), AstTextError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {tok:?}"))
        }
    }

    fn atom(&mut self) -> Result<String, AstTextError> {
        match self.peek() {
            Some(Tok::Atom(a)) => {
                let a = a.clone();
                self.pos += 1;
                Ok(a)
            }
            _ => self.fail("expected a name"),
        }
    }

    fn string(&mut self) -> Result<String, AstTextError> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("expected a string"),
        }
    }

    fn attributes(&mut self, tree: &mut Subtree) -> Result<(), AstTextError> {
        while self.peek() == Some(&Tok::At) {
            self.pos += 1;
            self.expect(Tok::Open)?;
            match self.atom()?.as_str() {
                "display" => {
                    tree.display = match self.atom()?.as_str() {
                        "graphic" => DisplayState::IconifiedGraphic,
                        "text" => DisplayState::IconifiedText,
                        "expanded" => DisplayState::Expanded,
                        other => return self.fail(format!("unknown display state {other}")),
                    }
                }
                "comment" => {
                    let position = match self.atom()?.as_str() {
                        "before" => Position::Before,
                        "onto" => Position::Onto,
                        "after" => Position::After,
                        other => return self.fail(format!("unknown comment position {other}")),
                    };
                    let payload = self.string()?;
                    tree.decorations.push(Decoration { kind: DecorationKind::Comment, position, payload });
                }
                "annotation" => {
                    let payload = self.string()?;
                    tree.decorations.push(Decoration {
                        kind: DecorationKind::Annotation,
                        position: Position::Onto,
                        payload,
                    });
                }
                other => return self.fail(format!("unknown attribute {other}")),
            }
            self.expect(Tok::Close)?;
        }
        Ok(())
    }

    fn form(&mut self, expect: Expect<'_>) -> Result<Subtree, AstTextError> {
        self.expect(Tok::Open)?;
        let name = self.atom()?;
        let mut tree = if let Some(ty) = name.strip_prefix('?') {
            let (ty, mult) = match ty.strip_suffix('*') {
                Some(t) => (t, Multiplicity::List),
                None => (ty, Multiplicity::One),
            };
            if self.spec.symbol(ty).is_none() {
                return self.fail(format!("unknown type {ty}"));
            }
            Subtree::placeholder(ty, mult)
        } else if let Expect::ListSlot(element) = expect {
            if name != "list" {
                return self.fail(format!("expected a list form, found {name}"));
            }
            Subtree::list(element, Vec::new())
        } else {
            match self.spec.symbol(&name) {
                Some(Symbol::Production(_)) => Subtree::operator(&name, Vec::new()),
                Some(Symbol::Leaf(_)) => Subtree::leaf(&name, ""),
                _ => return self.fail(format!("unknown operator {name}")),
            }
        };
        self.attributes(&mut tree)?;
        match &mut tree.kind {
            NodeKind::Leaf { text, .. } => *text = self.string()?,
            NodeKind::Operator { operator } => {
                let prod = self.spec.production(operator).expect("checked above");
                for slot in &prod.slots {
                    let child = match slot.multiplicity {
                        Multiplicity::One => self.form(Expect::Node)?,
                        Multiplicity::List => self.form(Expect::ListSlot(&slot.ty))?,
                    };
                    tree.children.push(child);
                }
            }
            NodeKind::List { element } => {
                let element = element.clone();
                while self.peek() == Some(&Tok::Open) {
                    tree.children.push(self.form(Expect::Node)?);
                }
                // A trailing open placeholder reads as a one-slot form above;
                // restore its list multiplicity check here.
                if let Some(last) = tree.children.last() {
                    if last.kind.is_list_placeholder() && last.kind.type_name() != element {
                        return self.fail("open list placeholder of the wrong type");
                    }
                }
            }
            NodeKind::Placeholder { .. } => {}
        }
        self.expect(Tok::Close)?;
        Ok(tree)
    }
}

/// Reads one subtree in canonical form. The root is read as a node of the
/// language, not as a list slot.
pub fn read_subtree(text: &str, spec: &GrammarSpec) -> Result<Subtree, AstTextError> {
    let toks = lex(text)?;
    let mut reader = Reader { toks, pos: 0, end: text.len(), spec };
    let tree = reader.form(Expect::Node)?;
    if reader.pos != reader.toks.len() {
        return reader.fail("trailing input");
    }
    Ok(tree)
}

/// Reads a whole document and checks it against `spec`.
pub fn read_doc(text: &str, spec: &GrammarSpec) -> Result<AstDoc, AstTextError> {
    let tree = read_subtree(text, spec)?;
    let doc = AstDoc::from_subtree(&spec.name, &tree);
    doc.check(spec).map_err(AstTextError::Invalid)?;
    Ok(doc)
}
