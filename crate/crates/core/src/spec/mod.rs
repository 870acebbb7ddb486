//! Language specifications: the declarative description of classes,
//! productions, leaves, pretty rules and sugar forms that drives every
//! other part of the editor.

mod demo;
mod parse;
mod validate;
mod writer;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use demo::{builtin_demo_spec, DEMO_SPEC_SOURCE};
pub use parse::parse_spec;
pub use validate::{validate_spec, Diagnostic};
pub use writer::print_spec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown class {0}")]
pub struct UnknownClass(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    One,
    List,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRule {
    pub name: String,
    pub alternatives: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub name: String,
    pub ty: String,
    pub multiplicity: Multiplicity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductionRule {
    pub operator: String,
    pub slots: Vec<Slot>,
}

impl ProductionRule {
    pub fn slot(&self, name: &str) -> Option<(usize, &Slot)> {
        self.slots.iter().enumerate().find(|(_, s)| s.name == name)
    }
}

/// Lexical category of a terminal string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LexicalKind {
    Integer,
    Identifier,
    String,
}

impl LexicalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LexicalKind::Integer => "integer",
            LexicalKind::Identifier => "identifier",
            LexicalKind::String => "string",
        }
    }

    /// Terminal validation predicate. Identifiers may not collide with a
    /// reserved word of the language.
    pub fn accepts(self, text: &str, reserved: &BTreeSet<String>) -> bool {
        match self {
            LexicalKind::Integer => !text.is_empty() && text.bytes().all(|b| b.is_ascii_digit()),
            LexicalKind::Identifier => is_identifier(text) && !reserved.contains(text),
            LexicalKind::String => true,
        }
    }
}

/// `[A-Za-z_][A-Za-z0-9_]*`
pub fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafRule {
    pub operator: String,
    pub kind: LexicalKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormatAtom {
    Keyword(String),
    Child(String),
    Newline,
    TabPush,
    TabPop,
    Space,
    /// Elements of a list slot separated by `sep`; a `\n` inside the
    /// separator is a line break.
    ListSep { sep: String, metavar: String },
}

impl FormatAtom {
    /// Word atoms get exactly one space between them when adjacent.
    pub fn is_word(&self) -> bool {
        match self {
            FormatAtom::Keyword(k) => is_word_text(k),
            FormatAtom::Child(_) | FormatAtom::ListSep { .. } => true,
            _ => false,
        }
    }
}

pub(crate) fn is_word_text(text: &str) -> bool {
    !text.is_empty() && text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrettyRule {
    pub operator: String,
    /// Meta-variable names without the leading `#`, one per slot.
    pub metavars: Vec<String>,
    pub format: Vec<FormatAtom>,
}

impl PrettyRule {
    pub fn metavar_index(&self, metavar: &str) -> Option<usize> {
        self.metavars.iter().position(|m| m == metavar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SugarKind {
    GuardCascade,
    MultiDecl,
    KeywordVariant,
    RedundantParens,
}

impl SugarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SugarKind::GuardCascade => "guard_cascade",
            SugarKind::MultiDecl => "multi_decl",
            SugarKind::KeywordVariant => "keyword_variant",
            SugarKind::RedundantParens => "redundant_parens",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "guard_cascade" => SugarKind::GuardCascade,
            "multi_decl" => SugarKind::MultiDecl,
            "keyword_variant" => SugarKind::KeywordVariant,
            "redundant_parens" => SugarKind::RedundantParens,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SugarRule {
    pub name: String,
    pub kind: SugarKind,
    pub target: String,
    pub keywords: Vec<String>,
}

/// What a name in a spec refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol<'a> {
    Class(&'a ClassRule),
    Production(&'a ProductionRule),
    Leaf(&'a LeafRule),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrammarSpec {
    pub name: String,
    pub start: String,
    pub classes: Vec<ClassRule>,
    pub productions: Vec<ProductionRule>,
    pub leaves: Vec<LeafRule>,
    pub pretty_rules: Vec<PrettyRule>,
    pub sugar_rules: Vec<SugarRule>,
}

impl GrammarSpec {
    pub fn class(&self, name: &str) -> Option<&ClassRule> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn production(&self, operator: &str) -> Option<&ProductionRule> {
        self.productions.iter().find(|p| p.operator == operator)
    }

    pub fn leaf(&self, operator: &str) -> Option<&LeafRule> {
        self.leaves.iter().find(|l| l.operator == operator)
    }

    /// First pretty rule for `operator`.
    pub fn pretty_rule(&self, operator: &str) -> Option<&PrettyRule> {
        self.pretty_rules.iter().find(|r| r.operator == operator)
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol<'_>> {
        if let Some(c) = self.class(name) {
            Some(Symbol::Class(c))
        } else if let Some(p) = self.production(name) {
            Some(Symbol::Production(p))
        } else {
            self.leaf(name).map(Symbol::Leaf)
        }
    }

    /// Menu for a placeholder of type `class_name`: the direct alternatives
    /// of a class in declaration order, or the single name of a production
    /// or leaf. Alternatives that are themselves classes appear as one item
    /// and open a submenu when chosen.
    pub fn completions_of_class(&self, class_name: &str) -> Result<Vec<String>, UnknownClass> {
        match self.symbol(class_name) {
            Some(Symbol::Class(c)) => Ok(c.alternatives.clone()),
            Some(Symbol::Production(_)) | Some(Symbol::Leaf(_)) => Ok(vec![class_name.to_string()]),
            None => Err(UnknownClass(class_name.to_string())),
        }
    }

    /// Depth-first flattening of class alternatives down to productions and
    /// leaves, in declaration order. Cycles are cut.
    pub fn members(&self, ty: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        self.collect_members(ty, &mut seen, &mut out);
        out
    }

    fn collect_members(&self, ty: &str, seen: &mut BTreeSet<String>, out: &mut Vec<String>) {
        if !seen.insert(ty.to_string()) {
            return;
        }
        match self.symbol(ty) {
            Some(Symbol::Class(c)) => {
                for alt in &c.alternatives {
                    self.collect_members(alt, seen, out);
                }
            }
            Some(_) => out.push(ty.to_string()),
            None => {}
        }
    }

    /// Whether a subtree whose root has type `ty` may fill a slot of type
    /// `target`: equal names, or `ty` reachable from `target` through class
    /// alternatives.
    pub fn conforms(&self, ty: &str, target: &str) -> bool {
        if ty == target {
            return true;
        }
        let mut stack = vec![target];
        let mut seen = BTreeSet::new();
        while let Some(t) = stack.pop() {
            if !seen.insert(t) {
                continue;
            }
            if let Some(c) = self.class(t) {
                for alt in &c.alternatives {
                    if alt == ty {
                        return true;
                    }
                    stack.push(alt);
                }
            }
        }
        false
    }

    /// Reserved words: every word keyword in pretty rules and sugar rules.
    pub fn reserved_words(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for rule in &self.pretty_rules {
            for atom in &rule.format {
                if let FormatAtom::Keyword(k) = atom {
                    if is_word_text(k) {
                        out.insert(k.clone());
                    }
                }
            }
        }
        for sugar in &self.sugar_rules {
            for k in &sugar.keywords {
                if is_word_text(k) {
                    out.insert(k.clone());
                }
            }
        }
        out
    }

    pub fn sugar_of_kind(&self, kind: SugarKind) -> impl Iterator<Item = &SugarRule> {
        self.sugar_rules.iter().filter(move |s| s.kind == kind)
    }
}

impl fmt::Display for GrammarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_spec(self))
    }
}
