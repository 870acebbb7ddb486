//! Text-mode aliases: keyword templates, learned words and module
//! signatures, completed by prefix.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::ast::{NodeKind, Subtree};
use crate::layout::{print_subtree, PlaceholderStyle, PrintOptions};
use crate::spec::{is_identifier, FormatAtom, GrammarSpec};
use crate::syntax::{parse_text, ParseError};

/// Shortest word the learner keeps.
pub const MIN_LEARNED_LEN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Origin {
    BuiltinKeyword,
    LearnedWord,
    ModuleSignature,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::BuiltinKeyword => "BUILTIN_KEYWORD",
            Origin::LearnedWord => "LEARNED_WORD",
            Origin::ModuleSignature => "MODULE_SIGNATURE",
        }
    }
}

impl FromStr for Origin {
    type Err = AliasError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "BUILTIN_KEYWORD" => Ok(Origin::BuiltinKeyword),
            "LEARNED_WORD" => Ok(Origin::LearnedWord),
            "MODULE_SIGNATURE" => Ok(Origin::ModuleSignature),
            other => Err(AliasError::Format(format!("unknown origin {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AliasEntry {
    pub name: String,
    /// Text with `⟨slot⟩` marks.
    pub expansion: String,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", content = "value", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Expansion {
    Unique(String),
    Ambiguous(Vec<String>),
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AliasError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("bad alias file: {0}")]
    Format(String),
}

/// Aliases in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasTable {
    entries: IndexMap<String, AliasEntry>,
}

impl AliasTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&AliasEntry> {
        self.entries.get(name)
    }

    pub fn entries(&self) -> impl Iterator<Item = &AliasEntry> {
        self.entries.values()
    }

    /// Adds an entry unless the name is taken. Returns whether it was added.
    pub fn insert(&mut self, entry: AliasEntry) -> bool {
        if self.entries.contains_key(&entry.name) {
            return false;
        }
        self.entries.insert(entry.name.clone(), entry);
        true
    }

    /// Records a word typed by the user. Short or non-identifier words and
    /// names already present are ignored.
    pub fn learn_word(&mut self, word: &str) -> bool {
        if word.chars().count() < MIN_LEARNED_LEN || !is_identifier(word) {
            return false;
        }
        self.insert(AliasEntry { name: word.to_string(), expansion: word.to_string(), origin: Origin::LearnedWord })
    }

    /// Case-sensitive prefix lookup. An exact name wins over longer names.
    pub fn expand_prefix(&self, prefix: &str) -> Expansion {
        if let Some(e) = self.entries.get(prefix) {
            return Expansion::Unique(e.expansion.clone());
        }
        let hits: Vec<&AliasEntry> = self.entries.values().filter(|e| e.name.starts_with(prefix)).collect();
        match hits.as_slice() {
            [] => Expansion::None,
            [one] => Expansion::Unique(one.expansion.clone()),
            many => Expansion::Ambiguous(many.iter().map(|e| e.name.clone()).collect()),
        }
    }

    /// One `MODULE_SIGNATURE` alias per definition in `module_text`:
    /// `f x y = ...` gives `f ⟨arg⟩ ⟨arg⟩`. Nothing is added on a parse
    /// error.
    pub fn import_module_aliases(&mut self, module_text: &str, spec: &GrammarSpec) -> Result<usize, AliasError> {
        let outcome = parse_text(spec, module_text)?;
        let tree = outcome.doc.to_subtree();
        let mut added = 0;
        for define in defines(&tree) {
            let Some(NodeKind::Leaf { text: name, .. }) = define.children.first().map(|c| &c.kind) else {
                continue;
            };
            let arity = define.children.get(1).map_or(0, |params| params.children.len());
            let mut expansion = name.clone();
            for _ in 0..arity {
                expansion.push_str(" ⟨arg⟩");
            }
            added += usize::from(self.insert(AliasEntry {
                name: name.clone(),
                expansion,
                origin: Origin::ModuleSignature,
            }));
        }
        Ok(added)
    }

    /// Line format: `origin<TAB>name<TAB>expansion`, expansion escaped.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in self.entries.values() {
            out.push_str(e.origin.as_str());
            out.push('\t');
            out.push_str(&e.name);
            out.push('\t');
            out.push_str(&escape(&e.expansion));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<AliasTable, AliasError> {
        let mut table = AliasTable::new();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.splitn(3, '\t');
            let (Some(origin), Some(name), Some(expansion)) = (parts.next(), parts.next(), parts.next()) else {
                return Err(AliasError::Format(format!("line {}: expected three fields", n + 1)));
            };
            let entry = AliasEntry { name: name.to_string(), expansion: unescape(expansion)?, origin: origin.parse()? };
            if !table.insert(entry) {
                return Err(AliasError::Format(format!("line {}: duplicate name {name:?}", n + 1)));
            }
        }
        Ok(table)
    }
}

impl fmt::Display for AliasTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn defines(tree: &Subtree) -> Vec<&Subtree> {
    let mut out = Vec::new();
    let mut stack = vec![tree];
    while let Some(t) = stack.pop() {
        if matches!(&t.kind, NodeKind::Operator { operator } if operator == "define") {
            out.push(t);
        }
        stack.extend(t.children.iter().rev());
    }
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Result<String, AliasError> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            other => return Err(AliasError::Format(format!("bad escape \\{}", other.map(String::from).unwrap_or_default()))),
        }
    }
    Ok(out)
}

/// Keyword templates: one entry per production whose pretty rule has a
/// keyword, named after its first word keyword (the operator name when the
/// rule only has punctuation), expanding to the printed skeleton.
pub fn builtin_table(spec: &GrammarSpec) -> AliasTable {
    let opts = PrintOptions { placeholders: PlaceholderStyle::Template, ..PrintOptions::default() };
    let reserved = spec.reserved_words();
    let mut table = AliasTable::new();
    for production in &spec.productions {
        let Some(rule) = spec.pretty_rule(&production.operator) else { continue };
        let keywords: Vec<&str> = rule
            .format
            .iter()
            .filter_map(|a| match a {
                FormatAtom::Keyword(k) => Some(k.as_str()),
                _ => None,
            })
            .collect();
        if keywords.is_empty() {
            continue;
        }
        let Some(skeleton) = Subtree::skeleton(spec, &production.operator) else { continue };
        let Ok(expansion) = print_subtree(&skeleton, spec, &opts) else { continue };
        let word = keywords.iter().find(|k| reserved.contains(**k));
        let names = word.map(|w| w.to_string()).into_iter().chain([production.operator.clone()]);
        for name in names {
            if table.insert(AliasEntry { name, expansion: expansion.clone(), origin: Origin::BuiltinKeyword }) {
                break;
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::builtin_demo_spec;
    use proptest::prelude::*;

    fn windows() -> AliasTable {
        let mut t = AliasTable::new();
        t.learn_word("CreateSimpleWindow");
        t
    }

    #[test]
    fn cre_unique() {
        assert_eq!(windows().expand_prefix("Cre"), Expansion::Unique("CreateSimpleWindow".into()));
    }

    #[test]
    fn cre_ambiguous() {
        let mut t = windows();
        t.learn_word("CreateComplexWindow");
        assert_eq!(
            t.expand_prefix("Cre"),
            Expansion::Ambiguous(vec!["CreateSimpleWindow".into(), "CreateComplexWindow".into()])
        );
        assert_eq!(AliasTable::new().expand_prefix("Z"), Expansion::None);
    }

    #[test]
    fn exact_name_wins() {
        let mut t = AliasTable::new();
        t.learn_word("map");
        t.learn_word("mapAccum");
        assert_eq!(t.expand_prefix("map"), Expansion::Unique("map".into()));
        assert_eq!(t.expand_prefix("ma"), Expansion::Ambiguous(vec!["map".into(), "mapAccum".into()]));
    }

    #[test]
    fn learner_rules() {
        let mut t = windows();
        assert!(!t.learn_word("CreateSimpleWindow"));
        assert_eq!(t.len(), 1);
        assert!(!t.learn_word("x"));
        assert!(!t.learn_word("2x"));
        let mut b = builtin_table(&builtin_demo_spec());
        let before = b.get("if").cloned();
        assert!(!b.learn_word("if"));
        assert_eq!(b.get("if").cloned(), before);
    }

    #[test]
    fn builtin_templates() {
        let spec = builtin_demo_spec();
        let t = builtin_table(&spec);
        let e = t.get("if").unwrap();
        assert_eq!(e.origin, Origin::BuiltinKeyword);
        assert_eq!(e.expansion, "⟨expression⟩ if ⟨expression⟩\n  otherwise ⟨expression⟩");
        assert!(t.get("case").is_some() && t.get("begin").is_some());
        let with_keyword = spec
            .pretty_rules
            .iter()
            .filter(|r| spec.production(&r.operator).is_some())
            .filter(|r| r.format.iter().any(|a| matches!(a, FormatAtom::Keyword(_))))
            .count();
        assert!(t.len() >= with_keyword);
    }

    #[test]
    fn module_signatures() {
        let spec = builtin_demo_spec();
        let mut t = AliasTable::new();
        assert_eq!(t.import_module_aliases("f x y = x;\ng = 1;\n", &spec).unwrap(), 2);
        assert_eq!(t.get("f").unwrap().expansion, "f ⟨arg⟩ ⟨arg⟩");
        assert_eq!(t.get("g").unwrap().expansion, "g");
        assert_eq!(t.import_module_aliases("", &spec).unwrap(), 0);
        let before = t.clone();
        assert!(t.import_module_aliases("h x = ;", &spec).is_err());
        assert_eq!(t, before);
    }

    #[test]
    fn file_format() {
        let mut t = builtin_table(&builtin_demo_spec());
        t.learn_word("tab\\name");
        t.learn_word("word");
        let text = t.to_text();
        assert!(text.contains("BUILTIN_KEYWORD\tif\t⟨expression⟩ if ⟨expression⟩\\n  otherwise ⟨expression⟩\n"));
        assert_eq!(AliasTable::from_text(&text).unwrap(), t);
        assert!(AliasTable::from_text("NOPE\ta\tb\n").is_err());
        assert!(AliasTable::from_text("LEARNED_WORD\ta\n").is_err());
    }

    proptest! {
        #[test]
        fn learned_words_expand_to_themselves(words in prop::collection::vec("[A-Za-z_][A-Za-z0-9_]{0,8}", 1..20)) {
            let mut t = builtin_table(&builtin_demo_spec());
            for w in &words {
                t.learn_word(w);
            }
            for w in &words {
                let r = t.expand_prefix(w);
                if let Some(e) = t.get(w) {
                    prop_assert_eq!(r, Expansion::Unique(e.expansion.clone()));
                    if e.origin == Origin::LearnedWord {
                        prop_assert_eq!(&e.expansion, w);
                    }
                } else {
                    prop_assert!(w.len() < MIN_LEARNED_LEN);
                }
            }
            prop_assert_eq!(AliasTable::from_text(&t.to_text()).unwrap(), t);
        }
    }
}
