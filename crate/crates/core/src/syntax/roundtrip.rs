use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::spec::{GrammarSpec, SugarKind};

use super::lexer::{tokenize, Lexicon, Token};
use super::parser::parse_program;
use super::unparse::unparse_subtree;
use super::{RoundtripError, Span, TAB_WIDTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    RedundantParens,
    SugarGuard,
    SugarMultiDecl,
    KeywordVariant,
    Trivia,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::RedundantParens,
        Category::SugarGuard,
        Category::SugarMultiDecl,
        Category::KeywordVariant,
        Category::Trivia,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::RedundantParens => "REDUNDANT_PARENS",
            Category::SugarGuard => "SUGAR_GUARD",
            Category::SugarMultiDecl => "SUGAR_MULTI_DECL",
            Category::KeywordVariant => "KEYWORD_VARIANT",
            Category::Trivia => "TRIVIA",
        }
    }

    pub fn from_name(name: &str) -> Option<Category> {
        Category::ALL.into_iter().find(|c| c.as_str() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Difference {
    pub original: Span,
    pub canonical: Span,
    pub category: Category,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundtripReport {
    pub original: String,
    pub canonical: String,
    pub identical: bool,
    pub differences: Vec<Difference>,
}

impl RoundtripReport {
    pub fn count(&self, category: Category) -> usize {
        self.differences.iter().filter(|d| d.category == category).count()
    }

    pub fn categories(&self) -> Vec<Category> {
        self.differences.iter().map(|d| d.category).collect()
    }

    /// Line report: one line per difference, then counts per category.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for d in &self.differences {
            let _ = writeln!(out, "{}  orig{} -> canon{}", d.category.as_str(), d.original, d.canonical);
        }
        for c in Category::ALL {
            let _ = writeln!(out, "{}: {}", c.as_str(), self.count(c));
        }
        out
    }
}

/// Longest common subsequence of token texts as matched index pairs.
fn align(a: &[Token], b: &[Token]) -> Vec<(usize, usize)> {
    let mut prefix = 0;
    while prefix < a.len() && prefix < b.len() && a[prefix].text == b[prefix].text {
        prefix += 1;
    }
    let mut suffix = 0;
    while suffix < a.len() - prefix
        && suffix < b.len() - prefix
        && a[a.len() - 1 - suffix].text == b[b.len() - 1 - suffix].text
    {
        suffix += 1;
    }
    let am = &a[prefix..a.len() - suffix];
    let bm = &b[prefix..b.len() - suffix];
    let (n, m) = (am.len(), bm.len());
    let mut table = vec![0u32; (n + 1) * (m + 1)];
    let at = |i: usize, j: usize| i * (m + 1) + j;
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            table[at(i, j)] = if am[i].text == bm[j].text {
                table[at(i + 1, j + 1)] + 1
            } else {
                table[at(i + 1, j)].max(table[at(i, j + 1)])
            };
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..prefix).map(|i| (i, i)).collect();
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if am[i].text == bm[j].text {
            pairs.push((prefix + i, prefix + j));
            i += 1;
            j += 1;
        } else if table[at(i + 1, j)] >= table[at(i, j + 1)] {
            i += 1;
        } else {
            j += 1;
        }
    }
    pairs.extend((0..suffix).map(|k| (a.len() - suffix + k, b.len() - suffix + k)));
    pairs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Group {
    Event(usize),
    Paren(usize),
    Variant(usize),
    CanonParen(usize),
    Other(usize),
    Layout(usize),
}

#[derive(Default)]
struct Acc {
    category: Option<Category>,
    original: Option<Span>,
    canonical: Option<Span>,
}

fn widen(slot: &mut Option<Span>, span: Span) {
    *slot = Some(match *slot {
        None => span,
        Some(s) => Span::new(s.start.min(span.start), s.end.max(span.end)),
    });
}

fn add(groups: &mut BTreeMap<Group, Acc>, key: Group, category: Category, original: Option<Span>, canon: Option<Span>) {
    let acc = groups.entry(key).or_default();
    acc.category.get_or_insert(category);
    if let Some(s) = original {
        widen(&mut acc.original, s);
    }
    if let Some(s) = canon {
        widen(&mut acc.canonical, s);
    }
}

/// Compares `text` with the canonical unparse of its parse and classifies
/// each difference.
pub fn roundtrip_check(spec: &GrammarSpec, text: &str) -> Result<RoundtripReport, RoundtripError> {
    let parsed = parse_program(spec, text)?;
    let canonical = unparse_subtree(&parsed.tree, spec, TAB_WIDTH)?;
    let (ctokens, _) = tokenize(&canonical, &Lexicon::for_spec(spec)).map_err(RoundtripError::Canonical)?;
    let otokens = &parsed.tokens;
    let pairs = align(otokens, &ctokens);

    // Token index -> event index, for events that explain single tokens.
    let mut token_event: BTreeMap<usize, usize> = BTreeMap::new();
    for (e, ev) in parsed.events.iter().enumerate() {
        if matches!(ev.kind, SugarKind::RedundantParens) {
            token_event.insert(ev.tokens.0, e);
            token_event.insert(ev.tokens.1, e);
        } else if ev.kind == SugarKind::KeywordVariant {
            token_event.insert(ev.tokens.0, e);
        }
    }
    let regions: Vec<(usize, Span, Category)> = parsed
        .events
        .iter()
        .enumerate()
        .filter_map(|(e, ev)| match ev.kind {
            SugarKind::GuardCascade => Some((e, ev.span, Category::SugarGuard)),
            SugarKind::MultiDecl => Some((e, ev.span, Category::SugarMultiDecl)),
            _ => None,
        })
        .collect();

    let mut groups: BTreeMap<Group, Acc> = BTreeMap::new();
    for g in 0..=pairs.len() {
        let prev = g.checked_sub(1).map(|k| pairs[k]);
        let next = pairs.get(g).copied();
        let oa = prev.map_or(0, |(i, _)| otokens[i].span.end);
        let ob = next.map_or(text.len(), |(i, _)| otokens[i].span.start);
        let ca = prev.map_or(0, |(_, j)| ctokens[j].span.end);
        let cb = next.map_or(canonical.len(), |(_, j)| ctokens[j].span.start);
        let orig_range = prev.map_or(0, |(i, _)| i + 1)..next.map_or(otokens.len(), |(i, _)| i);
        let canon_range = prev.map_or(0, |(_, j)| j + 1)..next.map_or(ctokens.len(), |(_, j)| j);
        let region = regions.iter().find(|(_, s, _)| oa <= s.end && s.start <= ob);

        if orig_range.is_empty() && canon_range.is_empty() {
            let (o, c) = (&text[oa..ob], &canonical[ca..cb]);
            let same = if next.is_none() { o.trim_end() == c.trim_end() } else { o == c };
            if !same {
                let (key, category) = match region {
                    Some((e, _, cat)) => (Group::Event(*e), *cat),
                    None => (Group::Layout(g), Category::Trivia),
                };
                let acc = groups.entry(key).or_default();
                acc.category = Some(category);
                widen(&mut acc.original, Span::new(oa, ob));
                widen(&mut acc.canonical, Span::new(ca, cb));
            }
            continue;
        }

        if let Some((e, span, category)) = region {
            add(&mut groups, Group::Event(*e), *category, Some(*span), None);
            let group = groups.get_mut(&Group::Event(*e)).unwrap();
            for i in orig_range.clone() {
                widen(&mut group.original, otokens[i].span);
            }
            if canon_range.is_empty() {
                widen(&mut group.canonical, Span::new(ca, ca));
            }
            for j in canon_range {
                widen(&mut group.canonical, ctokens[j].span);
            }
            continue;
        }
        let mut touched = Vec::new();
        for i in orig_range {
            let tok = &otokens[i];
            let (key, category) = match (token_event.get(&i), tok.text.as_str()) {
                (Some(e), "(" | ")") => (Group::Paren(*e), Category::RedundantParens),
                (Some(_), _) => (Group::Variant(g), Category::KeywordVariant),
                _ => (Group::Other(g), Category::Trivia),
            };
            // A removed pair maps onto the canonical text it enclosed.
            let anchor = match tok.text.as_str() {
                "(" if matches!(key, Group::Paren(_)) => Some(Span::new(cb, cb)),
                ")" if matches!(key, Group::Paren(_)) => Some(Span::new(ca, ca)),
                _ => None,
            };
            add(&mut groups, key, category, Some(tok.span), anchor);
            touched.push(key);
        }
        for j in canon_range {
            let tok = &ctokens[j];
            let (key, category) = match tok.text.as_str() {
                "(" | ")" => (Group::CanonParen(g), Category::RedundantParens),
                "otherwise" if groups.contains_key(&Group::Variant(g)) => (Group::Variant(g), Category::KeywordVariant),
                _ => (Group::Other(g), Category::Trivia),
            };
            add(&mut groups, key, category, None, Some(tok.span));
            touched.push(key);
        }
        // Groups missing one side get a zero-width span at the gap.
        for key in touched {
            let acc = groups.get_mut(&key).unwrap();
            if acc.original.is_none() {
                acc.original = Some(Span::new(oa, oa));
            }
            if acc.canonical.is_none() {
                acc.canonical = Some(Span::new(ca, ca));
            }
        }
    }

    let mut differences: Vec<Difference> = groups
        .into_values()
        .map(|acc| Difference {
            original: acc.original.expect("every group has an original span"),
            canonical: acc.canonical.unwrap_or_default(),
            category: acc.category.expect("every group has a category"),
        })
        .collect();
    differences.sort_by_key(|d| (d.original.start, d.original.end, d.canonical.start, d.category));
    Ok(RoundtripReport {
        original: text.to_string(),
        canonical,
        identical: differences.is_empty(),
        differences,
    })
}
