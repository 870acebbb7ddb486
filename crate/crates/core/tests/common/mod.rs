//! Oracles shared by the integration tests and the acceptance target. They
//! are written against the spec data only and do not call the checks they
//! are used to verify.

#![allow(dead_code)]

use std::collections::BTreeSet;

use synted_core::ast::{AstDoc, NodeId, NodeKind, Subtree};
use synted_core::layout::{Geometry, Shape};
use synted_core::spec::{GrammarSpec, LexicalKind, Multiplicity};

/// Every production or leaf name a slot of type `ty` admits, found by
/// walking class alternatives breadth first.
pub fn admitted(spec: &GrammarSpec, ty: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut queue = std::collections::VecDeque::from([ty.to_string()]);
    while let Some(t) = queue.pop_front() {
        if !seen.insert(t.clone()) {
            continue;
        }
        out.insert(t.clone());
        if let Some(class) = spec.classes.iter().find(|c| c.name == t) {
            queue.extend(class.alternatives.iter().cloned());
        }
    }
    out
}

/// Slot type of `id` read off the parent's production.
pub fn slot_of(spec: &GrammarSpec, doc: &AstDoc, id: NodeId) -> Option<String> {
    let parent = match doc.nodes().find(|n| n.children.contains(&id)) {
        None => return Some(spec.start.clone()),
        Some(p) => p,
    };
    match &parent.kind {
        NodeKind::List { element } => Some(element.clone()),
        NodeKind::Operator { operator } => {
            let i = parent.children.iter().position(|c| *c == id)?;
            spec.productions.iter().find(|p| &p.operator == operator)?.slots.get(i).map(|s| s.ty.clone())
        }
        _ => None,
    }
}

/// Whether pasting (`replace == false`) or replacing with `buffer` at
/// `target` should be accepted.
pub fn paste_allowed(spec: &GrammarSpec, doc: &AstDoc, target: NodeId, buffer: Option<&Subtree>, replace: bool) -> bool {
    let Some(buffer) = buffer else { return false };
    let node = doc.node(target).unwrap();
    let found = match &buffer.kind {
        NodeKind::Operator { operator } | NodeKind::Leaf { operator, .. } => operator.clone(),
        NodeKind::Placeholder { expected, multiplicity: Multiplicity::One } => expected.clone(),
        _ => return false,
    };
    let wanted = match &node.kind {
        NodeKind::Placeholder { expected, .. } => expected.clone(),
        NodeKind::List { .. } => return false,
        _ if !replace => return false,
        _ => match slot_of(spec, doc, target) {
            Some(t) => t,
            None => return false,
        },
    };
    admitted(spec, &wanted).contains(&found)
}

pub type Rect = (i64, i64, i64, i64);

pub fn rects(g: &Geometry) -> Vec<Rect> {
    g.primitives
        .iter()
        .filter_map(|p| match p.shape {
            Shape::Rect { x, y, w, h, .. } => Some((x, y, w, h)),
            _ => None,
        })
        .collect()
}

pub fn overlapping_pairs(rs: &[Rect]) -> usize {
    let mut n = 0;
    for (i, a) in rs.iter().enumerate() {
        for b in &rs[i + 1..] {
            let ix = a.0.max(b.0) < (a.0 + a.2).min(b.0 + b.2);
            let iy = a.1.max(b.1) < (a.1 + a.3).min(b.1 + b.3);
            if ix && iy {
                n += 1;
            }
        }
    }
    n
}

/// Segments whose ends are not both the exact center of some rect (by
/// integer halving of width and height).
pub fn unanchored_segments(g: &Geometry) -> usize {
    let centers: BTreeSet<(i64, i64)> = rects(g).iter().map(|&(x, y, w, h)| (x + w / 2, y + h / 2)).collect();
    g.primitives
        .iter()
        .filter(|p| match p.shape {
            Shape::Seg { x1, y1, x2, y2 } => !(centers.contains(&(x1, y1)) && centers.contains(&(x2, y2))),
            _ => false,
        })
        .count()
}

pub fn segment_count(g: &Geometry) -> usize {
    g.primitives.iter().filter(|p| matches!(p.shape, Shape::Seg { .. })).count()
}

/// Every complete tree of `ty` whose depth (operators and leaves, not list
/// wrappers) is at most `depth`. Identifiers are `x`, integers `1`, strings
/// `"x"` or `"1"`; lists hold at most `max_list` elements.
pub fn enumerate(spec: &GrammarSpec, ty: &str, depth: usize, max_list: usize) -> Vec<Subtree> {
    if depth == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for member in admitted(spec, ty) {
        if let Some(leaf) = spec.leaves.iter().find(|l| l.operator == member) {
            let texts: &[&str] = match leaf.kind {
                LexicalKind::Identifier => &["x"],
                LexicalKind::Integer => &["1"],
                LexicalKind::String => &["x", "1"],
            };
            out.extend(texts.iter().map(|t| Subtree::leaf(&member, t)));
        } else if let Some(p) = spec.productions.iter().find(|p| p.operator == member) {
            let mut combos: Vec<Vec<Subtree>> = vec![Vec::new()];
            for slot in &p.slots {
                let options: Vec<Subtree> = match slot.multiplicity {
                    Multiplicity::One => enumerate(spec, &slot.ty, depth - 1, max_list),
                    Multiplicity::List => {
                        let items = enumerate(spec, &slot.ty, depth - 1, max_list);
                        let mut lists = vec![Vec::new()];
                        let mut all = vec![Subtree::list(&slot.ty, Vec::new())];
                        for _ in 0..max_list {
                            lists = lists
                                .iter()
                                .flat_map(|l| {
                                    items.iter().map(move |i| {
                                        let mut l = l.clone();
                                        l.push(i.clone());
                                        l
                                    })
                                })
                                .collect();
                            all.extend(lists.iter().map(|l| Subtree::list(&slot.ty, l.clone())));
                        }
                        all
                    }
                };
                combos = combos
                    .iter()
                    .flat_map(|c| {
                        options.iter().map(move |o| {
                            let mut c = c.clone();
                            c.push(o.clone());
                            c
                        })
                    })
                    .collect();
            }
            out.extend(combos.into_iter().map(|cs| Subtree::operator(&member, cs)));
        }
    }
    out
}
