//! Random documents for tests and benchmarks.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ast::{Decoration, DecorationKind, DisplayState, Position, Subtree};
use crate::spec::{GrammarSpec, LexicalKind, Multiplicity, Symbol};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    /// Node depth bound, counting every operator and leaf on a path but not
    /// list wrappers.
    pub max_depth: usize,
    pub max_list: usize,
    /// Chance that a slot stays a placeholder.
    pub placeholder_rate: f64,
    /// Chance that a node gets a comment or annotation.
    pub decoration_rate: f64,
    /// Chance that a node is iconified.
    pub iconify_rate: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_depth: 6, max_list: 3, placeholder_rate: 0.0, decoration_rate: 0.0, iconify_rate: 0.0 }
    }
}

const IDENTS: [&str; 6] = ["x", "y", "f", "g", "acc", "n2"];
const STRINGS: [&str; 5] = ["", "a b", "q\"t", "back\\slash", "two\nlines"];
const PAYLOADS: [&str; 4] = ["note", "two words", "", "multi\nline"];

/// Smallest depth of a complete tree of each type.
pub fn min_depths(spec: &GrammarSpec) -> BTreeMap<String, usize> {
    let mut out: BTreeMap<String, usize> = spec.leaves.iter().map(|l| (l.operator.clone(), 1)).collect();
    loop {
        let mut changed = false;
        for p in &spec.productions {
            let need = p
                .slots
                .iter()
                .filter(|s| s.multiplicity == Multiplicity::One)
                .map(|s| out.get(&s.ty).copied())
                .try_fold(0, |acc, d| d.map(|d| acc.max(d)));
            if let Some(d) = need {
                changed |= improve(&mut out, &p.operator, d + 1);
            }
        }
        for c in &spec.classes {
            if let Some(d) = c.alternatives.iter().filter_map(|a| out.get(a).copied()).min() {
                changed |= improve(&mut out, &c.name, d);
            }
        }
        if !changed {
            return out;
        }
    }
}

fn improve(map: &mut BTreeMap<String, usize>, key: &str, d: usize) -> bool {
    match map.get(key) {
        Some(&old) if old <= d => false,
        _ => {
            map.insert(key.to_string(), d);
            true
        }
    }
}

pub struct Generator<'s> {
    spec: &'s GrammarSpec,
    depths: BTreeMap<String, usize>,
    reserved: std::collections::BTreeSet<String>,
    pub config: GenConfig,
}

impl<'s> Generator<'s> {
    pub fn new(spec: &'s GrammarSpec, config: GenConfig) -> Self {
        Generator { spec, depths: min_depths(spec), reserved: spec.reserved_words(), config }
    }

    /// A tree of the start type.
    pub fn document<R: Rng>(&self, rng: &mut R) -> Subtree {
        self.tree(rng, &self.spec.start.clone(), self.config.max_depth.max(self.min_depth(&self.spec.start)))
    }

    pub fn min_depth(&self, ty: &str) -> usize {
        self.depths.get(ty).copied().unwrap_or(usize::MAX)
    }

    /// A tree of type `ty` no deeper than `depth`, which must be at least
    /// the type's minimum depth.
    pub fn tree<R: Rng>(&self, rng: &mut R, ty: &str, depth: usize) -> Subtree {
        let members: Vec<String> =
            self.spec.members(ty).into_iter().filter(|m| self.min_depth(m) <= depth).collect();
        let choice = members.choose(rng).expect("depth below the type's minimum");
        let mut tree = match self.spec.symbol(choice) {
            Some(Symbol::Leaf(l)) => Subtree::leaf(choice, &self.leaf_text(rng, l.kind)),
            Some(Symbol::Production(p)) => {
                let children = p
                    .slots
                    .iter()
                    .map(|s| match s.multiplicity {
                        Multiplicity::One => self.slot(rng, &s.ty, depth - 1),
                        Multiplicity::List => self.list(rng, &s.ty, depth - 1),
                    })
                    .collect();
                Subtree::operator(choice, children)
            }
            _ => unreachable!("members are productions and leaves"),
        };
        self.decorate(rng, &mut tree);
        tree
    }

    fn slot<R: Rng>(&self, rng: &mut R, ty: &str, depth: usize) -> Subtree {
        if rng.gen_bool(self.config.placeholder_rate) {
            Subtree::placeholder(ty, Multiplicity::One)
        } else {
            self.tree(rng, ty, depth)
        }
    }

    fn list<R: Rng>(&self, rng: &mut R, ty: &str, depth: usize) -> Subtree {
        if depth == 0 {
            return Subtree::list(ty, Vec::new());
        }
        if rng.gen_bool(self.config.placeholder_rate) {
            return Subtree::placeholder(ty, Multiplicity::List);
        }
        let n = if self.min_depth(ty) <= depth { rng.gen_range(0..=self.config.max_list) } else { 0 };
        let mut items: Vec<Subtree> = (0..n).map(|_| self.slot(rng, ty, depth)).collect();
        if rng.gen_bool(self.config.placeholder_rate) {
            items.push(Subtree::placeholder(ty, Multiplicity::List));
        }
        Subtree::list(ty, items)
    }

    fn leaf_text<R: Rng>(&self, rng: &mut R, kind: LexicalKind) -> String {
        match kind {
            LexicalKind::Integer => rng.gen_range(0..200u32).to_string(),
            LexicalKind::Identifier => loop {
                let w = IDENTS.choose(rng).unwrap();
                if !self.reserved.contains(*w) {
                    return w.to_string();
                }
            },
            LexicalKind::String => STRINGS.choose(rng).unwrap().to_string(),
        }
    }

    fn decorate<R: Rng>(&self, rng: &mut R, tree: &mut Subtree) {
        if rng.gen_bool(self.config.iconify_rate) {
            tree.display = if rng.gen() { DisplayState::IconifiedGraphic } else { DisplayState::IconifiedText };
        }
        while rng.gen_bool(self.config.decoration_rate) {
            let payload = PAYLOADS.choose(rng).unwrap().to_string();
            let d = if rng.gen_bool(0.8) {
                let position = *[Position::Before, Position::Onto, Position::After].choose(rng).unwrap();
                Decoration::comment(position, payload)
            } else {
                Decoration { kind: DecorationKind::Annotation, position: Position::Onto, payload }
            };
            tree.decorations.push(d);
        }
    }
}
