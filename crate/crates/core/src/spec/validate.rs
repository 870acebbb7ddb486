use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{FormatAtom, GrammarSpec, Multiplicity, Symbol};

/// A well-formedness violation, attributed to the rule it was found in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub rule: String,
    pub reason: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.reason)
    }
}

/// Checks every structural invariant of a spec. An empty result means the
/// spec can drive the editor.
pub fn validate_spec(spec: &GrammarSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |rule: &str, reason: String| {
        out.push(Diagnostic { rule: rule.to_string(), reason });
    };

    // Names live in one namespace.
    let mut defined: BTreeMap<&str, &str> = BTreeMap::new();
    let decls = spec
        .classes
        .iter()
        .map(|c| (c.name.as_str(), "class"))
        .chain(spec.productions.iter().map(|p| (p.operator.as_str(), "node")))
        .chain(spec.leaves.iter().map(|l| (l.operator.as_str(), "leaf")));
    for (name, what) in decls {
        if let Some(prev) = defined.insert(name, what) {
            push(name, format!("duplicate definition: {name} ({prev} and {what})"));
        }
    }

    if spec.symbol(&spec.start).is_none() {
        push(&spec.start, format!("undefined start class {}", spec.start));
    }

    for class in &spec.classes {
        if class.alternatives.is_empty() {
            push(&class.name, format!("class {} has no alternatives", class.name));
        }
        let mut seen = BTreeSet::new();
        for alt in &class.alternatives {
            if !seen.insert(alt) {
                push(&class.name, format!("duplicate alternative {alt}"));
            }
            if spec.symbol(alt).is_none() {
                push(&class.name, format!("undefined alternative {alt}"));
            }
        }
    }
    for cycle in class_cycles(spec) {
        push(&cycle[0], format!("cyclic class chain: {}", cycle.join(" -> ")));
    }

    for prod in &spec.productions {
        let mut seen = BTreeSet::new();
        for slot in &prod.slots {
            if !seen.insert(&slot.name) {
                push(&prod.operator, format!("duplicate slot {}", slot.name));
            }
            if spec.symbol(&slot.ty).is_none() {
                push(&prod.operator, format!("undefined slot type {}", slot.ty));
            }
        }
    }

    let mut rules_seen = BTreeSet::new();
    for rule in &spec.pretty_rules {
        let op = rule.operator.as_str();
        if !rules_seen.insert(op) {
            push(op, format!("duplicate pretty rule: {op}"));
            continue;
        }
        let Some(prod) = spec.production(op) else {
            push(op, format!("pretty rule for undefined production {op}"));
            continue;
        };
        if rule.metavars.len() != prod.slots.len() {
            push(
                op,
                format!(
                    "pretty rule {op} binds {} meta-variables for {} slots",
                    rule.metavars.len(),
                    prod.slots.len()
                ),
            );
        }
        let mut used = BTreeSet::new();
        let mut depth: i64 = 0;
        for atom in &rule.format {
            match atom {
                FormatAtom::Keyword(k) if k.is_empty() => {
                    push(op, "empty keyword".into());
                }
                FormatAtom::Child(m) => {
                    used.insert(m.as_str());
                    if rule.metavar_index(m).is_none() {
                        push(op, format!("undeclared meta-variable #{m}"));
                    }
                }
                FormatAtom::ListSep { metavar, .. } => {
                    used.insert(metavar.as_str());
                    match rule.metavar_index(metavar) {
                        None => push(op, format!("undeclared meta-variable #{metavar}")),
                        Some(i) => {
                            let list = prod.slots.get(i).map(|s| s.multiplicity);
                            if list == Some(Multiplicity::One) {
                                push(op, format!("sep over single-valued slot #{metavar}"));
                            }
                        }
                    }
                }
                FormatAtom::TabPush => depth += 1,
                FormatAtom::TabPop => {
                    depth -= 1;
                    if depth < 0 {
                        push(op, format!("unbalanced tabulation in pretty rule {op}"));
                        depth = 0;
                    }
                }
                _ => {}
            }
        }
        if depth != 0 {
            push(op, format!("unbalanced tabulation in pretty rule {op}"));
        }
        for m in &rule.metavars {
            if !used.contains(m.as_str()) {
                push(op, format!("unused meta-variable #{m}"));
            }
        }
    }
    for prod in &spec.productions {
        if !rules_seen.contains(prod.operator.as_str()) {
            push(&prod.operator, format!("missing pretty rule: {}", prod.operator));
        }
    }

    for sugar in &spec.sugar_rules {
        if spec.production(&sugar.target).is_none() {
            push(&sugar.name, format!("sugar target {} is not a production", sugar.target));
        }
    }
    out
}

/// Every class chain that revisits a class, reported once per cycle.
fn class_cycles(spec: &GrammarSpec) -> Vec<Vec<String>> {
    let mut cycles = Vec::new();
    let mut reported = BTreeSet::new();
    for class in &spec.classes {
        let mut path = vec![class.name.clone()];
        walk(spec, &mut path, &mut cycles, &mut reported);
    }
    cycles
}

fn walk(
    spec: &GrammarSpec,
    path: &mut Vec<String>,
    cycles: &mut Vec<Vec<String>>,
    reported: &mut BTreeSet<BTreeSet<String>>,
) {
    let Some(Symbol::Class(class)) = spec.symbol(path.last().unwrap()) else {
        return;
    };
    for alt in &class.alternatives {
        if let Some(pos) = path.iter().position(|p| p == alt) {
            let mut cycle: Vec<String> = path[pos..].to_vec();
            let key: BTreeSet<String> = cycle.iter().cloned().collect();
            if reported.insert(key) {
                cycle.push(alt.clone());
                cycles.push(cycle);
            }
            continue;
        }
        if spec.class(alt).is_some() {
            path.push(alt.clone());
            walk(spec, path, cycles, reported);
            path.pop();
        }
    }
}
