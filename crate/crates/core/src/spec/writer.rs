use std::fmt::Write;

use super::{FormatAtom, GrammarSpec, Multiplicity};

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical writer: one declaration per line, single spaces, LF endings.
/// Order is language, classes, nodes, leaves, pretty rules, sugar rules.
pub fn print_spec(spec: &GrammarSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "language {} start {}", spec.name, spec.start);
    for class in &spec.classes {
        let _ = writeln!(out, "class {} = {} ;", class.name, class.alternatives.join(" | "));
    }
    for prod in &spec.productions {
        let slots: Vec<String> = prod
            .slots
            .iter()
            .map(|s| {
                let star = if s.multiplicity == Multiplicity::List { "*" } else { "" };
                format!("{}: {}{}", s.name, s.ty, star)
            })
            .collect();
        let _ = writeln!(out, "node {} ({}) ;", prod.operator, slots.join(", "));
    }
    for leaf in &spec.leaves {
        let _ = writeln!(out, "leaf {} : {} ;", leaf.operator, leaf.kind.as_str());
    }
    for rule in &spec.pretty_rules {
        let vars: Vec<String> = rule.metavars.iter().map(|m| format!("#{m}")).collect();
        let _ = write!(out, "pretty {} ({}) ->", rule.operator, vars.join(", "));
        for atom in &rule.format {
            out.push(' ');
            match atom {
                FormatAtom::Keyword(k) => out.push_str(&quote(k)),
                FormatAtom::Child(m) => {
                    out.push('#');
                    out.push_str(m);
                }
                FormatAtom::Newline => out.push_str("'\\n'"),
                FormatAtom::TabPush => out.push_str("'\\tab+'"),
                FormatAtom::TabPop => out.push_str("'\\tab-'"),
                FormatAtom::Space => out.push_str("'\\sp'"),
                FormatAtom::ListSep { sep, metavar } => {
                    let _ = write!(out, "sep({}, #{})", quote(sep), metavar);
                }
            }
        }
        out.push_str(" ;\n");
    }
    for sugar in &spec.sugar_rules {
        let _ = write!(out, "sugar {} {}({})", sugar.name, sugar.kind.as_str(), sugar.target);
        for k in &sugar.keywords {
            out.push(' ');
            out.push_str(&quote(k));
        }
        out.push_str(" ;\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{
        builtin_demo_spec, parse_spec, ClassRule, LeafRule, LexicalKind, PrettyRule,
        ProductionRule, Slot, SugarKind, SugarRule,
    };
    use proptest::prelude::*;

    #[test]
    fn demo_roundtrips() {
        let spec = builtin_demo_spec();
        let text = print_spec(&spec);
        assert_eq!(parse_spec(&text).unwrap(), spec);
        assert!(!text.contains("\r"));
    }

    #[test]
    fn golden_lines() {
        let spec = builtin_demo_spec();
        let text = print_spec(&spec);
        assert!(text.starts_with("language staple-mini start prog\n"));
        assert!(text.contains(
            "pretty if (#cond, #stat1, #stat2) -> #stat1 \"if\" #cond '\\n' '\\tab+' \"otherwise\" #stat2 '\\tab-' ;\n"
        ));
        assert!(text.contains("node prog (defs: define*, exprs: expression*) ;\n"));
    }

    fn name() -> impl Strategy<Value = String> {
        "[a-z][a-z0-9_]{0,6}".prop_filter("reserved", |s| {
            !["sep", "language", "class", "node", "leaf", "pretty", "sugar", "start"].contains(&s.as_str())
        })
    }

    fn atom(vars: Vec<String>) -> impl Strategy<Value = FormatAtom> {
        let pick = proptest::sample::select(vars);
        prop_oneof![
            "[ -~]{1,4}".prop_map(FormatAtom::Keyword),
            pick.clone().prop_map(FormatAtom::Child),
            Just(FormatAtom::Newline),
            Just(FormatAtom::TabPush),
            Just(FormatAtom::TabPop),
            Just(FormatAtom::Space),
            ("[ -~\n]{0,3}", pick).prop_map(|(sep, metavar)| FormatAtom::ListSep { sep, metavar }),
        ]
    }

    fn arb_spec() -> impl Strategy<Value = GrammarSpec> {
        let slots = proptest::collection::vec((name(), name(), any::<bool>()), 1..4);
        (
            name(),
            name(),
            proptest::collection::vec((name(), proptest::collection::vec(name(), 1..4)), 0..3),
            proptest::collection::vec((name(), slots), 1..3),
            proptest::collection::vec(name(), 0..3),
            proptest::collection::vec((name(), name(), proptest::collection::vec("[a-z,;]{1,3}", 0..3)), 0..2),
        )
            .prop_flat_map(|(lang, start, classes, prods, leaves, sugars)| {
                #[allow(clippy::type_complexity)]
                let prods: Vec<(String, Vec<(String, String, bool)>)> = prods
                    .into_iter()
                    .map(|(op, slots)| {
                        let mut seen = std::collections::BTreeSet::new();
                        (op, slots.into_iter().filter(|s| seen.insert(s.0.clone())).collect())
                    })
                    .collect();
                let rules: Vec<_> = prods
                    .iter()
                    .map(|(op, slots)| {
                        let vars: Vec<String> = slots.iter().map(|s| s.0.clone()).collect();
                        (Just(op.clone()), Just(vars.clone()), proptest::collection::vec(atom(vars), 0..6))
                    })
                    .collect();
                (
                    Just((lang, start, classes, prods, leaves, sugars)),
                    rules,
                )
            })
            .prop_map(|((lang, start, classes, prods, leaves, sugars), rules)| GrammarSpec {
                name: lang,
                start,
                classes: classes
                    .into_iter()
                    .map(|(name, alternatives)| ClassRule { name, alternatives })
                    .collect(),
                productions: prods
                    .into_iter()
                    .map(|(operator, slots)| ProductionRule {
                        operator,
                        slots: slots
                            .into_iter()
                            .map(|(name, ty, list)| Slot {
                                name,
                                ty,
                                multiplicity: if list { Multiplicity::List } else { Multiplicity::One },
                            })
                            .collect(),
                    })
                    .collect(),
                leaves: leaves
                    .into_iter()
                    .enumerate()
                    .map(|(i, operator)| LeafRule {
                        operator,
                        kind: [LexicalKind::Integer, LexicalKind::Identifier, LexicalKind::String][i % 3],
                    })
                    .collect(),
                pretty_rules: rules
                    .into_iter()
                    .map(|(operator, metavars, format)| PrettyRule { operator, metavars, format })
                    .collect(),
                sugar_rules: sugars
                    .into_iter()
                    .enumerate()
                    .map(|(i, (name, target, keywords))| SugarRule {
                        name,
                        kind: [SugarKind::GuardCascade, SugarKind::KeywordVariant][i % 2],
                        target,
                        keywords,
                    })
                    .collect(),
            })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(spec in arb_spec()) {
            let text = print_spec(&spec);
            prop_assert_eq!(parse_spec(&text).unwrap(), spec);
        }
    }
}
