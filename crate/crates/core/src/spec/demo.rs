use super::{parse_spec, GrammarSpec};

/// Source of the bundled `staple-mini` language.
pub const DEMO_SPEC_SOURCE: &str = include_str!("../../specs/staple-mini.absyn");

/// The bundled demo language.
pub fn builtin_demo_spec() -> GrammarSpec {
    parse_spec(DEMO_SPEC_SOURCE).expect("bundled spec parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{validate_spec, Multiplicity};

    const FIGURE_MENU: [&str; 11] = [
        "literal",
        "variable",
        "tuple",
        "list",
        "comprehension",
        "diagonalization",
        "abstraction",
        "application",
        "if",
        "case",
        "block",
    ];

    #[test]
    fn expression_menu() {
        let spec = builtin_demo_spec();
        assert_eq!(spec.completions_of_class("expression").unwrap(), FIGURE_MENU);
        assert_eq!(spec.completions_of_class("define").unwrap(), ["define"]);
        assert!(spec.completions_of_class("nosuch").is_err());
    }

    #[test]
    fn prog_and_if_shapes() {
        let spec = builtin_demo_spec();
        let prog = spec.production("prog").unwrap();
        let slots: Vec<_> = prog.slots.iter().map(|s| (s.name.as_str(), s.ty.as_str(), s.multiplicity)).collect();
        assert_eq!(
            slots,
            [("defs", "define", Multiplicity::List), ("exprs", "expression", Multiplicity::List)]
        );
        let iff = spec.production("if").unwrap();
        assert_eq!(iff.slots.len(), 3);
        assert!(iff
            .slots
            .iter()
            .all(|s| s.ty == "expression" && s.multiplicity == Multiplicity::One));
        assert!(validate_spec(&spec).is_empty());
    }

    #[test]
    fn members_flatten_and_conformance() {
        let spec = builtin_demo_spec();
        let members = spec.members("expression");
        assert_eq!(members[0..2], ["intlit", "strlit"]);
        assert_eq!(members.len(), 12);
        assert!(spec.conforms("intlit", "expression"));
        assert!(spec.conforms("literal", "expression"));
        assert!(!spec.conforms("define", "expression"));
        assert!(!spec.conforms("expression", "literal"));
    }

    #[test]
    fn reserved_words() {
        let words: Vec<_> = builtin_demo_spec().reserved_words().into_iter().collect();
        assert_eq!(words, ["begin", "case", "else", "end", "if", "of", "otherwise"]);
    }
}
