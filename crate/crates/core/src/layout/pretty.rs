use crate::ast::{AstDoc, Decoration, DecorationKind, NodeId, NodeKind, Position, Subtree};
use crate::spec::{FormatAtom, GrammarSpec, LexicalKind, PrettyRule};

use super::LayoutError;

/// First rule for `operator`, in list order.
pub fn select_rule<'r>(rules: &'r [PrettyRule], operator: &str) -> Result<&'r PrettyRule, LayoutError> {
    rules
        .iter()
        .find(|r| r.operator == operator)
        .ok_or_else(|| LayoutError::NoRule(operator.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlaceholderStyle {
    /// `<expression>`
    #[default]
    Angle,
    /// `⟨expression⟩`, as in alias templates.
    Template,
}

/// Decides whether `child`, printed in slot `slot` of `parent`, needs
/// parentheses.
pub type ParenHook = fn(spec: &GrammarSpec, parent: &Subtree, slot: usize, child: &Subtree) -> bool;

#[derive(Clone, Copy)]
pub struct PrintOptions {
    pub tab_width: usize,
    pub placeholders: PlaceholderStyle,
    pub comments: bool,
    pub parens: Option<ParenHook>,
}

impl Default for PrintOptions {
    fn default() -> Self {
        PrintOptions { tab_width: 2, placeholders: PlaceholderStyle::Angle, comments: true, parens: None }
    }
}

impl PrintOptions {
    pub fn with_tab_width(tab_width: usize) -> Self {
        PrintOptions { tab_width, ..Self::default() }
    }
}

struct Emitter {
    out: String,
    level: usize,
    tab_width: usize,
    line_start: bool,
    pending_newline: bool,
    pending_space: bool,
    last_word: bool,
}

impl Emitter {
    fn new(tab_width: usize) -> Self {
        Emitter {
            out: String::new(),
            level: 0,
            tab_width,
            line_start: true,
            pending_newline: false,
            pending_space: false,
            last_word: false,
        }
    }

    fn newline(&mut self) {
        if !self.out.is_empty() {
            self.pending_newline = true;
        }
        self.pending_space = false;
        self.last_word = false;
    }

    fn space(&mut self) {
        if !self.line_start || self.pending_newline {
            self.pending_space = true;
        }
    }

    /// Starts a word atom: one space after a preceding word atom.
    fn word(&mut self) {
        if self.last_word {
            self.pending_space = true;
        }
    }

    fn text(&mut self, text: &str) {
        if text.is_empty() {
            return;
        }
        if self.pending_newline {
            self.out.push('\n');
            self.line_start = true;
            self.pending_newline = false;
            self.pending_space = false;
        }
        if self.line_start {
            self.out.push_str(&" ".repeat(self.level * self.tab_width));
            self.line_start = false;
        } else if self.pending_space {
            self.out.push(' ');
        }
        self.pending_space = false;
        self.out.push_str(text);
    }

    fn literal(&mut self, text: &str) {
        for (i, line) in text.split('\n').enumerate() {
            if i > 0 {
                self.pending_newline = true;
            }
            let trimmed = line.trim_end_matches(' ');
            self.text(trimmed);
            if trimmed.len() < line.len() {
                self.pending_space = true;
            }
        }
    }

    fn finish(self) -> String {
        self.out
    }
}

fn quote_string(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One `||` line per payload line.
fn comment_lines(payload: &str) -> impl Iterator<Item = String> + '_ {
    payload.split('\n').map(|line| {
        let line = line.trim_end();
        if line.is_empty() {
            "||".to_string()
        } else {
            format!("|| {line}")
        }
    })
}

struct Printer<'a> {
    spec: &'a GrammarSpec,
    opts: &'a PrintOptions,
    em: Emitter,
}

impl Printer<'_> {
    fn comments<'d>(&self, tree: &'d Subtree, position: Position) -> impl Iterator<Item = &'d Decoration> {
        let on = self.opts.comments;
        tree.decorations
            .iter()
            .filter(move |d| on && d.kind == DecorationKind::Comment && d.position == position)
    }

    fn before(&mut self, tree: &Subtree) {
        for d in self.comments(tree, Position::Before) {
            for line in comment_lines(&d.payload) {
                self.em.newline();
                self.em.text(&line);
                self.em.newline();
            }
        }
    }

    fn after(&mut self, tree: &Subtree) {
        for d in self.comments(tree, Position::Onto) {
            for (i, line) in comment_lines(&d.payload).enumerate() {
                if i == 0 {
                    self.em.pending_space = true;
                }
                self.em.text(&line);
                self.em.newline();
            }
        }
        for d in self.comments(tree, Position::After) {
            for line in comment_lines(&d.payload) {
                self.em.newline();
                self.em.text(&line);
                self.em.newline();
            }
        }
    }

    /// Prints one node as a word atom.
    fn node(&mut self, tree: &Subtree, parent: Option<(&Subtree, usize)>) -> Result<(), LayoutError> {
        self.before(tree);
        self.em.word();
        let parens = match (parent, self.opts.parens) {
            (Some((p, slot)), Some(hook)) => hook(self.spec, p, slot, tree),
            _ => false,
        };
        if parens {
            self.em.text("(");
            self.em.last_word = false;
        }
        match &tree.kind {
            NodeKind::Leaf { operator, text } => {
                let is_string = self.spec.leaf(operator).is_some_and(|l| l.kind == LexicalKind::String);
                let shown = if is_string { quote_string(text) } else { text.clone() };
                self.em.text(&shown);
            }
            NodeKind::Placeholder { expected, .. } => {
                let shown = match self.opts.placeholders {
                    PlaceholderStyle::Angle => format!("<{expected}>"),
                    PlaceholderStyle::Template => format!("⟨{expected}⟩"),
                };
                self.em.text(&shown);
            }
            NodeKind::List { .. } => self.list(tree, "", parent)?,
            NodeKind::Operator { operator } => {
                let rule = select_rule(&self.spec.pretty_rules, operator)?;
                for atom in &rule.format {
                    self.atom(tree, rule, atom)?;
                }
            }
        }
        if parens {
            self.em.text(")");
        }
        self.em.last_word = true;
        self.after(tree);
        Ok(())
    }

    fn list(&mut self, list: &Subtree, sep: &str, parent: Option<(&Subtree, usize)>) -> Result<(), LayoutError> {
        let items: &[Subtree] = match list.kind {
            NodeKind::List { .. } => {
                self.before(list);
                &list.children
            }
            _ => std::slice::from_ref(list),
        };
        for (i, item) in items.iter().enumerate() {
            if i > 0 {
                self.em.literal(sep);
                if sep.ends_with('\n') {
                    self.em.newline();
                } else if !sep.is_empty() {
                    self.em.last_word = sep.ends_with(|c: char| c.is_alphanumeric() || c == '_');
                }
            }
            self.node(item, parent)?;
        }
        if matches!(list.kind, NodeKind::List { .. }) {
            self.after(list);
        }
        Ok(())
    }

    fn atom(&mut self, tree: &Subtree, rule: &PrettyRule, atom: &FormatAtom) -> Result<(), LayoutError> {
        match atom {
            FormatAtom::Keyword(k) => {
                if atom.is_word() {
                    self.em.word();
                    self.em.text(k);
                    self.em.last_word = true;
                } else {
                    self.em.text(k);
                    self.em.last_word = false;
                }
            }
            FormatAtom::Child(m) => {
                let i = rule.metavar_index(m).expect("validated rule");
                let child = &tree.children[i];
                if matches!(child.kind, NodeKind::List { .. }) {
                    self.list(child, "", Some((tree, i)))?;
                } else {
                    self.node(child, Some((tree, i)))?;
                }
            }
            FormatAtom::ListSep { sep, metavar } => {
                let i = rule.metavar_index(metavar).expect("validated rule");
                self.list(&tree.children[i], sep, Some((tree, i)))?;
            }
            FormatAtom::Newline => self.em.newline(),
            FormatAtom::TabPush => self.em.level += 1,
            FormatAtom::TabPop => self.em.level = self.em.level.saturating_sub(1),
            FormatAtom::Space => self.em.space(),
        }
        Ok(())
    }
}

/// Text of a detached subtree under `spec`'s pretty rules. No trailing
/// newline.
pub fn print_subtree(tree: &Subtree, spec: &GrammarSpec, opts: &PrintOptions) -> Result<String, LayoutError> {
    let mut printer = Printer { spec, opts, em: Emitter::new(opts.tab_width) };
    printer.node(tree, None)?;
    Ok(printer.em.finish())
}

/// Text of the subtree at `root`. Placeholders print as `<type>`.
pub fn pretty_print(doc: &AstDoc, root: NodeId, spec: &GrammarSpec, tab_width: usize) -> Result<String, LayoutError> {
    let tree = doc.subtree(root).map_err(|_| LayoutError::UnknownNode(root))?;
    print_subtree(&tree, spec, &PrintOptions::with_tab_width(tab_width))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Subtree as S;
    use crate::spec::{builtin_demo_spec, Multiplicity};

    fn var(name: &str) -> S {
        S::operator("variable", vec![S::leaf("ident", name)])
    }

    fn show(tree: &S) -> String {
        print_subtree(tree, &builtin_demo_spec(), &PrintOptions::default()).unwrap()
    }

    #[test]
    fn ppr_if() {
        let tree = S::operator("if", vec![var("x"), var("a"), var("b")]);
        assert_eq!(show(&tree), "a if x\n  otherwise b");
        let wide = print_subtree(&tree, &builtin_demo_spec(), &PrintOptions::with_tab_width(4)).unwrap();
        assert_eq!(wide, "a if x\n    otherwise b");
    }

    #[test]
    fn leaves_and_placeholders() {
        assert_eq!(show(&S::leaf("intlit", "7")), "7");
        assert_eq!(show(&S::leaf("strlit", "a\"b\n")), "\"a\\\"b\\n\"");
        let spec = builtin_demo_spec();
        let doc = AstDoc::new_program(&spec).unwrap();
        let text = pretty_print(&doc, doc.root(), &spec, 2).unwrap();
        assert_eq!(text, "<define>\n<expression>");
    }

    #[test]
    fn define_and_lists() {
        let def = S::operator(
            "define",
            vec![
                S::leaf("ident", "f"),
                S::list("ident", vec![S::leaf("ident", "x"), S::leaf("ident", "y")]),
                S::operator("tuple", vec![S::list("expression", vec![var("x"), S::leaf("intlit", "1")])]),
            ],
        );
        assert_eq!(show(&def), "f x y = {x, 1};");
        let nullary = S::operator(
            "define",
            vec![S::leaf("ident", "g"), S::list("ident", vec![]), S::operator("list", vec![S::list("expression", vec![])])],
        );
        assert_eq!(show(&nullary), "g = [];");
    }

    #[test]
    fn case_and_block_layout() {
        let case = S::operator(
            "case",
            vec![
                var("e"),
                S::list(
                    "arm",
                    vec![
                        S::operator("arm", vec![S::leaf("ident", "a"), S::leaf("intlit", "1")]),
                        S::operator("arm", vec![S::leaf("ident", "b"), var("b")]),
                    ],
                ),
            ],
        );
        assert_eq!(show(&case), "case e of\n  a -> 1;\n  b -> b;\nend");
        let block = S::operator(
            "block",
            vec![
                S::list("decl", vec![S::operator("decl", vec![S::leaf("ident", "x"), S::leaf("ident", "num")])]),
                S::list("define", vec![]),
                var("x"),
            ],
        );
        assert_eq!(show(&block), "begin\n  x: num;\n  x\nend");
    }

    #[test]
    fn comments_render_as_trivia() {
        let tree = S::operator("if", vec![var("x"), var("a"), var("b")])
            .with_decorations(vec![Decoration::comment(Position::Before, "guard")]);
        assert_eq!(show(&tree), "|| guard\na if x\n  otherwise b");
        let onto = var("a").with_decorations(vec![
            Decoration::comment(Position::Onto, "one"),
            Decoration::comment(Position::Onto, "two"),
        ]);
        assert_eq!(show(&onto), "a || one\n|| two");
    }

    #[test]
    fn template_placeholders() {
        let spec = builtin_demo_spec();
        let tree = S::skeleton(&spec, "if").unwrap();
        let opts = PrintOptions { placeholders: PlaceholderStyle::Template, ..PrintOptions::default() };
        assert_eq!(
            print_subtree(&tree, &spec, &opts).unwrap(),
            "⟨expression⟩ if ⟨expression⟩\n  otherwise ⟨expression⟩"
        );
        let open = S::placeholder("expression", Multiplicity::List);
        assert_eq!(show(&open), "<expression>");
    }

    #[test]
    fn rule_selection() {
        let spec = builtin_demo_spec();
        let rules: Vec<PrettyRule> = spec.pretty_rules.iter().filter(|r| r.operator == "if" || r.operator == "case").cloned().collect();
        assert_eq!(select_rule(&rules, "case").unwrap().operator, "case");
        assert_eq!(select_rule(&rules[..1], "while"), Err(LayoutError::NoRule("while".into())));
        let mut dup = vec![rules[0].clone(), rules[0].clone()];
        dup[1].format.clear();
        assert!(!select_rule(&dup, "if").unwrap().format.is_empty());
    }
}
