use std::collections::BTreeMap;

use crate::ast::{AstDoc, Decoration, NodeId, NodeKind, Position, Subtree};
use crate::spec::{GrammarSpec, LexicalKind, SugarKind, Symbol};

use super::lexer::{tokenize, unquote, Lexicon, Token, TokenKind, Trivia};
use super::{ParseError, Span, SugarEvent};

/// Productions the concrete grammar knows how to read and write.
pub(crate) const CONCRETE_OPERATORS: [&str; 14] = [
    "prog",
    "define",
    "decl",
    "variable",
    "tuple",
    "list",
    "application",
    "abstraction",
    "comprehension",
    "diagonalization",
    "if",
    "case",
    "arm",
    "block",
];

pub(crate) fn check_language(spec: &GrammarSpec) -> Result<(), ParseError> {
    let missing = CONCRETE_OPERATORS
        .iter()
        .chain(["ident", "intlit", "strlit"].iter())
        .find(|op| spec.symbol(op).is_none());
    match missing {
        Some(op) => Err(ParseError::new(
            Span::new(0, 0),
            format!("language {} has no concrete syntax ({op} undefined)", spec.name),
        )),
        None => Ok(()),
    }
}

/// Parse tree node: an abstract node plus the index of its first token.
#[derive(Debug, Clone)]
pub(crate) struct PNode {
    kind: NodeKind,
    children: Vec<PNode>,
    start: usize,
}

impl PNode {
    fn op(operator: &str, start: usize, children: Vec<PNode>) -> Self {
        PNode { kind: NodeKind::Operator { operator: operator.to_string() }, children, start }
    }

    fn leaf(operator: &str, start: usize, text: String) -> Self {
        PNode { kind: NodeKind::Leaf { operator: operator.to_string(), text }, children: Vec::new(), start }
    }

    fn list(element: &str, start: usize, children: Vec<PNode>) -> Self {
        PNode { kind: NodeKind::List { element: element.to_string() }, children, start }
    }
}

pub(crate) struct Parser<'a> {
    spec: &'a GrammarSpec,
    tokens: &'a [Token],
    len: usize,
    pos: usize,
    pub(crate) events: Vec<SugarEvent>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    pub(crate) fn new(spec: &'a GrammarSpec, tokens: &'a [Token], len: usize) -> Self {
        Parser { spec, tokens, len, pos: 0, events: Vec::new() }
    }

    fn peek_at(&self, k: usize) -> Option<&'a Token> {
        self.tokens.get(self.pos + k)
    }

    fn at(&self, text: &str) -> bool {
        self.at_k(0, text)
    }

    fn at_k(&self, k: usize, text: &str) -> bool {
        self.peek_at(k)
            .is_some_and(|t| matches!(t.kind, TokenKind::Punct | TokenKind::Keyword) && t.text == text)
    }

    fn is_kind(&self, k: usize, kind: TokenKind) -> bool {
        self.peek_at(k).is_some_and(|t| t.kind == kind)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn here(&self) -> Span {
        self.peek_at(0).map_or(Span::new(self.len, self.len), |t| t.span)
    }

    fn fail<T>(&self, expected: &str) -> PResult<T> {
        let found = self.peek_at(0).map_or("end of input".to_string(), |t| format!("{:?}", t.text));
        Err(ParseError::new(self.here(), format!("expected {expected}, found {found}")))
    }

    fn expect(&mut self, text: &str) -> PResult<usize> {
        if self.at(text) {
            self.pos += 1;
            Ok(self.pos - 1)
        } else {
            self.fail(&format!("{text:?}"))
        }
    }

    pub(crate) fn expect_end(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.fail("end of input")
        }
    }

    fn sugar_rule(&self, kind: SugarKind) -> Option<String> {
        self.spec.sugar_of_kind(kind).next().map(|s| s.name.clone())
    }

    fn record(&mut self, kind: SugarKind, first: usize, last: usize) {
        if let Some(rule) = self.sugar_rule(kind) {
            let span = Span::new(self.tokens[first].span.start, self.tokens[last].span.end);
            self.events.push(SugarEvent { rule, kind, span, tokens: (first, last) });
        }
    }

    fn ident(&mut self) -> PResult<PNode> {
        if self.is_kind(0, TokenKind::Ident) {
            self.pos += 1;
            Ok(PNode::leaf("ident", self.pos - 1, self.tokens[self.pos - 1].text.clone()))
        } else {
            self.fail("an identifier")
        }
    }

    /// `IDENT+ "="`
    pub(crate) fn at_define(&self) -> bool {
        let mut k = 0;
        while self.is_kind(k, TokenKind::Ident) {
            k += 1;
        }
        k > 0 && self.at_k(k, "=")
    }

    /// `IDENT ("," IDENT)* ":"`
    pub(crate) fn at_decl(&self) -> bool {
        let mut k = 0;
        loop {
            if !self.is_kind(k, TokenKind::Ident) {
                return false;
            }
            k += 1;
            if self.at_k(k, ":") {
                return true;
            }
            if !self.at_k(k, ",") {
                return false;
            }
            k += 1;
        }
    }

    /// `IDENT "->"`
    pub(crate) fn at_arm(&self) -> bool {
        self.is_kind(0, TokenKind::Ident) && self.at_k(1, "->")
    }

    pub(crate) fn prog(&mut self) -> PResult<PNode> {
        let mut defs = Vec::new();
        while self.at_define() {
            defs.push(self.define()?);
        }
        let mut exprs = Vec::new();
        if !self.at_end() {
            loop {
                exprs.push(self.top_expr()?);
                if self.at(";") {
                    self.pos += 1;
                    continue;
                }
                break;
            }
        }
        self.expect_end()?;
        Ok(PNode::op("prog", 0, vec![PNode::list("define", 0, defs), PNode::list("expression", 0, exprs)]))
    }

    pub(crate) fn define(&mut self) -> PResult<PNode> {
        let start = self.pos;
        let name = self.ident()?;
        let mut params = Vec::new();
        while self.is_kind(0, TokenKind::Ident) {
            params.push(self.ident()?);
        }
        self.expect("=")?;
        let body = self.top_expr()?;
        self.expect(";")?;
        Ok(PNode::op("define", start, vec![name, PNode::list("ident", start + 1, params), body]))
    }

    /// One or more declarations sharing a type.
    pub(crate) fn decls(&mut self) -> PResult<Vec<PNode>> {
        let first = self.pos;
        let mut names = vec![self.ident()?];
        while self.at(",") {
            self.pos += 1;
            names.push(self.ident()?);
        }
        self.expect(":")?;
        let typename = self.ident()?;
        let semi = self.expect(";")?;
        if names.len() > 1 {
            if self.sugar_rule(SugarKind::MultiDecl).is_none() {
                return Err(ParseError::new(self.tokens[first].span, "one name per declaration"));
            }
            self.record(SugarKind::MultiDecl, first, semi);
        }
        Ok(names
            .into_iter()
            .map(|name| PNode::op("decl", name.start, vec![name, typename.clone()]))
            .collect())
    }

    pub(crate) fn arm(&mut self) -> PResult<PNode> {
        let start = self.pos;
        let pat = self.ident()?;
        self.expect("->")?;
        let body = self.open()?;
        self.expect(";")?;
        Ok(PNode::op("arm", start, vec![pat, body]))
    }

    fn otherwise(&mut self) -> PResult<()> {
        if self.at("otherwise") {
            self.pos += 1;
            return Ok(());
        }
        if self.at("else") && self.sugar_rule(SugarKind::KeywordVariant).is_some() {
            self.record(SugarKind::KeywordVariant, self.pos, self.pos);
            self.pos += 1;
            return Ok(());
        }
        self.fail("\"otherwise\"")
    }

    /// Expression in a top position, where guard cascades are allowed:
    /// `e1, g1; e2, g2; e3 otherwise`.
    pub(crate) fn top_expr(&mut self) -> PResult<PNode> {
        let first = self.pos;
        let e1 = self.open()?;
        if !self.at(",") || self.sugar_rule(SugarKind::GuardCascade).is_none() {
            return Ok(e1);
        }
        let mut guarded = Vec::new();
        let mut current = e1;
        let last_else = loop {
            self.expect(",")?;
            let guard = self.open()?;
            self.expect(";")?;
            guarded.push((current, guard));
            current = self.open()?;
            if !self.at(",") {
                break current;
            }
        };
        let before = self.events.len();
        let kw = self.pos;
        self.otherwise()?;
        // An `else` closing a guard belongs to the guard, not a variant.
        self.events.truncate(before);
        self.record(SugarKind::GuardCascade, first, kw);
        let mut acc = last_else;
        for (then, guard) in guarded.into_iter().rev() {
            let start = then.start;
            acc = PNode::op("if", start, vec![guard, then, acc]);
        }
        Ok(acc)
    }

    /// Lowest precedence: conditionals and abstractions.
    pub(crate) fn open(&mut self) -> PResult<PNode> {
        if self.at("\\") {
            let start = self.pos;
            self.pos += 1;
            let param = self.ident()?;
            self.expect("->")?;
            let body = self.open()?;
            return Ok(PNode::op("abstraction", start, vec![param, body]));
        }
        let then = self.app()?;
        if !self.at("if") {
            return Ok(then);
        }
        self.pos += 1;
        let cond = self.open()?;
        self.otherwise()?;
        let other = self.open()?;
        let start = then.start;
        Ok(PNode::op("if", start, vec![cond, then, other]))
    }

    fn at_atom(&self) -> bool {
        match self.peek_at(0) {
            Some(t) => match t.kind {
                TokenKind::Ident | TokenKind::Int | TokenKind::String => true,
                TokenKind::Punct => matches!(t.text.as_str(), "(" | "{" | "["),
                TokenKind::Keyword => matches!(t.text.as_str(), "case" | "begin"),
            },
            None => false,
        }
    }

    fn app(&mut self) -> PResult<PNode> {
        let mut f = self.atom()?;
        while self.at_atom() {
            let arg = self.atom()?;
            let start = f.start;
            f = PNode::op("application", start, vec![f, arg]);
        }
        Ok(f)
    }

    fn items(&mut self, close: &str) -> PResult<Vec<PNode>> {
        let mut items = Vec::new();
        if self.at(close) {
            return Ok(items);
        }
        loop {
            items.push(self.open()?);
            if self.at(",") {
                self.pos += 1;
            } else {
                return Ok(items);
            }
        }
    }

    fn atom(&mut self) -> PResult<PNode> {
        let start = self.pos;
        let Some(tok) = self.peek_at(0) else {
            return self.fail("an expression");
        };
        match (tok.kind, tok.text.as_str()) {
            (TokenKind::Ident, _) => {
                let name = self.ident()?;
                Ok(PNode::op("variable", start, vec![name]))
            }
            (TokenKind::Int, text) => {
                self.pos += 1;
                Ok(PNode::leaf("intlit", start, text.to_string()))
            }
            (TokenKind::String, text) => {
                self.pos += 1;
                Ok(PNode::leaf("strlit", start, unquote(text)))
            }
            (TokenKind::Punct, "(") => {
                self.pos += 1;
                let inner = self.open()?;
                let close = self.expect(")")?;
                self.record(SugarKind::RedundantParens, start, close);
                Ok(inner)
            }
            (TokenKind::Punct, "{") => {
                self.pos += 1;
                let items = self.items("}")?;
                self.expect("}")?;
                Ok(PNode::op("tuple", start, vec![PNode::list("expression", start + 1, items)]))
            }
            (TokenKind::Punct, "[") => {
                self.pos += 1;
                if self.at("]") {
                    self.pos += 1;
                    return Ok(PNode::op("list", start, vec![PNode::list("expression", start + 1, Vec::new())]));
                }
                let head = self.open()?;
                let op = if self.at("|") {
                    "comprehension"
                } else if self.at("//") {
                    "diagonalization"
                } else {
                    let mut items = vec![head];
                    if self.at(",") {
                        self.pos += 1;
                        items.extend(self.items("]")?);
                    }
                    self.expect("]")?;
                    return Ok(PNode::op("list", start, vec![PNode::list("expression", start + 1, items)]));
                };
                self.pos += 1;
                let var = self.ident()?;
                self.expect("<-")?;
                let source = self.open()?;
                self.expect("]")?;
                Ok(PNode::op(op, start, vec![head, var, source]))
            }
            (TokenKind::Keyword, "case") => {
                self.pos += 1;
                let scrut = self.open()?;
                self.expect("of")?;
                let arms_start = self.pos;
                let mut arms = Vec::new();
                while self.at_arm() {
                    arms.push(self.arm()?);
                }
                self.expect("end")?;
                Ok(PNode::op("case", start, vec![scrut, PNode::list("arm", arms_start, arms)]))
            }
            (TokenKind::Keyword, "begin") => {
                self.pos += 1;
                let decls_start = self.pos;
                let mut decls = Vec::new();
                while self.at_decl() {
                    decls.extend(self.decls()?);
                }
                let defs_start = self.pos;
                let mut defs = Vec::new();
                while self.at_define() {
                    defs.push(self.define()?);
                }
                let body = self.open()?;
                self.expect("end")?;
                Ok(PNode::op(
                    "block",
                    start,
                    vec![PNode::list("decl", decls_start, decls), PNode::list("define", defs_start, defs), body],
                ))
            }
            _ => self.fail("an expression"),
        }
    }
}

/// Comment decorations for a parse tree: each comment goes BEFORE the
/// outermost node starting at or after the token it precedes, or AFTER the
/// root when no node follows. Keys are pre-order indices.
pub(crate) fn attach_comments(root: &PNode, trivia: &[Trivia]) -> BTreeMap<usize, Vec<Decoration>> {
    let mut starts = Vec::new();
    collect_starts(root, &mut starts);
    let mut out: BTreeMap<usize, Vec<Decoration>> = BTreeMap::new();
    for t in trivia {
        let Some(payload) = t.comment_payload() else { continue };
        let target = starts
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some_and(|s| s >= t.anchor))
            .min_by_key(|(i, s)| (s.unwrap(), *i))
            .map(|(i, _)| i);
        let (index, position) = match target {
            Some(i) => (i, Position::Before),
            None => (0, Position::After),
        };
        out.entry(index).or_default().push(Decoration::comment(position, payload));
    }
    out
}

fn collect_starts(node: &PNode, out: &mut Vec<Option<usize>>) {
    out.push(match node.kind {
        NodeKind::List { .. } => None,
        _ => Some(node.start),
    });
    for c in &node.children {
        collect_starts(c, out);
    }
}

pub(crate) fn to_subtree(node: &PNode, decorations: &BTreeMap<usize, Vec<Decoration>>) -> Subtree {
    let mut counter = 0;
    build(node, decorations, &mut counter)
}

fn build(node: &PNode, decorations: &BTreeMap<usize, Vec<Decoration>>, counter: &mut usize) -> Subtree {
    let index = *counter;
    *counter += 1;
    let children = node.children.iter().map(|c| build(c, decorations, counter)).collect();
    Subtree::new(node.kind.clone(), children).with_decorations(decorations.get(&index).cloned().unwrap_or_default())
}

/// Pairs each decoration with the id its node received in `doc`, assuming
/// `doc` was built from the same tree (pre-order ids).
pub(crate) fn attachments(doc: &AstDoc, decorations: &BTreeMap<usize, Vec<Decoration>>) -> Vec<(NodeId, Decoration)> {
    let order = &doc.preorder(doc.root());
    decorations
        .iter()
        .flat_map(|(i, ds)| ds.iter().map(move |d| (order[*i], d.clone())))
        .collect()
}

/// Everything parsing a text produced, before it becomes a document.
pub(crate) struct Parsed {
    pub tokens: Vec<Token>,
    pub tree: Subtree,
    pub decorations: BTreeMap<usize, Vec<Decoration>>,
    pub events: Vec<SugarEvent>,
}

pub(crate) fn parse_program(spec: &GrammarSpec, text: &str) -> Result<Parsed, ParseError> {
    check_language(spec)?;
    let (tokens, trivia) = tokenize(text, &Lexicon::for_spec(spec))?;
    let mut parser = Parser::new(spec, &tokens, text.len());
    let root = parser.prog()?;
    let events = std::mem::take(&mut parser.events);
    let decorations = attach_comments(&root, &trivia);
    let tree = to_subtree(&root, &decorations);
    Ok(Parsed { tokens, tree, decorations, events })
}

/// Parses a fragment for a slot of type `ty`. The category is decided by
/// the first tokens: definitions, declarations, case arms, terminals and
/// otherwise expressions.
pub(crate) fn parse_fragment(
    spec: &GrammarSpec,
    text: &str,
    ty: &str,
) -> Result<(Subtree, Vec<SugarEvent>), ParseError> {
    check_language(spec)?;
    let (tokens, trivia) = tokenize(text, &Lexicon::for_spec(spec))?;
    let mut parser = Parser::new(spec, &tokens, text.len());
    let root = if let Some(Symbol::Leaf(leaf)) = spec.symbol(ty) {
        let expected = match leaf.kind {
            LexicalKind::Identifier => TokenKind::Ident,
            LexicalKind::Integer => TokenKind::Int,
            LexicalKind::String => TokenKind::String,
        };
        match parser.peek_at(0) {
            Some(t) if t.kind == expected => {
                parser.pos += 1;
                let value = if expected == TokenKind::String { unquote(&t.text) } else { t.text.clone() };
                PNode::leaf(&leaf.operator, 0, value)
            }
            _ => return parser.fail(&format!("a {}", leaf.kind.as_str())),
        }
    } else if ty == spec.start && spec.production(ty).is_some() {
        parser.prog()?
    } else if parser.at_define() {
        parser.define()?
    } else if parser.at_decl() {
        let mut decls = parser.decls()?;
        if decls.len() != 1 {
            return Err(ParseError::new(Span::new(0, text.len()), "several declarations for one slot"));
        }
        decls.pop().unwrap()
    } else if parser.at_arm() {
        parser.arm()?
    } else {
        parser.top_expr()?
    };
    parser.expect_end()?;
    let decorations = attach_comments(&root, &trivia);
    Ok((to_subtree(&root, &decorations), parser.events))
}
