//! The editable document: a decorated abstract syntax tree whose incomplete
//! parts are typed placeholders.

mod edit;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spec::{GrammarSpec, LexicalKind, Multiplicity, Symbol};

pub use edit::{CutBuffer, Removed, END_LIST};
pub use text::{read_doc, read_subtree, write_doc, write_subtree, AstTextError};

/// Stable node identifier, never reused within a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DisplayState {
    #[default]
    Expanded,
    IconifiedGraphic,
    IconifiedText,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scope {
    Simple,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DecorationKind {
    Comment,
    Annotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Position {
    Before,
    Onto,
    After,
}

impl Position {
    pub fn as_str(self) -> &'static str {
        match self {
            Position::Before => "before",
            Position::Onto => "onto",
            Position::After => "after",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decoration {
    pub kind: DecorationKind,
    /// Only meaningful for comments.
    pub position: Position,
    pub payload: String,
}

impl Decoration {
    pub fn comment(position: Position, payload: impl Into<String>) -> Self {
        Decoration { kind: DecorationKind::Comment, position, payload: payload.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NodeKind {
    /// Incomplete node awaiting expansion. A placeholder whose expected type
    /// is a leaf is a pending terminal.
    Placeholder { expected: String, multiplicity: Multiplicity },
    Operator { operator: String },
    Leaf { operator: String, text: String },
    /// Elements of a list slot; the last element may be an open list
    /// placeholder.
    List { element: String },
}

impl NodeKind {
    /// The type a node contributes when checked against a slot.
    pub fn type_name(&self) -> &str {
        match self {
            NodeKind::Placeholder { expected, .. } => expected,
            NodeKind::Operator { operator } | NodeKind::Leaf { operator, .. } => operator,
            NodeKind::List { element } => element,
        }
    }

    pub fn is_placeholder(&self) -> bool {
        matches!(self, NodeKind::Placeholder { .. })
    }

    pub fn is_list_placeholder(&self) -> bool {
        matches!(self, NodeKind::Placeholder { multiplicity: Multiplicity::List, .. })
    }

    /// Short label used in graphic views.
    pub fn label(&self) -> String {
        match self {
            NodeKind::Placeholder { expected, multiplicity: Multiplicity::List } => format!("{expected}*"),
            NodeKind::Placeholder { expected, .. } => expected.clone(),
            NodeKind::Operator { operator } => operator.clone(),
            NodeKind::Leaf { text, .. } => text.clone(),
            NodeKind::List { element } => format!("{element}*"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AstNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub children: Vec<NodeId>,
    pub display: DisplayState,
    pub decorations: Vec<Decoration>,
    parent: Option<NodeId>,
}

impl AstNode {
    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }
}

/// A detached subtree: the value form of a node and its descendants, used
/// by the cut buffer, for undo, and for structural comparison. Equality
/// ignores node ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subtree {
    pub kind: NodeKind,
    pub display: DisplayState,
    pub decorations: Vec<Decoration>,
    pub children: Vec<Subtree>,
}

impl Subtree {
    pub fn new(kind: NodeKind, children: Vec<Subtree>) -> Self {
        Subtree { kind, display: DisplayState::Expanded, decorations: Vec::new(), children }
    }

    pub fn operator(operator: &str, children: Vec<Subtree>) -> Self {
        Self::new(NodeKind::Operator { operator: operator.to_string() }, children)
    }

    pub fn leaf(operator: &str, text: &str) -> Self {
        Self::new(NodeKind::Leaf { operator: operator.to_string(), text: text.to_string() }, Vec::new())
    }

    pub fn placeholder(expected: &str, multiplicity: Multiplicity) -> Self {
        Self::new(
            NodeKind::Placeholder { expected: expected.to_string(), multiplicity },
            Vec::new(),
        )
    }

    pub fn list(element: &str, children: Vec<Subtree>) -> Self {
        Self::new(NodeKind::List { element: element.to_string() }, children)
    }

    /// Fresh instance of `production` with one placeholder per slot.
    pub fn skeleton(spec: &GrammarSpec, choice: &str) -> Option<Self> {
        match spec.symbol(choice)? {
            Symbol::Production(p) => Some(Self::operator(
                choice,
                p.slots.iter().map(|s| Self::placeholder(&s.ty, s.multiplicity)).collect(),
            )),
            Symbol::Leaf(_) | Symbol::Class(_) => Some(Self::placeholder(choice, Multiplicity::One)),
        }
    }

    pub fn with_decorations(mut self, decorations: Vec<Decoration>) -> Self {
        self.decorations = decorations;
        self
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Subtree::size).sum::<usize>()
    }

    /// Copy with every decoration removed, recursively.
    pub fn without_decorations(&self) -> Subtree {
        Subtree {
            kind: self.kind.clone(),
            display: self.display,
            decorations: Vec::new(),
            children: self.children.iter().map(Subtree::without_decorations).collect(),
        }
    }

    /// Copy with display states reset and decorations removed.
    pub fn bare(&self) -> Subtree {
        Subtree {
            kind: self.kind.clone(),
            display: DisplayState::Expanded,
            decorations: Vec::new(),
            children: self.children.iter().map(Subtree::bare).collect(),
        }
    }

    pub fn count_placeholders(&self) -> usize {
        usize::from(self.kind.is_placeholder())
            + self.children.iter().map(Subtree::count_placeholders).sum::<usize>()
    }

    pub fn count_comments(&self) -> usize {
        self.decorations.iter().filter(|d| d.kind == DecorationKind::Comment).count()
            + self.children.iter().map(Subtree::count_comments).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AstError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} is not a placeholder")]
    NotAPlaceholder(NodeId),
    #[error("{choice} is not a completion of {expected}")]
    InvalidChoice { choice: String, expected: String },
    #[error("{text:?} is not a valid {kind}")]
    Lexical { text: String, kind: &'static str },
    #[error("node {0} does not take a terminal string")]
    NotATerminal(NodeId),
    #[error("the cut buffer is empty")]
    EmptyBuffer,
    #[error("type mismatch: {found} does not fit a {expected} slot")]
    TypeMismatch { expected: String, found: String },
    #[error("the root cannot be removed")]
    IsRoot,
    #[error("invalid target {0}: {1}")]
    InvalidTarget(NodeId, &'static str),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("document belongs to {found}, not {expected}")]
    WrongLanguage { expected: String, found: String },
}

/// A decorated abstract syntax tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AstDoc {
    spec_name: String,
    root: NodeId,
    nodes: BTreeMap<NodeId, AstNode>,
    next_id: u64,
}

impl AstDoc {
    /// Fresh document: the start symbol with one placeholder per slot.
    pub fn new_program(spec: &GrammarSpec) -> Result<AstDoc, AstError> {
        let diags = crate::spec::validate_spec(spec);
        if let Some(d) = diags.first() {
            return Err(AstError::InvalidSpec(d.reason.clone()));
        }
        let tree = match spec.symbol(&spec.start) {
            Some(Symbol::Production(_)) => Subtree::skeleton(spec, &spec.start).expect("start exists"),
            _ => Subtree::placeholder(&spec.start, Multiplicity::One),
        };
        Ok(AstDoc::from_subtree(&spec.name, &tree))
    }

    pub fn from_subtree(spec_name: &str, tree: &Subtree) -> AstDoc {
        let mut doc = AstDoc {
            spec_name: spec_name.to_string(),
            root: NodeId(0),
            nodes: BTreeMap::new(),
            next_id: 1,
        };
        doc.root = doc.insert_tree(tree, None);
        doc
    }

    pub fn spec_name(&self) -> &str {
        &self.spec_name
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Result<&AstNode, AstError> {
        self.nodes.get(&id).ok_or(AstError::UnknownNode(id))
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &AstNode> {
        self.nodes.values()
    }

    /// The id the next created node will receive.
    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    /// Ensures ids issued from now on are at least `floor`.
    pub fn reserve_ids(&mut self, floor: u64) {
        self.next_id = self.next_id.max(floor);
    }

    /// Pre-order traversal from `id`.
    pub fn preorder(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            if let Some(node) = self.nodes.get(&n) {
                out.push(n);
                stack.extend(node.children.iter().rev());
            }
        }
        out
    }

    pub fn subtree(&self, id: NodeId) -> Result<Subtree, AstError> {
        let node = self.node(id)?;
        Ok(Subtree {
            kind: node.kind.clone(),
            display: node.display,
            decorations: node.decorations.clone(),
            children: node
                .children
                .iter()
                .map(|c| self.subtree(*c))
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn to_subtree(&self) -> Subtree {
        self.subtree(self.root).expect("root exists")
    }

    /// No placeholder anywhere.
    pub fn is_complete(&self) -> bool {
        !self.nodes.values().any(|n| n.kind.is_placeholder())
    }

    pub fn placeholders(&self) -> Vec<NodeId> {
        self.preorder(self.root)
            .into_iter()
            .filter(|id| self.nodes[id].kind.is_placeholder())
            .collect()
    }

    /// Type and multiplicity a node must satisfy in its position.
    pub fn slot_type(&self, spec: &GrammarSpec, id: NodeId) -> Result<(String, Multiplicity), AstError> {
        let node = self.node(id)?;
        let Some(parent) = node.parent else {
            return Ok((spec.start.clone(), Multiplicity::One));
        };
        let parent = self.node(parent)?;
        match &parent.kind {
            NodeKind::List { element } => {
                let mult = if node.kind.is_list_placeholder() { Multiplicity::List } else { Multiplicity::One };
                Ok((element.clone(), mult))
            }
            NodeKind::Operator { operator } => {
                let index = parent.children.iter().position(|c| *c == id).expect("child of parent");
                let slot = spec
                    .production(operator)
                    .and_then(|p| p.slots.get(index))
                    .ok_or_else(|| AstError::InvalidSpec(format!("no slot {index} on {operator}")))?;
                Ok((slot.ty.clone(), slot.multiplicity))
            }
            _ => Err(AstError::InvalidTarget(id, "parent cannot hold children")),
        }
    }

    fn fresh_id(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    fn insert_tree(&mut self, tree: &Subtree, parent: Option<NodeId>) -> NodeId {
        let id = self.fresh_id();
        let children = tree.children.iter().map(|c| self.insert_tree(c, Some(id))).collect();
        self.nodes.insert(
            id,
            AstNode {
                id,
                kind: tree.kind.clone(),
                children,
                display: tree.display,
                decorations: tree.decorations.clone(),
                parent,
            },
        );
        id
    }

    fn remove_tree(&mut self, id: NodeId) {
        if let Some(node) = self.nodes.remove(&id) {
            for c in node.children {
                self.remove_tree(c);
            }
        }
    }

    /// Replaces the subtree at `old` by a fresh copy of `tree`, keeping the
    /// position in the parent. Returns the new root id.
    fn replace_with(&mut self, old: NodeId, tree: &Subtree) -> NodeId {
        let parent = self.nodes[&old].parent;
        self.remove_tree(old);
        let new = self.insert_tree(tree, parent);
        match parent {
            Some(p) => {
                let children = &mut self.nodes.get_mut(&p).expect("parent").children;
                let slot = children.iter_mut().find(|c| **c == old).expect("child in parent");
                *slot = new;
            }
            None => self.root = new,
        }
        new
    }

    fn insert_child(&mut self, parent: NodeId, index: usize, tree: &Subtree) -> NodeId {
        let new = self.insert_tree(tree, Some(parent));
        self.nodes.get_mut(&parent).expect("parent").children.insert(index, new);
        new
    }

    fn detach_child(&mut self, id: NodeId) {
        if let Some(p) = self.nodes[&id].parent {
            self.nodes.get_mut(&p).expect("parent").children.retain(|c| *c != id);
        }
        self.remove_tree(id);
    }

    /// Checks every document invariant against `spec`.
    pub fn check(&self, spec: &GrammarSpec) -> Result<(), String> {
        if self.spec_name != spec.name {
            return Err(format!("document language {} is not {}", self.spec_name, spec.name));
        }
        let root = self.nodes.get(&self.root).ok_or("root missing")?;
        if root.parent.is_some() {
            return Err("root has a parent".into());
        }
        let reachable = self.preorder(self.root);
        if reachable.len() != self.nodes.len() {
            return Err(format!("{} nodes but {} reachable", self.nodes.len(), reachable.len()));
        }
        let reserved = spec.reserved_words();
        self.check_fits(spec, self.root, &spec.start, Multiplicity::One)?;
        for id in reachable {
            let node = &self.nodes[&id];
            if node.id != id {
                return Err(format!("node {id} stored under wrong id"));
            }
            if id.0 >= self.next_id {
                return Err(format!("node {id} not below the id counter"));
            }
            for c in &node.children {
                let child = self.nodes.get(c).ok_or_else(|| format!("dangling child {c}"))?;
                if child.parent != Some(id) {
                    return Err(format!("child {c} does not point back to {id}"));
                }
            }
            match &node.kind {
                NodeKind::Placeholder { .. } | NodeKind::Leaf { .. } if !node.children.is_empty() => {
                    return Err(format!("{id} must not have children"));
                }
                NodeKind::Leaf { operator, text } => {
                    let leaf = spec.leaf(operator).ok_or_else(|| format!("unknown leaf {operator}"))?;
                    if !leaf.kind.accepts(text, &reserved) {
                        return Err(format!("{id}: {text:?} is not a valid {}", leaf.kind.as_str()));
                    }
                }
                NodeKind::Operator { operator } => {
                    let prod = spec
                        .production(operator)
                        .ok_or_else(|| format!("unknown production {operator}"))?;
                    if prod.slots.len() != node.children.len() {
                        return Err(format!("{id}: {operator} has {} children", node.children.len()));
                    }
                    for (slot, child) in prod.slots.iter().zip(&node.children) {
                        self.check_fits(spec, *child, &slot.ty, slot.multiplicity)?;
                    }
                }
                NodeKind::List { element } => {
                    let n = node.children.len();
                    for (i, child) in node.children.iter().enumerate() {
                        let c = &self.nodes[child];
                        if c.kind.is_list_placeholder() {
                            if i + 1 != n {
                                return Err(format!("{id}: open list placeholder not last"));
                            }
                            self.check_fits(spec, *child, element, Multiplicity::List)?;
                        } else {
                            self.check_fits(spec, *child, element, Multiplicity::One)?;
                        }
                    }
                }
                NodeKind::Placeholder { expected, .. } => {
                    if spec.symbol(expected).is_none() {
                        return Err(format!("{id}: unknown placeholder type {expected}"));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_fits(&self, spec: &GrammarSpec, id: NodeId, ty: &str, mult: Multiplicity) -> Result<(), String> {
        let node = &self.nodes[&id];
        let ok = match (&node.kind, mult) {
            (NodeKind::Placeholder { expected, multiplicity: Multiplicity::List }, Multiplicity::List) => {
                expected == ty
            }
            (NodeKind::List { element }, Multiplicity::List) => element == ty,
            (NodeKind::Placeholder { expected, multiplicity: Multiplicity::One }, Multiplicity::One) => {
                spec.conforms(expected, ty)
            }
            (NodeKind::Operator { operator } | NodeKind::Leaf { operator, .. }, Multiplicity::One) => {
                spec.conforms(operator, ty)
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("{id}: {} does not fit {ty}{}", node.kind.label(), if mult == Multiplicity::List { "*" } else { "" }))
        }
    }
}

pub(crate) fn leaf_kind(spec: &GrammarSpec, ty: &str) -> Option<LexicalKind> {
    spec.leaf(ty).map(|l| l.kind)
}
