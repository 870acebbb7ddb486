use crate::spec::{GrammarSpec, Multiplicity};

use super::{leaf_kind, AstDoc, AstError, Decoration, DisplayState, NodeId, NodeKind, Position, Scope, Subtree};

/// Choice accepted by an open list placeholder to close the list.
pub const END_LIST: &str = "end list";

/// Deep copy of a subtree shared by every window of an editing session.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CutBuffer {
    content: Option<(Subtree, String)>,
}

impl CutBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.content.is_none()
    }

    pub fn content(&self) -> Option<&Subtree> {
        self.content.as_ref().map(|(t, _)| t)
    }

    /// Type of the buffered subtree's root.
    pub fn root_type(&self) -> Option<&str> {
        self.content.as_ref().map(|(_, ty)| ty.as_str())
    }

    pub fn set(&mut self, tree: Subtree) {
        let ty = tree.kind.type_name().to_string();
        self.content = Some((tree, ty));
    }

    pub fn clear(&mut self) {
        self.content = None;
    }
}

/// What a destructive edit took out of the document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Removed {
    /// The placeholder left behind, or the list that shrank.
    pub at: NodeId,
    pub subtree: Subtree,
    /// Comments that went away with the subtree.
    pub dropped_comments: usize,
}

impl AstDoc {
    /// Completion menu of a placeholder: the menu of its expected type.
    /// Open list placeholders additionally accept [`END_LIST`].
    pub fn list_completions(&self, spec: &GrammarSpec, target: NodeId) -> Result<Vec<String>, AstError> {
        match &self.node(target)?.kind {
            NodeKind::Placeholder { expected, .. } => spec
                .completions_of_class(expected)
                .map_err(|e| AstError::InvalidSpec(e.to_string())),
            _ => Err(AstError::NotAPlaceholder(target)),
        }
    }

    /// Replaces a placeholder by a fresh instance of `choice` with
    /// placeholders for its slots. On an open list placeholder the new
    /// element is inserted and the list stays open. Returns the new node.
    pub fn expand_placeholder(
        &mut self,
        spec: &GrammarSpec,
        target: NodeId,
        choice: &str,
    ) -> Result<NodeId, AstError> {
        let NodeKind::Placeholder { expected, multiplicity } = &self.node(target)?.kind else {
            return Err(AstError::NotAPlaceholder(target));
        };
        if *multiplicity == Multiplicity::List && choice == END_LIST {
            return Ok(self.close_list(target));
        }
        let menu = self.list_completions(spec, target)?;
        if !menu.iter().any(|m| m == choice) {
            return Err(AstError::InvalidChoice { choice: choice.to_string(), expected: expected.clone() });
        }
        let tree = Subtree::skeleton(spec, choice).expect("menu items are defined");
        Ok(self.fill_placeholder(target, &tree))
    }

    fn close_list(&mut self, target: NodeId) -> NodeId {
        let node = &self.nodes[&target];
        let parent = node.parent.expect("list placeholders sit under a parent");
        if matches!(self.nodes[&parent].kind, NodeKind::List { .. }) {
            self.detach_child(target);
            parent
        } else {
            let list = Subtree::list(node.kind.type_name(), Vec::new())
                .with_decorations(node.decorations.clone());
            self.replace_with(target, &list)
        }
    }

    /// Puts `tree` where the placeholder `target` is. Decorations on the
    /// placeholder are kept. No type check.
    fn fill_placeholder(&mut self, target: NodeId, tree: &Subtree) -> NodeId {
        let node = &self.nodes[&target];
        let NodeKind::Placeholder { expected, multiplicity } = node.kind.clone() else {
            unreachable!("caller checked for a placeholder")
        };
        let mut decorations = node.decorations.clone();
        match multiplicity {
            Multiplicity::One => {
                let mut tree = tree.clone();
                decorations.extend(tree.decorations);
                tree.decorations = decorations;
                self.replace_with(target, &tree)
            }
            Multiplicity::List => {
                let parent = node.parent.expect("list placeholders sit under a parent");
                if matches!(self.nodes[&parent].kind, NodeKind::List { .. }) {
                    let index = self.nodes[&parent].children.iter().position(|c| *c == target).unwrap();
                    self.insert_child(parent, index, tree)
                } else {
                    let list = Subtree::list(
                        &expected,
                        vec![tree.clone(), Subtree::placeholder(&expected, Multiplicity::List)],
                    )
                    .with_decorations(decorations);
                    let list_id = self.replace_with(target, &list);
                    self.nodes[&list_id].children[0]
                }
            }
        }
    }

    /// Sets the text of a leaf or pending terminal after lexical validation.
    pub fn set_terminal(&mut self, spec: &GrammarSpec, target: NodeId, text: &str) -> Result<(), AstError> {
        let node = self.node(target)?;
        let operator = match &node.kind {
            NodeKind::Placeholder { expected, multiplicity: Multiplicity::One } => expected.clone(),
            NodeKind::Leaf { operator, .. } => operator.clone(),
            _ => return Err(AstError::NotATerminal(target)),
        };
        let Some(kind) = leaf_kind(spec, &operator) else {
            return Err(AstError::NotATerminal(target));
        };
        if !kind.accepts(text, &spec.reserved_words()) {
            return Err(AstError::Lexical { text: text.to_string(), kind: kind.as_str() });
        }
        self.nodes.get_mut(&target).unwrap().kind = NodeKind::Leaf { operator, text: text.to_string() };
        Ok(())
    }

    pub fn copy(&self, target: NodeId, buffer: &mut CutBuffer) -> Result<(), AstError> {
        let node = self.node(target)?;
        if matches!(node.kind, NodeKind::List { .. }) || node.kind.is_list_placeholder() {
            return Err(AstError::InvalidTarget(target, "lists cannot be copied"));
        }
        buffer.set(self.subtree(target)?);
        Ok(())
    }

    /// Copies `target` into the buffer, then removes it as
    /// [`collapse_to_placeholder`](Self::collapse_to_placeholder) does.
    pub fn cut(&mut self, spec: &GrammarSpec, target: NodeId, buffer: &mut CutBuffer) -> Result<Removed, AstError> {
        if target == self.root {
            return Err(AstError::IsRoot);
        }
        let mut staged = CutBuffer::new();
        self.copy(target, &mut staged)?;
        let removed = self.collapse_to_placeholder(spec, target)?;
        *buffer = staged;
        Ok(removed)
    }

    /// Inserts a fresh copy of the buffer into the placeholder `target`.
    pub fn paste(&mut self, spec: &GrammarSpec, target: NodeId, buffer: &CutBuffer) -> Result<NodeId, AstError> {
        let tree = buffer.content().ok_or(AstError::EmptyBuffer)?;
        if !self.node(target)?.kind.is_placeholder() {
            return Err(AstError::NotAPlaceholder(target));
        }
        self.install_subtree(spec, target, tree)
    }

    /// Replaces any subtree by a fresh copy of the buffer.
    pub fn replace(&mut self, spec: &GrammarSpec, target: NodeId, buffer: &CutBuffer) -> Result<NodeId, AstError> {
        let tree = buffer.content().ok_or(AstError::EmptyBuffer)?;
        self.install_subtree(spec, target, tree)
    }

    /// Type-checked insertion of `tree` at `target`: into a placeholder it
    /// must conform to the expected type, over an existing subtree to the
    /// slot type.
    pub fn install_subtree(&mut self, spec: &GrammarSpec, target: NodeId, tree: &Subtree) -> Result<NodeId, AstError> {
        let node = self.node(target)?;
        if matches!(tree.kind, NodeKind::List { .. }) || tree.kind.is_list_placeholder() {
            return Err(AstError::InvalidTarget(target, "lists cannot be inserted"));
        }
        let found = tree.kind.type_name();
        match &node.kind {
            NodeKind::Placeholder { expected, .. } => {
                if !spec.conforms(found, expected) {
                    return Err(AstError::TypeMismatch { expected: expected.clone(), found: found.to_string() });
                }
                Ok(self.fill_placeholder(target, tree))
            }
            NodeKind::List { .. } => Err(AstError::InvalidTarget(target, "lists cannot be replaced")),
            _ => {
                let (expected, _) = self.slot_type(spec, target)?;
                if !spec.conforms(found, &expected) {
                    return Err(AstError::TypeMismatch { expected, found: found.to_string() });
                }
                Ok(self.replace_with(target, tree))
            }
        }
    }

    /// Removes a subtree. In a list the element disappears; elsewhere a
    /// placeholder of the slot type takes its place. The removed subtree is
    /// returned so callers can undo.
    pub fn collapse_to_placeholder(&mut self, spec: &GrammarSpec, target: NodeId) -> Result<Removed, AstError> {
        if target == self.root {
            return Err(AstError::IsRoot);
        }
        let subtree = self.subtree(target)?;
        let parent = self.nodes[&target].parent.expect("non-root has a parent");
        let at = if matches!(self.nodes[&parent].kind, NodeKind::List { .. }) {
            self.detach_child(target);
            parent
        } else {
            let (ty, mult) = self.slot_type(spec, target)?;
            self.replace_with(target, &Subtree::placeholder(&ty, mult))
        };
        let dropped_comments = subtree.count_comments();
        Ok(Removed { at, subtree, dropped_comments })
    }

    pub fn set_display(&mut self, target: NodeId, state: DisplayState, scope: Scope) -> Result<(), AstError> {
        self.node(target)?;
        let ids = match scope {
            Scope::Simple => vec![target],
            Scope::Global => self.preorder(target),
        };
        for id in ids {
            self.nodes.get_mut(&id).unwrap().display = state;
        }
        Ok(())
    }

    pub fn attach_comment(&mut self, target: NodeId, position: Position, text: &str) -> Result<(), AstError> {
        self.attach(target, Decoration::comment(position, text))
    }

    pub fn attach(&mut self, target: NodeId, decoration: Decoration) -> Result<(), AstError> {
        self.node(target)?;
        self.nodes.get_mut(&target).unwrap().decorations.push(decoration);
        Ok(())
    }
}
