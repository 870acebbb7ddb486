use crate::ast::{AstDoc, NodeKind, Subtree};
use crate::layout::{print_subtree, LayoutError, PrintOptions};
use crate::spec::GrammarSpec;

use super::UnparseError;

/// Binding strength of an expression form.
const OPEN: u8 = 1;
const APP: u8 = 2;
const ATOM: u8 = 3;

fn level(tree: &Subtree) -> u8 {
    match &tree.kind {
        NodeKind::Operator { operator } => match operator.as_str() {
            "if" | "abstraction" => OPEN,
            "application" => APP,
            _ => ATOM,
        },
        _ => ATOM,
    }
}

fn required(operator: &str, slot: usize) -> u8 {
    match (operator, slot) {
        ("if", 1) | ("application", 0) => APP,
        ("application", 1) => ATOM,
        _ => OPEN,
    }
}

/// Minimal parenthesization for the expression grammar.
pub fn needs_parens(_spec: &GrammarSpec, parent: &Subtree, slot: usize, child: &Subtree) -> bool {
    match &parent.kind {
        NodeKind::Operator { operator } => level(child) < required(operator, slot),
        _ => false,
    }
}

pub fn unparse_options(tab_width: usize) -> PrintOptions {
    PrintOptions { parens: Some(needs_parens), ..PrintOptions::with_tab_width(tab_width) }
}

/// Canonical concrete text of a complete subtree, LF-terminated unless
/// empty.
pub fn unparse_subtree(tree: &Subtree, spec: &GrammarSpec, tab_width: usize) -> Result<String, UnparseError> {
    if tree.count_placeholders() > 0 {
        return Err(UnparseError::Incomplete);
    }
    let mut text = print_subtree(tree, spec, &unparse_options(tab_width)).map_err(|e| match e {
        LayoutError::NoRule(op) => UnparseError::NoRule(op),
        other => UnparseError::NoRule(other.to_string()),
    })?;
    if !text.is_empty() {
        text.push('\n');
    }
    Ok(text)
}

/// Canonical text of a whole document with the default tab width.
pub fn unparse(doc: &AstDoc, spec: &GrammarSpec) -> Result<String, UnparseError> {
    unparse_subtree(&doc.to_subtree(), spec, super::TAB_WIDTH)
}
