//! Box layout: measurement and composition of boxes, text pretty printing
//! from pattern/format rules, and graphic tree layout.

mod boxes;
mod pretty;
mod tree;

use thiserror::Error;

use crate::ast::NodeId;

pub use boxes::{compose, measure, place, Align, Axis, Content, Geometry, LayoutBox, Primitive, RectStyle, Shape};
pub use pretty::{pretty_print, print_subtree, select_rule, ParenHook, PlaceholderStyle, PrintOptions};
pub use tree::{center, layout_tree, LayoutMode, LayoutParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("illegal alignment {align:?} for a {axis:?} compound")]
    IllegalAlignment { axis: Axis, align: Align },
    #[error("no pretty rule for {0}")]
    NoRule(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}
