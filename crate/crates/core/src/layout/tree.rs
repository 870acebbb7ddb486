use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ast::{AstDoc, DisplayState, NodeId};

use super::boxes::{compose, place, Align, Axis, Content, Geometry, LayoutBox, Primitive, RectStyle, Shape};
use super::LayoutError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LayoutMode {
    /// Children in a row below the parent, parent centered over the row.
    #[default]
    VerticalCentered,
    /// Children in a column right of the parent, parent vertically centered.
    HorizontalCentered,
    /// Children in a column right of the parent, parent level with the
    /// first child.
    HorizontalSimple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutParams {
    pub mode: LayoutMode,
    pub hspace: i64,
    pub vspace: i64,
    pub char_width: i64,
    pub line_height: i64,
    pub box_padding: i64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams { mode: LayoutMode::VerticalCentered, hspace: 16, vspace: 24, char_width: 8, line_height: 16, box_padding: 4 }
    }
}

fn node_rect(label: &str, style: RectStyle, node: NodeId, params: &LayoutParams) -> LayoutBox {
    let chars = label.chars().count().max(1) as i64;
    LayoutBox::Atomic {
        width: chars * params.char_width + 2 * params.box_padding,
        height: params.line_height + 2 * params.box_padding,
        content: Content::Rect { label: label.to_string(), style, node: Some(node) },
    }
}

/// Box of the subtree at `id` together with the parent-child pairs to join.
fn tree_box(
    doc: &AstDoc,
    id: NodeId,
    params: &LayoutParams,
    edges: &mut Vec<(NodeId, NodeId)>,
) -> Result<LayoutBox, LayoutError> {
    let node = doc.node(id).map_err(|_| LayoutError::UnknownNode(id))?;
    let rect = match node.display {
        DisplayState::IconifiedGraphic => return Ok(node_rect("", RectStyle::Gray, id, params)),
        DisplayState::IconifiedText => return Ok(node_rect("T", RectStyle::TextIcon, id, params)),
        DisplayState::Expanded => node_rect(&node.kind.label(), RectStyle::Plain, id, params),
    };
    if node.children.is_empty() {
        return Ok(rect);
    }
    let mut children = Vec::with_capacity(node.children.len());
    for c in &node.children {
        edges.push((id, *c));
        children.push(tree_box(doc, *c, params, edges)?);
    }
    let (outer, inner) = match params.mode {
        LayoutMode::VerticalCentered => (
            (Axis::Vertical, Align::Center, params.vspace),
            (Axis::Horizontal, Align::Top, params.hspace),
        ),
        LayoutMode::HorizontalCentered => (
            (Axis::Horizontal, Align::Middle, params.hspace),
            (Axis::Vertical, Align::Left, params.vspace),
        ),
        LayoutMode::HorizontalSimple => (
            (Axis::Horizontal, Align::Top, params.hspace),
            (Axis::Vertical, Align::Left, params.vspace),
        ),
    };
    let group = compose(children, inner.0, inner.1, inner.2)?;
    compose(vec![rect, group], outer.0, outer.1, outer.2)
}

/// Center of a rect in integer pixels.
pub fn center((x, y, w, h): (i64, i64, i64, i64)) -> (i64, i64) {
    (x + w / 2, y + h / 2)
}

/// Graphic layout of the subtree at `root`. Every visible node gets one
/// rect; segments join the centers of parent and child rects and come
/// first in the primitive list.
pub fn layout_tree(doc: &AstDoc, root: NodeId, params: &LayoutParams) -> Result<Geometry, LayoutError> {
    let mut edges = Vec::new();
    let b = tree_box(doc, root, params, &mut edges)?;
    let placed = place(&b, (0, 0));
    let rects: BTreeMap<NodeId, (i64, i64, i64, i64)> =
        placed.rects().filter_map(|(n, r)| n.map(|n| (n, r))).collect();
    let mut primitives: Vec<Primitive> = edges
        .iter()
        .map(|(p, c)| {
            let (x1, y1) = center(rects[p]);
            let (x2, y2) = center(rects[c]);
            Primitive { node: Some(*c), shape: Shape::Seg { x1, y1, x2, y2 } }
        })
        .collect();
    primitives.extend(placed.primitives);
    Ok(Geometry { primitives, bounds: placed.bounds })
}
