use serde::Serialize;

use crate::ast::NodeId;

use super::LayoutError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// Cross-axis alignment. Horizontal compounds take `Top`, `Middle` or
/// `Bottom`; vertical ones `Left`, `Center` or `Right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Align {
    Top,
    Middle,
    Bottom,
    Left,
    Center,
    Right,
}

impl Align {
    pub fn legal_for(self, axis: Axis) -> bool {
        match axis {
            Axis::Horizontal => matches!(self, Align::Top | Align::Middle | Align::Bottom),
            Axis::Vertical => matches!(self, Align::Left | Align::Center | Align::Right),
        }
    }

    fn offset(self, outer: i64, inner: i64) -> i64 {
        match self {
            Align::Top | Align::Left => 0,
            Align::Middle | Align::Center => (outer - inner) / 2,
            Align::Bottom | Align::Right => outer - inner,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RectStyle {
    Plain,
    /// Iconified subtree, drawn as a gray box.
    Gray,
    /// Iconified subtree with an open text window.
    TextIcon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Content {
    Text(String),
    Rect { label: String, style: RectStyle, node: Option<NodeId> },
    HSeg,
    VSeg,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayoutBox {
    Atomic { width: i64, height: i64, content: Content },
    Compound { children: Vec<LayoutBox>, axis: Axis, align: Align, gap: i64 },
}

impl LayoutBox {
    pub fn text(text: &str, width: i64, height: i64) -> Self {
        LayoutBox::Atomic { width, height, content: Content::Text(text.to_string()) }
    }

    pub fn rect(label: &str, width: i64, height: i64) -> Self {
        LayoutBox::Atomic {
            width,
            height,
            content: Content::Rect { label: label.to_string(), style: RectStyle::Plain, node: None },
        }
    }

    pub fn hseg(length: i64) -> Self {
        LayoutBox::Atomic { width: length, height: 0, content: Content::HSeg }
    }

    pub fn vseg(length: i64) -> Self {
        LayoutBox::Atomic { width: 0, height: length, content: Content::VSeg }
    }
}

/// Width and height of a box.
pub fn measure(b: &LayoutBox) -> (i64, i64) {
    match b {
        LayoutBox::Atomic { width, height, .. } => (*width, *height),
        LayoutBox::Compound { children, axis, gap, .. } => {
            if children.is_empty() {
                return (0, 0);
            }
            let dims: Vec<(i64, i64)> = children.iter().map(measure).collect();
            let gaps = gap * (dims.len() as i64 - 1);
            match axis {
                Axis::Horizontal => (
                    dims.iter().map(|d| d.0).sum::<i64>() + gaps,
                    dims.iter().map(|d| d.1).max().unwrap_or(0),
                ),
                Axis::Vertical => (
                    dims.iter().map(|d| d.0).max().unwrap_or(0),
                    dims.iter().map(|d| d.1).sum::<i64>() + gaps,
                ),
            }
        }
    }
}

pub fn compose(children: Vec<LayoutBox>, axis: Axis, align: Align, gap: i64) -> Result<LayoutBox, LayoutError> {
    if !align.legal_for(axis) {
        return Err(LayoutError::IllegalAlignment { axis, align });
    }
    Ok(LayoutBox::Compound { children, axis, align, gap })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    Rect { x: i64, y: i64, w: i64, h: i64, label: String, style: RectStyle },
    Text { x: i64, y: i64, text: String },
    Seg { x1: i64, y1: i64, x2: i64, y2: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Primitive {
    pub node: Option<NodeId>,
    #[serde(flatten)]
    pub shape: Shape,
}

/// Positioned render output: segments first, then rects and text runs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Geometry {
    pub primitives: Vec<Primitive>,
    pub bounds: (i64, i64),
}

impl Geometry {
    pub fn rects(&self) -> impl Iterator<Item = (Option<NodeId>, (i64, i64, i64, i64))> + '_ {
        self.primitives.iter().filter_map(|p| match p.shape {
            Shape::Rect { x, y, w, h, .. } => Some((p.node, (x, y, w, h))),
            _ => None,
        })
    }

    pub fn segments(&self) -> impl Iterator<Item = (i64, i64, i64, i64)> + '_ {
        self.primitives.iter().filter_map(|p| match p.shape {
            Shape::Seg { x1, y1, x2, y2 } => Some((x1, y1, x2, y2)),
            _ => None,
        })
    }
}

/// Resolves every atom of `b` to absolute coordinates.
pub fn place(b: &LayoutBox, origin: (i64, i64)) -> Geometry {
    let mut primitives = Vec::new();
    place_into(b, origin, &mut primitives);
    let (w, h) = measure(b);
    Geometry { primitives, bounds: (origin.0 + w, origin.1 + h) }
}

fn place_into(b: &LayoutBox, (x, y): (i64, i64), out: &mut Vec<Primitive>) {
    match b {
        LayoutBox::Atomic { width, height, content } => {
            let (node, shape) = match content {
                Content::Text(text) => (None, Shape::Text { x, y, text: text.clone() }),
                Content::Rect { label, style, node } => (
                    *node,
                    Shape::Rect { x, y, w: *width, h: *height, label: label.clone(), style: *style },
                ),
                Content::HSeg => (None, Shape::Seg { x1: x, y1: y, x2: x + width, y2: y }),
                Content::VSeg => (None, Shape::Seg { x1: x, y1: y, x2: x, y2: y + height }),
            };
            out.push(Primitive { node, shape });
        }
        LayoutBox::Compound { children, axis, align, gap } => {
            let (w, h) = measure(b);
            let mut cursor = 0;
            for child in children {
                let (cw, ch) = measure(child);
                let at = match axis {
                    Axis::Horizontal => (x + cursor, y + align.offset(h, ch)),
                    Axis::Vertical => (x + align.offset(w, cw), y + cursor),
                };
                place_into(child, at, out);
                cursor += match axis {
                    Axis::Horizontal => cw,
                    Axis::Vertical => ch,
                } + gap;
            }
        }
    }
}
