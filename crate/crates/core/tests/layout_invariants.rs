mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use synted_core::ast::{AstDoc, DisplayState, NodeKind};
use synted_core::builtin_demo_spec;
use synted_core::generate::{GenConfig, Generator};
use synted_core::layout::{layout_tree, LayoutMode, LayoutParams};

const MODES: [LayoutMode; 3] = [LayoutMode::VerticalCentered, LayoutMode::HorizontalCentered, LayoutMode::HorizontalSimple];

/// Edges drawn: parent to child pairs under nodes that are not iconified.
fn visible_edges(doc: &AstDoc) -> usize {
    fn walk(doc: &AstDoc, id: synted_core::ast::NodeId) -> usize {
        let node = doc.node(id).unwrap();
        if node.display != DisplayState::Expanded {
            return 0;
        }
        node.children.len() + node.children.iter().map(|c| walk(doc, *c)).sum::<usize>()
    }
    walk(doc, doc.root())
}

fn check(seed: u64) -> Result<(), String> {
    let spec = builtin_demo_spec();
    let cfg = GenConfig { placeholder_rate: 0.1, iconify_rate: 0.05, ..GenConfig::default() };
    let doc = AstDoc::from_subtree(&spec.name, &Generator::new(&spec, cfg).document(&mut StdRng::seed_from_u64(seed)));
    for mode in MODES {
        let mut last = (0, 0);
        for (h, v) in [(4, 6), (16, 24), (40, 60)] {
            let params = LayoutParams { mode, hspace: h, vspace: v, ..LayoutParams::default() };
            let g = layout_tree(&doc, doc.root(), &params).map_err(|e| e.to_string())?;
            let rects = common::rects(&g);
            let overlaps = common::overlapping_pairs(&rects);
            if overlaps > 0 {
                return Err(format!("{mode:?} {h}/{v}: {overlaps} overlaps"));
            }
            if common::unanchored_segments(&g) > 0 {
                return Err(format!("{mode:?} {h}/{v}: segment not anchored at centers"));
            }
            if common::segment_count(&g) != visible_edges(&doc) {
                return Err(format!("{mode:?}: {} segments, {} edges", common::segment_count(&g), visible_edges(&doc)));
            }
            if g.bounds.0 < last.0 || g.bounds.1 < last.1 {
                return Err(format!("{mode:?}: bounds shrank from {last:?} to {:?}", g.bounds));
            }
            last = g.bounds;
        }
    }
    Ok(())
}

#[test]
fn every_node_gets_a_box() {
    let spec = builtin_demo_spec();
    let mut doc = synted_core::syntax::parse_text(&spec, "f x y = x;\n").unwrap().doc;
    let holes = doc.placeholders().len();
    assert_eq!(holes, 0);
    let g = layout_tree(&doc, doc.root(), &LayoutParams::default()).unwrap();
    assert_eq!(common::rects(&g).len(), doc.len());
    let body = doc.nodes().find(|n| matches!(&n.kind, NodeKind::Operator { operator } if operator == "variable")).unwrap().id;
    doc.collapse_to_placeholder(&spec, body).unwrap();
    let g = layout_tree(&doc, doc.root(), &LayoutParams::default()).unwrap();
    assert_eq!(common::rects(&g).len(), doc.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]
    #[test]
    fn random_documents(seed in any::<u64>()) {
        prop_assert_eq!(check(seed), Ok(()));
    }
}
