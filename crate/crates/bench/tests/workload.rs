use synted_bench::Workload;
use synted_core::builtin_demo_spec;
use synted_core::syntax::parse_text;

#[test]
fn same_seed_same_workload() {
    let spec = builtin_demo_spec();
    let a = Workload::new(&spec, 20, 5, 9);
    let b = Workload::new(&spec, 20, 5, 9);
    assert_eq!(a.texts, b.texts);
    assert_ne!(a.texts, Workload::new(&spec, 20, 5, 10).texts);
}

#[test]
fn texts_parse_back_to_trees() {
    let spec = builtin_demo_spec();
    let w = Workload::new(&spec, 30, 5, 1);
    assert!(w.total_bytes() > 0);
    for (tree, text) in w.trees.iter().zip(&w.texts) {
        assert_eq!(&parse_text(&spec, text).unwrap().doc.to_subtree(), tree);
    }
    assert_eq!(w.docs(&spec).len(), 30);
}
