use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};

use synted_bench::Workload;
use synted_core::ast::{read_doc, write_doc, AstDoc};
use synted_core::builtin_demo_spec;
use synted_core::layout::{layout_tree, LayoutMode, LayoutParams};
use synted_core::syntax::{parse_text, roundtrip_check, unparse};

fn parsing(c: &mut Criterion) {
    let spec = builtin_demo_spec();
    let w = Workload::new(&spec, 200, 6, 1);
    let mut g = c.benchmark_group("text");
    g.throughput(Throughput::Bytes(w.total_bytes() as u64));
    g.bench_function("parse", |b| b.iter(|| w.texts.iter().map(|t| parse_text(&spec, t).unwrap().doc.len()).sum::<usize>()));
    let docs = w.docs(&spec);
    g.bench_function("unparse", |b| b.iter(|| docs.iter().map(|d| unparse(d, &spec).unwrap().len()).sum::<usize>()));
    g.bench_function("roundtrip", |b| {
        b.iter(|| w.texts.iter().map(|t| roundtrip_check(&spec, t).unwrap().differences.len()).sum::<usize>())
    });
    g.finish();
}

fn layout(c: &mut Criterion) {
    let spec = builtin_demo_spec();
    let docs = Workload::new(&spec, 100, 6, 2).docs(&spec);
    let mut g = c.benchmark_group("layout");
    for mode in [LayoutMode::VerticalCentered, LayoutMode::HorizontalCentered, LayoutMode::HorizontalSimple] {
        let params = LayoutParams { mode, ..LayoutParams::default() };
        g.bench_function(format!("{mode:?}"), |b| {
            b.iter(|| docs.iter().map(|d| layout_tree(d, d.root(), &params).unwrap().primitives.len()).sum::<usize>())
        });
    }
    g.finish();
}

fn ast_text(c: &mut Criterion) {
    let spec = builtin_demo_spec();
    let docs = Workload::new(&spec, 100, 6, 3).docs(&spec);
    let texts: Vec<String> = docs.iter().map(write_doc).collect();
    c.bench_function("ast/write", |b| b.iter(|| docs.iter().map(|d| write_doc(d).len()).sum::<usize>()));
    c.bench_function("ast/read", |b| b.iter(|| texts.iter().map(|t| read_doc(t, &spec).unwrap().len()).sum::<usize>()));
}

fn editing(c: &mut Criterion) {
    let spec = builtin_demo_spec();
    c.bench_function("edit/expand_chain", |b| {
        b.iter_batched(
            || AstDoc::new_program(&spec).unwrap(),
            |mut doc| {
                for _ in 0..50 {
                    let hole = *doc.placeholders().last().unwrap();
                    let choice = if doc.list_completions(&spec, hole).unwrap().iter().any(|c| c == "if") { "if" } else { "define" };
                    doc.expand_placeholder(&spec, hole, choice).unwrap();
                }
                doc
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, parsing, layout, ast_text, editing);
criterion_main!(benches);
