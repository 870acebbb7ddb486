//! Workloads shared by the benchmarks: seeded random programs of the demo
//! language, as trees and as text.

use rand::rngs::StdRng;
use rand::SeedableRng;

use synted_core::ast::{AstDoc, Subtree};
use synted_core::generate::{GenConfig, Generator};
use synted_core::syntax::{unparse_subtree, TAB_WIDTH};
use synted_core::GrammarSpec;

pub struct Workload {
    pub trees: Vec<Subtree>,
    pub texts: Vec<String>,
}

impl Workload {
    /// `count` complete programs of at most `depth` levels, the same for the
    /// same seed.
    pub fn new(spec: &GrammarSpec, count: usize, depth: usize, seed: u64) -> Workload {
        let gen = Generator::new(spec, GenConfig { max_depth: depth, ..GenConfig::default() });
        let mut rng = StdRng::seed_from_u64(seed);
        let trees: Vec<Subtree> = (0..count).map(|_| gen.document(&mut rng)).collect();
        let texts = trees
            .iter()
            .map(|t| unparse_subtree(t, spec, TAB_WIDTH).expect("generated programs are complete"))
            .collect();
        Workload { trees, texts }
    }

    pub fn docs(&self, spec: &GrammarSpec) -> Vec<AstDoc> {
        self.trees.iter().map(|t| AstDoc::from_subtree(&spec.name, t)).collect()
    }

    pub fn total_bytes(&self) -> usize {
        self.texts.iter().map(String::len).sum()
    }
}
