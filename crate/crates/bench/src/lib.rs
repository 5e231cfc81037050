//! Seeded synthetic inputs for the benchmarks.

use std::collections::BTreeMap;

use lodprof_core::reuse::{ReuseEdgeKind, ReuseNetwork, ReuseNode};
use lodprof_core::similarity::EmbeddingTable;
use lodprof_core::term::{Term, XSD_FLOAT};
use lodprof_core::uri::{LabelMethod, LabeledUri};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Connected weighted graph: a random spanning tree plus `extra` edges.
pub fn weighted_graph(n: usize, extra: usize, seed: u64) -> Vec<(usize, usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = BTreeMap::new();
    for i in 1..n {
        edges.insert((rng.gen_range(0..i), i), rng.gen_range(0.75..1.0));
    }
    for _ in 0..extra {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            edges.insert((a.min(b), a.max(b)), rng.gen_range(0.75..1.0));
        }
    }
    edges.into_iter().map(|((a, b), w)| (a, b, w)).collect()
}

pub fn reuse_network(n: usize, m: usize, seed: u64) -> ReuseNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (0..n)
        .map(|i| ReuseNode::element(format!("s{}", i % 8), format!("http://x.org/{i}")))
        .collect();
    let edges: Vec<_> = (0..m)
        .map(|_| {
            (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                ReuseEdgeKind::Reuse,
            )
        })
        .collect();
    ReuseNetwork::from_parts(nodes, edges)
}

/// Labels of two to four words over a `words`-word vocabulary, spread over
/// `sources` sources, with a matching embedding table.
pub fn labeled_elements(
    count: usize,
    sources: usize,
    words: usize,
    dim: usize,
    seed: u64,
) -> (Vec<LabeledUri>, EmbeddingTable) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = String::new();
    let mut idf = String::new();
    for w in 0..words {
        let v: Vec<String> = (0..dim)
            .map(|_| format!("{:.6}", rng.gen_range(-1.0..1.0)))
            .collect();
        vectors.push_str(&format!("w{w} {}\n", v.join(" ")));
        idf.push_str(&format!("w{w} {:.4}\n", rng.gen_range(0.5..8.0)));
    }
    let table = EmbeddingTable::parse(&vectors, &idf).expect("generated table parses");
    let labeled = (0..count)
        .map(|i| {
            let len = rng.gen_range(2..=4);
            let label: Vec<String> = (0..len)
                .map(|_| format!("w{}", rng.gen_range(0..words)))
                .collect();
            LabeledUri {
                uri: format!("http://s{}.org/p{i}", i % sources),
                label: label.join(" "),
                method: LabelMethod::Regexp,
                source_id: Some(format!("s{}", i % sources)),
            }
        })
        .collect();
    (labeled, table)
}

/// A mix of IRIs and float literals, like a property's value sample.
pub fn value_sample(n: usize, seed: u64) -> Vec<Term> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            if i % 3 == 0 {
                Term::iri(format!(
                    "http://bio2rdf.org/drugbank:DB{:05}",
                    rng.gen_range(0..20_000)
                ))
            } else {
                Term::typed(format!("{:.2}", rng.gen_range(10.0..900.0)), XSD_FLOAT)
            }
        })
        .collect()
}
