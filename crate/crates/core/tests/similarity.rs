use std::collections::BTreeMap;

use lodprof_core::similarity::{
    build_similarity_network, community_report, cosine, louvain, modularity, EmbeddingTable,
};
use lodprof_core::uri::{LabelMethod, LabeledUri};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Q = (1/2m) Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j) over a dense matrix.
fn oracle_q(n: usize, edges: &[(usize, usize, f64)], c: &[usize]) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        a[i][j] += w;
        a[j][i] += w;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let m2: f64 = k.iter().sum();
    if m2 == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if c[i] == c[j] {
                q += a[i][j] - k[i] * k[j] / m2;
            }
        }
    }
    q / m2
}

/// Best Q over every set partition (restricted growth strings).
fn exhaustive_optimum(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    fn rec(
        i: usize,
        n: usize,
        c: &mut Vec<usize>,
        max: usize,
        edges: &[(usize, usize, f64)],
        best: &mut f64,
    ) {
        if i == n {
            *best = best.max(oracle_q(n, edges, c));
            return;
        }
        for label in 0..=max + 1 {
            c[i] = label;
            rec(i + 1, n, c, max.max(label), edges, best);
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut c = vec![0; n];
    if n == 0 {
        return 0.0;
    }
    rec(1, n, &mut c, 0, edges, &mut best);
    best
}

fn two_triangles() -> Vec<(usize, usize, f64)> {
    vec![
        (0, 1, 1.0),
        (1, 2, 1.0),
        (0, 2, 1.0),
        (3, 4, 1.0),
        (4, 5, 1.0),
        (3, 5, 1.0),
    ]
}

#[test]
fn two_triangles_match_exhaustive_optimum() {
    let e = two_triangles();
    let opt = exhaustive_optimum(6, &e);
    assert!((opt - 0.5).abs() < 1e-12);
    let a = louvain(6, &e, 42);
    assert_eq!(a.community_count(), 2);
    assert_eq!(a.modularity, 0.5);
}

fn random_connected(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize, f64)> {
    let mut edges = BTreeMap::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.insert((j, i), rng.gen_range(0.1..1.0));
    }
    for _ in 0..rng.gen_range(0..n * 2) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            edges.insert((a.min(b), a.max(b)), rng.gen_range(0.1..1.0));
        }
    }
    edges.into_iter().map(|((a, b), w)| (a, b, w)).collect()
}

#[test]
fn louvain_near_optimal_on_small_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let n = rng.gen_range(2..=8);
        let edges = random_connected(&mut rng, n);
        let a = louvain(n, &edges, 42);
        let opt = exhaustive_optimum(n, &edges);
        let recomputed = oracle_q(n, &edges, &a.communities);
        assert!((a.modularity - recomputed).abs() < 1e-9);
        assert!((modularity(n, &edges, &a.communities) - recomputed).abs() < 1e-12);
        assert!(
            a.modularity >= 0.95 * opt - 1e-12,
            "n={n} q={} opt={opt}",
            a.modularity
        );
        assert!(a.levels.windows(2).all(|w| w[1] >= w[0]));
        assert!((-0.5..=1.0).contains(&a.modularity));
    }
}

#[test]
fn louvain_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let edges = random_connected(&mut rng, 40);
    assert_eq!(louvain(40, &edges, 5), louvain(40, &edges, 5));
}

#[test]
fn cosine_symmetric_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let a: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ab = cosine(&a, &b).unwrap();
        assert!((ab - cosine(&b, &a).unwrap()).abs() <= 1e-12);
        assert!(ab.abs() <= 1.0 + 1e-12);
        assert!((cosine(&a, &a).unwrap() - 1.0).abs() <= 1e-12);
    }
}

fn labeled(source: &str, uri: &str, label: &str) -> LabeledUri {
    LabeledUri {
        uri: uri.into(),
        label: label.into(),
        method: LabelMethod::Regexp,
        source_id: Some(source.into()),
    }
}

#[test]
fn greedy_one_to_one() {
    // n3 = (1, 0); n1 at cosine 0.87 and n2 at 0.93 from it.
    let s1 = 0.87f64;
    let s2 = 0.93f64;
    let vectors = format!(
        "three 1 0\none {} {}\ntwo {} {}\n",
        s1,
        (1.0 - s1 * s1).sqrt(),
        s2,
        (1.0 - s2 * s2).sqrt()
    );
    let table = EmbeddingTable::parse(&vectors, "one 1\ntwo 1\nthree 1\n").unwrap();
    let items = [
        labeled("LD1", "http://a/n1", "one"),
        labeled("LD1", "http://a/n2", "two"),
        labeled("LD2", "http://b/n3", "three"),
    ];
    let net = build_similarity_network(&items, &table, 0.75);
    assert_eq!(net.edges.len(), 1);
    let e = &net.edges[0];
    assert_eq!(
        (net.nodes[e.a].uri.as_str(), net.nodes[e.b].uri.as_str()),
        ("http://a/n2", "http://b/n3")
    );
    assert!((e.score - 0.93).abs() < 1e-12);

    let none = build_similarity_network(&items, &table, 0.95);
    assert!(none.edges.is_empty());
}

#[test]
fn per_source_pair_degree_at_most_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let words: Vec<String> = (0..30).map(|i| format!("w{i}")).collect();
    let mut vectors = String::new();
    for w in &words {
        let v: Vec<String> = (0..4)
            .map(|_| format!("{}", rng.gen_range(0.5..1.0)))
            .collect();
        vectors.push_str(&format!("{w} {}\n", v.join(" ")));
    }
    let table = EmbeddingTable::parse(&vectors, "").unwrap();
    let items: Vec<LabeledUri> = (0..60)
        .map(|i| {
            labeled(
                &format!("s{}", i % 4),
                &format!("http://x/{i}"),
                &words[i % 30],
            )
        })
        .collect();
    let net = build_similarity_network(&items, &table, 0.75);
    assert!(!net.edges.is_empty());
    let mut degree: BTreeMap<(usize, &str), usize> = BTreeMap::new();
    for e in &net.edges {
        assert!(e.score >= 0.75);
        assert_ne!(net.nodes[e.a].source, net.nodes[e.b].source);
        *degree
            .entry((e.a, net.nodes[e.b].source.as_str()))
            .or_default() += 1;
        *degree
            .entry((e.b, net.nodes[e.a].source.as_str()))
            .or_default() += 1;
    }
    assert!(degree.values().all(|&d| d == 1));
}

#[test]
fn enzyme_community_tokens() {
    let table = EmbeddingTable::parse(
        "ec 1 0\nnumber 1 0.1\ncode 1 0.05\n",
        "ec 1\nnumber 1\ncode 1\n",
    )
    .unwrap();
    let items = [
        labeled("a", "http://a/ec-code", "Ec Code"),
        labeled("b", "http://b/ec-number", "Ec Number"),
        labeled("c", "http://c/hasEcNumber", "Has Ec Number"),
    ];
    let net = build_similarity_network(&items, &table, 0.75);
    assert_eq!(net.edges.len(), 3);
    let a = louvain(net.nodes.len(), &net.weighted_edges(), 42);
    let report = community_report(&a, &net, 2);
    assert_eq!(report.rows.len(), 1);
    let row = &report.rows[0];
    assert_eq!(row.size, 3);
    let top: Vec<&str> = row.tokens.iter().map(|(t, _)| t.as_str()).collect();
    assert_eq!(top, ["ec", "number", "code"]);
    assert_eq!(row.tokens.iter().map(|(_, n)| n).sum::<usize>(), 6);

    let single = community_report(&a, &net, 4);
    assert!(single.rows.is_empty());
    assert_eq!(single.small.as_ref().unwrap().size, 3);
}
