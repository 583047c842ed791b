use std::collections::BTreeMap;

use colexnet::analyze::{detect_communities, modularity, Partition};
use colexnet::network::{
    ColexEdge, ColexNetwork, EdgeEvidence, NetworkKind, NetworkParams, NodeAnnotation, WeightField,
    Witness,
};

fn node() -> NodeAnnotation {
    NodeAnnotation {
        gloss: String::new(),
        form_count: 1,
        family_count: 1,
        forms: BTreeMap::new(),
    }
}

/// Undirected network whose language_count on each edge is `w`.
fn network(n: usize, edges: &[(usize, usize, usize)]) -> ColexNetwork {
    let name = |i: usize| format!("N{i}");
    let nodes = (0..n).map(|i| (name(i), node())).collect();
    let edges = edges
        .iter()
        .map(|&(a, b, w)| {
            let (s, t) = if name(a) < name(b) { (a, b) } else { (b, a) };
            let evidence = (0..w)
                .map(|l| EdgeEvidence {
                    language: format!("l{l}"),
                    family: "f".into(),
                    witnesses: vec![Witness {
                        forms: vec![],
                        shared: vec![],
                        kind: None,
                    }],
                })
                .collect();
            ColexEdge::from_evidence(name(s), name(t), evidence)
        })
        .collect();
    ColexNetwork::from_parts(NetworkKind::Full, NetworkParams::default(), nodes, edges).unwrap()
}

// Independent modularity: Q = sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j) / 2m
fn modularity_oracle(n: usize, edges: &[(usize, usize, usize)], labels: &[usize]) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        a[i][j] += w as f64;
        a[j][i] += w as f64;
    }
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Best modularity over every set partition (restricted growth strings).
fn exhaustive_best(n: usize, edges: &[(usize, usize, usize)]) -> f64 {
    fn go(i: usize, labels: &mut Vec<usize>, max: usize, f: &mut dyn FnMut(&[usize])) {
        if i == labels.len() {
            f(labels);
            return;
        }
        for l in 0..=max + 1 {
            labels[i] = l;
            go(i + 1, labels, max.max(l), f);
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut labels = vec![0; n];
    go(1, &mut labels, 0, &mut |l| {
        best = best.max(modularity_oracle(n, edges, l))
    });
    best
}

fn labels_of(p: &Partition, n: usize) -> Vec<usize> {
    (0..n).map(|i| p.labels[&format!("N{i}")]).collect()
}

fn barbell() -> Vec<(usize, usize, usize)> {
    let mut edges = Vec::new();
    for base in [0, 5] {
        for i in 0..5 {
            for j in i + 1..5 {
                edges.push((base + i, base + j, 2));
            }
        }
    }
    edges.push((4, 5, 1));
    edges
}

#[test]
fn barbell_splits_into_its_cliques() {
    let edges = barbell();
    let net = network(10, &edges);
    let best = exhaustive_best(10, &edges);
    for seed in 0..10 {
        let p = detect_communities(&net, seed).unwrap();
        let labels = labels_of(&p, 10);
        assert_eq!(p.community_count(), 2, "seed {seed}: {labels:?}");
        assert!(labels[..5].iter().all(|&l| l == labels[0]));
        assert!(labels[5..].iter().all(|&l| l == labels[5]));
        let q = modularity(&net, &p, WeightField::Language);
        assert!((q - modularity_oracle(10, &edges, &labels)).abs() < 1e-12);
        assert!(
            (q - best).abs() < 1e-12,
            "seed {seed}: {q} vs optimum {best}"
        );
    }
}

#[test]
fn modularity_matches_oracle_on_arbitrary_partitions() {
    let edges = vec![
        (0, 1, 3),
        (1, 2, 1),
        (2, 3, 2),
        (3, 0, 1),
        (0, 2, 4),
        (4, 5, 1),
    ];
    let net = network(6, &edges);
    for labels in [
        [0, 0, 0, 0, 0, 0],
        [0, 1, 2, 3, 4, 5],
        [0, 0, 1, 1, 2, 2],
        [0, 1, 0, 1, 0, 1],
    ] {
        let p = Partition {
            algorithm: String::new(),
            seed: 0,
            labels: labels
                .iter()
                .enumerate()
                .map(|(i, &l)| (format!("N{i}"), l))
                .collect(),
        };
        let q = modularity(&net, &p, WeightField::Language);
        assert!((q - modularity_oracle(6, &edges, &labels)).abs() < 1e-12);
    }
}

#[test]
fn isolated_nodes_keep_their_own_community() {
    let net = network(4, &[(0, 1, 1)]);
    let p = detect_communities(&net, 3).unwrap();
    let labels = labels_of(&p, 4);
    assert_eq!(labels[0], labels[1]);
    assert_ne!(labels[2], labels[3]);
    assert_ne!(labels[2], labels[0]);
}
