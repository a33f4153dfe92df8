//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use asn_toolkit::asn::{aggregate, Asn, NodeKey};
use asn_toolkit::corpus::{validate_tree, DependencyTree, GrammaticalRole, SentenceMeta, Token};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn key(name: &str) -> NodeKey {
    NodeKey::new(GrammaticalRole::N, name)
}

/// Random head vector of a tree on `n` tokens, token numbering shuffled.
pub fn random_heads<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut heads = vec![0; n];
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        heads[order[i] - 1] = parent;
    }
    heads
}

/// Tree whose tokens all carry distinct lemmas `t1..tn`.
pub fn tree_from_heads(heads: &[usize], century: u32, id: &str) -> DependencyTree {
    let tokens = heads
        .iter()
        .enumerate()
        .map(|(i, &h)| Token::new(i + 1, &format!("t{}", i + 1), GrammaticalRole::N, h))
        .collect();
    validate_tree(tokens, SentenceMeta::new(id, century)).expect("generated heads form a tree")
}

/// Depth of every token found by walking head pointers to the root.
pub fn depths_by_walking(heads: &[usize]) -> Vec<usize> {
    (1..=heads.len())
        .map(|mut t| {
            let mut d = 0;
            while heads[t - 1] != 0 {
                t = heads[t - 1];
                d += 1;
            }
            d
        })
        .collect()
}

pub fn tree_network(heads: &[usize]) -> Asn {
    aggregate(&[tree_from_heads(heads, 1, "s")]).unwrap()
}

/// Random weighted digraph on `n` nodes named `v0..`; self-loops and
/// cycles allowed.
pub fn random_digraph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Asn {
    let mut edges = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if rng.random::<f64>() < p {
                edges.push((key(&format!("v{s}")), key(&format!("v{d}")), rng.random_range(1..=9u64)));
            }
        }
    }
    let mut asn = Asn::from_edges(None, edges);
    for i in 0..n {
        let k = key(&format!("v{i}"));
        if !asn.contains(&k) {
            asn.add_node(k, 1);
        }
    }
    asn
}

/// Dense minimum-norm least-squares levels through the SVD
/// pseudo-inverse, shifted so the smallest level is 0.
pub fn dense_levels(asn: &Asn) -> BTreeMap<NodeKey, f64> {
    let n = asn.node_count();
    let edges = asn.indexed_edges();
    let mut w_in = vec![0.0; n];
    for &(_, d, w) in &edges {
        w_in[d] += w;
    }
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for v in 0..n {
        a[(v, v)] = 1.0;
        if w_in[v] > 0.0 {
            b[v] = 1.0;
        }
    }
    for &(s, d, w) in &edges {
        a[(d, s)] -= w / w_in[d];
    }
    let svd = a.svd(true, true);
    let tol = 1e-10 * svd.singular_values.max().max(1.0);
    let x = svd.solve(&b, tol).expect("svd with vectors");
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    asn.nodes().keys().cloned().zip(x.iter().map(|v| v - min)).collect()
}

/// Brute-force network summary: adjacency matrix, Floyd–Warshall, triple
/// loops. Returns (simple edges, clustering, average path length,
/// diameter, component count, lcc size).
pub fn brute_summary(asn: &Asn) -> (usize, f64, f64, usize, usize, usize) {
    let n = asn.node_count();
    let mut adj = vec![vec![false; n]; n];
    for (s, d, _) in asn.indexed_edges() {
        if s != d {
            adj[s][d] = true;
            adj[d][s] = true;
        }
    }
    let simple = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| adj[i][j]).count();
    let mut clustering = 0.0;
    for v in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&u| adj[v][u]).collect();
        let k = nb.len();
        if k < 2 {
            continue;
        }
        let mut links = 0;
        for i in 0..k {
            for j in i + 1..k {
                if adj[nb[i]][nb[j]] {
                    links += 1;
                }
            }
        }
        clustering += 2.0 * links as f64 / (k * (k - 1)) as f64;
    }
    clustering /= n as f64;

    const INF: usize = usize::MAX / 4;
    let mut dist = vec![vec![INF; n]; n];
    for i in 0..n {
        dist[i][i] = 0;
        for j in 0..n {
            if adj[i][j] {
                dist[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                }
            }
        }
    }
    // components as sets of mutually reachable nodes, ordered by smallest member
    let mut comp_of = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if comp_of[i] == usize::MAX {
            let members: Vec<usize> = (0..n).filter(|&j| dist[i][j] < INF).collect();
            for &m in &members {
                comp_of[m] = comps.len();
            }
            comps.push(members);
        }
    }
    let mut lcc = &comps[0];
    for c in &comps {
        if c.len() > lcc.len() {
            lcc = c;
        }
    }
    let m = lcc.len();
    let (mut total, mut diameter) = (0usize, 0usize);
    for &i in lcc {
        for &j in lcc {
            total += dist[i][j];
            diameter = diameter.max(dist[i][j]);
        }
    }
    let apl = if m > 1 { total as f64 / (m * (m - 1)) as f64 } else { 0.0 };
    (simple, clustering, apl, diameter, comps.len(), m)
}

/// Tree check by definition: one root, every token reaches it, heads in range.
pub fn is_tree_by_definition(heads: &[usize]) -> bool {
    let n = heads.len();
    if n == 0 || heads.iter().any(|&h| h > n) {
        return false;
    }
    if heads.iter().filter(|&&h| h == 0).count() != 1 {
        return false;
    }
    (1..=n).all(|start| {
        let mut t = start;
        for _ in 0..=n {
            if heads[t - 1] == 0 {
                return true;
            }
            t = heads[t - 1];
        }
        false
    })
}

/// Every head vector of length `n` with entries in `0..=n + 1` (one value
/// out of range).
pub fn all_head_vectors(n: usize) -> Vec<Vec<usize>> {
    let base = n + 2;
    let total = base.pow(n as u32);
    (0..total)
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let h = code % base;
                    code /= base;
                    h
                })
                .collect()
        })
        .collect()
}
