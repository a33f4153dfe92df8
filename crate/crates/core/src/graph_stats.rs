//! Classical network characteristics of an ASN.
//!
//! Clustering, path length and diameter use the undirected simple projection
//! (directions dropped, reciprocal edges merged, self-loops ignored). Path
//! metrics are unweighted and restricted to the largest weakly connected
//! component.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asn::Asn;
use crate::corpus::{tree_depth, CorpusSlice};

pub const PATH_CONVENTIONS: &str = "paths: undirected,unweighted,LCC";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub node_count: usize,
    /// Distinct directed edges of the ASN.
    pub edge_count: usize,
    /// Edges of the undirected simple projection.
    pub simple_edge_count: usize,
    /// `2 · simple_edge_count / node_count`.
    pub average_degree: f64,
    /// Mean local clustering coefficient; nodes of degree < 2 contribute 0.
    pub clustering: f64,
    pub average_path_length: f64,
    pub diameter: usize,
    pub component_count: usize,
    pub lcc_size: usize,
    pub lcc_fraction: f64,
    pub conventions: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphStatsError {
    #[error("network has no nodes")]
    EmptyGraph,
    #[error("corpus slice for century {0} has no trees")]
    EmptySlice(u32),
}

/// Sorted, deduplicated neighbour lists of the undirected simple projection.
pub fn undirected_adjacency(asn: &Asn) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); asn.node_count()];
    for (s, d, _) in asn.indexed_edges() {
        if s != d {
            adj[s].push(d);
            adj[d].push(s);
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

fn local_clustering(adj: &[Vec<usize>], v: usize) -> f64 {
    let nb = &adj[v];
    let k = nb.len();
    if k < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if adj[a].binary_search(&b).is_ok() {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (k * (k - 1)) as f64
}

/// Weakly connected components, each sorted, ordered by smallest member.
pub fn components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    let mut comps = Vec::new();
    for start in 0..adj.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

fn bfs_distances(adj: &[Vec<usize>], source: usize) -> (u64, usize) {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    let (mut sum, mut ecc) = (0u64, 0usize);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                sum += dist[w] as u64;
                ecc = ecc.max(dist[w]);
                queue.push_back(w);
            }
        }
    }
    (sum, ecc)
}

pub fn summarize(asn: &Asn) -> Result<NetworkSummary, GraphStatsError> {
    let n = asn.node_count();
    if n == 0 {
        return Err(GraphStatsError::EmptyGraph);
    }
    let adj = undirected_adjacency(asn);
    let simple_edge_count = adj.iter().map(|a| a.len()).sum::<usize>() / 2;
    let clustering = (0..n).map(|v| local_clustering(&adj, v)).sum::<f64>() / n as f64;

    let comps = components(&adj);
    // largest component; ties go to the one holding the smallest node
    let lcc = comps
        .iter()
        .fold(&comps[0], |best, c| if c.len() > best.len() { c } else { best });
    let m = lcc.len();
    let (total, diameter) = lcc
        .par_iter()
        .map(|&s| bfs_distances(&adj, s))
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    let average_path_length = if m > 1 {
        total as f64 / (m * (m - 1)) as f64
    } else {
        0.0
    };

    Ok(NetworkSummary {
        node_count: n,
        edge_count: asn.edge_count(),
        simple_edge_count,
        average_degree: 2.0 * simple_edge_count as f64 / n as f64,
        clustering,
        average_path_length,
        diameter,
        component_count: comps.len(),
        lcc_size: m,
        lcc_fraction: m as f64 / n as f64,
        conventions: PATH_CONVENTIONS.to_owned(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthDiameterRow {
    pub century: u32,
    pub max_tree_depth: usize,
    pub diameter: usize,
    pub average_path_length: f64,
    pub summary: NetworkSummary,
}

/// Deepest sentence against network path metrics, one row per century in order.
pub fn depth_vs_diameter(slices: &[(&CorpusSlice, &Asn)]) -> Result<Vec<DepthDiameterRow>, GraphStatsError> {
    let mut rows = slices
        .iter()
        .map(|(slice, asn)| {
            if slice.trees.is_empty() {
                return Err(GraphStatsError::EmptySlice(slice.century));
            }
            let summary = summarize(asn)?;
            Ok(DepthDiameterRow {
                century: slice.century,
                max_tree_depth: slice.trees.iter().map(tree_depth).max().unwrap_or(0),
                diameter: summary.diameter,
                average_path_length: summary.average_path_length,
                summary,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by_key(|r| r.century);
    Ok(rows)
}

/// `century,nodes,edges,avg_degree,clustering,avg_path_length,diameter,max_tree_depth`
pub fn network_csv(rows: &[DepthDiameterRow], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("century,nodes,edges,avg_degree,clustering,avg_path_length,diameter,max_tree_depth\n");
    for r in rows {
        let s = &r.summary;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.century,
            s.node_count,
            s.edge_count,
            s.average_degree,
            s.clustering,
            s.average_path_length,
            s.diameter,
            r.max_tree_depth
        );
    }
    out
}

/// Unweighted degree multisets of the directed graph, each sorted ascending
/// and aligned with node order before sorting.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequences {
    pub in_degree: Vec<u64>,
    pub out_degree: Vec<u64>,
    pub total: Vec<u64>,
}

pub fn degree_sequences(asn: &Asn) -> DegreeSequences {
    let n = asn.node_count();
    let mut ins = vec![0u64; n];
    let mut outs = vec![0u64; n];
    for (s, d, _) in asn.indexed_edges() {
        outs[s] += 1;
        ins[d] += 1;
    }
    let mut total: Vec<u64> = ins.iter().zip(&outs).map(|(a, b)| a + b).collect();
    ins.sort_unstable();
    outs.sort_unstable();
    total.sort_unstable();
    DegreeSequences {
        in_degree: ins,
        out_degree: outs,
        total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asn::NodeKey;
    use crate::corpus::GrammaticalRole::N;

    fn k(s: &str) -> NodeKey {
        NodeKey::new(N, s)
    }

    fn graph(edges: &[(&str, &str)]) -> Asn {
        Asn::from_edges(None, edges.iter().map(|&(s, d)| (k(s), k(d), 1)))
    }

    #[test]
    fn triangle() {
        let s = summarize(&graph(&[("a", "b"), ("b", "c"), ("c", "a")])).unwrap();
        assert_eq!(s.clustering, 1.0);
        assert_eq!(s.diameter, 1);
        assert_eq!(s.average_path_length, 1.0);
        assert_eq!(s.average_degree, 2.0);
    }

    #[test]
    fn four_chain() {
        let s = summarize(&graph(&[("a", "b"), ("b", "c"), ("c", "d")])).unwrap();
        assert_eq!(s.clustering, 0.0);
        assert_eq!(s.diameter, 3);
        assert!((s.average_path_length - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.component_count, 1);
        assert_eq!(s.lcc_fraction, 1.0);
    }

    #[test]
    fn reciprocal_and_self_loops_collapse() {
        let s = summarize(&graph(&[("a", "b"), ("b", "a"), ("a", "a")])).unwrap();
        assert_eq!(s.edge_count, 3);
        assert_eq!(s.simple_edge_count, 1);
        assert_eq!(s.diameter, 1);
    }

    #[test]
    fn lcc_only() {
        let s = summarize(&graph(&[("a", "b"), ("b", "c"), ("x", "y")])).unwrap();
        assert_eq!(s.component_count, 2);
        assert_eq!(s.lcc_size, 3);
        assert_eq!(s.diameter, 2);
        assert!((s.average_path_length - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_graph() {
        assert_eq!(summarize(&Asn::new(None)), Err(GraphStatsError::EmptyGraph));
        let d = degree_sequences(&Asn::new(None));
        assert!(d.in_degree.is_empty() && d.out_degree.is_empty() && d.total.is_empty());
    }

    #[test]
    fn chain_degrees() {
        let d = degree_sequences(&graph(&[("a", "b"), ("b", "c")]));
        assert_eq!(d.in_degree, vec![0, 1, 1]);
        assert_eq!(d.out_degree, vec![0, 1, 1]);
        assert_eq!(d.total, vec![1, 1, 2]);
    }
}
