//! Forward and backward hierarchical levels of an ASN and the two scalar
//! summaries built on them.
//!
//! A node with no in-edges sits at level 0. Every other node sits one level
//! below the in-weight-averaged level of its in-neighbours:
//!
//! ```text
//! s(v) = 1 + Σ_u w(u,v) s(u) / w_in(v)
//! ```
//!
//! The system is solved in the least-squares sense, taking the
//! minimum-norm solution when cycles without a head make it singular, and
//! finally shifted so the smallest level is 0. Backward levels are forward
//! levels of the edge-reversed graph.

pub mod lsqr;
mod solve;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asn::{Asn, NodeKey};

/// Levels quantised to this grid are treated as equal when ranking.
pub const LEVEL_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Levels {
    pub by_node: BTreeMap<NodeKey, f64>,
    /// Least-squares residual norm of the solve, before the shift.
    pub residual: f64,
}

impl Levels {
    pub fn get(&self, key: &NodeKey) -> Option<f64> {
        self.by_node.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.by_node.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_node.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyLevels {
    pub forward: Levels,
    pub backward: Levels,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("hierarchy statistics are undefined on edgeless graph")]
    Edgeless,
    #[error("histogram bin width must be positive, got {0}")]
    BinWidth(String),
}

fn levels_from_edges(asn: &Asn, edges: &[(usize, usize, f64)]) -> Levels {
    let sol = solve::solve_levels(asn.node_count(), edges);
    let min = sol.raw.iter().copied().fold(f64::INFINITY, f64::min);
    let by_node = asn
        .nodes()
        .keys()
        .zip(&sol.raw)
        .map(|(k, &s)| (k.clone(), s - min))
        .collect();
    Levels {
        by_node,
        residual: sol.residual,
    }
}

/// Top-down levels: heads at 0, growing along edges.
pub fn forward_levels(asn: &Asn) -> Levels {
    levels_from_edges(asn, &asn.indexed_edges())
}

/// Bottom-up levels: sinks at 0, identical to forward levels of the reversed graph.
pub fn backward_levels(asn: &Asn) -> Levels {
    let reversed: Vec<(usize, usize, f64)> = asn
        .indexed_edges()
        .into_iter()
        .map(|(s, d, w)| (d, s, w))
        .collect();
    levels_from_edges(asn, &reversed)
}

pub fn hierarchy_levels(asn: &Asn) -> HierarchyLevels {
    HierarchyLevels {
        forward: forward_levels(asn),
        backward: backward_levels(asn),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyStats {
    /// Weighted population variance of the edge level differences.
    pub incoherence: f64,
    /// One minus the weighted mean edge level difference.
    pub democracy: f64,
    #[serde(skip)]
    pub edge_differences: BTreeMap<(NodeKey, NodeKey), f64>,
}

/// Level differences `s(dst) - s(src)` across every edge, summarised with
/// edge weights as multiplicities.
pub fn hierarchy_stats(asn: &Asn, levels: &Levels) -> Result<HierarchyStats, HierarchyError> {
    if asn.edge_count() == 0 {
        return Err(HierarchyError::Edgeless);
    }
    let mut edge_differences = BTreeMap::new();
    let mut total = 0.0;
    let mut sum = 0.0;
    for ((s, d), e) in asn.edges() {
        let h = levels.by_node[d] - levels.by_node[s];
        let w = e.weight as f64;
        total += w;
        sum += w * h;
        edge_differences.insert((s.clone(), d.clone()), h);
    }
    let mean = sum / total;
    let mut var = 0.0;
    for ((s, d), e) in asn.edges() {
        let dev = edge_differences[&(s.clone(), d.clone())] - mean;
        var += e.weight as f64 * dev * dev;
    }
    Ok(HierarchyStats {
        incoherence: var / total,
        democracy: 1.0 - mean,
        edge_differences,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedNode {
    pub key: NodeKey,
    pub level: f64,
    pub out_weight: u64,
}

fn quantise(level: f64) -> i64 {
    (level / LEVEL_TIE_TOLERANCE).round() as i64
}

/// Nodes from the top of the hierarchy down: ascending forward level, then
/// heavier out-weight, then key.
pub fn influence_ranking(asn: &Asn, levels: &Levels) -> Vec<RankedNode> {
    let out_w = asn.out_weights();
    let mut ranked: Vec<RankedNode> = asn
        .nodes()
        .keys()
        .zip(out_w)
        .map(|(k, w)| RankedNode {
            key: k.clone(),
            level: levels.by_node[k],
            out_weight: w,
        })
        .collect();
    ranked.sort_by(|a, b| {
        quantise(a.level)
            .cmp(&quantise(b.level))
            .then_with(|| b.out_weight.cmp(&a.out_weight))
            .then_with(|| a.key.cmp(&b.key))
    });
    ranked
}

/// Competition ranks (1 = top) by forward level then out-weight. Nodes tied
/// on both share a rank, so ranks never depend on lemma spelling.
pub fn level_ranks(asn: &Asn, levels: &Levels) -> BTreeMap<NodeKey, usize> {
    let ranked = influence_ranking(asn, levels);
    let mut ranks = BTreeMap::new();
    let mut current = 0;
    let mut prev: Option<(i64, u64)> = None;
    for (pos, r) in ranked.iter().enumerate() {
        let sig = (quantise(r.level), r.out_weight);
        if prev != Some(sig) {
            current = pos + 1;
            prev = Some(sig);
        }
        ranks.insert(r.key.clone(), current);
    }
    ranks
}

/// Counts per left-closed bin `[i·w, (i+1)·w)`, keyed by the bin's lower edge.
pub fn level_histogram(levels: &Levels, bin_width: f64) -> Result<Vec<(f64, usize)>, HierarchyError> {
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(HierarchyError::BinWidth(bin_width.to_string()));
    }
    let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
    for &l in levels.by_node.values() {
        // absorb rounding just below a bin edge
        let i = (l / bin_width + LEVEL_TIE_TOLERANCE).floor() as i64;
        *bins.entry(i).or_insert(0) += 1;
    }
    Ok(bins
        .into_iter()
        .map(|(i, c)| (i as f64 * bin_width, c))
        .collect())
}

/// Per-node table `role,lemma,forward_level,backward_level,frequency,in_weight,out_weight`.
pub fn levels_csv(asn: &Asn, levels: &HierarchyLevels, comments: &[String]) -> String {
    let in_w = asn.in_weights();
    let out_w = asn.out_weights();
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("role,lemma,forward_level,backward_level,frequency,in_weight,out_weight\n");
    for (i, (k, attrs)) in asn.nodes().iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            k.role,
            crate::asn::csv_field(&k.lemma),
            levels.forward.by_node[k],
            levels.backward.by_node[k],
            attrs.frequency,
            in_w[i],
            out_w[i]
        );
    }
    out
}
