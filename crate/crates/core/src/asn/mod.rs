//! Aggregated syntactic networks: the dependency trees of one corpus slice
//! merged into a single weighted digraph over (role, lemma) nodes.

mod export;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{DependencyTree, GrammaticalRole, PhraseRule};

pub(crate) use export::csv_field;
pub use export::{to_csv, to_dot, to_graphml};

/// Node identity: homographs with different roles are different nodes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeKey {
    pub role: GrammaticalRole,
    pub lemma: String,
}

impl NodeKey {
    pub fn new(role: GrammaticalRole, lemma: &str) -> Self {
        NodeKey {
            role,
            lemma: lemma.to_owned(),
        }
    }

    /// Parse the display form `"ROLE lemma"`.
    pub fn parse(text: &str) -> Option<Self> {
        let (role, lemma) = text.trim().split_once(' ')?;
        let lemma = lemma.trim();
        if lemma.is_empty() {
            return None;
        }
        Some(NodeKey::new(role.parse().ok()?, lemma))
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.role, self.lemma)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeAttrs {
    /// Token occurrences aggregated into this node.
    pub frequency: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeAttrs {
    /// Number of dependency arcs collapsed into this edge.
    pub weight: u64,
    pub rules: BTreeSet<PhraseRule>,
    /// `doc_id/sent_id` of every sentence attesting the edge.
    pub sentences: BTreeSet<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AsnError {
    #[error("trees from centuries {0} and {1} cannot be aggregated together")]
    MixedCenturies(u32, u32),
}

/// Weighted digraph with head → dependent edges. Both maps are ordered, so
/// iteration order (and therefore every export) is independent of the
/// order trees were added in.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Asn {
    century: Option<u32>,
    nodes: BTreeMap<NodeKey, NodeAttrs>,
    edges: BTreeMap<(NodeKey, NodeKey), EdgeAttrs>,
    /// Arcs dropped because an endpoint carried no role.
    skipped_arcs: u64,
}

/// Merge trees of a single century into one network.
pub fn aggregate(trees: &[DependencyTree]) -> Result<Asn, AsnError> {
    let mut asn = Asn::default();
    for tree in trees {
        asn.add_tree(tree)?;
    }
    Ok(asn)
}

impl Asn {
    pub fn new(century: Option<u32>) -> Self {
        Asn {
            century,
            ..Asn::default()
        }
    }

    pub fn add_tree(&mut self, tree: &DependencyTree) -> Result<(), AsnError> {
        match self.century {
            Some(c) if c != tree.century() => {
                return Err(AsnError::MixedCenturies(c, tree.century()))
            }
            _ => self.century = Some(tree.century()),
        }
        let keys: Vec<Option<NodeKey>> = tree
            .tokens()
            .iter()
            .map(|t| t.role.map(|r| NodeKey::new(r, &t.lemma)))
            .collect();
        for key in keys.iter().flatten() {
            self.add_node(key.clone(), 1);
        }
        let provenance = format!("{}/{}", tree.meta().doc_id, tree.sentence_id());
        for (head, dep) in tree.arcs() {
            match (&keys[head - 1], &keys[dep - 1]) {
                (Some(h), Some(d)) => {
                    let rule = tree.token(dep).rule.unwrap_or(PhraseRule::Other);
                    self.add_edge(h.clone(), d.clone(), 1, Some(rule), Some(&provenance));
                }
                _ => self.skipped_arcs += 1,
            }
        }
        Ok(())
    }

    /// Add `count` occurrences of a node.
    pub fn add_node(&mut self, key: NodeKey, count: u64) {
        self.nodes
            .entry(key)
            .or_insert(NodeAttrs { frequency: 0 })
            .frequency += count;
    }

    /// Add `weight` arcs from `src` to `dst`. Endpoints missing from the
    /// node map are created with frequency 1.
    pub fn add_edge(
        &mut self,
        src: NodeKey,
        dst: NodeKey,
        weight: u64,
        rule: Option<PhraseRule>,
        sentence: Option<&str>,
    ) {
        if weight == 0 {
            return;
        }
        for k in [&src, &dst] {
            if !self.nodes.contains_key(k) {
                self.nodes.insert(k.clone(), NodeAttrs { frequency: 1 });
            }
        }
        let e = self.edges.entry((src, dst)).or_default();
        e.weight += weight;
        e.rules.extend(rule);
        if let Some(s) = sentence {
            e.sentences.insert(s.to_owned());
        }
    }

    /// Build a graph straight from weighted edges (test fixtures, synthetic graphs).
    pub fn from_edges<I>(century: Option<u32>, edges: I) -> Self
    where
        I: IntoIterator<Item = (NodeKey, NodeKey, u64)>,
    {
        let mut asn = Asn::new(century);
        for (s, d, w) in edges {
            asn.add_edge(s, d, w, None, None);
        }
        asn
    }

    pub fn century(&self) -> Option<u32> {
        self.century
    }

    pub fn nodes(&self) -> &BTreeMap<NodeKey, NodeAttrs> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<(NodeKey, NodeKey), EdgeAttrs> {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn skipped_arcs(&self) -> u64 {
        self.skipped_arcs
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().map(|e| e.weight).sum()
    }

    pub fn contains(&self, key: &NodeKey) -> bool {
        self.nodes.contains_key(key)
    }

    pub fn frequency(&self, key: &NodeKey) -> Option<u64> {
        self.nodes.get(key).map(|n| n.frequency)
    }

    pub fn weight(&self, src: &NodeKey, dst: &NodeKey) -> Option<u64> {
        self.edges
            .get(&(src.clone(), dst.clone()))
            .map(|e| e.weight)
    }

    /// Dense indices following node order.
    pub fn node_index(&self) -> HashMap<&NodeKey, usize> {
        self.nodes.keys().enumerate().map(|(i, k)| (k, i)).collect()
    }

    /// Edges as `(src, dst, weight)` over [`Asn::node_index`] indices.
    pub fn indexed_edges(&self) -> Vec<(usize, usize, f64)> {
        let index = self.node_index();
        self.edges
            .iter()
            .map(|((s, d), e)| (index[s], index[d], e.weight as f64))
            .collect()
    }

    /// Per-node summed incoming edge weight, in node order.
    pub fn in_weights(&self) -> Vec<u64> {
        let index = self.node_index();
        let mut w = vec![0; self.nodes.len()];
        for ((_, d), e) in &self.edges {
            w[index[d]] += e.weight;
        }
        w
    }

    /// Per-node summed outgoing edge weight, in node order.
    pub fn out_weights(&self) -> Vec<u64> {
        let index = self.node_index();
        let mut w = vec![0; self.nodes.len()];
        for ((s, _), e) in &self.edges {
            w[index[s]] += e.weight;
        }
        w
    }

    /// Nodes without in-neighbours, heaviest out-weight first, then by key.
    pub fn heads(&self) -> Vec<NodeKey> {
        let in_w = self.in_weights();
        let out_w = self.out_weights();
        let mut heads: Vec<(u64, &NodeKey)> = self
            .nodes
            .keys()
            .enumerate()
            .filter(|(i, _)| in_w[*i] == 0)
            .map(|(i, k)| (out_w[i], k))
            .collect();
        heads.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        heads.into_iter().map(|(_, k)| k.clone()).collect()
    }

    /// Sub-network of the nodes passing `keep_node` and the edges passing
    /// `keep_edge` whose endpoints both survive. Weights are preserved.
    pub fn induced_subnetwork<N, E>(&self, keep_node: N, keep_edge: E) -> Asn
    where
        N: Fn(&NodeKey) -> bool,
        E: Fn(&NodeKey, &NodeKey, &EdgeAttrs) -> bool,
    {
        let nodes: BTreeMap<NodeKey, NodeAttrs> = self
            .nodes
            .iter()
            .filter(|(k, _)| keep_node(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|((s, d), e)| {
                nodes.contains_key(s) && nodes.contains_key(d) && keep_edge(s, d, e)
            })
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Asn {
            century: self.century,
            nodes,
            edges,
            skipped_arcs: 0,
        }
    }

    /// Edges tagged with any of `rules`, plus the nodes they touch.
    pub fn rule_view(&self, rules: &[PhraseRule]) -> Asn {
        let by_edge = self.induced_subnetwork(
            |_| true,
            |_, _, e| rules.iter().any(|r| e.rules.contains(r)),
        );
        let touched: BTreeSet<&NodeKey> = by_edge.edges.keys().flat_map(|(s, d)| [s, d]).collect();
        by_edge.induced_subnetwork(|k| touched.contains(k), |_, _, _| true)
    }

    /// Same nodes, every edge direction flipped.
    pub fn reversed(&self) -> Asn {
        Asn {
            century: self.century,
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|((s, d), e)| ((d.clone(), s.clone()), e.clone()))
                .collect(),
            skipped_arcs: self.skipped_arcs,
        }
    }

    /// Same topology with every weight set to 1.
    pub fn with_unit_weights(&self) -> Asn {
        self.map_weights(|_| 1)
    }

    pub fn map_weights<F: Fn(u64) -> u64>(&self, f: F) -> Asn {
        let mut out = self.clone();
        for e in out.edges.values_mut() {
            e.weight = f(e.weight).max(1);
        }
        out
    }
}
