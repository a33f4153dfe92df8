mod common;

use std::collections::BTreeSet;

use asn_toolkit::asn::{aggregate, Asn, NodeKey};
use asn_toolkit::corpus::{validate_tree, DependencyTree, GrammaticalRole, SentenceMeta, Token};
use asn_toolkit::diachrony::{detect_emergent_heads, phase_space, track, DiachronicSeries, EmergenceConfig, SeriesEntry, Slice};
use asn_toolkit::graph_stats::summarize;
use asn_toolkit::hierarchy::{backward_levels, forward_levels, hierarchy_stats, Levels};
use asn_toolkit::powerlaw::{bootstrap_pvalue, fit, ks_distance, sample_discrete_powerlaw};
use common::{depths_by_walking, key, tree_network};
use proptest::prelude::*;

const VOCAB: usize = 6;

/// A tree as (parent choice, lemma index) per token; token `i + 1` hangs
/// below an earlier token, so any choice is valid.
fn tree_shape() -> impl Strategy<Value = Vec<(usize, usize)>> {
    (1usize..10).prop_flat_map(|n| {
        (0..n)
            .map(|i| (0..i.max(1), 0..VOCAB))
            .collect::<Vec<_>>()
    })
}

fn build(shape: &[(usize, usize)], century: u32, id: usize, names: &[String]) -> DependencyTree {
    let tokens = shape
        .iter()
        .enumerate()
        .map(|(i, &(p, l))| {
            let head = if i == 0 { 0 } else { p + 1 };
            Token::new(i + 1, &names[l], GrammaticalRole::N, head)
        })
        .collect();
    validate_tree(tokens, SentenceMeta::new(&format!("s{id}"), century)).unwrap()
}

fn names() -> Vec<String> {
    (0..VOCAB).map(|i| format!("w{i}")).collect()
}

fn corpus(shapes: &[Vec<(usize, usize)>], century: u32, names: &[String]) -> Vec<DependencyTree> {
    shapes.iter().enumerate().map(|(i, s)| build(s, century, i, names)).collect()
}

fn close(a: &Levels, b: &Levels, tol: f64) -> bool {
    a.by_node.len() == b.by_node.len()
        && a.by_node.iter().all(|(k, x)| b.get(k).is_some_and(|y| (x - y).abs() <= tol))
}

fn weighted_graph() -> impl Strategy<Value = Asn> {
    (1usize..8).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, 1u64..6), 0..20).prop_map(move |edges| {
            let mut asn = Asn::from_edges(
                None,
                edges
                    .into_iter()
                    .map(|(s, d, w)| (key(&format!("v{s}")), key(&format!("v{d}")), w)),
            );
            for i in 0..n {
                if !asn.contains(&key(&format!("v{i}"))) {
                    asn.add_node(key(&format!("v{i}")), 1);
                }
            }
            asn
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aggregation_ignores_sentence_order(shapes in prop::collection::vec(tree_shape(), 1..6)) {
        let trees = corpus(&shapes, 3, &names());
        let mut reversed = trees.clone();
        reversed.reverse();
        prop_assert_eq!(aggregate(&trees).unwrap(), aggregate(&reversed).unwrap());
    }

    #[test]
    fn aggregation_adds_weights(
        a in prop::collection::vec(tree_shape(), 1..4),
        b in prop::collection::vec(tree_shape(), 1..4),
    ) {
        let names = names();
        let ta = corpus(&a, 3, &names);
        let tb: Vec<DependencyTree> = b.iter().enumerate().map(|(i, s)| build(s, 3, 100 + i, &names)).collect();
        let both: Vec<DependencyTree> = ta.iter().chain(&tb).cloned().collect();
        let (ga, gb, g) = (aggregate(&ta).unwrap(), aggregate(&tb).unwrap(), aggregate(&both).unwrap());
        for ((s, d), e) in g.edges() {
            let wa = ga.weight(s, d).unwrap_or(0);
            let wb = gb.weight(s, d).unwrap_or(0);
            prop_assert_eq!(e.weight, wa + wb);
        }
        for (k, attrs) in g.nodes() {
            prop_assert_eq!(attrs.frequency, ga.frequency(k).unwrap_or(0) + gb.frequency(k).unwrap_or(0));
        }
    }

    #[test]
    fn aggregation_conserves_arcs_and_tokens(shapes in prop::collection::vec(tree_shape(), 1..6)) {
        let trees = corpus(&shapes, 3, &names());
        let g = aggregate(&trees).unwrap();
        let tokens: usize = trees.iter().map(|t| t.len()).sum();
        prop_assert_eq!(g.total_weight() + g.skipped_arcs(), (tokens - trees.len()) as u64);
        prop_assert_eq!(g.nodes().values().map(|a| a.frequency).sum::<u64>(), tokens as u64);
    }

    #[test]
    fn levels_ignore_weight_scale(g in weighted_graph(), k in 2u64..50) {
        let scaled = g.map_weights(|w| w * k);
        prop_assert!(close(&forward_levels(&g), &forward_levels(&scaled), 1e-9));
    }

    #[test]
    fn backward_is_forward_of_reversal(g in weighted_graph()) {
        prop_assert_eq!(backward_levels(&g).by_node, forward_levels(&g.reversed()).by_node);
    }

    #[test]
    fn levels_are_nonnegative_with_zero_minimum(g in weighted_graph()) {
        let l = forward_levels(&g);
        let min = l.by_node.values().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(min, 0.0);
    }

    #[test]
    fn tree_levels_are_depths(shape in tree_shape()) {
        let heads: Vec<usize> = shape.iter().enumerate().map(|(i, &(p, _))| if i == 0 { 0 } else { p + 1 }).collect();
        let levels = forward_levels(&tree_network(&heads));
        for (i, d) in depths_by_walking(&heads).into_iter().enumerate() {
            let got = levels.get(&key(&format!("t{}", i + 1))).unwrap();
            prop_assert!((got - d as f64).abs() < 1e-9, "token {} at {} not {}", i + 1, got, d);
        }
    }

    #[test]
    fn summary_counts_are_consistent(g in weighted_graph()) {
        let s = summarize(&g).unwrap();
        prop_assert!(s.lcc_size <= s.node_count);
        prop_assert!(s.component_count >= 1);
        prop_assert!((0.0..=1.0).contains(&s.clustering));
        prop_assert!(s.diameter < s.lcc_size.max(1));
    }

    #[test]
    fn tracking_is_a_projection(
        slices in prop::collection::vec(prop::collection::vec(tree_shape(), 1..4), 1..4),
        pick in prop::collection::vec(0..VOCAB, 1..4),
    ) {
        let names = names();
        let graphs: Vec<Asn> = slices.iter().enumerate().map(|(c, s)| aggregate(&corpus(s, c as u32 + 1, &names)).unwrap()).collect();
        let levels: Vec<Levels> = graphs.iter().map(forward_levels).collect();
        let view: Vec<Slice<'_>> = graphs.iter().zip(&levels).enumerate()
            .map(|(c, (asn, forward))| Slice { century: c as u32 + 1, asn, forward }).collect();
        let keys: Vec<NodeKey> = pick.iter().map(|&i| key(&names[i])).collect();
        let all = track(&keys, &view);
        for (k, t) in keys.iter().zip(&all) {
            prop_assert_eq!(&track(std::slice::from_ref(k), &view)[0], t);
        }
    }

    #[test]
    fn emergence_ignores_lemma_spelling(
        slices in prop::collection::vec(prop::collection::vec(tree_shape(), 1..5), 2..4),
        band in 1usize..4,
        gain in 0usize..3,
    ) {
        let plain = names();
        // reverse the alphabetical order of the vocabulary
        let renamed: Vec<String> = (0..VOCAB).map(|i| format!("z{}", VOCAB - i)).collect();
        let config = EmergenceConfig { band, min_gain: gain, flag_initial_slice: false };
        let events = |names: &[String]| {
            let graphs: Vec<Asn> = slices.iter().enumerate().map(|(c, s)| aggregate(&corpus(s, c as u32 + 1, names)).unwrap()).collect();
            let levels: Vec<Levels> = graphs.iter().map(forward_levels).collect();
            let view: Vec<Slice<'_>> = graphs.iter().zip(&levels).enumerate()
                .map(|(c, (asn, forward))| Slice { century: c as u32 + 1, asn, forward }).collect();
            detect_emergent_heads(&view, &config).unwrap()
        };
        let index = |names: &[String], k: &NodeKey| names.iter().position(|n| *n == k.lemma).unwrap();
        let a: BTreeSet<_> = events(&plain).into_iter().map(|e| (e.century, index(&plain, &e.key), e.prior_rank, e.new_rank)).collect();
        let b: BTreeSet<_> = events(&renamed).into_iter().map(|e| (e.century, index(&renamed, &e.key), e.prior_rank, e.new_rank)).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn phase_space_reads_hierarchy_stats(slices in prop::collection::vec(prop::collection::vec(tree_shape(), 1..4), 1..4)) {
        let names = names();
        let mut entries = Vec::new();
        let mut expected = Vec::new();
        for (c, s) in slices.iter().enumerate() {
            let g = aggregate(&corpus(s, c as u32 + 1, &names)).unwrap();
            let h = hierarchy_stats(&g, &forward_levels(&g)).ok();
            expected.push(h.as_ref().map(|h| (h.democracy, h.incoherence)));
            entries.push(SeriesEntry { century: c as u32 + 1, summary: summarize(&g).unwrap(), hierarchy: h, fit: None });
        }
        let series = DiachronicSeries::new(entries).unwrap();
        match phase_space(&series) {
            Ok(points) => {
                let got: Vec<_> = points.iter().map(|p| Some((p.democracy, p.incoherence))).collect();
                prop_assert_eq!(got, expected);
            }
            Err(_) => prop_assert!(expected.iter().any(Option::is_none)),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fit_ks_matches_standalone_distance(alpha in 1.8f64..3.2, xmin in 1u64..6, seed in any::<u64>()) {
        let data = sample_discrete_powerlaw(alpha, xmin, 800, seed).unwrap();
        let f = fit(&data).unwrap();
        prop_assert_eq!(f.ks.to_bits(), ks_distance(&data, f.alpha, f.xmin).unwrap().to_bits());
        prop_assert!(f.ks > 0.0 && f.ks <= 1.0);
    }

    #[test]
    fn bootstrap_p_is_a_probability(seed in any::<u64>()) {
        let data = sample_discrete_powerlaw(2.3, 2, 400, seed).unwrap();
        let f = fit(&data).unwrap();
        let p = bootstrap_pvalue(&f, &data, 100, seed).unwrap().p_value.unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }
}
