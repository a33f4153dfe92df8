//! Comparison across centuries: per-lemma level trajectories, detection of
//! newly emerging heads, and the democracy/incoherence trajectory.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asn::{csv_field, Asn, NodeKey};
use crate::graph_stats::NetworkSummary;
use crate::hierarchy::{level_ranks, HierarchyStats, Levels};
use crate::powerlaw::PowerLawFit;

/// One century's network with its forward levels.
#[derive(Clone, Copy, Debug)]
pub struct Slice<'a> {
    pub century: u32,
    pub asn: &'a Asn,
    pub forward: &'a Levels,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub century: u32,
    pub present: bool,
    pub forward_level: Option<f64>,
    /// Competition rank of the forward level, 1 = topmost.
    pub level_rank: Option<usize>,
    pub frequency: Option<u64>,
    /// Present with no incoming edge.
    pub is_head: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeadTrajectory {
    pub key: NodeKey,
    pub rows: Vec<TrajectoryRow>,
}

/// Rows for every key in every slice; keys absent from a slice get
/// `present = false` rows.
pub fn track(keys: &[NodeKey], slices: &[Slice<'_>]) -> Vec<HeadTrajectory> {
    let per_slice: Vec<(BTreeMap<NodeKey, usize>, BTreeSet<&NodeKey>)> = slices
        .iter()
        .map(|s| {
            let ranks = level_ranks(s.asn, s.forward);
            let targets: BTreeSet<&NodeKey> = s.asn.edges().keys().map(|(_, d)| d).collect();
            (ranks, targets)
        })
        .collect();
    keys.iter()
        .map(|key| HeadTrajectory {
            key: key.clone(),
            rows: slices
                .iter()
                .zip(&per_slice)
                .map(|(s, (ranks, targets))| {
                    let present = s.asn.contains(key);
                    TrajectoryRow {
                        century: s.century,
                        present,
                        forward_level: if present { s.forward.get(key) } else { None },
                        level_rank: ranks.get(key).copied(),
                        frequency: s.asn.frequency(key),
                        is_head: present && !targets.contains(key),
                    }
                })
                .collect(),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmergenceConfig {
    /// Ranks `1..=band` form the top band.
    pub band: usize,
    /// A key already present must have ranked at least `band + min_gain`.
    pub min_gain: usize,
    /// Whether keys already in the band in the first slice are reported.
    pub flag_initial_slice: bool,
}

impl Default for EmergenceConfig {
    fn default() -> Self {
        EmergenceConfig {
            band: 10,
            min_gain: 5,
            flag_initial_slice: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmergentHead {
    pub key: NodeKey,
    pub century: u32,
    /// `None` when the key was absent from the previous slice.
    pub prior_rank: Option<usize>,
    pub new_rank: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiachronyError {
    #[error("band must be at least 1")]
    Band,
    #[error("centuries must be strictly increasing ({0} follows {1})")]
    Order(u32, u32),
    #[error("century {0} has no hierarchy statistics")]
    MissingStats(u32),
}

/// Keys entering the top band from outside it. Each key is reported at
/// most once, at the earliest qualifying slice; results are ordered by
/// century, then rank, then key.
pub fn detect_emergent_heads(slices: &[Slice<'_>], config: &EmergenceConfig) -> Result<Vec<EmergentHead>, DiachronyError> {
    if config.band < 1 {
        return Err(DiachronyError::Band);
    }
    let ranks: Vec<BTreeMap<NodeKey, usize>> = slices.iter().map(|s| level_ranks(s.asn, s.forward)).collect();
    let far = config.band + config.min_gain;
    let mut flagged: BTreeSet<&NodeKey> = BTreeSet::new();
    let mut events = Vec::new();
    for (i, current) in ranks.iter().enumerate() {
        if i == 0 && !config.flag_initial_slice {
            continue;
        }
        for (key, &rank) in current {
            if rank > config.band || flagged.contains(key) {
                continue;
            }
            let prior = if i == 0 { None } else { ranks[i - 1].get(key).copied() };
            if prior.is_none_or(|p| p >= far) {
                flagged.insert(key);
                events.push(EmergentHead {
                    key: key.clone(),
                    century: slices[i].century,
                    prior_rank: prior,
                    new_rank: rank,
                });
            }
        }
    }
    events.sort_by(|a, b| (a.century, a.new_rank, &a.key).cmp(&(b.century, b.new_rank, &b.key)));
    Ok(events)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub century: u32,
    pub summary: NetworkSummary,
    pub hierarchy: Option<HierarchyStats>,
    pub fit: Option<PowerLawFit>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiachronicSeries {
    entries: Vec<SeriesEntry>,
}

impl DiachronicSeries {
    pub fn new(entries: Vec<SeriesEntry>) -> Result<Self, DiachronyError> {
        for w in entries.windows(2) {
            if w[1].century <= w[0].century {
                return Err(DiachronyError::Order(w[1].century, w[0].century));
            }
        }
        Ok(DiachronicSeries { entries })
    }

    pub fn entries(&self) -> &[SeriesEntry] {
        &self.entries
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub century: u32,
    pub democracy: f64,
    pub incoherence: f64,
}

pub fn phase_space(series: &DiachronicSeries) -> Result<Vec<PhasePoint>, DiachronyError> {
    series
        .entries
        .iter()
        .map(|e| {
            let h = e.hierarchy.as_ref().ok_or(DiachronyError::MissingStats(e.century))?;
            Ok(PhasePoint {
                century: e.century,
                democracy: h.democracy,
                incoherence: h.incoherence,
            })
        })
        .collect()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `century,role,lemma,present,forward_level,level_rank,frequency,is_head`
pub fn trajectories_csv(trajectories: &[HeadTrajectory], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("century,role,lemma,present,forward_level,level_rank,frequency,is_head\n");
    for t in trajectories {
        for r in &t.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.century,
                t.key.role,
                csv_field(&t.key.lemma),
                r.present,
                opt(r.forward_level),
                opt(r.level_rank),
                opt(r.frequency),
                r.is_head
            );
        }
    }
    out
}

/// `century,democracy,incoherence`
pub fn phase_space_csv(points: &[PhasePoint], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("century,democracy,incoherence\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.century, p.democracy, p.incoherence);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::GrammaticalRole::{N, V};
    use crate::graph_stats::summarize;
    use crate::hierarchy::{forward_levels, hierarchy_stats};

    fn k(s: &str) -> NodeKey {
        NodeKey::new(V, s)
    }

    fn graph(c: u32, edges: &[(&str, &str)]) -> Asn {
        Asn::from_edges(Some(c), edges.iter().map(|&(s, d)| (k(s), k(d), 1)))
    }

    #[test]
    fn absent_key_rows() {
        let g = graph(14, &[("a", "b")]);
        let l = forward_levels(&g);
        let t = track(&[NodeKey::new(N, "zz")], &[Slice { century: 14, asn: &g, forward: &l }]);
        assert_eq!(t.len(), 1);
        let r = &t[0].rows[0];
        assert!(!r.present && !r.is_head);
        assert_eq!((r.forward_level, r.level_rank, r.frequency), (None, None, None));
    }

    #[test]
    fn single_slice_lookup() {
        let g = graph(15, &[("a", "b"), ("b", "c")]);
        let l = forward_levels(&g);
        let t = track(&[k("b"), k("a")], &[Slice { century: 15, asn: &g, forward: &l }]);
        assert_eq!(t[0].rows[0].forward_level, l.get(&k("b")));
        assert_eq!(t[0].rows[0].level_rank, Some(2));
        assert!(!t[0].rows[0].is_head);
        assert!(t[1].rows[0].is_head);
        assert_eq!(t[1].rows[0].frequency, g.frequency(&k("a")));
    }

    #[test]
    fn stationary_series_has_no_events() {
        let g = graph(14, &[("a", "b"), ("b", "c")]);
        let l = forward_levels(&g);
        let s = Slice { century: 14, asn: &g, forward: &l };
        let slices = [s, Slice { century: 15, ..s }, Slice { century: 16, ..s }];
        assert!(detect_emergent_heads(&slices, &EmergenceConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn initial_slice_flagging() {
        let g1 = graph(14, &[("x", "b")]);
        let g2 = graph(15, &[("a", "b")]);
        let (l1, l2) = (forward_levels(&g1), forward_levels(&g2));
        let slices = [Slice { century: 14, asn: &g1, forward: &l1 }, Slice { century: 15, asn: &g2, forward: &l2 }];
        let config = EmergenceConfig {
            flag_initial_slice: true,
            ..EmergenceConfig::default()
        };
        let events = detect_emergent_heads(&slices, &config).unwrap();
        let x = events.iter().find(|e| e.key == k("x")).unwrap();
        assert_eq!((x.century, x.prior_rank, x.new_rank), (14, None, 1));
        // a key that stays in the band is reported once
        assert_eq!(events.iter().filter(|e| e.key == k("b")).count(), 1);
        let a = events.iter().find(|e| e.key == k("a")).unwrap();
        assert_eq!((a.century, a.prior_rank), (15, None));
    }

    #[test]
    fn far_prior_rank_counts_as_emergence() {
        // "z" sits at the bottom of a long chain, then heads a short one
        let names: Vec<String> = (0..20).map(|i| format!("n{i:02}")).collect();
        let mut chain: Vec<(&str, &str)> = names.windows(2).map(|w| (w[0].as_str(), w[1].as_str())).collect();
        chain.push(("n19", "z"));
        let g1 = graph(14, &chain);
        let g2 = graph(15, &[("z", "n00")]);
        let (l1, l2) = (forward_levels(&g1), forward_levels(&g2));
        let slices = [Slice { century: 14, asn: &g1, forward: &l1 }, Slice { century: 15, asn: &g2, forward: &l2 }];
        let cfg = EmergenceConfig { band: 2, min_gain: 5, flag_initial_slice: false };
        let events = detect_emergent_heads(&slices, &cfg).unwrap();
        let z = events.iter().find(|e| e.key == k("z")).unwrap();
        assert_eq!((z.prior_rank, z.new_rank), (Some(21), 1));
        // n00 was rank 1 and stays in the band
        assert!(events.iter().all(|e| e.key != k("n00")));
        assert_eq!(detect_emergent_heads(&slices, &EmergenceConfig { band: 0, ..cfg }), Err(DiachronyError::Band));
    }

    #[test]
    fn phase_space_projection() {
        let g = graph(14, &[("a", "b"), ("b", "a")]);
        let l = forward_levels(&g);
        let entry = SeriesEntry {
            century: 14,
            summary: summarize(&g).unwrap(),
            hierarchy: Some(hierarchy_stats(&g, &l).unwrap()),
            fit: None,
        };
        let series = DiachronicSeries::new(vec![entry.clone()]).unwrap();
        let p = phase_space(&series).unwrap();
        assert_eq!(p, vec![PhasePoint { century: 14, democracy: 1.0, incoherence: 0.0 }]);
        assert!(phase_space(&DiachronicSeries::default()).unwrap().is_empty());
        let missing = DiachronicSeries::new(vec![SeriesEntry { hierarchy: None, ..entry.clone() }]).unwrap();
        assert_eq!(phase_space(&missing), Err(DiachronyError::MissingStats(14)));
        assert_eq!(
            DiachronicSeries::new(vec![entry.clone(), entry]).unwrap_err(),
            DiachronyError::Order(14, 14)
        );
    }

    #[test]
    fn csv_exports() {
        let g = graph(14, &[("a", "b")]);
        let l = forward_levels(&g);
        let t = track(&[k("a")], &[Slice { century: 14, asn: &g, forward: &l }]);
        let csv = trajectories_csv(&t, &["seed = 3".into()]);
        assert_eq!(csv.lines().nth(2).unwrap(), "14,V,a,true,0,1,1,true");
        let p = phase_space_csv(&[PhasePoint { century: 14, democracy: 0.5, incoherence: 0.25 }], &[]);
        assert_eq!(p, "century,democracy,incoherence\n14,0.5,0.25\n");
    }
}
