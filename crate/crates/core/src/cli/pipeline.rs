use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{century_seed, RunConfig};
use super::CliError;
use crate::asn::{aggregate, to_csv, to_dot, to_graphml, Asn, NodeKey};
use crate::corpus::{
    filter_missing, read_corpus_files_lenient, tree_depth, CorpusSlice, FilterDecision, LoadError, PhraseRule,
};
use crate::diachrony::{
    detect_emergent_heads, phase_space, phase_space_csv, track, trajectories_csv, DiachronicSeries, EmergenceConfig,
    SeriesEntry, Slice,
};
use crate::graph_stats::{degree_sequences, network_csv, summarize, DepthDiameterRow, NetworkSummary, PATH_CONVENTIONS};
use crate::hierarchy::{hierarchy_levels, hierarchy_stats, level_histogram, level_ranks, levels_csv, HierarchyLevels, HierarchyStats};
use crate::powerlaw::{bootstrap_pvalue, ccdf_csv, fit, lrt, PowerLawFit};

pub const LEVEL_CONVENTIONS: &str = "levels: forward with heads at 0, backward on reversed edges";
pub const FIT_CONVENTIONS: &str = "discrete power law on positive degrees; KS over the tail x >= xmin";

#[derive(Clone, Copy, Debug, Default)]
pub struct Stages {
    pub stats: bool,
    pub hierarchy: bool,
    pub powerlaw: bool,
    pub diachrony: bool,
}

/// Output directory plus the list of files written into it.
pub struct Bundle {
    root: PathBuf,
    files: BTreeSet<String>,
}

impl Bundle {
    pub fn new(root: PathBuf) -> Self {
        Bundle {
            root,
            files: BTreeSet::new(),
        }
    }

    pub fn write(&mut self, rel: &str, contents: &str) -> Result<(), CliError> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        }
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.files.insert(rel.to_owned());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("report values serialize");
        text.push('\n');
        self.write(rel, &text)
    }

    pub fn files(&self) -> Vec<String> {
        self.files.iter().cloned().collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CenturyReport {
    pub century: u32,
    pub sentences: usize,
    pub kept: usize,
    pub rejected: usize,
    pub dropped: BTreeMap<String, usize>,
    pub nodes: usize,
    pub edges: usize,
    pub skipped_arcs: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RejectedRow {
    pub file: PathBuf,
    pub line: usize,
    pub sentence_id: String,
    pub century: u32,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildReport {
    pub seed: u64,
    pub missing_policy: String,
    pub centuries: Vec<CenturyReport>,
    pub rejected: Vec<RejectedRow>,
}

/// Filtered corpus slices and their networks, one per non-empty century.
pub struct Prepared {
    pub slices: Vec<CorpusSlice>,
    pub networks: Vec<Asn>,
    pub report: BuildReport,
}

pub fn load_error(e: LoadError) -> CliError {
    match e {
        LoadError::Io { .. } => CliError::Io(e.to_string()),
        LoadError::Parse { .. } => CliError::Domain(e.to_string()),
    }
}

pub fn prepare(config: &RunConfig) -> Result<Prepared, CliError> {
    let (slices, rejected) = read_corpus_files_lenient(&config.inputs).map_err(load_error)?;
    let mut rejected_by_century: BTreeMap<u32, usize> = BTreeMap::new();
    let rejected: Vec<RejectedRow> = rejected
        .into_iter()
        .map(|(file, r)| {
            log::warn!("{}:{}: sentence `{}` skipped: {}", file.display(), r.line, r.sentence_id, r.report);
            *rejected_by_century.entry(r.century).or_default() += 1;
            RejectedRow {
                line: r.line,
                sentence_id: r.sentence_id.clone(),
                century: r.century,
                violations: r.report.violations.iter().map(|v| v.to_string()).collect(),
                file,
            }
        })
        .collect();

    let mut kept_slices = Vec::new();
    let mut centuries = Vec::new();
    for slice in slices {
        let mut dropped: BTreeMap<String, usize> = BTreeMap::new();
        let mut kept = Vec::new();
        let sentences = slice.trees.len();
        for tree in slice.trees {
            match filter_missing(&tree, config.missing) {
                Ok(FilterDecision::Keep) => kept.push(tree),
                Ok(FilterDecision::Drop(reason)) => *dropped.entry(reason.to_string()).or_default() += 1,
                Err(e) => {
                    return Err(CliError::Domain(format!(
                        "{e}; add a `# target = ...` header or choose another --missing policy"
                    )))
                }
            }
        }
        centuries.push(CenturyReport {
            century: slice.century,
            sentences,
            kept: kept.len(),
            rejected: rejected_by_century.remove(&slice.century).unwrap_or(0),
            dropped,
            nodes: 0,
            edges: 0,
            skipped_arcs: 0,
        });
        if kept.is_empty() {
            log::warn!("century {} has no sentences left after filtering", slice.century);
            continue;
        }
        kept_slices.push(CorpusSlice {
            century: slice.century,
            trees: kept,
            provenance: slice.provenance,
        });
    }
    if kept_slices.is_empty() {
        return Err(CliError::Domain("corpus is empty after filtering".into()));
    }
    let networks: Vec<Asn> = kept_slices
        .iter()
        .map(|s| aggregate(&s.trees).expect("slice trees share one century"))
        .collect();
    for (slice, asn) in kept_slices.iter().zip(&networks) {
        if let Some(c) = centuries.iter_mut().find(|c| c.century == slice.century) {
            c.nodes = asn.node_count();
            c.edges = asn.edge_count();
            c.skipped_arcs = asn.skipped_arcs();
        }
    }
    Ok(Prepared {
        slices: kept_slices,
        networks,
        report: BuildReport {
            seed: config.seed,
            missing_policy: config.missing.to_string(),
            centuries,
            rejected,
        },
    })
}

pub fn century_dir(century: u32) -> String {
    format!("century_{century}")
}

fn base_comments(config: &RunConfig, century: u32) -> Vec<String> {
    vec![
        format!("seed = {}", config.seed),
        format!("century = {century}"),
        format!("century_seed = {}", century_seed(config.seed, century)),
    ]
}

fn weights_label(config: &RunConfig) -> &'static str {
    if config.weighted {
        "weights = arc counts"
    } else {
        "weights = unit"
    }
}

/// Writes the network of every century in the configured formats,
/// optionally restricted to arcs labelled with one of `rules`.
pub fn write_networks(
    bundle: &mut Bundle,
    config: &RunConfig,
    prepared: &Prepared,
    rules: &[PhraseRule],
) -> Result<(), CliError> {
    for asn in &prepared.networks {
        let century = asn.century().expect("aggregated networks carry a century");
        let view;
        let asn = if rules.is_empty() {
            asn
        } else {
            view = asn.rule_view(rules);
            &view
        };
        let comments = base_comments(config, century);
        for format in &config.formats {
            let text = match format {
                super::config::ExportFormat::Dot => to_dot(asn, &comments),
                super::config::ExportFormat::Graphml => to_graphml(asn, &comments),
                super::config::ExportFormat::Csv => to_csv(asn, &comments),
            };
            bundle.write(&format!("{}/{}", century_dir(century), format.file_name()), &text)?;
        }
    }
    Ok(())
}

struct CenturyAnalysis {
    century: u32,
    seed: u64,
    max_tree_depth: usize,
    /// Network the hierarchy is computed on: arc counts or unit weights.
    analysis: Asn,
    summary: Option<Result<NetworkSummary, String>>,
    levels: Option<HierarchyLevels>,
    stats: Option<Result<HierarchyStats, String>>,
    degrees: Vec<u64>,
    fit: Option<Result<PowerLawFit, String>>,
    lrt: Vec<Value>,
}

fn analyze_century(config: &RunConfig, stages: Stages, slice: &CorpusSlice, asn: &Asn) -> CenturyAnalysis {
    let century = slice.century;
    let seed = century_seed(config.seed, century);
    let analysis = if config.weighted {
        asn.clone()
    } else {
        asn.with_unit_weights()
    };
    let summary = stages.stats.then(|| summarize(asn).map_err(|e| e.to_string()));
    let levels = stages.hierarchy.then(|| hierarchy_levels(&analysis));
    let stats = levels
        .as_ref()
        .map(|l| hierarchy_stats(&analysis, &l.forward).map_err(|e| e.to_string()));
    let degrees = config.degree.positive(&degree_sequences(asn));
    let mut lrt_rows = Vec::new();
    let fit = stages.powerlaw.then(|| {
        let f = fit(&degrees).map_err(|e| e.to_string())?;
        let f = bootstrap_pvalue(&f, &degrees, config.replicates, seed).map_err(|e| e.to_string())?;
        for &alt in &config.alternatives {
            lrt_rows.push(match lrt(&degrees, &f, alt) {
                Ok(r) => serde_json::to_value(r).expect("serializable"),
                Err(e) => json!({ "alternative": alt, "error": e.to_string() }),
            });
        }
        Ok(f)
    });
    CenturyAnalysis {
        century,
        seed,
        max_tree_depth: slice.trees.iter().map(tree_depth).max().unwrap_or(0),
        analysis,
        summary,
        levels,
        stats,
        degrees,
        fit,
        lrt: lrt_rows,
    }
}

fn powerlaw_record(config: &RunConfig, a: &CenturyAnalysis) -> Value {
    let mut record = json!({
        "century": a.century,
        "variable": config.degree,
        "conventions": FIT_CONVENTIONS,
        "gate": config.gate.describe(),
        "alpha": null,
        "xmin": null,
        "ks": null,
        "n_tail": null,
        "n": a.degrees.len(),
        "p_value": null,
        "accepted": null,
        "replicates": config.replicates,
        "seed": a.seed,
        "root_seed": config.seed,
        "lrt": a.lrt,
        "error": null,
    });
    match &a.fit {
        Some(Ok(f)) => {
            record["alpha"] = json!(f.alpha);
            record["xmin"] = json!(f.xmin);
            record["ks"] = json!(f.ks);
            record["n_tail"] = json!(f.n_tail);
            record["p_value"] = json!(f.p_value);
            record["accepted"] = json!(f.p_value.map(|p| config.gate.accepts(p)));
        }
        Some(Err(e)) => record["error"] = json!(e),
        None => {}
    }
    record
}

fn histogram_csv(rows: &[(f64, usize)], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("bin_start,count\n");
    for (start, count) in rows {
        let _ = writeln!(out, "{start},{count}");
    }
    out
}

/// Runs the requested stages and writes their reports. Per-century
/// failures are written into the reports and collected in the returned
/// list instead of aborting the run.
pub fn run_stages(
    bundle: &mut Bundle,
    config: &RunConfig,
    stages: Stages,
    prepared: &Prepared,
) -> Result<Vec<String>, CliError> {
    let analyses: Vec<CenturyAnalysis> = prepared
        .slices
        .par_iter()
        .zip(prepared.networks.par_iter())
        .map(|(slice, asn)| analyze_century(config, stages, slice, asn))
        .collect();
    let mut failures = Vec::new();

    for a in &analyses {
        let dir = century_dir(a.century);
        let comments = base_comments(config, a.century);
        if let Some(summary) = &a.summary {
            match summary {
                Ok(s) => bundle.write_json(
                    &format!("{dir}/summary.json"),
                    &json!({
                        "century": a.century,
                        "seed": config.seed,
                        "max_tree_depth": a.max_tree_depth,
                        "summary": s,
                    }),
                )?,
                Err(e) => failures.push(format!("century {}: network summary: {e}", a.century)),
            }
        }
        if let Some(levels) = &a.levels {
            let mut c = comments.clone();
            c.push(weights_label(config).to_owned());
            c.push(LEVEL_CONVENTIONS.to_owned());
            bundle.write(&format!("{dir}/hierarchy.csv"), &levels_csv(&a.analysis, levels, &c))?;
            let mut stats_json = json!({
                "century": a.century,
                "seed": config.seed,
                "weights": if config.weighted { "arc counts" } else { "unit" },
                "conventions": "h = level(dst) - level(src) per edge, edge weights as multiplicities",
                "forward_residual": levels.forward.residual,
                "backward_residual": levels.backward.residual,
            });
            match a.stats.as_ref().expect("stats accompany levels") {
                Ok(s) => {
                    stats_json["incoherence"] = json!(s.incoherence);
                    stats_json["democracy"] = json!(s.democracy);
                }
                Err(e) => {
                    stats_json["error"] = json!(e);
                    failures.push(format!("century {}: hierarchy statistics: {e}", a.century));
                }
            }
            bundle.write_json(&format!("{dir}/hierarchy_stats.json"), &stats_json)?;
            let hist = level_histogram(&levels.forward, config.bin_width).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut c = comments.clone();
            c.push(format!("forward levels, bin width = {}", config.bin_width));
            bundle.write(&format!("{dir}/level_histogram.csv"), &histogram_csv(&hist, &c))?;
        }
        if let Some(fit) = &a.fit {
            bundle.write_json(&format!("{dir}/powerlaw.json"), &powerlaw_record(config, a))?;
            match fit {
                Ok(f) => {
                    let mut c = comments.clone();
                    c.push(format!("variable = {} degree", config.degree));
                    c.push("fitted_ccdf = model survival scaled by n_tail/n, blank below xmin".into());
                    bundle.write(&format!("{dir}/ccdf.csv"), &ccdf_csv(&a.degrees, f, &c))?;
                }
                Err(e) => failures.push(format!("century {}: power-law fit: {e}", a.century)),
            }
        }
    }

    if stages.stats {
        let rows: Vec<DepthDiameterRow> = analyses
            .iter()
            .filter_map(|a| match &a.summary {
                Some(Ok(s)) => Some(DepthDiameterRow {
                    century: a.century,
                    max_tree_depth: a.max_tree_depth,
                    diameter: s.diameter,
                    average_path_length: s.average_path_length,
                    summary: s.clone(),
                }),
                _ => None,
            })
            .collect();
        let comments = vec![
            format!("seed = {}", config.seed),
            PATH_CONVENTIONS.to_owned(),
            "edges = distinct directed edges; avg_degree = 2 * undirected simple edges / nodes".to_owned(),
        ];
        bundle.write("network_summary.csv", &network_csv(&rows, &comments))?;
    }

    if stages.diachrony {
        failures.extend(write_diachrony(bundle, config, &analyses)?);
    }
    Ok(failures)
}

fn write_diachrony(bundle: &mut Bundle, config: &RunConfig, analyses: &[CenturyAnalysis]) -> Result<Vec<String>, CliError> {
    let mut failures = Vec::new();
    let slices: Vec<Slice<'_>> = analyses
        .iter()
        .map(|a| Slice {
            century: a.century,
            asn: &a.analysis,
            forward: &a.levels.as_ref().expect("diachrony runs the hierarchy stage").forward,
        })
        .collect();
    let emergence = EmergenceConfig {
        band: config.band,
        min_gain: config.min_gain,
        flag_initial_slice: config.flag_initial_slice,
    };
    let events = detect_emergent_heads(&slices, &emergence).map_err(|e| CliError::Usage(e.to_string()))?;
    bundle.write_json(
        "emergent_heads.json",
        &json!({
            "seed": config.seed,
            "criterion": format!(
                "level rank enters 1..={} after absence or rank >= {} in the previous century (proxy for a newly governing head)",
                config.band,
                config.band + config.min_gain
            ),
            "config": emergence,
            "events": events,
        }),
    )?;

    let keys: Vec<NodeKey> = if config.track.is_empty() {
        let mut set = BTreeSet::new();
        for s in &slices {
            for (k, r) in level_ranks(s.asn, s.forward) {
                if r <= config.band {
                    set.insert(k);
                }
            }
        }
        set.into_iter().collect()
    } else {
        config.tracked_keys()
    };
    let comments = vec![
        format!("seed = {}", config.seed),
        weights_label(config).to_owned(),
        "level_rank = competition rank of the forward level, 1 = topmost".to_owned(),
    ];
    bundle.write("trajectories.csv", &trajectories_csv(&track(&keys, &slices), &comments))?;

    let entries = analyses
        .iter()
        .map(|a| SeriesEntry {
            century: a.century,
            summary: match &a.summary {
                Some(Ok(s)) => s.clone(),
                _ => summarize(&a.analysis).unwrap_or_else(|_| empty_summary()),
            },
            hierarchy: a.stats.as_ref().and_then(|s| s.as_ref().ok().cloned()),
            fit: a.fit.as_ref().and_then(|f| f.as_ref().ok().cloned()),
        })
        .collect();
    let series = DiachronicSeries::new(entries).expect("slices are century-ordered");
    match phase_space(&series) {
        Ok(points) => {
            let comments = vec![format!("seed = {}", config.seed), weights_label(config).to_owned()];
            bundle.write("phase_space.csv", &phase_space_csv(&points, &comments))?;
        }
        Err(e) => failures.push(format!("phase space: {e}")),
    }
    Ok(failures)
}

fn empty_summary() -> NetworkSummary {
    NetworkSummary {
        node_count: 0,
        edge_count: 0,
        simple_edge_count: 0,
        average_degree: 0.0,
        clustering: 0.0,
        average_path_length: 0.0,
        diameter: 0,
        component_count: 0,
        lcc_size: 0,
        lcc_fraction: 0.0,
        conventions: PATH_CONVENTIONS.to_owned(),
    }
}
