//! The `asn` command-line front end.
//!
//! Exit codes: 0 success, 1 domain failure (invalid trees, failed fits,
//! empty corpus), 2 I/O or usage errors.

mod config;
mod pipeline;

use std::ffi::OsString;
use std::fs::{self, File};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

pub use config::{century_seed, ExportFormat, RunConfig, CONFIG_KEYS};
pub use pipeline::{FIT_CONVENTIONS, LEVEL_CONVENTIONS};

use crate::corpus::{parse_corpus_lenient, ParseError, PhraseRule};
use crate::graph_stats::PATH_CONVENTIONS;
use crate::powerlaw::PValueGate;
use pipeline::{prepare, run_stages, write_networks, Bundle, Stages};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "asn", version, about = "Build and analyse aggregated syntactic networks from dependency treebanks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// `key = value` file; command-line flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Root seed for every random stream
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Treatment of sentences with missing annotations
    #[arg(long, global = true, value_parser = ["drop-any", "drop-adjacent-to-target", "keep-all"])]
    pub missing: Option<String>,
    /// Give every edge weight 1 when computing hierarchy levels
    #[arg(long, global = true)]
    pub unweighted: bool,
    /// Degree sequence for power-law fitting
    #[arg(long, global = true, value_parser = ["in", "out", "total"])]
    pub degree: Option<String>,
    /// Bootstrap replicates (at least 100)
    #[arg(long, global = true)]
    pub replicates: Option<usize>,
    /// Accept a fit only when p >= 0.1 (default gate: p > 0.01)
    #[arg(long, global = true)]
    pub strict: bool,
    /// Node to follow across centuries, e.g. "MV können"; repeatable
    #[arg(long, global = true, value_name = "ROLE LEMMA")]
    pub track: Vec<String>,
    /// Ranks 1..=band count as the top band
    #[arg(long, global = true)]
    pub band: Option<usize>,
    /// Rank distance from the band required before an entry counts
    #[arg(long = "min-gain", global = true)]
    pub min_gain: Option<usize>,
    /// Also report nodes already in the band in the first century
    #[arg(long = "flag-initial-slice", global = true)]
    pub flag_initial_slice: bool,
    /// Bin width of the level histogram
    #[arg(long = "bin-width", global = true)]
    pub bin_width: Option<f64>,
    /// Alternatives for the likelihood-ratio test
    #[arg(long, global = true, value_delimiter = ',', value_parser = ["exponential", "lognormal"])]
    pub alternatives: Vec<String>,
    /// Network export formats
    #[arg(long = "format", global = true, value_delimiter = ',', value_parser = ["dot", "graphml", "csv"])]
    pub formats: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check tree constraints and report violations as file:line
    Validate { inputs: Vec<PathBuf> },
    /// Filter the corpus and write one network per century
    Build { inputs: Vec<PathBuf> },
    /// Network summaries and the depth/diameter table
    Stats { inputs: Vec<PathBuf> },
    /// Forward/backward levels, incoherence and democracy
    Hierarchy { inputs: Vec<PathBuf> },
    /// Power-law fits with bootstrap p-values and likelihood-ratio tests
    Powerlaw { inputs: Vec<PathBuf> },
    /// Trajectories, emergent heads and the phase-space feed
    Diachrony { inputs: Vec<PathBuf> },
    /// Every report at once
    Analyze { inputs: Vec<PathBuf> },
    /// Network exports only, optionally restricted to phrase rules
    Export {
        inputs: Vec<PathBuf>,
        /// Keep only arcs labelled with these rules (NP, VP, PP, OTHER)
        #[arg(long, value_delimiter = ',')]
        rules: Vec<String>,
    },
}

impl Command {
    fn inputs(&self) -> &[PathBuf] {
        match self {
            Command::Validate { inputs }
            | Command::Build { inputs }
            | Command::Stats { inputs }
            | Command::Hierarchy { inputs }
            | Command::Powerlaw { inputs }
            | Command::Diachrony { inputs }
            | Command::Analyze { inputs }
            | Command::Export { inputs, .. } => inputs,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Build { .. } => "build",
            Command::Stats { .. } => "stats",
            Command::Hierarchy { .. } => "hierarchy",
            Command::Powerlaw { .. } => "powerlaw",
            Command::Diachrony { .. } => "diachrony",
            Command::Analyze { .. } => "analyze",
            Command::Export { .. } => "export",
        }
    }

    fn stages(&self) -> Stages {
        let all = Stages {
            stats: true,
            hierarchy: true,
            powerlaw: true,
            diachrony: true,
        };
        match self {
            Command::Stats { .. } => Stages {
                stats: true,
                ..Stages::default()
            },
            Command::Hierarchy { .. } => Stages {
                hierarchy: true,
                ..Stages::default()
            },
            Command::Powerlaw { .. } => Stages {
                powerlaw: true,
                ..Stages::default()
            },
            Command::Diachrony { .. } => Stages {
                powerlaw: false,
                ..all
            },
            Command::Analyze { .. } => all,
            _ => Stages::default(),
        }
    }
}

/// Merge defaults, the config file and command-line flags, in that order.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let g = &cli.global;
    let mut config = RunConfig::default();
    if let Some(path) = &g.config {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        config
            .apply_file(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    let usage = |e: String| CliError::Usage(e);
    if !cli.command.inputs().is_empty() {
        config.inputs = cli.command.inputs().to_vec();
    }
    if let Some(seed) = g.seed {
        config.seed = seed;
    }
    if let Some(out) = &g.out {
        config.out = out.clone();
    }
    if let Some(m) = &g.missing {
        config.set("missing", m).map_err(usage)?;
    }
    if g.unweighted {
        config.weighted = false;
    }
    if let Some(d) = &g.degree {
        config.set("degree", d).map_err(usage)?;
    }
    if let Some(r) = g.replicates {
        config.replicates = r;
    }
    if g.strict {
        config.gate = PValueGate::Strict;
    }
    if !g.track.is_empty() {
        config.track.clear();
        for t in &g.track {
            config.set("track", t).map_err(usage)?;
        }
    }
    if let Some(b) = g.band {
        config.band = b;
    }
    if let Some(m) = g.min_gain {
        config.min_gain = m;
    }
    if g.flag_initial_slice {
        config.flag_initial_slice = true;
    }
    if let Some(w) = g.bin_width {
        config.set("bin_width", &w.to_string()).map_err(usage)?;
    }
    if !g.alternatives.is_empty() {
        config.set("alternatives", &g.alternatives.join(",")).map_err(usage)?;
    }
    if !g.formats.is_empty() {
        config.set("formats", &g.formats.join(",")).map_err(usage)?;
    }
    if config.inputs.is_empty() {
        return Err(CliError::Usage("no input files given".into()));
    }
    if config.band < 1 {
        return Err(CliError::Usage("band must be at least 1".into()));
    }
    Ok(config)
}

/// Per-file check of every sentence; prints one `file:line: ...` row per
/// violation. Unreadable files are reported and the remaining files are
/// still checked.
fn validate(config: &RunConfig) -> i32 {
    let mut status = 0;
    let mut io_failure = false;
    for path in &config.inputs {
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                io_failure = true;
                continue;
            }
        };
        match parse_corpus_lenient(file) {
            Ok((slices, rejected)) => {
                for r in &rejected {
                    for v in &r.report.violations {
                        println!("{}:{}: sentence `{}`: {v}", path.display(), r.line_of(v), r.sentence_id);
                    }
                }
                let total: usize = slices.iter().map(|s| s.trees.len()).sum::<usize>() + rejected.len();
                eprintln!("{}: {total} sentences, {} invalid", path.display(), rejected.len());
                if !rejected.is_empty() {
                    status = 1;
                }
            }
            Err(ParseError::Io { source, .. }) => {
                eprintln!("{}: {source}", path.display());
                io_failure = true;
            }
            Err(e) => {
                println!("{}:{}: {e}", path.display(), e.line());
                status = 1;
            }
        }
    }
    if io_failure {
        2
    } else {
        status
    }
}

fn manifest(config: &RunConfig, command: &str, centuries: &[u32], files: Vec<String>) -> serde_json::Value {
    let seeds: serde_json::Map<String, serde_json::Value> = centuries
        .iter()
        .map(|&c| (c.to_string(), json!(century_seed(config.seed, c))))
        .collect();
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": config.seed,
        "century_seeds": seeds,
        "config": config,
        "conventions": {
            "paths": PATH_CONVENTIONS,
            "levels": LEVEL_CONVENTIONS,
            "fit": FIT_CONVENTIONS,
            "gate": config.gate.describe(),
        },
        "files": files,
    })
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let config = resolve_config(cli)?;
    if let Command::Validate { .. } = cli.command {
        return Ok(validate(&config));
    }
    let rules: Vec<PhraseRule> = match &cli.command {
        Command::Export { rules, .. } => rules
            .iter()
            .map(|r| r.parse::<PhraseRule>().map_err(|e| CliError::Usage(e.to_string())))
            .collect::<Result<_, _>>()?,
        _ => Vec::new(),
    };
    let prepared = prepare(&config)?;
    let mut bundle = Bundle::new(config.out.clone());
    write_networks(&mut bundle, &config, &prepared, &rules)?;
    let mut failures = Vec::new();
    if !matches!(cli.command, Command::Export { .. }) {
        bundle.write_json("build_report.json", &prepared.report)?;
        failures = run_stages(&mut bundle, &config, cli.command.stages(), &prepared)?;
    }
    let centuries: Vec<u32> = prepared.slices.iter().map(|s| s.century).collect();
    let files = bundle.files();
    bundle.write_json("manifest.json", &manifest(&config, cli.command.name(), &centuries, files))?;
    for f in &failures {
        eprintln!("asn: {f}");
    }
    Ok(if failures.is_empty() { 0 } else { 1 })
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("asn: error: {e}");
            e.exit_code()
        }
    }
}
