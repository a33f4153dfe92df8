use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asn::NodeKey;
use crate::corpus::MissingPolicy;
use crate::powerlaw::{Alternative, DegreeVariable, PValueGate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Dot,
    Graphml,
    Csv,
}

impl ExportFormat {
    pub const ALL: [ExportFormat; 3] = [ExportFormat::Dot, ExportFormat::Graphml, ExportFormat::Csv];

    pub fn file_name(self) -> &'static str {
        match self {
            ExportFormat::Dot => "asn.dot",
            ExportFormat::Graphml => "asn.graphml",
            ExportFormat::Csv => "asn_edges.csv",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "graphml" => Ok(ExportFormat::Graphml),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(format!("unknown export format `{other}` (expected dot, graphml or csv)")),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Dot => "dot",
            ExportFormat::Graphml => "graphml",
            ExportFormat::Csv => "csv",
        })
    }
}

/// Everything a run depends on. The output directory is left out of the
/// serialized form so that bundles written to different places compare equal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub missing: MissingPolicy,
    pub weighted: bool,
    pub degree: DegreeVariable,
    pub replicates: usize,
    pub seed: u64,
    pub band: usize,
    pub min_gain: usize,
    pub flag_initial_slice: bool,
    pub gate: PValueGate,
    #[serde(skip)]
    pub out: PathBuf,
    pub formats: Vec<ExportFormat>,
    pub track: Vec<String>,
    pub bin_width: f64,
    pub alternatives: Vec<Alternative>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            missing: MissingPolicy::default(),
            weighted: true,
            degree: DegreeVariable::default(),
            replicates: 1000,
            seed: 1,
            band: 10,
            min_gain: 5,
            flag_initial_slice: false,
            gate: PValueGate::default(),
            out: PathBuf::from("asn-out"),
            formats: ExportFormat::ALL.to_vec(),
            track: Vec::new(),
            bin_width: 0.5,
            alternatives: Alternative::ALL.to_vec(),
        }
    }
}

pub const CONFIG_KEYS: [&str; 15] = [
    "alternatives",
    "band",
    "bin_width",
    "degree",
    "flag_initial_slice",
    "formats",
    "input",
    "min_gain",
    "missing",
    "out",
    "replicates",
    "seed",
    "strict",
    "track",
    "weighted",
];

/// Keys that may appear on several lines, each adding to the list.
const REPEATABLE: [&str; 2] = ["input", "track"];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("config key `{key}`: cannot parse `{value}`"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("config key `{key}`: expected true or false, got `{value}`")),
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl RunConfig {
    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "input" => self.inputs.extend(list(value).map(PathBuf::from)),
            "track" => {
                for spec in list(value) {
                    NodeKey::parse(spec).ok_or_else(|| format!("track entry `{spec}` is not `ROLE lemma`"))?;
                    self.track.push(spec.to_owned());
                }
            }
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "missing" => self.missing = value.parse()?,
            "weighted" => self.weighted = parse_bool(key, value)?,
            "degree" => self.degree = value.parse()?,
            "replicates" => self.replicates = parse(key, value)?,
            "strict" => {
                self.gate = if parse_bool(key, value)? {
                    PValueGate::Strict
                } else {
                    PValueGate::Lenient
                }
            }
            "band" => self.band = parse(key, value)?,
            "min_gain" => self.min_gain = parse(key, value)?,
            "flag_initial_slice" => self.flag_initial_slice = parse_bool(key, value)?,
            "bin_width" => {
                let w: f64 = parse(key, value)?;
                if !(w > 0.0 && w.is_finite()) {
                    return Err(format!("config key `bin_width` must be positive, got `{value}`"));
                }
                self.bin_width = w;
            }
            "alternatives" => {
                self.alternatives = list(value).map(str::parse).collect::<Result<_, _>>()?;
            }
            "formats" => {
                let set: BTreeSet<ExportFormat> = list(value).map(str::parse).collect::<Result<_, _>>()?;
                self.formats = set.into_iter().collect();
            }
            other => return Err(format!("unknown config key `{other}`")),
        }
        Ok(())
    }

    /// Apply a `key = value` file. Blank lines and lines starting with `#`
    /// are ignored; a key other than `input` or `track` may appear once.
    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected `key = value`", i + 1))?;
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(format!("config line {}: unknown key `{key}`", i + 1));
            }
            if !REPEATABLE.contains(&key) && !seen.insert(key.to_owned()) {
                return Err(format!("config line {}: key `{key}` given twice", i + 1));
            }
            self.set(key, value.trim()).map_err(|e| format!("config line {}: {e}", i + 1))?;
        }
        Ok(())
    }

    pub fn tracked_keys(&self) -> Vec<NodeKey> {
        self.track.iter().filter_map(|s| NodeKey::parse(s)).collect()
    }
}

/// Seed of one century's random streams, derived from the root seed.
pub fn century_seed(root: u64, century: u32) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(u64::from(century));
    rng.next_u64()
}
