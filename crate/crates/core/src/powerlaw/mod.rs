//! Discrete power-law fits of degree sequences: maximum-likelihood exponent,
//! KS-selected lower cutoff, semi-parametric bootstrap p-value and
//! likelihood-ratio comparison with exponential and lognormal tails.

mod bootstrap;
mod fit;
mod lrt;
mod sample;
mod zeta;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bootstrap::{bootstrap_pvalue, replicate_rng, resample, BootstrapError, MAX_DISCARD_FRACTION, MIN_REPLICATES};
pub use fit::{
    fit, ks_distance, log_likelihood, FitError, PowerLawFit, ALPHA_RANGE, ALPHA_TOLERANCE, MIN_OBSERVATIONS, MIN_TAIL,
};
pub use lrt::{lrt, Alternative, Favored, LrtError, LrtResult, LRT_SIGNIFICANCE, MIN_LRT_TAIL};
pub use sample::{sample_discrete_powerlaw, DiscretePowerLaw, SampleError};
pub use zeta::hurwitz_zeta;

use crate::graph_stats::DegreeSequences;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeVariable {
    In,
    Out,
    #[default]
    Total,
}

impl DegreeVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            DegreeVariable::In => "in",
            DegreeVariable::Out => "out",
            DegreeVariable::Total => "total",
        }
    }

    /// The chosen sequence with zero degrees removed.
    pub fn positive(self, seqs: &DegreeSequences) -> Vec<u64> {
        let s = match self {
            DegreeVariable::In => &seqs.in_degree,
            DegreeVariable::Out => &seqs.out_degree,
            DegreeVariable::Total => &seqs.total,
        };
        s.iter().copied().filter(|&d| d > 0).collect()
    }
}

impl fmt::Display for DegreeVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DegreeVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "in" => Ok(DegreeVariable::In),
            "out" => Ok(DegreeVariable::Out),
            "total" => Ok(DegreeVariable::Total),
            other => Err(format!("unknown degree variable '{other}' (expected in, out or total)")),
        }
    }
}

/// Acceptance rule for the bootstrap p-value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PValueGate {
    /// `p > 0.01`
    #[default]
    Lenient,
    /// `p ≥ 0.1`
    Strict,
}

impl PValueGate {
    pub fn accepts(self, p: f64) -> bool {
        match self {
            PValueGate::Lenient => p > 0.01,
            PValueGate::Strict => p >= 0.1,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            PValueGate::Lenient => "p > 0.01",
            PValueGate::Strict => "p >= 0.1",
        }
    }
}

/// `x,empirical_ccdf,fitted_ccdf` at every distinct observed value. The
/// empirical column is `P(X ≥ x)` over all data; the fitted column is the
/// model survival scaled by `n_tail / n` and left blank below `xmin`.
pub fn ccdf_csv(data: &[u64], fit: &PowerLawFit, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("x,empirical_ccdf,fitted_ccdf\n");
    let mut sorted = data.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let norm = hurwitz_zeta(fit.alpha, fit.xmin as f64);
    let scale = fit.n_tail as f64 / n;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let empirical = (sorted.len() - i) as f64 / n;
        if x >= fit.xmin {
            let fitted = scale * hurwitz_zeta(fit.alpha, x as f64) / norm;
            let _ = writeln!(out, "{x},{empirical},{fitted}");
        } else {
            let _ = writeln!(out, "{x},{empirical},");
        }
        while i < sorted.len() && sorted[i] == x {
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gates() {
        assert!(PValueGate::Lenient.accepts(0.02));
        assert!(!PValueGate::Lenient.accepts(0.01));
        assert!(!PValueGate::Strict.accepts(0.09));
        assert!(PValueGate::Strict.accepts(0.1));
    }

    #[test]
    fn degree_variable_round_trip() {
        for v in [DegreeVariable::In, DegreeVariable::Out, DegreeVariable::Total] {
            assert_eq!(v.as_str().parse::<DegreeVariable>(), Ok(v));
        }
        assert!("both".parse::<DegreeVariable>().is_err());
    }

    #[test]
    fn ccdf_rows() {
        let data = [1u64, 1, 2, 3, 3, 3, 10, 10, 20, 40];
        let f = PowerLawFit {
            alpha: 2.0,
            xmin: 3,
            ks: 0.1,
            n_tail: 7,
            n: 10,
            p_value: None,
            replicates: 0,
            seed: 0,
        };
        let csv = ccdf_csv(&data, &f, &["seed = 1".into()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# seed = 1");
        assert_eq!(lines[2], "1,1,");
        assert_eq!(lines[3], "2,0.8,");
        assert_eq!(lines[4], "3,0.7,0.7");
        assert_eq!(lines.len(), 2 + 6);
    }
}
