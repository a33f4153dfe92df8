use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use super::fit::PowerLawFit;
use super::zeta::hurwitz_zeta;

pub const LRT_SIGNIFICANCE: f64 = 0.1;
pub const MIN_LRT_TAIL: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alternative {
    Exponential,
    Lognormal,
}

impl Alternative {
    pub const ALL: [Alternative; 2] = [Alternative::Exponential, Alternative::Lognormal];

    pub fn as_str(self) -> &'static str {
        match self {
            Alternative::Exponential => "exponential",
            Alternative::Lognormal => "lognormal",
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Alternative {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exponential" => Ok(Alternative::Exponential),
            "lognormal" => Ok(Alternative::Lognormal),
            other => Err(format!("unknown alternative distribution '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Favored {
    PowerLaw,
    Alternative,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrtResult {
    pub alternative: Alternative,
    /// Positive values favor the power law.
    pub log_likelihood_ratio: f64,
    /// Vuong statistic `R / (σ √n)`.
    pub normalized_ratio: f64,
    pub p_value: f64,
    pub favored: Favored,
    /// Fitted parameters of the alternative: `[rate]` or `[μ, σ]`.
    pub parameters: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum LrtError {
    #[error("tail of {0} observations is too small, need at least {MIN_LRT_TAIL}")]
    TailTooSmall(usize),
    #[error("every tail observation equals xmin; the {0} fit is degenerate")]
    Degenerate(Alternative),
}

/// `ln P(Z > z)` for a standard normal `Z`, accurate far into the tail.
fn ln_upper(z: f64) -> f64 {
    let t = z / std::f64::consts::SQRT_2;
    if t < 26.0 {
        (0.5 * erfc(t)).ln()
    } else {
        // asymptotic expansion of the Mills ratio
        let z2 = z * z;
        -0.5 * z2 - (z * (2.0 * std::f64::consts::PI).sqrt()).ln() + (1.0 - 1.0 / z2 + 3.0 / (z2 * z2)).ln()
    }
}

/// `ln(Φ(b) − Φ(a))` for `a < b`.
fn ln_normal_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        let (la, lb) = (ln_upper(a), ln_upper(b));
        la + (-(lb - la).exp()).ln_1p()
    } else if b <= 0.0 {
        let (la, lb) = (ln_upper(-b), ln_upper(-a));
        la + (-(lb - la).exp()).ln_1p()
    } else {
        (1.0 - (0.5 * erfc(b / std::f64::consts::SQRT_2)) - (0.5 * erfc(-a / std::f64::consts::SQRT_2))).ln()
    }
}

/// Discrete lognormal: mass of `[ln x, ln(x + 1))` under `N(μ, σ²)`,
/// renormalized to `x ≥ xmin`.
fn lognormal_ln_pmf(x: u64, xmin: u64, mu: f64, sigma: f64) -> f64 {
    let z = |v: u64| ((v as f64).ln() - mu) / sigma;
    ln_normal_mass(z(x), z(x + 1)) - ln_upper(z(xmin))
}

fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: [f64; 2]) -> [f64; 2] {
    let mut simplex = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut values = simplex.map(&f);
    for _ in 0..2000 {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        if (values[2] - values[0]).abs() <= 1e-12 * (1.0 + values[0].abs()) {
            break;
        }
        let centroid = [0.5 * (simplex[0][0] + simplex[1][0]), 0.5 * (simplex[0][1] + simplex[1][1])];
        let along = |t: f64| [centroid[0] + t * (simplex[2][0] - centroid[0]), centroid[1] + t * (simplex[2][1] - centroid[1])];
        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let contracted = if fr < values[2] { along(-0.5) } else { along(0.5) };
            let fc = f(contracted);
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        0.5 * (simplex[0][0] + simplex[i][0]),
                        0.5 * (simplex[0][1] + simplex[i][1]),
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap();
    simplex[best]
}

fn exponential_pointwise(tail: &[u64], xmin: u64) -> Result<(Vec<f64>, Vec<f64>), LrtError> {
    let mean_excess = tail.iter().map(|&x| (x - xmin) as f64).sum::<f64>() / tail.len() as f64;
    if mean_excess == 0.0 {
        return Err(LrtError::Degenerate(Alternative::Exponential));
    }
    // geometric on x ≥ xmin: P(x) = (1 − q) q^(x − xmin)
    let q = mean_excess / (1.0 + mean_excess);
    let (ln_q, ln_1mq) = (q.ln(), (-q).ln_1p());
    let ll = tail.iter().map(|&x| ln_1mq + (x - xmin) as f64 * ln_q).collect();
    Ok((ll, vec![-ln_q]))
}

fn lognormal_pointwise(tail: &[u64], xmin: u64) -> Result<(Vec<f64>, Vec<f64>), LrtError> {
    if tail.iter().all(|&x| x == xmin) {
        return Err(LrtError::Degenerate(Alternative::Lognormal));
    }
    // distinct values with counts keep each likelihood evaluation short
    let mut groups: Vec<(u64, f64)> = Vec::new();
    for &x in tail {
        match groups.last_mut() {
            Some((v, c)) if *v == x => *c += 1.0,
            _ => groups.push((x, 1.0)),
        }
    }
    let n = tail.len() as f64;
    let logs: Vec<f64> = tail.iter().map(|&x| (x as f64 + 0.5).ln()).collect();
    let m0 = logs.iter().sum::<f64>() / n;
    let s0 = (logs.iter().map(|l| (l - m0).powi(2)).sum::<f64>() / n).sqrt().max(0.1);
    let neg_ll = |p: [f64; 2]| {
        let sigma = p[1].exp();
        let v: f64 = groups.iter().map(|&(x, c)| c * lognormal_ln_pmf(x, xmin, p[0], sigma)).sum();
        if v.is_finite() {
            -v
        } else {
            f64::INFINITY
        }
    };
    let mut p = nelder_mead(neg_ll, [m0, s0.ln()], [0.5, 0.3]);
    // a restart from the first optimum guards against early collapse
    p = nelder_mead(neg_ll, p, [0.1, 0.1]);
    let (mu, sigma) = (p[0], p[1].exp());
    let ll = tail.iter().map(|&x| lognormal_ln_pmf(x, xmin, mu, sigma)).collect();
    Ok((ll, vec![mu, sigma]))
}

/// Vuong likelihood-ratio test of the fitted power law against an
/// alternative fitted by maximum likelihood on the same tail.
pub fn lrt(data: &[u64], fit: &PowerLawFit, alternative: Alternative) -> Result<LrtResult, LrtError> {
    let mut tail: Vec<u64> = data.iter().copied().filter(|&x| x >= fit.xmin).collect();
    if tail.len() < MIN_LRT_TAIL {
        return Err(LrtError::TailTooSmall(tail.len()));
    }
    tail.sort_unstable();
    let (alt_ll, parameters) = match alternative {
        Alternative::Exponential => exponential_pointwise(&tail, fit.xmin)?,
        Alternative::Lognormal => lognormal_pointwise(&tail, fit.xmin)?,
    };
    let ln_norm = hurwitz_zeta(fit.alpha, fit.xmin as f64).ln();
    let diffs: Vec<f64> = tail
        .iter()
        .zip(&alt_ll)
        .map(|(&x, a)| -fit.alpha * (x as f64).ln() - ln_norm - a)
        .collect();
    let n = diffs.len() as f64;
    let ratio: f64 = diffs.iter().sum();
    let mean = ratio / n;
    let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n).sqrt();
    let (normalized_ratio, p_value) = if sd > 0.0 {
        let z = ratio / (sd * n.sqrt());
        (z, erfc(z.abs() / std::f64::consts::SQRT_2))
    } else {
        (0.0, 1.0)
    };
    let favored = if p_value > LRT_SIGNIFICANCE {
        Favored::Indeterminate
    } else if ratio > 0.0 {
        Favored::PowerLaw
    } else {
        Favored::Alternative
    };
    Ok(LrtResult {
        alternative,
        log_likelihood_ratio: ratio,
        normalized_ratio,
        p_value,
        favored,
        parameters,
    })
}
