use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::zeta::hurwitz_zeta;

pub const MIN_OBSERVATIONS: usize = 10;
/// Smallest tail admitted when scanning xmin candidates.
pub const MIN_TAIL: usize = 10;
pub const ALPHA_RANGE: (f64, f64) = (1.01, 6.0);
pub const ALPHA_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub xmin: u64,
    pub ks: f64,
    pub n_tail: usize,
    /// Size of the whole sample the fit was drawn from.
    pub n: usize,
    pub p_value: Option<f64>,
    pub replicates: usize,
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FitError {
    #[error("need at least {MIN_OBSERVATIONS} observations, got {0}")]
    TooFew(usize),
    #[error("degenerate data: every observation equals {0}")]
    Degenerate(u64),
    #[error("observations must be positive integers")]
    NonPositive,
    #[error("no xmin candidate leaves a tail of at least {MIN_TAIL} observations")]
    NoCandidate,
}

/// Distinct values with multiplicities, plus suffix sums used by every
/// candidate tail.
pub(crate) struct Tally {
    pub values: Vec<u64>,
    pub counts: Vec<usize>,
    /// observations with value ≥ `values[i]`
    pub tail_count: Vec<usize>,
    /// Σ ln x over observations ≥ `values[i]`
    pub tail_log_sum: Vec<f64>,
    pub n: usize,
}

impl Tally {
    pub fn new(data: &[u64]) -> Self {
        let mut sorted = data.to_vec();
        sorted.sort_unstable();
        let mut values = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for x in sorted {
            if values.last() == Some(&x) {
                *counts.last_mut().unwrap() += 1;
            } else {
                values.push(x);
                counts.push(1);
            }
        }
        let d = values.len();
        let mut tail_count = vec![0; d];
        let mut tail_log_sum = vec![0.0; d];
        let (mut c, mut s) = (0usize, 0.0f64);
        for i in (0..d).rev() {
            c += counts[i];
            s += counts[i] as f64 * (values[i] as f64).ln();
            tail_count[i] = c;
            tail_log_sum[i] = s;
        }
        Tally {
            values,
            counts,
            tail_count,
            tail_log_sum,
            n: data.len(),
        }
    }

    /// Index of the first distinct value ≥ `xmin`.
    pub fn tail_start(&self, xmin: u64) -> usize {
        self.values.partition_point(|&v| v < xmin)
    }
}

fn tail_log_likelihood(alpha: f64, xmin: u64, n_tail: usize, log_sum: f64) -> f64 {
    -(n_tail as f64) * hurwitz_zeta(alpha, xmin as f64).ln() - alpha * log_sum
}

/// Discrete power-law log-likelihood of the observations ≥ `xmin`.
pub fn log_likelihood(data: &[u64], alpha: f64, xmin: u64) -> f64 {
    let (n, s) = data
        .iter()
        .filter(|&&x| x >= xmin)
        .fold((0usize, 0.0f64), |(n, s), &x| (n + 1, s + (x as f64).ln()));
    tail_log_likelihood(alpha, xmin, n, s)
}

/// Maximizer of a unimodal function on `[lo, hi]` by golden-section search.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}

fn mle_alpha(xmin: u64, n_tail: usize, log_sum: f64) -> f64 {
    golden_max(
        |a| tail_log_likelihood(a, xmin, n_tail, log_sum),
        ALPHA_RANGE.0,
        ALPHA_RANGE.1,
        ALPHA_TOLERANCE,
    )
}

/// Supremum distance between the empirical tail CDF and the fitted CDF,
/// taken over every integer (the fitted CDF rises between observed values,
/// so each gap is checked at its upper end as well).
pub(crate) fn tail_ks(tally: &Tally, start: usize, alpha: f64) -> f64 {
    let values = &tally.values[start..];
    let counts = &tally.counts[start..];
    let n_tail = tally.tail_count[start] as f64;
    let norm = hurwitz_zeta(alpha, values[0] as f64);
    let mut cum = 0usize;
    let mut d = 0.0f64;
    for (j, &v) in values.iter().enumerate() {
        cum += counts[j];
        let emp = cum as f64 / n_tail;
        let at_v = 1.0 - hurwitz_zeta(alpha, (v + 1) as f64) / norm;
        d = d.max((emp - at_v).abs());
        if let Some(&next) = values.get(j + 1) {
            if next > v + 1 {
                let before_next = 1.0 - hurwitz_zeta(alpha, next as f64) / norm;
                d = d.max((emp - before_next).abs());
            }
        }
    }
    d
}

fn check(data: &[u64]) -> Result<(), FitError> {
    if data.len() < MIN_OBSERVATIONS {
        return Err(FitError::TooFew(data.len()));
    }
    if data.contains(&0) {
        return Err(FitError::NonPositive);
    }
    if data.iter().all(|&x| x == data[0]) {
        return Err(FitError::Degenerate(data[0]));
    }
    Ok(())
}

pub(crate) fn fit_tally(tally: &Tally) -> Result<PowerLawFit, FitError> {
    let mut best: Option<PowerLawFit> = None;
    for i in 0..tally.values.len().saturating_sub(1) {
        let n_tail = tally.tail_count[i];
        if n_tail < MIN_TAIL {
            break;
        }
        let xmin = tally.values[i];
        let alpha = mle_alpha(xmin, n_tail, tally.tail_log_sum[i]);
        let ks = tail_ks(tally, i, alpha);
        if best.as_ref().is_none_or(|b| ks < b.ks) {
            best = Some(PowerLawFit {
                alpha,
                xmin,
                ks,
                n_tail,
                n: tally.n,
                p_value: None,
                replicates: 0,
                seed: 0,
            });
        }
    }
    best.ok_or(FitError::NoCandidate)
}

/// Maximum-likelihood exponent for every admissible xmin; keeps the xmin
/// with the smallest KS distance (the smaller xmin on ties).
pub fn fit(data: &[u64]) -> Result<PowerLawFit, FitError> {
    check(data)?;
    fit_tally(&Tally::new(data))
}

/// KS distance of the tail `x ≥ xmin` against the power law `(alpha, xmin)`.
/// Agrees bit for bit with the value stored by [`fit`].
pub fn ks_distance(data: &[u64], alpha: f64, xmin: u64) -> Option<f64> {
    let tally = Tally::new(data);
    let start = tally.tail_start(xmin);
    if start >= tally.values.len() {
        return None;
    }
    Some(tail_ks_from(&tally, start, alpha, xmin))
}

/// As [`tail_ks`] but normalized at an arbitrary `xmin ≤ values[start]`.
fn tail_ks_from(tally: &Tally, start: usize, alpha: f64, xmin: u64) -> f64 {
    if tally.values[start] == xmin {
        return tail_ks(tally, start, alpha);
    }
    let values = &tally.values[start..];
    let counts = &tally.counts[start..];
    let n_tail = tally.tail_count[start] as f64;
    let norm = hurwitz_zeta(alpha, xmin as f64);
    // below the first observation the empirical CDF is still 0
    let mut d = 1.0 - hurwitz_zeta(alpha, values[0] as f64) / norm;
    let mut cum = 0usize;
    for (j, &v) in values.iter().enumerate() {
        cum += counts[j];
        let emp = cum as f64 / n_tail;
        d = d.max((emp - (1.0 - hurwitz_zeta(alpha, (v + 1) as f64) / norm)).abs());
        if let Some(&next) = values.get(j + 1) {
            if next > v + 1 {
                d = d.max((emp - (1.0 - hurwitz_zeta(alpha, next as f64) / norm)).abs());
            }
        }
    }
    d
}
