use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::fit::{fit_tally, FitError, PowerLawFit, Tally};
use super::sample::{DiscretePowerLaw, SampleError};

pub const MIN_REPLICATES: usize = 100;
/// Largest share of replicates whose refit may fail.
pub const MAX_DISCARD_FRACTION: f64 = 0.1;

#[derive(Debug, Error, PartialEq)]
pub enum BootstrapError {
    #[error("need at least {MIN_REPLICATES} replicates, got {0}")]
    TooFewReplicates(usize),
    #[error("{discarded} of {replicates} replicates could not be refitted")]
    TooManyDiscarded { discarded: usize, replicates: usize },
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Model(#[from] SampleError),
}

/// RNG of replicate `r`; its stream depends only on `(seed, r)`.
pub fn replicate_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    rng
}

/// Semi-parametric resample: model draws above `xmin` with probability
/// `n_tail / n`, otherwise a uniform pick among observations below `xmin`.
pub fn resample<R: Rng + ?Sized>(
    model: &DiscretePowerLaw,
    below: &[u64],
    n: usize,
    n_tail: usize,
    rng: &mut R,
) -> Vec<u64> {
    let p_tail = n_tail as f64 / n as f64;
    (0..n)
        .map(|_| {
            if below.is_empty() || rng.random::<f64>() < p_tail {
                model.sample(rng)
            } else {
                below[rng.random_range(0..below.len())]
            }
        })
        .collect()
}

/// Goodness-of-fit p-value: the share of refitted replicates whose KS
/// distance is at least the observed one.
pub fn bootstrap_pvalue(fit: &PowerLawFit, data: &[u64], replicates: usize, seed: u64) -> Result<PowerLawFit, BootstrapError> {
    if replicates < MIN_REPLICATES {
        return Err(BootstrapError::TooFewReplicates(replicates));
    }
    let model = DiscretePowerLaw::new(fit.alpha, fit.xmin)?;
    let mut below: Vec<u64> = data.iter().copied().filter(|&x| x < fit.xmin).collect();
    below.sort_unstable();
    let n = data.len();

    let outcomes: Vec<Option<f64>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(seed, r);
            let synthetic = resample(&model, &below, n, fit.n_tail, &mut rng);
            match fit_tally(&Tally::new(&synthetic)) {
                Ok(f) => Some(f.ks),
                Err(e) => {
                    log::debug!("bootstrap replicate {r} discarded: {e}");
                    None
                }
            }
        })
        .collect();

    let kept: Vec<f64> = outcomes.into_iter().flatten().collect();
    let discarded = replicates - kept.len();
    if discarded > 0 {
        log::warn!("{discarded} of {replicates} bootstrap replicates discarded after failed refits");
    }
    if discarded as f64 > MAX_DISCARD_FRACTION * replicates as f64 {
        return Err(BootstrapError::TooManyDiscarded { discarded, replicates });
    }
    let exceed = kept.iter().filter(|&&ks| ks >= fit.ks).count();
    Ok(PowerLawFit {
        p_value: Some(exceed as f64 / kept.len() as f64),
        replicates,
        seed,
        ..fit.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powerlaw::{fit, sample_discrete_powerlaw};

    #[test]
    fn replicate_count_checked() {
        let data = sample_discrete_powerlaw(2.5, 1, 200, 3).unwrap();
        let f = fit(&data).unwrap();
        assert_eq!(bootstrap_pvalue(&f, &data, 99, 1), Err(BootstrapError::TooFewReplicates(99)));
    }

    #[test]
    fn deterministic_and_bounded() {
        let data = sample_discrete_powerlaw(2.5, 1, 500, 9).unwrap();
        let f = fit(&data).unwrap();
        let a = bootstrap_pvalue(&f, &data, 100, 77).unwrap();
        let b = bootstrap_pvalue(&f, &data, 100, 77).unwrap();
        let p = a.p_value.unwrap();
        assert_eq!(p.to_bits(), b.p_value.unwrap().to_bits());
        assert!((0.0..=1.0).contains(&p));
        assert_eq!((a.replicates, a.seed), (100, 77));
        assert_eq!(a.ks, f.ks);
    }

    #[test]
    fn resample_respects_split() {
        let model = DiscretePowerLaw::new(2.5, 10).unwrap();
        let below = [1u64, 2, 3];
        let mut rng = replicate_rng(5, 0);
        let xs = resample(&model, &below, 10_000, 2_500, &mut rng);
        let tail = xs.iter().filter(|&&x| x >= 10).count();
        assert!(xs.iter().all(|&x| x >= 10 || below.contains(&x)));
        assert!((tail as f64 - 2500.0).abs() < 200.0, "tail={tail}");
    }
}
