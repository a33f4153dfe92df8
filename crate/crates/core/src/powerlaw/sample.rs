use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::zeta::hurwitz_zeta;

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("exponent must exceed 1, got {0}")]
    Alpha(f64),
    #[error("xmin must be at least 1")]
    Xmin,
    #[error("sample size must be at least 1")]
    Empty,
}

/// Values past which the continuous approximation seeds the search.
const TABLE_LEN: usize = 1024;
/// Largest integer exactly representable in an f64.
const MAX_VALUE: u64 = 1 << 53;

/// Discrete power law `P(X = x) = x^{-α} / ζ(α, xmin)` on `x ≥ xmin`.
#[derive(Clone, Debug)]
pub struct DiscretePowerLaw {
    alpha: f64,
    xmin: u64,
    norm: f64,
    /// `P(X ≥ xmin + i)`
    survival_table: Vec<f64>,
}

impl DiscretePowerLaw {
    pub fn new(alpha: f64, xmin: u64) -> Result<Self, SampleError> {
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(SampleError::Alpha(alpha));
        }
        if xmin < 1 {
            return Err(SampleError::Xmin);
        }
        let norm = hurwitz_zeta(alpha, xmin as f64);
        let survival_table = (0..TABLE_LEN as u64)
            .map(|i| {
                if i == 0 {
                    1.0
                } else {
                    hurwitz_zeta(alpha, (xmin + i) as f64) / norm
                }
            })
            .collect();
        Ok(DiscretePowerLaw {
            alpha,
            xmin,
            norm,
            survival_table,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn xmin(&self) -> u64 {
        self.xmin
    }

    pub fn pmf(&self, x: u64) -> f64 {
        if x < self.xmin {
            0.0
        } else {
            (x as f64).powf(-self.alpha) / self.norm
        }
    }

    /// `P(X ≥ x)`
    pub fn survival(&self, x: u64) -> f64 {
        if x <= self.xmin {
            return 1.0;
        }
        let i = x - self.xmin;
        if (i as usize) < TABLE_LEN {
            self.survival_table[i as usize]
        } else {
            hurwitz_zeta(self.alpha, x as f64) / self.norm
        }
    }

    /// `P(X ≤ x)`
    pub fn cdf(&self, x: u64) -> f64 {
        1.0 - self.survival(x.saturating_add(1))
    }

    /// Largest `x` with `P(X ≥ x) ≥ u`, for `u ∈ (0, 1]`.
    fn invert(&self, u: f64) -> u64 {
        let table = &self.survival_table;
        if u > table[TABLE_LEN - 1] {
            // first index whose survival drops below u, minus one
            let i = table.partition_point(|&s| s >= u);
            return self.xmin + i as u64 - 1;
        }
        let mut lo = self.xmin + TABLE_LEN as u64 - 1;
        let guess = (self.xmin as f64 - 0.5) * u.powf(-1.0 / (self.alpha - 1.0)) + 0.5;
        let mut g = if guess.is_finite() {
            (guess.floor() as u64).clamp(lo, MAX_VALUE)
        } else {
            MAX_VALUE
        };
        if self.survival(g) >= u {
            if g == MAX_VALUE || self.survival(g + 1) < u {
                return g;
            }
            // gallop upward
            lo = g;
            let mut step = 1u64;
            loop {
                g = lo.saturating_add(step).min(MAX_VALUE);
                if self.survival(g) < u || g == MAX_VALUE {
                    break;
                }
                lo = g;
                step *= 2;
            }
        } else {
            // gallop downward from g, keeping S(lo) ≥ u
            let mut step = 1u64;
            let mut hi = g;
            loop {
                let cand = hi.saturating_sub(step).max(lo);
                if cand == lo || self.survival(cand) >= u {
                    lo = cand;
                    break;
                }
                hi = cand;
                step *= 2;
            }
            g = hi;
        }
        // bisect on [lo, g): S(lo) ≥ u, S(g) < u (or g saturated)
        let mut hi = g;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.survival(mid) >= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if self.survival(hi) >= u {
            hi
        } else {
            lo
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u = 1.0 - rng.random::<f64>();
        self.invert(u)
    }
}

/// `n` draws from the discrete power law, reproducible from `seed`.
pub fn sample_discrete_powerlaw(alpha: f64, xmin: u64, n: usize, seed: u64) -> Result<Vec<u64>, SampleError> {
    if n == 0 {
        return Err(SampleError::Empty);
    }
    let dist = DiscretePowerLaw::new(alpha, xmin)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| dist.sample(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_errors() {
        assert_eq!(sample_discrete_powerlaw(2.5, 1, 0, 1), Err(SampleError::Empty));
        assert_eq!(sample_discrete_powerlaw(1.0, 1, 5, 1), Err(SampleError::Alpha(1.0)));
        assert_eq!(sample_discrete_powerlaw(2.0, 0, 5, 1), Err(SampleError::Xmin));
    }

    #[test]
    fn deterministic() {
        let a = sample_discrete_powerlaw(2.5, 3, 1000, 42).unwrap();
        let b = sample_discrete_powerlaw(2.5, 3, 1000, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|&x| x >= 3));
        assert_ne!(a, sample_discrete_powerlaw(2.5, 3, 1000, 43).unwrap());
    }

    #[test]
    fn inverse_is_exact_on_boundaries() {
        let d = DiscretePowerLaw::new(2.2, 2).unwrap();
        for x in [2u64, 3, 10, 1000, 1025, 1026, 5000, 123_456, 10_000_000] {
            let s = d.survival(x);
            assert_eq!(d.invert(s), x, "x={x}");
            // just below S(x) the answer is still x; just above it is x - 1
            if x > 2 {
                let above = s * (1.0 + 1e-9);
                assert_eq!(d.invert(above.min(1.0)), x - 1, "x={x}");
            }
        }
        assert_eq!(d.invert(1.0), 2);
    }

    #[test]
    fn survival_sums_pmf() {
        let d = DiscretePowerLaw::new(2.5, 5).unwrap();
        let partial: f64 = (5..2000u64).map(|x| d.pmf(x)).sum();
        assert!((1.0 - partial - d.survival(2000)).abs() < 1e-12);
        assert_eq!(d.pmf(4), 0.0);
        assert_eq!(d.cdf(4), 0.0);
    }
}
