//! Monte Carlo validation of the corrected distribution against the exact
//! finite-sample law of the Pearson statistic.
//!
//! Sampling is block based: replicate block b is generated by an independent
//! ChaCha stream derived from (seed, b), and blocks are concatenated in block
//! order. Results therefore depend only on the seed and the replicate count,
//! not on how rayon schedules the blocks across workers.

use crate::corrections::{compute_constants, ModelError};
use crate::distribution::{chi2_cdf, chi2_quantile, CorrectedDistribution, DistributionError};
use crate::models::{multinomial_model, MultinomialSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Replicates per RNG stream. Fixed so that a given (seed, replicates) pair
/// always produces the same samples.
pub const BLOCK_SIZE: usize = 8192;

#[derive(Debug, Error)]
pub enum MonteCarloError {
    #[error("replicates must be positive")]
    NoReplicates,
    #[error("empirical cdf needs at least one sample")]
    NoSamples,
    #[error("evaluation grid must be sorted ascending")]
    GridNotSorted,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
}

/// One multinomial draw via the conditional binomial chain, returned as the
/// Pearson statistic sum((N_i - n p_i)^2 / (n p_i)).
fn pearson_draw(probs: &[f64], n: u64, rng: &mut ChaCha8Rng) -> f64 {
    let m = probs.len();
    let mut remaining = n;
    let mut rest = 1.0;
    let mut t = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        let count = if i + 1 == m {
            remaining
        } else {
            // rest can undershoot p by rounding near the end of the chain.
            let q = (p / rest).clamp(0.0, 1.0);
            let draw = Binomial::new(remaining, q)
                .expect("clamped success probability is valid")
                .sample(rng);
            remaining -= draw;
            rest -= p;
            draw
        };
        let expected = n as f64 * p;
        let diff = count as f64 - expected;
        t += diff * diff / expected;
    }
    t
}

/// Pearson statistics for `replicates` independent multinomial experiments.
/// Deterministic in (spec, replicates, seed) and independent of the rayon
/// worker count.
pub fn sample_pearson(spec: &MultinomialSpec, replicates: usize, seed: u64) -> Vec<f64> {
    let blocks = replicates.div_ceil(BLOCK_SIZE);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = BLOCK_SIZE.min(replicates - b * BLOCK_SIZE);
            (0..len)
                .map(|_| pearson_draw(spec.probs(), spec.n(), &mut rng))
                .collect::<Vec<f64>>()
        })
        .collect::<Vec<_>>()
        .concat()
}

/// Fraction of samples at or below each grid point.
pub fn empirical_cdf(samples: &[f64], grid: &[f64]) -> Result<Vec<f64>, MonteCarloError> {
    if samples.is_empty() {
        return Err(MonteCarloError::NoSamples);
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(MonteCarloError::GridNotSorted);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total = sorted.len() as f64;
    Ok(grid
        .iter()
        .map(|&g| sorted.partition_point(|&x| x <= g) as f64 / total)
        .collect())
}

/// Chi-squared quantiles at levels 0.05, 0.10, ..., 0.95. Level-based grid
/// points fall between lattice atoms of the finite-sample statistic instead
/// of on top of them.
pub fn default_grid(k: u32) -> Vec<f64> {
    (1..=19)
        .map(|i| {
            chi2_quantile(f64::from(i) * 0.05, k)
                .expect("interior quantile levels always converge")
        })
        .collect()
}

/// Side-by-side empirical, baseline, and corrected CDF values on a grid,
/// with sup-norm errors of both approximations.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalComparison {
    pub grid: Vec<f64>,
    pub empirical: Vec<f64>,
    pub baseline: Vec<f64>,
    pub corrected: Vec<f64>,
    pub baseline_error: f64,
    pub corrected_error: f64,
    pub replicates: usize,
    pub seed: u64,
    pub mc_noise: f64,
}

/// Runs the full comparison: sample the exact statistic, evaluate both
/// approximations, report sup-norm errors. `grid` of `None` selects the
/// default quantile grid for the model's degrees of freedom.
pub fn compare(
    spec: &MultinomialSpec,
    replicates: usize,
    seed: u64,
    grid: Option<Vec<f64>>,
) -> Result<EmpiricalComparison, MonteCarloError> {
    if replicates == 0 {
        return Err(MonteCarloError::NoReplicates);
    }
    let constants = compute_constants(&multinomial_model(spec))?;
    let k = constants.k;
    let dist = CorrectedDistribution::new(constants);
    let grid = match grid {
        Some(g) => {
            if g.windows(2).any(|w| w[0] > w[1]) {
                return Err(MonteCarloError::GridNotSorted);
            }
            g
        }
        None => default_grid(k),
    };
    let samples = sample_pearson(spec, replicates, seed);
    let empirical = empirical_cdf(&samples, &grid)?;
    let baseline: Vec<f64> = grid.iter().map(|&u| chi2_cdf(u, k)).collect();
    let corrected: Vec<f64> = grid.iter().map(|&u| dist.cdf(u)).collect();
    let sup = |approx: &[f64]| {
        approx
            .iter()
            .zip(&empirical)
            .map(|(a, e)| (a - e).abs())
            .fold(0.0, f64::max)
    };
    Ok(EmpiricalComparison {
        baseline_error: sup(&baseline),
        corrected_error: sup(&corrected),
        grid,
        empirical,
        baseline,
        corrected,
        replicates,
        seed,
        mc_noise: 0.5 / (replicates as f64).sqrt(),
    })
}
