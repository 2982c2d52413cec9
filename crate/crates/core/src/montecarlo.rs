//! Monte Carlo oracle: estimates each estimator's expectation by simulation
//! and scores the agreement with the closed-form value as a z-score.
//!
//! Replicates run on per-index RNG substreams and are reduced in replicate
//! order, so single- and multi-threaded runs with the same seed are
//! bit-identical.

use rayon::prelude::*;
use serde::Serialize;

use crate::bias::{expected_value, EstimatorId, DEFAULT_COMPOSITION_LIMIT};
use crate::error::{Error, Result};
use crate::estimators;
use crate::mixture::{substream, MixtureParams, Sample};
use crate::quad::QuadratureConfig;

/// Replicate statistics for one (estimator, n) cell.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MCReport {
    pub estimator: EstimatorId,
    pub replicates: usize,
    pub n: usize,
    pub mean: f64,
    pub standard_error: f64,
    pub exact: f64,
    pub z_score: f64,
    pub seed: u64,
}

fn evaluate(estimator: EstimatorId, sample: &Sample) -> Result<f64> {
    Ok(match estimator {
        EstimatorId::TheilT => estimators::theil_t_hat(sample),
        EstimatorId::TheilL => estimators::theil_l_hat(sample),
        EstimatorId::Atkinson1 => estimators::atkinson_1_hat(sample),
        EstimatorId::AtkinsonInf => estimators::atkinson_inf_hat(sample),
        EstimatorId::Vmr => estimators::vmr_hat(sample)?,
    })
}

/// Simulates `replicates` samples of size `n`, computes the estimator on
/// each, and compares the empirical mean against the exact expectation from
/// the bias engine.
pub fn run_mc(
    params: &MixtureParams,
    n: usize,
    estimator: EstimatorId,
    replicates: usize,
    seed: u64,
    cfg: &QuadratureConfig,
    composition_limit: u128,
) -> Result<MCReport> {
    if replicates < 100 {
        return Err(Error::InvalidConfig(format!(
            "need at least 100 replicates, got {replicates}"
        )));
    }
    let exact = expected_value(params, n, estimator, cfg, composition_limit)?;

    let values: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let sample = params.sample_with(n, &mut rng)?;
            evaluate(estimator, &sample)
        })
        .collect::<Result<_>>()?;

    let mean = values.iter().sum::<f64>() / replicates as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
        / (replicates as f64 - 1.0);
    let standard_error = (var / replicates as f64).sqrt();
    Ok(MCReport {
        estimator,
        replicates,
        n,
        mean,
        standard_error,
        exact,
        z_score: (mean - exact) / standard_error,
        seed,
    })
}

/// Convenience wrapper with default quadrature config and composition limit.
pub fn run_mc_default(
    params: &MixtureParams,
    n: usize,
    estimator: EstimatorId,
    replicates: usize,
    seed: u64,
) -> Result<MCReport> {
    run_mc(
        params,
        n,
        estimator,
        replicates,
        seed,
        &QuadratureConfig::default(),
        DEFAULT_COMPOSITION_LIMIT,
    )
}
