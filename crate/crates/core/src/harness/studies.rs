use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_clt_experiment, ExperimentConfig};
use crate::circulant::CirculantSample;
use crate::ensembles::{EnsembleSpec, RandomStream};
use crate::error::{Error, Result};
use crate::stats::mean;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormScalingRow {
    pub n: usize,
    pub trials: usize,
    /// Largest `‖C_n‖ / √(log n)` over the trials.
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

/// `‖C_n‖ / √(log n)` over `trials` independent matrices per size.
///
/// Trial `t` at size `n` uses replica index `(n << 32) | t`, so each size has
/// its own streams.
pub fn norm_scaling_study(
    spec: &EnsembleSpec,
    sizes: &[usize],
    trials: usize,
    master_seed: u64,
    worker_count: usize,
) -> Result<Vec<NormScalingRow>> {
    if !spec.symmetric() {
        return Err(Error::NotSymmetric(spec.family()));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial per size"));
    }
    if let Some(bad) = sizes.iter().find(|&&n| n < 2 || n as u64 > u32::MAX as u64) {
        return Err(Error::invalid(format!("sizes must lie in 2..=2^32-1, got {bad}")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    sizes
        .iter()
        .map(|&n| {
            let log_root = (n as f64).ln().sqrt();
            let ratios: Vec<f64> = pool.install(|| {
                (0..trials)
                    .into_par_iter()
                    .map(|t| {
                        let stream = RandomStream::new(master_seed, ((n as u64) << 32) | t as u64);
                        CirculantSample::build(spec, n, stream)
                            .map(|s| s.spectral_norm() / log_root)
                    })
                    .collect::<Result<Vec<f64>>>()
            })?;
            Ok(NormScalingRow {
                n,
                trials,
                max_ratio: ratios.iter().copied().fold(0.0, f64::max),
                mean_ratio: mean(&ratios),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceConvergenceRow {
    pub n: usize,
    pub variance: f64,
    pub variance_standard_error: f64,
    pub target_variance: f64,
    /// `|variance - target_variance|`
    pub gap: f64,
    pub trace_mean: f64,
    pub trace_mean_standard_error: f64,
}

/// Re-runs `base` at each size and tabulates `Var(W)` against its limit.
pub fn variance_convergence_study(
    base: &ExperimentConfig,
    sizes: &[usize],
) -> Result<Vec<VarianceConvergenceRow>> {
    if sizes.len() < 2 {
        return Err(Error::invalid("a convergence study needs at least two sizes"));
    }
    sizes
        .iter()
        .map(|&n| {
            let config = ExperimentConfig { n, ..base.clone() };
            let s = run_clt_experiment(&config)?;
            Ok(VarianceConvergenceRow {
                n,
                variance: s.variance,
                variance_standard_error: s.variance_standard_error,
                target_variance: s.target_variance,
                gap: (s.variance - s.target_variance).abs(),
                trace_mean: s.trace_mean,
                trace_mean_standard_error: s.trace_mean_standard_error,
            })
        })
        .collect()
}
