//! Reproducible Monte Carlo experiments for the normalized trace statistic
//! `W = (Tr P(C_n) - mean) / √n`.
//!
//! Replica `r` always draws from stream `(master_seed, r)`, replicas share no
//! mutable state, and every reduction runs in replica-index order, so results
//! do not depend on the number of workers.

mod diagnostics;
mod stein;
mod studies;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circulant::{CirculantSample, TestPolynomial};
use crate::combinatorics::limiting_variance;
use crate::ensembles::{EnsembleSpec, RandomStream};
use crate::error::{Error, Result};
use crate::stats::{mean, sample_variance};

pub use diagnostics::{
    empirical_moments, ks_distance, standardized_moment_standard_errors, standardized_moments,
    MAX_MOMENT_ORDER,
};
pub use stein::{chatterjee_tv_bound, estimate_kappas, KappaEstimates, SteinEstimate};
pub use studies::{
    norm_scaling_study, variance_convergence_study, NormScalingRow, VarianceConvergenceRow,
};

/// Replica counts below this are flagged as low confidence.
pub const LOW_CONFIDENCE_REPLICAS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// Subtract the across-replica mean of the raw traces.
    #[default]
    SampleMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub replicas: usize,
    pub poly: TestPolynomial,
    pub ensemble: EnsembleSpec,
    pub master_seed: u64,
    pub centering: Centering,
    pub worker_count: usize,
}

impl ExperimentConfig {
    pub fn new(n: usize, replicas: usize, poly: TestPolynomial, ensemble: EnsembleSpec) -> Self {
        Self {
            n,
            replicas,
            poly,
            ensemble,
            master_seed: 0,
            centering: Centering::SampleMean,
            worker_count: default_worker_count(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.worker_count = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid(format!("n must be at least 2, got {}", self.n)));
        }
        if self.replicas < 2 {
            return Err(Error::invalid(format!(
                "replicas must be at least 2, got {}",
                self.replicas
            )));
        }
        if self.worker_count == 0 {
            return Err(Error::invalid("worker_count must be at least 1"));
        }
        Ok(())
    }

    pub(crate) fn stream(&self, replica: usize) -> RandomStream {
        RandomStream::new(self.master_seed, replica as u64)
    }

    /// Runs `f` over all replicas on `worker_count` threads; results come back
    /// in replica order.
    pub(crate) fn map_replicas<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(CirculantSample) -> Result<T> + Sync + Send,
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.worker_count)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
        pool.install(|| {
            (0..self.replicas)
                .into_par_iter()
                .map(|r| {
                    let sample = CirculantSample::build(&self.ensemble, self.n, self.stream(r))?;
                    f(sample)
                })
                .collect()
        })
    }
}

pub fn default_worker_count() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub n: usize,
    pub replicas: usize,
    pub centering: Centering,
    /// Below [`LOW_CONFIDENCE_REPLICAS`] replicas.
    pub low_confidence: bool,
    /// `σ²` of the limiting normal law.
    pub target_variance: f64,
    pub trace_mean: f64,
    pub trace_mean_standard_error: f64,
    /// Unbiased sample variance of `W`.
    pub variance: f64,
    pub variance_standard_error: f64,
    /// Moments of the standardized `W`, orders 1 to 8.
    pub standardized_moments: Vec<f64>,
    /// Standard errors of standardized moments 1 to 4.
    pub moment_standard_errors: Vec<f64>,
    /// KS distance of `W` to `N(0, target_variance)`.
    pub ks_distance: f64,
    pub statistic: Vec<f64>,
    #[serde(skip)]
    pub raw_traces: Vec<f64>,
    pub wall_time_seconds: f64,
}

impl ExperimentSummary {
    /// Standardized moment of order `k` (1-based).
    pub fn standardized_moment(&self, k: usize) -> f64 {
        self.standardized_moments[k - 1]
    }

    pub fn moment_standard_error(&self, k: usize) -> f64 {
        self.moment_standard_errors[k - 1]
    }
}

/// Simulates `replicas` independent matrices and summarizes
/// `W_r = (T_r - T̄) / √n` with `T_r = Tr P(C_n)` for replica `r`.
pub fn run_clt_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    config.validate()?;
    let started = Instant::now();
    let poly = &config.poly;
    let raw_traces = config.map_replicas(|sample| sample.trace_polynomial(poly))?;
    summarize(config, raw_traces, started)
}

fn summarize(
    config: &ExperimentConfig,
    raw_traces: Vec<f64>,
    started: Instant,
) -> Result<ExperimentSummary> {
    let m = raw_traces.len();
    let target_variance = limiting_variance(&config.poly)?.value;
    let trace_mean = mean(&raw_traces);
    let trace_variance = sample_variance(&raw_traces);
    let sqrt_n = (config.n as f64).sqrt();
    let statistic: Vec<f64> = raw_traces.iter().map(|t| (t - trace_mean) / sqrt_n).collect();

    let variance = sample_variance(&statistic);
    let central = empirical_moments(&statistic, 4)?;
    let variance_se = ((central[3] - central[1] * central[1]).max(0.0) / m as f64).sqrt();
    let z = standardized_moments(&statistic)?;
    let moment_se = standardized_moment_standard_errors(&z, m);
    let ks = ks_distance(&statistic, target_variance)?;

    Ok(ExperimentSummary {
        n: config.n,
        replicas: m,
        centering: config.centering,
        low_confidence: m < LOW_CONFIDENCE_REPLICAS,
        target_variance,
        trace_mean,
        trace_mean_standard_error: (trace_variance / m as f64).sqrt(),
        variance,
        variance_standard_error: variance_se,
        standardized_moments: z,
        moment_standard_errors: moment_se,
        ks_distance: ks,
        statistic,
        raw_traces,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    })
}
