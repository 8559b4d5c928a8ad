//! Monte Carlo estimates of the gradient and Hessian functionals entering the
//! second-order Poincaré total-variation bound
//! `d_TV(W, Z) <= 2√5 (c1 c2 κ₀ + c1³ κ₁ κ₂) / σ²`
//! for `W = g(X) = Tr P(C_n)`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::combinatorics::limiting_variance;
use crate::ensembles::Smoothness;
use crate::error::{Error, Result};
use crate::stats::{mean, pairwise_sum, sample_variance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimates {
    pub n: usize,
    pub replicas: usize,
    /// `(mean_r Σ_k |∂g/∂X_k|⁴)^{1/2}`
    pub kappa0: f64,
    /// `(mean_r ‖∇g‖₂⁴)^{1/4}`
    pub kappa1: f64,
    /// `(mean_r (m2(‖C‖)/n)⁴)^{1/4}`
    pub kappa2: f64,
    /// `(mean_r m2(‖C‖)⁴)^{1/4}`, from a majorant that dominates `‖∇²g‖`.
    pub kappa2_majorant: f64,
    /// Empirical `Var(Tr P(C_n))`, not divided by `n`.
    pub sigma2: f64,
    /// `n σ²` with `σ²` the limiting variance.
    pub sigma2_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinEstimate {
    pub c1: f64,
    pub c2: f64,
    pub kappas: KappaEstimates,
    /// Bound assembled from `kappa2`.
    pub tv_bound: f64,
    /// Same bound with `kappa2_majorant` in place of `kappa2`.
    pub tv_bound_majorant: f64,
    pub wall_time_seconds: f64,
}

fn assemble(s: Smoothness, kappa0: f64, kappa1: f64, kappa2: f64, sigma2: f64) -> f64 {
    2.0 * 5f64.sqrt() * (s.c1 * s.c2 * kappa0 + s.c1.powi(3) * kappa1 * kappa2) / sigma2
}

fn require_stein_hypotheses(config: &ExperimentConfig) -> Result<Smoothness> {
    let smooth = config.ensemble.require_smooth()?;
    if !config.ensemble.symmetric() {
        return Err(Error::NotSymmetric(config.ensemble.family()));
    }
    Ok(smooth)
}

struct ReplicaTerms {
    trace: f64,
    fourth_power_sum: f64,
    gradient_norm_fourth: f64,
    spectral_norm: f64,
}

/// Per-replica gradient functionals, averaged in replica order.
pub fn estimate_kappas(config: &ExperimentConfig) -> Result<KappaEstimates> {
    config.validate()?;
    require_stein_hypotheses(config)?;
    let poly = &config.poly;
    let terms = config.map_replicas(|sample| {
        let grad = sample.gradient_trace_polynomial(poly)?;
        let squares: Vec<f64> = grad.iter().map(|g| g * g).collect();
        let fourths: Vec<f64> = squares.iter().map(|s| s * s).collect();
        let norm2 = pairwise_sum(&squares);
        Ok(ReplicaTerms {
            trace: sample.trace_polynomial(poly)?,
            fourth_power_sum: pairwise_sum(&fourths),
            gradient_norm_fourth: norm2 * norm2,
            spectral_norm: sample.spectral_norm(),
        })
    })?;

    let collect = |f: &dyn Fn(&ReplicaTerms) -> f64| terms.iter().map(f).collect::<Vec<f64>>();
    let n = config.n as f64;
    let majorant_fourth = collect(&|t| poly.majorant(t.spectral_norm).powi(4));
    let scaled_fourth: Vec<f64> = majorant_fourth.iter().map(|v| v / n.powi(4)).collect();

    Ok(KappaEstimates {
        n: config.n,
        replicas: config.replicas,
        kappa0: mean(&collect(&|t| t.fourth_power_sum)).sqrt(),
        kappa1: mean(&collect(&|t| t.gradient_norm_fourth)).powf(0.25),
        kappa2: mean(&scaled_fourth).powf(0.25),
        kappa2_majorant: mean(&majorant_fourth).powf(0.25),
        sigma2: sample_variance(&collect(&|t| t.trace)),
        sigma2_limit: n * limiting_variance(poly)?.value,
    })
}

/// The total-variation bound from the κ estimates and the empirical trace
/// variance. Requires a smooth, symmetric ensemble.
pub fn chatterjee_tv_bound(config: &ExperimentConfig) -> Result<SteinEstimate> {
    let started = Instant::now();
    let smooth = require_stein_hypotheses(config)?;
    let k = estimate_kappas(config)?;
    if !(k.sigma2 > 0.0) {
        return Err(Error::invalid("trace variance is zero; the bound is undefined"));
    }
    let tv_bound = assemble(smooth, k.kappa0, k.kappa1, k.kappa2, k.sigma2);
    let tv_bound_majorant = assemble(smooth, k.kappa0, k.kappa1, k.kappa2_majorant, k.sigma2);
    Ok(SteinEstimate {
        c1: smooth.c1,
        c2: smooth.c2,
        kappas: k,
        tv_bound,
        tv_bound_majorant,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    })
}
