//! Distributional diagnostics for replica statistics.

use crate::ensembles::normal_cdf;
use crate::error::{Error, Result};
use crate::stats::{mean, pairwise_sum};

/// Highest moment order the harness reports.
pub const MAX_MOMENT_ORDER: usize = 8;

/// One-sample Kolmogorov–Smirnov distance to `N(0, variance)`:
/// `max_i max(i/m - Φ(x_(i)/σ), Φ(x_(i)/σ) - (i-1)/m)` over the order statistics.
pub fn ks_distance(samples: &[f64], variance: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("KS distance needs at least one sample"));
    }
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::invalid(format!("KS variance must be positive, got {variance}")));
    }
    let sigma = variance.sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = normal_cdf(x / sigma);
            let above = (i + 1) as f64 / m - cdf;
            let below = cdf - i as f64 / m;
            above.max(below)
        })
        .fold(0.0, f64::max);
    Ok(d.clamp(0.0, 1.0))
}

/// Central sample moments `(1/m) Σ (x - x̄)^k` for `k = 1..=max_order`.
pub fn empirical_moments(samples: &[f64], max_order: usize) -> Result<Vec<f64>> {
    if max_order == 0 || max_order > MAX_MOMENT_ORDER {
        return Err(Error::invalid(format!(
            "moment order must be in 1..={MAX_MOMENT_ORDER}, got {max_order}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::invalid("moments need at least one sample"));
    }
    let mu = mean(samples);
    let m = samples.len() as f64;
    let dev: Vec<f64> = samples.iter().map(|x| x - mu).collect();
    let mut power = vec![1.0; dev.len()];
    let mut out = Vec::with_capacity(max_order);
    for _ in 0..max_order {
        for (p, d) in power.iter_mut().zip(&dev) {
            *p *= d;
        }
        out.push(pairwise_sum(&power) / m);
    }
    Ok(out)
}

/// Moments of `(x - x̄)/s` with `s² = m_2`, orders `1..=8`.
/// All zero when the sample has no spread.
pub fn standardized_moments(samples: &[f64]) -> Result<Vec<f64>> {
    let central = empirical_moments(samples, MAX_MOMENT_ORDER)?;
    let m2 = central[1];
    if !(m2 > 0.0) {
        return Ok(vec![0.0; MAX_MOMENT_ORDER]);
    }
    let sd = m2.sqrt();
    Ok(central
        .iter()
        .enumerate()
        .map(|(i, c)| c / sd.powi(i as i32 + 1))
        .collect())
}

/// Delta-method standard errors of the standardized moments of orders
/// `1..=4`, from standardized moments `z_1..z_8` of a sample of size `m`.
///
/// With `z_0 = 1`, `z_2 = 1`:
/// `V_kk = z_{2k} - z_k² - 2k z_{k-1} z_{k+1} + k² z_{k-1}²`,
/// `C_k2 = z_{k+2} - z_k - k z_{k-1} z_3`, `V_22 = z_4 - 1`, and
/// `m Var(g_k) ≈ V_kk - k z_k C_k2 + (k²/4) z_k² V_22`.
pub fn standardized_moment_standard_errors(z: &[f64], m: usize) -> Vec<f64> {
    assert!(z.len() >= MAX_MOMENT_ORDER, "need standardized moments up to order 8");
    let at = |j: usize| if j == 0 { 1.0 } else { z[j - 1] };
    let v22 = at(4) - 1.0;
    (1..=4)
        .map(|k| {
            let kf = k as f64;
            let vkk = at(2 * k) - at(k).powi(2) - 2.0 * kf * at(k - 1) * at(k + 1)
                + kf * kf * at(k - 1).powi(2);
            let ck2 = at(k + 2) - at(k) - kf * at(k - 1) * at(3);
            let var = vkk - kf * at(k) * ck2 + 0.25 * kf * kf * at(k).powi(2) * v22;
            (var.max(0.0) / m as f64).sqrt()
        })
        .collect()
}
