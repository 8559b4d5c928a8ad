//! Standardized input laws for the circulant entries and reproducible
//! per-replica random streams.
//!
//! Every family has mean 0 and variance 1. Smooth families are laws of `u(Z)`
//! with `Z` standard normal and `|u'| <= c1`, `|u''| <= c2`; for those the
//! transform `u` is exposed through [`EnsembleSpec::smooth_transform_value`].

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::stats::pairwise_sum;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    Rademacher,
    UniformSymmetric,
    /// Standardized blend `(1-w) z + w * 2√3 (Φ(z) - 1/2)` of the gaussian and
    /// uniform transforms, applied to a single standard normal.
    CustomSmooth,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Gaussian,
        Family::Rademacher,
        Family::UniformSymmetric,
        Family::CustomSmooth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Rademacher => "rademacher",
            Family::UniformSymmetric => "uniform_symmetric",
            Family::CustomSmooth => "custom_smooth",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown family `{s}` (expected one of gaussian, rademacher, \
                     uniform_symmetric, custom_smooth)"
                ))
            })
    }
}

/// Bounds `|u'| <= c1` and `|u''| <= c2` of the smooth representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Smoothness {
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    family: Family,
    subgaussian_sigma: f64,
    smoothness: Option<Smoothness>,
    symmetric: bool,
    /// Only meaningful for `CustomSmooth`.
    blend: f64,
}

impl EnsembleSpec {
    pub fn gaussian() -> Self {
        Self {
            family: Family::Gaussian,
            subgaussian_sigma: 1.0,
            smoothness: Some(Smoothness { c1: 1.0, c2: 0.0 }),
            symmetric: true,
            blend: 0.0,
        }
    }

    pub fn rademacher() -> Self {
        Self {
            family: Family::Rademacher,
            subgaussian_sigma: 1.0,
            smoothness: None,
            symmetric: true,
            blend: 0.0,
        }
    }

    /// Uniform on `[-√3, √3]`. The MGF `sinh(at)/(at)` is dominated by
    /// `exp(a²t²/6)`, so the law is 1-subgaussian.
    pub fn uniform_symmetric() -> Self {
        Self {
            family: Family::UniformSymmetric,
            subgaussian_sigma: 1.0,
            smoothness: Some(Smoothness {
                c1: 2.0 * SQRT_3 / (2.0 * PI).sqrt(),
                c2: 2.0 * SQRT_3 / (2.0 * PI * E).sqrt(),
            }),
            symmetric: true,
            blend: 1.0,
        }
    }

    /// Blend weight `w` in `[0, 1]`: 0 is the gaussian transform, 1 the uniform one.
    ///
    /// The transform is `c1`-Lipschitz, so by Gaussian concentration the law
    /// is `c1`-subgaussian.
    pub fn custom_smooth(blend: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&blend) {
            return Err(Error::invalid(format!(
                "custom_smooth blend must lie in [0, 1], got {blend}"
            )));
        }
        let scale = blend_scale(blend);
        let c1 = ((1.0 - blend) + blend * 2.0 * SQRT_3 / (2.0 * PI).sqrt()) / scale;
        let c2 = blend * 2.0 * SQRT_3 / (2.0 * PI * E).sqrt() / scale;
        Ok(Self {
            family: Family::CustomSmooth,
            subgaussian_sigma: c1,
            smoothness: Some(Smoothness { c1, c2 }),
            symmetric: true,
            blend,
        })
    }

    /// Default spec for a family; `custom_smooth` uses an even blend.
    pub fn from_family(family: Family) -> Self {
        match family {
            Family::Gaussian => Self::gaussian(),
            Family::Rademacher => Self::rademacher(),
            Family::UniformSymmetric => Self::uniform_symmetric(),
            Family::CustomSmooth => Self::custom_smooth(0.5).expect("0.5 is a valid blend"),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn subgaussian_sigma(&self) -> f64 {
        self.subgaussian_sigma
    }

    pub fn smoothness(&self) -> Option<Smoothness> {
        self.smoothness
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn blend(&self) -> Option<f64> {
        (self.family == Family::CustomSmooth).then_some(self.blend)
    }

    pub(crate) fn require_smooth(&self) -> Result<Smoothness> {
        self.smoothness.ok_or(Error::NotSmooth(self.family))
    }

    /// `u(z)` of the smooth representation.
    pub fn smooth_transform_value(&self, z: f64) -> Result<f64> {
        match self.family {
            Family::Gaussian => Ok(z),
            Family::Rademacher => Err(Error::NotSmooth(self.family)),
            Family::UniformSymmetric => Ok(2.0 * SQRT_3 * (normal_cdf(z) - 0.5)),
            Family::CustomSmooth => Ok(blend_transform(self.blend, z)),
        }
    }

    /// One draw from the law.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            Family::Gaussian => rng.sample(StandardNormal),
            Family::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Family::UniformSymmetric => rng.random_range(-SQRT_3..=SQRT_3),
            Family::CustomSmooth => blend_transform(self.blend, rng.sample(StandardNormal)),
        }
    }

    /// `n` independent draws from the stream. Deterministic in `(self, n, stream)`.
    pub fn sample_sequence(&self, n: usize, stream: RandomStream) -> Vec<f64> {
        let mut rng = stream.rng();
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }

    /// Empirical mean, variance and absolute moments `E|X|^k` for
    /// `k = 1..=k_max`, each with a standard error.
    pub fn verify_standardization(
        &self,
        m: usize,
        stream: RandomStream,
        k_max: u32,
    ) -> Result<MomentReport> {
        if m < 100 {
            return Err(Error::invalid(format!("need at least 100 samples, got {m}")));
        }
        if k_max < 3 {
            return Err(Error::invalid(format!("k_max must be at least 3, got {k_max}")));
        }
        let xs = self.sample_sequence(m, stream);
        let mf = m as f64;

        let mean = pairwise_sum(&xs) / mf;
        let centered: Vec<f64> = xs.iter().map(|x| x - mean).collect();
        let c2: Vec<f64> = centered.iter().map(|d| d * d).collect();
        let c4: Vec<f64> = c2.iter().map(|d| d * d).collect();
        let mu2 = pairwise_sum(&c2) / mf;
        let mu4 = pairwise_sum(&c4) / mf;
        let variance = pairwise_sum(&c2) / (mf - 1.0);

        let absolute = (1..=k_max)
            .map(|k| {
                let powers: Vec<f64> = xs.iter().map(|x| x.abs().powi(k as i32)).collect();
                let value = pairwise_sum(&powers) / mf;
                let sq: Vec<f64> = powers.iter().map(|p| (p - value) * (p - value)).collect();
                let se = (pairwise_sum(&sq) / (mf - 1.0) / mf).sqrt();
                MomentEstimate { order: k, value, standard_error: se }
            })
            .collect();

        Ok(MomentReport {
            samples: m,
            mean,
            mean_standard_error: (variance / mf).sqrt(),
            variance,
            variance_standard_error: ((mu4 - mu2 * mu2).max(0.0) / mf).sqrt(),
            absolute_moments: absolute,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub order: u32,
    pub value: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub samples: usize,
    pub mean: f64,
    pub mean_standard_error: f64,
    pub variance: f64,
    pub variance_standard_error: f64,
    pub absolute_moments: Vec<MomentEstimate>,
}

impl MomentReport {
    pub fn absolute_moment(&self, order: u32) -> Option<&MomentEstimate> {
        self.absolute_moments.iter().find(|m| m.order == order)
    }
}

/// Counter-addressed substream: ChaCha keyed by the master seed, with the
/// replica index selecting the 64-bit stream id. Draws for a replica never
/// depend on which other replicas ran or in what order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStream {
    pub master_seed: u64,
    pub replica_index: u64,
}

impl RandomStream {
    pub fn new(master_seed: u64, replica_index: u64) -> Self {
        Self { master_seed, replica_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.replica_index);
        rng
    }
}

pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

// Var of (1-w) Z + w U(Z), using E[Z * 2√3(Φ(Z) - 1/2)] = 2√3 E[φ(Z)] = √(3/π).
fn blend_scale(w: f64) -> f64 {
    let a = 1.0 - w;
    (a * a + w * w + 2.0 * a * w * (3.0 / PI).sqrt()).sqrt()
}

fn blend_transform(w: f64, z: f64) -> f64 {
    ((1.0 - w) * z + w * 2.0 * SQRT_3 * (normal_cdf(z) - 0.5)) / blend_scale(w)
}
