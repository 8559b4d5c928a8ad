//! Experiment configuration documents (TOML).
//!
//! ```toml
//! n = 512
//! poly = [0, 0, 1]        # a_0, a_1, a_2, ...; a_0 and a_1 must be zero
//! family = "gaussian"
//! seed = 7
//! replicas = 2000         # optional
//! worker_count = 8        # optional, defaults to available parallelism
//! blend = 0.5             # optional, custom_smooth only
//! ```

use serde::{Deserialize, Serialize};

use crate::circulant::TestPolynomial;
use crate::ensembles::{EnsembleSpec, Family};
use crate::error::{Error, Result};
use crate::harness::{default_worker_count, Centering, ExperimentConfig};

pub const DEFAULT_REPLICAS: usize = 2000;

/// Raw document; every key optional so that missing keys are reported by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blend: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worker_count: Option<usize>,
}

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    /// Fills defaults and validates.
    pub fn into_config(self) -> Result<ExperimentConfig> {
        let n = self.n.ok_or_else(|| Error::Config("missing required key `n`".into()))?;
        let dense = self
            .poly
            .ok_or_else(|| Error::Config("missing required key `poly`".into()))?;
        let poly = parse_dense_poly(&dense)?;

        let family: Family = self.family.as_deref().unwrap_or("gaussian").parse()?;
        let ensemble = match (family, self.blend) {
            (Family::CustomSmooth, Some(w)) => EnsembleSpec::custom_smooth(w)?,
            (_, Some(_)) => {
                return Err(Error::Config(format!(
                    "key `blend` only applies to custom_smooth, not {family}"
                )))
            }
            (f, None) => EnsembleSpec::from_family(f),
        };

        let config = ExperimentConfig {
            n,
            replicas: self.replicas.unwrap_or(DEFAULT_REPLICAS),
            poly,
            ensemble,
            master_seed: self.seed.unwrap_or(0),
            centering: Centering::SampleMean,
            worker_count: self.worker_count.unwrap_or_else(default_worker_count),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_config(config: &ExperimentConfig) -> Self {
        Self {
            n: Some(config.n),
            poly: Some(config.poly.to_dense()),
            family: Some(config.ensemble.family().to_string()),
            blend: config.ensemble.blend(),
            seed: Some(config.master_seed),
            replicas: Some(config.replicas),
            worker_count: Some(config.worker_count),
        }
    }
}

pub(crate) fn parse_dense_poly(dense: &[f64]) -> Result<TestPolynomial> {
    if dense.len() >= 2 && (dense[0] != 0.0 || dense[1] != 0.0) {
        return Err(Error::Config(format!(
            "poly has a_0 = {}, a_1 = {}: the constant and degree-one terms must be zero \
             (only terms of degree >= 2 are allowed)",
            dense[0], dense[1]
        )));
    }
    TestPolynomial::from_dense(dense).map_err(|e| Error::Config(format!("poly: {e}")))
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    ConfigDocument::parse(text)?.into_config()
}

/// Normalized TOML for a config, with every default made explicit.
pub fn emit_config(config: &ExperimentConfig) -> String {
    toml::to_string(&ConfigDocument::from_config(config)).expect("config document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let c = parse_config("n = 512\npoly = [0, 0, 1]\nfamily = \"gaussian\"\nseed = 7\n")
            .unwrap();
        assert_eq!(c.n, 512);
        assert_eq!(c.poly, TestPolynomial::monomial(2).unwrap());
        assert_eq!(c.replicas, DEFAULT_REPLICAS);
        assert_eq!(c.master_seed, 7);
        assert_eq!(c.ensemble, EnsembleSpec::gaussian());
        assert!(c.worker_count >= 1);
    }

    #[test]
    fn degree_one_rejected() {
        let err = parse_config("n = 8\npoly = [0, 1, 1]\n").unwrap_err();
        assert!(err.to_string().contains("degree >= 2"), "{err}");
        assert!(parse_config("n = 8\npoly = [1, 0, 1]\n").is_err());
    }

    #[test]
    fn missing_keys_named() {
        let err = parse_config("poly = [0, 0, 1]\n").unwrap_err();
        assert!(err.to_string().contains("`n`"));
        let err = parse_config("n = 4\n").unwrap_err();
        assert!(err.to_string().contains("`poly`"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_config("n = 8\npoly = [0, 0, 1]\nreplica = 5\n").unwrap_err();
        assert!(err.to_string().contains("replica"), "{err}");
    }

    #[test]
    fn bad_values() {
        assert!(parse_config("n = 8\npoly = [0, 0, 1]\nfamily = \"cauchy\"\n").is_err());
        assert!(parse_config("n = 1\npoly = [0, 0, 1]\n").is_err());
        assert!(parse_config("n = 8\npoly = [0, 0, 1]\nblend = 0.5\n").is_err());
        assert!(parse_config("n = 8\npoly = [0, 0]\n").is_err());
        assert!(parse_config("n = = 8").is_err());
    }

    #[test]
    fn round_trip_preserves_semantics() {
        let text = "n = 64\npoly = [0, 0, 1.5, 0, -2]\nfamily = \"custom_smooth\"\nblend = 0.25\nseed = 3\nreplicas = 40\nworker_count = 3\n";
        let c = parse_config(text).unwrap();
        let emitted = emit_config(&c);
        let again = parse_config(&emitted).unwrap();
        assert_eq!(c, again);
        assert_eq!(emit_config(&again), emitted);
    }
}
