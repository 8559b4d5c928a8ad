//! Central limit theorems for linear eigenvalue statistics of random
//! circulant matrices `C_n = circ(X_0, …, X_{n-1}) / √n`.
//!
//! The crate covers the input ensembles, traces and spectra of circulant
//! samples, the exact lattice counting behind the limiting variance, a
//! deterministic Monte Carlo harness, and CSV/JSON/text reporting.
//!
//! ```
//! use circulant_clt::{limiting_variance, TestPolynomial};
//!
//! let p = TestPolynomial::from_dense(&[0.0, 0.0, 1.0, 1.0]).unwrap();
//! assert_eq!(limiting_variance(&p).unwrap().value, 8.0);
//! ```

pub mod circulant;
pub mod cli;
pub mod combinatorics;
pub mod config;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod report;
pub mod stats;

pub use circulant::{CirculantSample, TestPolynomial, DEFAULT_ENUMERATION_BUDGET};
pub use combinatorics::{
    count_slice_bruteforce, count_slice_distinct, count_slice_exact, density_table, f_density,
    limiting_variance, limiting_variance_exact, slice_density, LatticeSliceCount,
    LimitingVariance,
};
pub use config::{emit_config, parse_config, ConfigDocument};
pub use ensembles::{EnsembleSpec, Family, MomentReport, RandomStream, Smoothness};
pub use error::{Error, Result};
pub use harness::{
    chatterjee_tv_bound, estimate_kappas, norm_scaling_study, run_clt_experiment,
    variance_convergence_study, Centering, ExperimentConfig, ExperimentSummary, KappaEstimates,
    SteinEstimate,
};
pub use report::{emit_report, ReportFormat, SummaryDocument};
