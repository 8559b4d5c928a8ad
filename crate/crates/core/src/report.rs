//! CSV, JSON and text renderings of experiment results.
//!
//! Floats in CSV and text output carry 17 significant digits; JSON uses the
//! shortest representation that parses back to the same `f64`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::combinatorics::LatticeSliceCount;
use crate::error::Result;
use crate::harness::{
    Centering, ExperimentConfig, ExperimentSummary, NormScalingRow, SteinEstimate,
};

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Text,
}

/// Semantic configuration echoed into reports. The worker count is left out:
/// it does not affect any result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub replicas: usize,
    pub poly: Vec<f64>,
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blend: Option<f64>,
    pub subgaussian_sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    pub seed: u64,
    pub centering: Centering,
}

impl From<&ExperimentConfig> for ConfigEcho {
    fn from(c: &ExperimentConfig) -> Self {
        let smooth = c.ensemble.smoothness();
        Self {
            n: c.n,
            replicas: c.replicas,
            poly: c.poly.to_dense(),
            family: c.ensemble.family().to_string(),
            blend: c.ensemble.blend(),
            subgaussian_sigma: c.ensemble.subgaussian_sigma(),
            c1: smooth.map(|s| s.c1),
            c2: smooth.map(|s| s.c2),
            seed: c.master_seed,
            centering: c.centering,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryDocument {
    pub library_version: String,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<ExperimentSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stein: Option<SteinEstimate>,
}

impl SummaryDocument {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            library_version: LIBRARY_VERSION.to_string(),
            config: config.into(),
            summary: None,
            stein: None,
        }
    }

    pub fn with_summary(mut self, summary: ExperimentSummary) -> Self {
        self.summary = Some(summary);
        self
    }

    pub fn with_stein(mut self, stein: SteinEstimate) -> Self {
        self.stein = Some(stein);
        self
    }
}

/// 17 significant digits; parses back to the same value.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn emit_report(doc: &SummaryDocument, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Csv => samples_csv(doc.summary.as_ref()),
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(doc)?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Text => Ok(text_report(doc).into_bytes()),
    }
}

fn samples_csv(summary: Option<&ExperimentSummary>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["replica", "raw_trace", "W"])?;
    if let Some(s) = summary {
        for (r, (w_r, t)) in s.statistic.iter().zip(&s.raw_traces).enumerate() {
            w.write_record([r.to_string(), fmt_float(*t), fmt_float(*w_r)])?;
        }
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Generic CSV table.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    finish(w)
}

pub fn density_table_csv(rows: &[LatticeSliceCount]) -> Result<Vec<u8>> {
    use num_traits::ToPrimitive;
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let f = |q: &num_rational::BigRational| fmt_float(q.to_f64().unwrap_or(f64::NAN));
            vec![
                r.p.to_string(),
                r.s.to_string(),
                r.n.to_string(),
                r.count.to_string(),
                f(&r.density),
                f(&r.f_density),
                f(&r.gap()),
            ]
        })
        .collect();
    table_csv(&["p", "s", "n", "count", "density", "f_density", "gap"], &body)
}

pub fn norm_scaling_csv(rows: &[NormScalingRow]) -> Result<Vec<u8>> {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.trials.to_string(),
                fmt_float(r.max_ratio),
                fmt_float(r.mean_ratio),
            ]
        })
        .collect();
    table_csv(&["n", "trials", "max_ratio", "mean_ratio"], &body)
}

/// Aligned `name  value  [target]` lines.
pub fn aligned(rows: &[(String, String, String)]) -> String {
    let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (a, b, c) in rows {
        let line = format!("{a:<w0$}  {b:>w1$}  {c}");
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn text_report(doc: &SummaryDocument) -> String {
    let c = &doc.config;
    let mut rows = vec![
        ("quantity".to_string(), "empirical".to_string(), "target".to_string()),
        ("n".into(), c.n.to_string(), String::new()),
        ("replicas".into(), c.replicas.to_string(), String::new()),
        ("family".into(), c.family.clone(), String::new()),
        ("seed".into(), c.seed.to_string(), String::new()),
    ];
    if let Some(s) = &doc.summary {
        rows.push(("variance of W".into(), fmt_float(s.variance), fmt_float(s.target_variance)));
        rows.push(("variance std. error".into(), fmt_float(s.variance_standard_error), String::new()));
        rows.push(("mean raw trace".into(), fmt_float(s.trace_mean), String::new()));
        rows.push(("mean raw trace std. error".into(), fmt_float(s.trace_mean_standard_error), String::new()));
        rows.push(("KS distance".into(), fmt_float(s.ks_distance), String::new()));
        for k in 3..=4 {
            let target = if k == 3 { 0.0 } else { 3.0 };
            rows.push((
                format!("standardized moment {k}"),
                fmt_float(s.standardized_moment(k)),
                fmt_float(target),
            ));
        }
        if s.low_confidence {
            rows.push(("warning".into(), "low confidence (few replicas)".into(), String::new()));
        }
    }
    if let Some(st) = &doc.stein {
        let k = &st.kappas;
        rows.push(("kappa0".into(), fmt_float(k.kappa0), String::new()));
        rows.push(("kappa1".into(), fmt_float(k.kappa1), String::new()));
        rows.push(("kappa2".into(), fmt_float(k.kappa2), String::new()));
        rows.push(("kappa2 (majorant)".into(), fmt_float(k.kappa2_majorant), String::new()));
        rows.push(("Var Tr P(C)".into(), fmt_float(k.sigma2), fmt_float(k.sigma2_limit)));
        rows.push(("TV bound".into(), fmt_float(st.tv_bound), String::new()));
        rows.push(("TV bound (majorant)".into(), fmt_float(st.tv_bound_majorant), String::new()));
    }
    aligned(&rows)
}

/// Writes `bytes` to `path`, creating parent directories.
pub fn write_file(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::TestPolynomial;
    use crate::ensembles::EnsembleSpec;
    use crate::harness::run_clt_experiment;

    fn doc() -> SummaryDocument {
        let config = ExperimentConfig::new(
            32,
            40,
            TestPolynomial::new(vec![1.0, 0.5]).unwrap(),
            EnsembleSpec::uniform_symmetric(),
        )
        .with_seed(8);
        let s = run_clt_experiment(&config).unwrap();
        SummaryDocument::new(&config).with_summary(s)
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn empty_samples_csv_is_header_only() {
        let d = SummaryDocument::new(&ExperimentConfig::new(
            4,
            2,
            TestPolynomial::monomial(2).unwrap(),
            EnsembleSpec::gaussian(),
        ));
        let csv = emit_report(&d, ReportFormat::Csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "replica,raw_trace,W\n");
    }

    #[test]
    fn samples_csv_rows() {
        let d = doc();
        let text = String::from_utf8(emit_report(&d, ReportFormat::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 41);
        let s = d.summary.as_ref().unwrap();
        let fields: Vec<&str> = lines[5].split(',').collect();
        assert_eq!(fields[0], "4");
        assert_eq!(fields[1].parse::<f64>().unwrap().to_bits(), s.raw_traces[4].to_bits());
        assert_eq!(fields[2].parse::<f64>().unwrap().to_bits(), s.statistic[4].to_bits());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let d = doc();
        let json = emit_report(&d, ReportFormat::Json).unwrap();
        let back: SummaryDocument = serde_json::from_slice(&json).unwrap();
        let (a, b) = (d.summary.as_ref().unwrap(), back.summary.as_ref().unwrap());
        assert_eq!(a.variance.to_bits(), b.variance.to_bits());
        assert_eq!(a.ks_distance.to_bits(), b.ks_distance.to_bits());
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.statistic), bits(&b.statistic));
        assert_eq!(bits(&a.standardized_moments), bits(&b.standardized_moments));
        assert_eq!(back.config, d.config);
        assert_eq!(back.library_version, LIBRARY_VERSION);
    }

    #[test]
    fn json_key_order_is_stable() {
        let json = String::from_utf8(emit_report(&doc(), ReportFormat::Json).unwrap()).unwrap();
        let pos = |k: &str| json.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("library_version") < pos("config"));
        assert!(pos("config") < pos("summary"));
        assert!(pos("variance") < pos("ks_distance"));
    }

    #[test]
    fn text_shows_target_next_to_empirical() {
        let d = doc();
        let text = String::from_utf8(emit_report(&d, ReportFormat::Text).unwrap()).unwrap();
        let line = text.lines().find(|l| l.starts_with("variance of W")).unwrap();
        let s = d.summary.as_ref().unwrap();
        assert!(line.contains(&fmt_float(s.variance)));
        assert!(line.contains(&fmt_float(s.target_variance)));
    }

    #[test]
    fn csv_quoting() {
        let out = table_csv(&["a", "b"], &[vec!["x,y".into(), "plain".into()]]).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a,b\n\"x,y\",plain\n");
    }
}
