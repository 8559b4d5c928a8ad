//! Command-line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::{density_table, gaussian_central_moment, limiting_variance_exact};
use crate::config::{emit_config, ConfigDocument};
use crate::ensembles::{EnsembleSpec, Family};
use crate::error::{Error, Result};
use crate::harness::{
    chatterjee_tv_bound, default_worker_count, empirical_moments, norm_scaling_study,
    run_clt_experiment, ExperimentConfig, MAX_MOMENT_ORDER,
};
use crate::report::{
    aligned, density_table_csv, emit_report, fmt_float, norm_scaling_csv, table_csv, write_file,
    ReportFormat, SummaryDocument,
};

pub const OUTPUT_DIR_ENV: &str = "CIRCULANT_CLT_OUT";

#[derive(Debug, Parser)]
#[command(name = "circulant-clt", version, about = "CLT checks for linear eigenvalue statistics of random circulant matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the limiting variance of (Tr P(C_n) - E Tr P(C_n)) / √n.
    Variance {
        /// Dense coefficients a_0,a_1,a_2,… (decimals or p/q fractions).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        poly: Vec<String>,
    },
    /// Exact lattice-slice counts against their limiting densities.
    DensityTable {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo replicas of the normalized trace statistic.
    Simulate {
        #[command(flatten)]
        experiment: ExperimentArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Gradient/Hessian functionals and the total-variation bound.
    TvBound {
        #[command(flatten)]
        experiment: ExperimentArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Spectral norm over √(log n) across sizes.
    NormScaling {
        #[arg(long, default_value = "gaussian")]
        family: String,
        #[arg(long)]
        blend: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "256,1024,4096,16384")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Central moments of the statistic against the limiting Gaussian moments.
    Moments {
        #[command(flatten)]
        experiment: ExperimentArgs,
        #[arg(long, default_value_t = MAX_MOMENT_ORDER)]
        max_order: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory.
    #[arg(long, env = OUTPUT_DIR_ENV, default_value = ".")]
    pub out: PathBuf,
}

/// Config file plus inline overrides; inline flags win.
#[derive(Debug, Args, Default)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub poly: Option<Vec<f64>>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub blend: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long = "workers")]
    pub worker_count: Option<usize>,
}

impl ExperimentArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut doc = match &self.config {
            Some(path) => ConfigDocument::parse(&std::fs::read_to_string(path)?)?,
            None => ConfigDocument::default(),
        };
        macro_rules! overlay {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    doc.$field = Some(v);
                }
            )*};
        }
        overlay!(n, poly, family, blend, seed, replicas, worker_count);
        doc.into_config()
    }
}

/// Parses `"1.25"`, `"-3"`, `"2/3"` or `"1e-3"` exactly.
pub fn parse_exact(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::invalid(format!("`{text}` is not a decimal or fraction"));
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(all * ten.pow(scale as u32))
    } else {
        BigRational::new(all, ten.pow((-scale) as u32))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

fn variance_command(poly: &[String]) -> Result<String> {
    let coeffs = poly.iter().map(|c| parse_exact(c)).collect::<Result<Vec<_>>>()?;
    if coeffs.len() < 3 {
        return Err(Error::invalid("--poly needs a_0, a_1 and at least a_2 (degree >= 2)"));
    }
    if !coeffs[0].is_zero() || !coeffs[1].is_zero() {
        return Err(Error::invalid(
            "a_0 and a_1 must be zero: constant and degree-one terms are excluded (degree >= 2 only)",
        ));
    }
    if coeffs[2..].iter().all(|c| c.is_zero()) {
        return Err(Error::invalid("polynomial has no nonzero term of degree >= 2"));
    }
    let exact = limiting_variance_exact(&coeffs[2..])?;
    let float = exact.to_f64().unwrap_or(f64::NAN);
    Ok(format!("exact: {exact}\nfloat: {float:?}\n"))
}

fn workers_or_default(w: Option<usize>) -> usize {
    w.unwrap_or_else(default_worker_count)
}

/// Runs one subcommand, writing artifacts under its output directory and
/// returning what goes to stdout.
pub fn run_command(command: &Command) -> Result<String> {
    match command {
        Command::Variance { poly } => variance_command(poly),
        Command::DensityTable { p, n, output } => {
            let rows = density_table(*p, *n)?;
            let csv = density_table_csv(&rows)?;
            write_file(&output.out.join("table.csv"), &csv)?;
            Ok(String::from_utf8(csv).expect("csv is utf-8"))
        }
        Command::Simulate { experiment, output } => {
            let config = experiment.resolve()?;
            let summary = run_clt_experiment(&config)?;
            let doc = SummaryDocument::new(&config).with_summary(summary);
            write_outputs(&output.out, &doc, true)
        }
        Command::TvBound { experiment, output } => {
            let config = experiment.resolve()?;
            let stein = chatterjee_tv_bound(&config)?;
            let doc = SummaryDocument::new(&config).with_stein(stein);
            write_outputs(&output.out, &doc, false)
        }
        Command::NormScaling { family, blend, sizes, trials, seed, workers, output } => {
            let family: Family = family.parse()?;
            let spec = match (family, blend) {
                (Family::CustomSmooth, Some(w)) => EnsembleSpec::custom_smooth(*w)?,
                (_, Some(_)) => return Err(Error::invalid("--blend only applies to custom_smooth")),
                (f, None) => EnsembleSpec::from_family(f),
            };
            let rows = norm_scaling_study(&spec, sizes, *trials, *seed, workers_or_default(*workers))?;
            let csv = norm_scaling_csv(&rows)?;
            write_file(&output.out.join("table.csv"), &csv)?;
            let mut lines = vec![("n".to_string(), "max ratio".to_string(), "mean ratio".to_string())];
            lines.extend(rows.iter().map(|r| (r.n.to_string(), fmt_float(r.max_ratio), fmt_float(r.mean_ratio))));
            Ok(aligned(&lines))
        }
        Command::Moments { experiment, max_order, output } => {
            let config = experiment.resolve()?;
            let summary = run_clt_experiment(&config)?;
            let central = empirical_moments(&summary.statistic, *max_order)?;
            let mut body = Vec::new();
            let mut lines = vec![("order".to_string(), "empirical".to_string(), "gaussian".to_string())];
            for (i, c) in central.iter().enumerate() {
                let target = gaussian_central_moment(i as u32 + 1, summary.target_variance)?;
                body.push(vec![(i + 1).to_string(), fmt_float(*c), fmt_float(target)]);
                lines.push(((i + 1).to_string(), fmt_float(*c), fmt_float(target)));
            }
            let csv = table_csv(&["order", "central_moment", "gaussian_moment"], &body)?;
            write_file(&output.out.join("table.csv"), &csv)?;
            let doc = SummaryDocument::new(&config).with_summary(summary);
            write_file(&output.out.join("summary.json"), &emit_report(&doc, ReportFormat::Json)?)?;
            Ok(aligned(&lines))
        }
    }
}

fn write_outputs(dir: &Path, doc: &SummaryDocument, samples: bool) -> Result<String> {
    if samples {
        write_file(&dir.join("samples.csv"), &emit_report(doc, ReportFormat::Csv)?)?;
    }
    write_file(&dir.join("summary.json"), &emit_report(doc, ReportFormat::Json)?)?;
    let text = emit_report(doc, ReportFormat::Text)?;
    Ok(String::from_utf8(text).expect("report is utf-8"))
}

/// Normalized config for `resolve`d arguments; handy for `--config` files.
pub fn normalized_config(args: &ExperimentArgs) -> Result<String> {
    Ok(emit_config(&args.resolve()?))
}
