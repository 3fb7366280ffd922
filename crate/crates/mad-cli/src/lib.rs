//! Command implementations behind the `madstat` binary: CSV ingestion,
//! regime-aware confidence intervals, Monte Carlo verification runs and
//! the expansion diagnostic. Everything numerical lives in `mad_core`;
//! this crate only does IO, configuration and report assembly.

use std::fs;
use std::path::{Path, PathBuf};

use mad_core::expansion::decompose;
use mad_core::gof::{ks_two_sample, quantile_band, quantile_type7, GofReport};
use mad_core::limit::{
    gaussian_limit_iid_law, gaussian_limit_iid_sample, gaussian_limit_mixing,
    sample_functional_limit, sample_stable, sigma_theta_sq, stable_limit_model,
    GaussianFunctionalParams,
};
use mad_core::longrun::{Bandwidth, Kernel, LagWindowSpec};
use mad_core::mad::{sample_mad, sign_balance};
use mad_core::rng::derive_seed;
use mad_core::series::Series;
use mad_core::simulate::{run_study, GeneratorSpec, StudyConfig};
use mad_core::special::norm_quantile;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Default seed when `--seed` is not given, so runs are reproducible by
/// default. (A pun on "seed MAD"; `M` is not a hex digit, so the literal
/// drops it.)
pub const DEFAULT_SEED: u64 = 0x5EED_AD;

/// Seed streams that must not collide with the per-replication seeds
/// 0..reps or the reference-theta stream (u64::MAX) used by mad_core.
const REFERENCE_STREAM: u64 = u64::MAX - 1;
const LONGRUN_STREAM: u64 = u64::MAX - 2;
const CI_STREAM: u64 = u64::MAX - 3;

pub const SPEC_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: files, flags, CSV cells, config fields. Exit code 2.
    #[error("{0}")]
    Validation(String),
    /// Numeric or domain failure inside the estimators. Exit code 3.
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<mad_core::error::Error> for CliError {
    fn from(e: mad_core::error::Error) -> Self {
        use mad_core::error::Error as E;
        match e {
            E::Config(_) | E::EmptySeries | E::LengthMismatch { .. } => {
                CliError::Validation(e.to_string())
            }
            E::Domain(_) | E::Regime(_) | E::NonFinite(_) => CliError::Numeric(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

// ---------------------------------------------------------------------
// CSV ingestion / export

/// Read one numeric column from a CSV file. `column` is a header name
/// (requires a header row) or a zero-based index. All-empty rows are
/// skipped; any other unparseable cell is an error naming its line.
pub fn read_column(path: &Path, column: &str, has_header: bool) -> Result<Series> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_path(path)
        .map_err(|e| validation(format!("cannot open {}: {e}", path.display())))?;

    let index: usize = match column.parse::<usize>() {
        Ok(i) => i,
        Err(_) => {
            if !has_header {
                return Err(validation(format!(
                    "column '{column}' is not an index and the file was read with --no-header"
                )));
            }
            let headers = rdr
                .headers()
                .map_err(|e| validation(format!("bad header row: {e}")))?;
            headers
                .iter()
                .position(|h| h == column)
                .ok_or_else(|| validation(format!("no column named '{column}' in the header")))?
        }
    };

    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| validation(format!("CSV error: {e}")))?;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or_default();
        if record.iter().all(|cell| cell.trim().is_empty()) {
            continue;
        }
        let cell = record.get(index).ok_or_else(|| {
            validation(format!("line {line}: no field at column index {index}"))
        })?;
        let cell = cell.trim();
        if cell.is_empty() {
            return Err(validation(format!(
                "line {line}: empty cell in column {column}"
            )));
        }
        let v: f64 = cell.parse().map_err(|_| {
            validation(format!("line {line}: cannot parse '{cell}' as a number"))
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(validation(format!(
            "column {column} of {} has no data rows",
            path.display()
        )));
    }
    Ok(Series::new(values)?)
}

/// Write a single-column CSV with 17 significant digits per value, enough
/// for an exact f64 round trip through `read_column`.
pub fn write_series_csv(path: &Path, s: &Series) -> Result<()> {
    let mut body = String::with_capacity(24 * (s.len() + 1));
    body.push_str("value\n");
    for &v in s.values() {
        body.push_str(&format!("{v:.16e}\n"));
    }
    fs::write(path, body)
        .map_err(|e| validation(format!("cannot write {}: {e}", path.display())))
}

// ---------------------------------------------------------------------
// estimate

pub fn estimate_from_series(s: &Series) -> Value {
    let mean = s.mean();
    let sb = sign_balance(s, mean);
    json!({
        "spec_version": SPEC_VERSION,
        "n": s.len(),
        "mean": mean,
        "sample_mad": sample_mad(s),
        "sign_balance": {
            "b_hat": sb.b_hat,
            "p_less": sb.p_less,
            "p_eq": sb.p_eq,
            "p_greater": sb.p_greater,
        },
    })
}

pub fn cmd_estimate(input: &Path, column: &str, has_header: bool) -> Result<Value> {
    Ok(estimate_from_series(&read_column(input, column, has_header)?))
}

// ---------------------------------------------------------------------
// ci

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Iid,
    Mixing,
    Stable,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Iid => "iid",
            Regime::Mixing => "mixing",
            Regime::Stable => "stable",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CiOptions {
    pub regime: Regime,
    pub atom: bool,
    /// Confidence level in percent, e.g. 95.0.
    pub level: f64,
    /// Population mean; mandatory when `atom` is set (ties are counted
    /// against it exactly), otherwise defaults to the sample mean.
    pub mu: Option<f64>,
    /// Lag-window bandwidth for the mixing regime; None means the
    /// automatic rule.
    pub bandwidth: Option<usize>,
    pub seed: u64,
}

fn limit_params_from_data(s: &Series, opt: &CiOptions) -> Result<GaussianFunctionalParams> {
    let theta_hat = sample_mad(s);
    match opt.regime {
        Regime::Iid => Ok(gaussian_limit_iid_sample(s, opt.mu)?),
        Regime::Mixing => {
            let center = opt.mu.unwrap_or_else(|| s.mean());
            let y = Series::new(s.values().iter().map(|x| x - center).collect())?;
            let z = Series::new(
                s.values()
                    .iter()
                    .map(|x| (x - center).abs() - theta_hat)
                    .collect(),
            )?;
            let spec = LagWindowSpec {
                kernel: Kernel::Bartlett,
                bandwidth: match opt.bandwidth {
                    None => Bandwidth::Auto,
                    Some(b) => Bandwidth::Fixed(b),
                },
            };
            Ok(gaussian_limit_mixing(&y, &z, &spec)?)
        }
        Regime::Stable => Err(validation(
            "ci supports the iid and mixing regimes; no interval theory is \
             implemented for the stable regime",
        )),
    }
}

/// Confidence interval for the population mean absolute deviation.
/// Without an atom at the mean the limit is Gaussian and the interval is
/// theta_hat ± z·sqrt(sigma_theta²/n). With an atom the limit is
/// non-Gaussian and non-centered, so the interval is built from simulated
/// quantiles of the limit itself:
/// [theta_hat − q_{1−α/2}/√n, theta_hat − q_{α/2}/√n].
pub fn ci_from_series(s: &Series, opt: &CiOptions) -> Result<Value> {
    if !(0.0 < opt.level && opt.level < 100.0) {
        return Err(validation("--level must be strictly between 0 and 100"));
    }
    if opt.atom && opt.mu.is_none() {
        return Err(validation(
            "--atom yes requires --mu: tie counting against the sample mean is meaningless",
        ));
    }
    let n = s.len();
    let theta_hat = sample_mad(s);
    let alpha = 1.0 - opt.level / 100.0;
    let sqrt_n = (n as f64).sqrt();

    let mut params = limit_params_from_data(s, opt)?;
    if !opt.atom {
        // declared no atom at the mean: drop any accidental exact ties
        params.p_eq = 0.0;
    }

    let (method, lower, upper, extra) = if opt.atom {
        let draws = 100_000usize;
        let sim = sample_functional_limit(&params, draws, derive_seed(opt.seed, CI_STREAM))?;
        let mut sorted = sim.into_values();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let q_lo = quantile_type7(&sorted, alpha / 2.0);
        let q_hi = quantile_type7(&sorted, 1.0 - alpha / 2.0);
        (
            "functional_quantiles",
            theta_hat - q_hi / sqrt_n,
            theta_hat - q_lo / sqrt_n,
            json!({ "limit_quantiles": { "lower": q_lo, "upper": q_hi }, "limit_draws": draws }),
        )
    } else {
        let var = sigma_theta_sq(&params)?;
        let z = norm_quantile(1.0 - alpha / 2.0);
        let half = z * (var / n as f64).sqrt();
        (
            "gaussian",
            theta_hat - half,
            theta_hat + half,
            json!({ "sigma_theta_sq": var }),
        )
    };

    let mut report = json!({
        "spec_version": SPEC_VERSION,
        "n": n,
        "theta_hat": theta_hat,
        "regime": opt.regime.as_str(),
        "atom": opt.atom,
        "level": opt.level,
        "method": method,
        "interval": { "lower": lower, "upper": upper },
        "limit_params": {
            "a": params.a,
            "p_eq": params.p_eq,
            "var_y": params.cov.var_y,
            "var_z": params.cov.var_z,
            "cov_yz": params.cov.cov_yz,
        },
        "seed": opt.seed,
    });
    if let Some(mu) = opt.mu {
        report["mu"] = json!(mu);
    }
    for (k, v) in extra.as_object().unwrap() {
        report[k] = v.clone();
    }
    Ok(report)
}

pub fn cmd_ci(input: &Path, column: &str, has_header: bool, opt: &CiOptions) -> Result<Value> {
    ci_from_series(&read_column(input, column, has_header)?, opt)
}

// ---------------------------------------------------------------------
// mc-verify

fn default_reference_draws() -> usize {
    100_000
}

fn default_levels() -> Vec<f64> {
    (1..10).map(|k| k as f64 / 10.0).collect()
}

fn default_longrun_n() -> usize {
    100_000
}

fn one() -> f64 {
    1.0
}

/// Configuration file for `madstat mc-verify`: the study itself plus how
/// to build the matching reference sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub study: StudyConfig,
    /// Declared regime; selects the reference construction. Never
    /// inferred from the data.
    pub regime: Regime,
    #[serde(default = "default_reference_draws")]
    pub reference_draws: usize,
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
    /// Path length for the separate long-run estimate (mixing only).
    #[serde(default = "default_longrun_n")]
    pub longrun_n: usize,
    /// Lag-window bandwidth for the mixing reference; None = automatic.
    #[serde(default)]
    pub bandwidth: Option<usize>,
    /// Multiplier applied to the reference draws; 1.0 for a faithful
    /// reference, anything else is a deliberate negative control.
    #[serde(default = "one")]
    pub reference_scale: f64,
}

pub struct VerifyOutcome {
    pub report: Value,
    pub results: Series,
    pub reference: Series,
}

fn reference_sample(cfg: &VerifyConfig, mu: f64, theta: f64) -> Result<Series> {
    let seed = derive_seed(cfg.study.seed, REFERENCE_STREAM);
    let gen = &cfg.study.generator;
    let s = match cfg.regime {
        Regime::Iid => {
            let params = gaussian_limit_iid_law(gen)?;
            sample_functional_limit(&params, cfg.reference_draws, seed)?
        }
        Regime::Mixing => {
            // separate long path, never the study replications
            let path = mad_core::simulate::generate(
                gen,
                cfg.longrun_n,
                derive_seed(cfg.study.seed, LONGRUN_STREAM),
            )?;
            let y = Series::new(path.values().iter().map(|x| x - mu).collect())?;
            let z = Series::new(path.values().iter().map(|x| (x - mu).abs() - theta).collect())?;
            let spec = LagWindowSpec {
                kernel: Kernel::Bartlett,
                bandwidth: match cfg.bandwidth {
                    None => Bandwidth::Auto,
                    Some(b) => Bandwidth::Fixed(b),
                },
            };
            let params = gaussian_limit_mixing(&y, &z, &spec)?;
            sample_functional_limit(&params, cfg.reference_draws, seed)?
        }
        Regime::Stable => {
            let tail = gen.tail_model().ok_or_else(|| {
                validation("regime 'stable' requires a heavy-tailed generator (pareto)")
            })?;
            let params = stable_limit_model(&tail)?;
            sample_stable(params.alpha, true, params.sigma, cfg.reference_draws, seed)?
        }
    };
    if cfg.reference_scale == 1.0 {
        Ok(s)
    } else {
        Ok(Series::new(
            s.values().iter().map(|v| v * cfg.reference_scale).collect(),
        )?)
    }
}

/// Run the study, build the regime's reference sample and compare them.
pub fn mc_verify(cfg: &VerifyConfig) -> Result<VerifyOutcome> {
    if cfg.reference_draws == 0 {
        return Err(validation("reference_draws must be >= 1"));
    }
    if !cfg.reference_scale.is_finite() || cfg.reference_scale == 0.0 {
        return Err(validation("reference_scale must be finite and nonzero"));
    }
    let study = run_study(&cfg.study)?;
    let reference = reference_sample(cfg, study.mu, study.theta)?;
    let gof: GofReport = quantile_band(&study.results, &reference, &cfg.levels)?;
    let ks = ks_two_sample(&study.results, &reference);

    let report = json!({
        "spec_version": SPEC_VERSION,
        "config": serde_json::to_value(cfg).map_err(|e| validation(e.to_string()))?,
        "mu": study.mu,
        "theta": study.theta,
        "theta_estimated": study.theta_estimated,
        "theta_se": study.theta_se,
        "rate_n": study.rate_n,
        "ks_distance": ks,
        "quantile_table": serde_json::to_value(&gof.quantile_table)
            .map_err(|e| validation(e.to_string()))?,
        "n_sample": gof.n_sample,
        "n_reference": gof.n_reference,
    });
    Ok(VerifyOutcome {
        report,
        results: study.results,
        reference,
    })
}

/// Artifact paths for a given report destination: `<stem>_results.csv`
/// and `<stem>_reference.csv` beside the report, or `mc_results.csv` /
/// `mc_reference.csv` in the working directory when printing to stdout.
pub fn artifact_paths(out: Option<&Path>) -> (PathBuf, PathBuf) {
    match out {
        Some(p) => {
            let stem = p.with_extension("");
            let base = stem.to_string_lossy().into_owned();
            (
                PathBuf::from(format!("{base}_results.csv")),
                PathBuf::from(format!("{base}_reference.csv")),
            )
        }
        None => (
            PathBuf::from("mc_results.csv"),
            PathBuf::from("mc_reference.csv"),
        ),
    }
}

pub fn cmd_mc_verify(config_path: &Path, out: Option<&Path>) -> Result<Value> {
    let raw = fs::read_to_string(config_path)
        .map_err(|e| validation(format!("cannot read {}: {e}", config_path.display())))?;
    let cfg: VerifyConfig = serde_json::from_str(&raw)
        .map_err(|e| validation(format!("bad config {}: {e}", config_path.display())))?;
    let mut outcome = mc_verify(&cfg)?;
    let (results_csv, reference_csv) = artifact_paths(out);
    write_series_csv(&results_csv, &outcome.results)?;
    write_series_csv(&reference_csv, &outcome.reference)?;
    outcome.report["artifacts"] = json!({
        "results_csv": results_csv.to_string_lossy(),
        "reference_csv": reference_csv.to_string_lossy(),
    });
    Ok(outcome.report)
}

// ---------------------------------------------------------------------
// expansion-check

pub fn expansion_check_series(s: &Series, mu: f64) -> Result<Value> {
    let report = decompose(s, mu)?;
    let mut v = serde_json::to_value(&report).map_err(|e| validation(e.to_string()))?;
    v["spec_version"] = json!(SPEC_VERSION);
    Ok(v)
}

pub enum ExpansionSource<'a> {
    Csv {
        input: &'a Path,
        column: &'a str,
        has_header: bool,
    },
    Generator {
        spec_json: &'a str,
        n: usize,
        seed: u64,
    },
}

pub fn cmd_expansion_check(source: &ExpansionSource, mu: Option<f64>) -> Result<Value> {
    match source {
        ExpansionSource::Csv {
            input,
            column,
            has_header,
        } => {
            let mu = mu.ok_or_else(|| validation("--mu is required with --input"))?;
            expansion_check_series(&read_column(input, column, *has_header)?, mu)
        }
        ExpansionSource::Generator { spec_json, n, seed } => {
            let gen: GeneratorSpec = serde_json::from_str(spec_json)
                .map_err(|e| validation(format!("bad --generator-json: {e}")))?;
            gen.validate()?;
            let mu = mu.unwrap_or_else(|| gen.marginal_mean());
            let s = mad_core::simulate::generate(&gen, *n, *seed)?;
            expansion_check_series(&s, mu)
        }
    }
}

// ---------------------------------------------------------------------
// report output

/// Serialize a report and deliver it: stdout by default, a file with
/// `--out`. Formatting is pretty-printed JSON plus a trailing newline so
/// identical reports are byte-identical on disk.
pub fn emit(report: &Value, out: Option<&Path>) -> Result<()> {
    let body = format!(
        "{}\n",
        serde_json::to_string_pretty(report).map_err(|e| validation(e.to_string()))?
    );
    match out {
        Some(p) => fs::write(p, body)
            .map_err(|e| validation(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
