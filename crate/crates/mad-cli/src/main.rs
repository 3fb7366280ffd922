//! `madstat`: mean-absolute-deviation estimation, regime-aware
//! confidence intervals and Monte Carlo verification of the limit laws.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mad_cli::{
    cmd_ci, cmd_estimate, cmd_expansion_check, cmd_mc_verify, emit, CiOptions, CliError,
    ExpansionSource, Regime, DEFAULT_SEED,
};

#[derive(Parser)]
#[command(
    name = "madstat",
    version,
    about = "Mean absolute deviation about the mean: estimation, \
             confidence intervals and Monte Carlo verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Iid,
    Mixing,
    Stable,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Iid => Regime::Iid,
            RegimeArg::Mixing => Regime::Mixing,
            RegimeArg::Stable => Regime::Stable,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum YesNo {
    Yes,
    No,
}

#[derive(Subcommand)]
enum Command {
    /// Point estimate: n, mean, sample MAD and the sign balance.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// Header name, or zero-based index with --no-header.
        #[arg(long, default_value = "0")]
        column: String,
        /// Treat the first row as data, not a header.
        #[arg(long)]
        no_header: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Confidence interval for the population MAD under a declared
    /// regime. The regime is never inferred from the data.
    Ci {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "0")]
        column: String,
        #[arg(long)]
        no_header: bool,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        /// Whether the law has an atom at the mean (requires --mu).
        #[arg(long, value_enum, default_value = "no")]
        atom: YesNo,
        /// Confidence level in percent.
        #[arg(long, default_value_t = 95.0)]
        level: f64,
        /// Population mean, when known.
        #[arg(long)]
        mu: Option<f64>,
        /// Lag-window bandwidth for the mixing regime: "auto" or an
        /// integer.
        #[arg(long, default_value = "auto")]
        bandwidth: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo study from a JSON config and compare it to the
    /// matching limit-law reference sample.
    McVerify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Term-by-term decomposition of sample MAD minus oracle MAD.
    ExpansionCheck {
        #[arg(long, conflicts_with = "generator_json")]
        input: Option<PathBuf>,
        #[arg(long, default_value = "0")]
        column: String,
        #[arg(long)]
        no_header: bool,
        /// Center of the decomposition; defaults to the generator's
        /// marginal mean in generator mode, mandatory with --input.
        #[arg(long)]
        mu: Option<f64>,
        /// Generator spec as JSON, e.g. {"kind":"iid_normal","mu":0.0,"sd":1.0}.
        #[arg(long)]
        generator_json: Option<String>,
        /// Sample size in generator mode.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_bandwidth(s: &str) -> Result<Option<usize>, CliError> {
    if s == "auto" {
        return Ok(None);
    }
    s.parse::<usize>().map(Some).map_err(|_| {
        CliError::Validation(format!("--bandwidth must be 'auto' or an integer, got '{s}'"))
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Estimate {
            input,
            column,
            no_header,
            out,
        } => {
            let report = cmd_estimate(&input, &column, !no_header)?;
            emit(&report, out.as_deref())
        }
        Command::Ci {
            input,
            column,
            no_header,
            regime,
            atom,
            level,
            mu,
            bandwidth,
            seed,
            out,
        } => {
            let opt = CiOptions {
                regime: regime.into(),
                atom: matches!(atom, YesNo::Yes),
                level,
                mu,
                bandwidth: parse_bandwidth(&bandwidth)?,
                seed,
            };
            let report = cmd_ci(&input, &column, !no_header, &opt)?;
            emit(&report, out.as_deref())
        }
        Command::McVerify { config, out } => {
            let report = cmd_mc_verify(&config, out.as_deref())?;
            emit(&report, out.as_deref())
        }
        Command::ExpansionCheck {
            input,
            column,
            no_header,
            mu,
            generator_json,
            n,
            seed,
            out,
        } => {
            let report = match (&input, &generator_json) {
                (Some(path), None) => cmd_expansion_check(
                    &ExpansionSource::Csv {
                        input: path,
                        column: &column,
                        has_header: !no_header,
                    },
                    mu,
                ),
                (None, Some(spec_json)) => cmd_expansion_check(
                    &ExpansionSource::Generator {
                        spec_json,
                        n,
                        seed,
                    },
                    mu,
                ),
                _ => Err(CliError::Validation(
                    "expansion-check needs exactly one of --input or --generator-json".into(),
                )),
            }?;
            emit(&report, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
