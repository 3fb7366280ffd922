//! Data generators for every regime the limit theory covers, plus the
//! Monte Carlo harness producing samples of rate_n · (MAD̂_n − theta).

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limit::{norming_an, SlowlyVarying, TailModel};
use crate::mad::{oracle_mad, sample_mad};
use crate::rng::{derive_seed, next_open01, next_standard_normal, rng_from_seed};
use crate::series::Series;
use crate::special::{ln_gamma, SQRT_2_OVER_PI};

use core::f64::consts::PI;

/// Stationary, ergodic data-generating processes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    IidNormal {
        mu: f64,
        sd: f64,
    },
    IidExponential {
        rate: f64,
    },
    IidDiscrete {
        atoms: Vec<(f64, f64)>,
    },
    /// Two-sided power tail: |X| is Pareto(alpha, x_m), sign is + with
    /// probability p and − with probability 1−p.
    IidParetoSymmetric {
        alpha: f64,
        p: f64,
        x_m: f64,
    },
    IidStudentT {
        dof: f64,
    },
    Ar1 {
        phi: f64,
        innovation: Box<GeneratorSpec>,
    },
    Ma1 {
        theta: f64,
        innovation: Box<GeneratorSpec>,
    },
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorSpec::IidNormal { mu, sd } => {
                if !mu.is_finite() || !sd.is_finite() || *sd < 0.0 {
                    return Err(Error::Config("normal: sd must be finite and >= 0".into()));
                }
            }
            GeneratorSpec::IidExponential { rate } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return Err(Error::Config("exponential: rate must be positive".into()));
                }
            }
            GeneratorSpec::IidDiscrete { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::Config("discrete: at least one atom".into()));
                }
                if atoms.iter().any(|(v, p)| !v.is_finite() || *p < 0.0) {
                    return Err(Error::Config("discrete: finite values, probs >= 0".into()));
                }
                let total: f64 = atoms.iter().map(|(_, p)| p).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::Config(format!(
                        "discrete: probabilities sum to {total}, not 1"
                    )));
                }
            }
            GeneratorSpec::IidParetoSymmetric { alpha, p, x_m } => {
                if !(*alpha > 1.0 && alpha.is_finite()) {
                    return Err(Error::Config(
                        "pareto: alpha must exceed 1 (finite mean)".into(),
                    ));
                }
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::Config("pareto: p must be in [0,1]".into()));
                }
                if !(*x_m > 0.0 && x_m.is_finite()) {
                    return Err(Error::Config("pareto: x_m must be positive".into()));
                }
            }
            GeneratorSpec::IidStudentT { dof } => {
                if !(*dof > 1.0 && dof.is_finite()) {
                    return Err(Error::Config(
                        "student_t: dof must exceed 1 (finite mean)".into(),
                    ));
                }
            }
            GeneratorSpec::Ar1 { phi, innovation } => {
                if !(phi.abs() < 1.0) {
                    return Err(Error::Config("ar1: |phi| < 1 required".into()));
                }
                innovation.validate()?;
                if !innovation.is_iid() {
                    return Err(Error::Config("ar1: innovation must be an iid spec".into()));
                }
            }
            GeneratorSpec::Ma1 { theta, innovation } => {
                if !theta.is_finite() {
                    return Err(Error::Config("ma1: theta must be finite".into()));
                }
                innovation.validate()?;
                if !innovation.is_iid() {
                    return Err(Error::Config("ma1: innovation must be an iid spec".into()));
                }
            }
        }
        Ok(())
    }

    pub fn is_iid(&self) -> bool {
        !matches!(self, GeneratorSpec::Ar1 { .. } | GeneratorSpec::Ma1 { .. })
    }

    /// Tail model for the stable norming, when the spec carries one.
    pub fn tail_model(&self) -> Option<TailModel> {
        match self {
            GeneratorSpec::IidParetoSymmetric { alpha, p, x_m } => Some(TailModel {
                alpha: *alpha,
                p: *p,
                x_m: *x_m,
                slowly_varying: SlowlyVarying::Constant,
            }),
            _ => None,
        }
    }

    /// Mean of the marginal distribution (exists for every valid spec).
    pub fn marginal_mean(&self) -> f64 {
        match self {
            GeneratorSpec::IidNormal { mu, .. } => *mu,
            GeneratorSpec::IidExponential { rate } => 1.0 / rate,
            GeneratorSpec::IidDiscrete { atoms } => atoms.iter().map(|(v, p)| v * p).sum(),
            GeneratorSpec::IidParetoSymmetric { alpha, p, x_m } => {
                (2.0 * p - 1.0) * x_m * alpha / (alpha - 1.0)
            }
            GeneratorSpec::IidStudentT { .. } => 0.0,
            GeneratorSpec::Ar1 { phi, innovation } => innovation.marginal_mean() / (1.0 - phi),
            GeneratorSpec::Ma1 { theta, innovation } => (1.0 + theta) * innovation.marginal_mean(),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            GeneratorSpec::IidNormal { mu, sd } => mu + sd * next_standard_normal(rng),
            GeneratorSpec::IidExponential { rate } => -libm::log(next_open01(rng)) / rate,
            GeneratorSpec::IidDiscrete { atoms } => {
                let u = next_open01(rng);
                let mut acc = 0.0;
                for (v, p) in atoms {
                    acc += p;
                    if u <= acc {
                        return *v;
                    }
                }
                atoms[atoms.len() - 1].0
            }
            GeneratorSpec::IidParetoSymmetric { alpha, p, x_m } => {
                let sign = if next_open01(rng) < *p { 1.0 } else { -1.0 };
                sign * x_m * libm::pow(next_open01(rng), -1.0 / alpha)
            }
            GeneratorSpec::IidStudentT { dof } => {
                // Bailey's polar one-liner for the t distribution
                let u = next_open01(rng);
                let v = next_open01(rng);
                libm::sqrt(dof * (libm::pow(u, -2.0 / dof) - 1.0)) * libm::cos(2.0 * PI * v)
            }
            GeneratorSpec::Ar1 { .. } | GeneratorSpec::Ma1 { .. } => {
                unreachable!("dependent specs are expanded in generate()")
            }
        }
    }
}

/// One realization of length n, deterministic per seed. AR(1) starts from
/// the exact stationary law for Gaussian innovations and burns in
/// 1000 + 50/(1−|phi|) steps otherwise.
pub fn generate(gen: &GeneratorSpec, n: usize, seed: u64) -> Result<Series> {
    gen.validate()?;
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    let mut rng = rng_from_seed(seed);
    let values = match gen {
        GeneratorSpec::Ar1 { phi, innovation } => {
            let mut x = match innovation.as_ref() {
                GeneratorSpec::IidNormal { mu, sd } => {
                    // exact stationary start: N(mu/(1-phi), sd^2/(1-phi^2))
                    mu / (1.0 - phi)
                        + sd / libm::sqrt(1.0 - phi * phi) * next_standard_normal(&mut rng)
                }
                other => {
                    let mut x = other.marginal_mean() / (1.0 - phi);
                    let burn = 1000 + libm::ceil(50.0 / (1.0 - phi.abs())) as usize;
                    for _ in 0..burn {
                        x = phi * x + other.draw(&mut rng);
                    }
                    x
                }
            };
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                x = phi * x + innovation.draw(&mut rng);
                out.push(x);
            }
            out
        }
        GeneratorSpec::Ma1 { theta, innovation } => {
            let mut prev = innovation.draw(&mut rng);
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let eps = innovation.draw(&mut rng);
                out.push(eps + theta * prev);
                prev = eps;
            }
            out
        }
        iid => {
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                out.push(iid.draw(&mut rng));
            }
            out
        }
    };
    Series::new(values)
}

/// E|T| for a Student t with dof > 1:
/// 2 sqrt(dof) Γ((dof+1)/2) / (sqrt(pi) (dof−1) Γ(dof/2)).
pub fn student_t_abs_mean(dof: f64) -> f64 {
    2.0 * libm::sqrt(dof) / (libm::sqrt(PI) * (dof - 1.0))
        * libm::exp(ln_gamma((dof + 1.0) / 2.0) - ln_gamma(dof / 2.0))
}

/// The centering pair (mu, theta) for a generator, with closed forms
/// where they exist and a flagged reference-run estimate otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrueTheta {
    pub mu: f64,
    pub theta: f64,
    /// True when theta came from a reference run rather than a closed form.
    pub estimated: bool,
    /// Rough Monte Carlo standard error of theta when estimated.
    pub se: Option<f64>,
}

/// Closed-form (mu, theta) where available: normal and Gaussian-driven
/// AR(1)/MA(1), exponential, discrete, balanced Pareto, Student t.
/// Returns None when only a reference run can produce theta.
pub fn analytic_theta(gen: &GeneratorSpec) -> Option<TrueTheta> {
    let exact = |mu: f64, theta: f64| {
        Some(TrueTheta {
            mu,
            theta,
            estimated: false,
            se: None,
        })
    };
    match gen {
        GeneratorSpec::IidNormal { mu, sd } => exact(*mu, sd * SQRT_2_OVER_PI),
        GeneratorSpec::IidExponential { rate } => {
            exact(1.0 / rate, 2.0 / (core::f64::consts::E * rate))
        }
        GeneratorSpec::IidDiscrete { atoms } => {
            let mu: f64 = atoms.iter().map(|(v, p)| v * p).sum();
            let theta: f64 = atoms.iter().map(|(v, p)| p * (v - mu).abs()).sum();
            exact(mu, theta)
        }
        GeneratorSpec::IidParetoSymmetric { alpha, p, x_m } => {
            if *p == 0.5 {
                exact(0.0, x_m * alpha / (alpha - 1.0))
            } else {
                None
            }
        }
        GeneratorSpec::IidStudentT { dof } => exact(0.0, student_t_abs_mean(*dof)),
        GeneratorSpec::Ar1 { phi, innovation } => match innovation.as_ref() {
            GeneratorSpec::IidNormal { mu, sd } => {
                // Gaussian marginal: N(mu/(1-phi), sd^2/(1-phi^2))
                let sd_x = sd / libm::sqrt(1.0 - phi * phi);
                exact(mu / (1.0 - phi), sd_x * SQRT_2_OVER_PI)
            }
            _ => None,
        },
        GeneratorSpec::Ma1 { theta, innovation } => match innovation.as_ref() {
            GeneratorSpec::IidNormal { mu, sd } => {
                let sd_x = sd * libm::sqrt(1.0 + theta * theta);
                exact((1.0 + theta) * mu, sd_x * SQRT_2_OVER_PI)
            }
            _ => None,
        },
    }
}

/// Reference-run estimate of theta at a given sample size, centered at
/// the analytic marginal mean. The RNG stream is derived from `seed` and
/// does not overlap any replication stream of the same master seed.
pub fn reference_theta(gen: &GeneratorSpec, n_ref: usize, seed: u64) -> Result<TrueTheta> {
    gen.validate()?;
    let mu = gen.marginal_mean();
    let s = generate(gen, n_ref, derive_seed(seed, u64::MAX))?;
    let theta = oracle_mad(&s, mu)?;
    // iid-style standard error; an underestimate under dependence
    let var = crate::sum::pairwise_sum_by(s.len(), &|i| {
        let d = (s.values()[i] - mu).abs() - theta;
        d * d
    }) / s.len() as f64;
    Ok(TrueTheta {
        mu,
        theta,
        estimated: true,
        se: Some(libm::sqrt(var / n_ref as f64)),
    })
}

/// Default reference-run size for laws without closed-form theta.
pub const DEFAULT_N_REF: usize = 10_000_000;

/// (mu, theta) via closed form when possible, else a reference run of
/// `DEFAULT_N_REF` draws seeded from `seed`.
pub fn true_theta(gen: &GeneratorSpec, seed: u64) -> Result<TrueTheta> {
    gen.validate()?;
    match analytic_theta(gen) {
        Some(t) => Ok(t),
        None => reference_theta(gen, DEFAULT_N_REF, seed),
    }
}

/// Norming rate for the normalized statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rate {
    SqrtN,
    NOverAn,
}

/// How the centering pair is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSource {
    Analytic,
    ReferenceRun { n_ref: usize },
}

impl Default for ThetaSource {
    fn default() -> Self {
        ThetaSource::Analytic
    }
}

/// Monte Carlo study configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub generator: GeneratorSpec,
    pub n: usize,
    pub reps: usize,
    pub rate: Rate,
    pub seed: u64,
    #[serde(default)]
    pub theta_source: ThetaSource,
}

/// A completed study: configuration, centering, normalized statistics and
/// the per-replication seeds that produced them. Wall time is filled in
/// by callers that can measure it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McStudy {
    pub config: StudyConfig,
    pub mu: f64,
    pub theta: f64,
    pub theta_estimated: bool,
    pub theta_se: Option<f64>,
    pub rate_n: f64,
    pub results: Series,
    pub per_rep_seeds: Vec<u64>,
    #[serde(default)]
    pub wall_time_ms: Option<u64>,
}

/// Run the study: results[r] = rate_n · (sample_mad(X^(r)) − theta) with
/// X^(r) a fresh realization under seed derive_seed(seed, r). Bit-exact
/// reproducible for a fixed config.
pub fn run_study(cfg: &StudyConfig) -> Result<McStudy> {
    cfg.generator.validate()?;
    if cfg.n == 0 || cfg.reps == 0 {
        return Err(Error::Config("n and reps must be >= 1".into()));
    }

    let rate_n = match cfg.rate {
        Rate::SqrtN => libm::sqrt(cfg.n as f64),
        Rate::NOverAn => {
            let tail = cfg.generator.tail_model().ok_or_else(|| {
                Error::Config(
                    "rate n_over_an requires a generator with a tail model (pareto)".into(),
                )
            })?;
            cfg.n as f64 / norming_an(&tail, cfg.n)?
        }
    };

    let centering = match cfg.theta_source {
        ThetaSource::Analytic => analytic_theta(&cfg.generator).ok_or_else(|| {
            Error::Config(String::from(
                "no closed-form theta for this generator; use theta_source reference_run",
            ))
        })?,
        ThetaSource::ReferenceRun { n_ref } => reference_theta(&cfg.generator, n_ref, cfg.seed)?,
    };

    let per_rep_seeds: Vec<u64> = (0..cfg.reps)
        .map(|r| derive_seed(cfg.seed, r as u64))
        .collect();
    let mut results = Vec::with_capacity(cfg.reps);
    for &rep_seed in &per_rep_seeds {
        let sample = generate(&cfg.generator, cfg.n, rep_seed)?;
        results.push(rate_n * (sample_mad(&sample) - centering.theta));
    }

    Ok(McStudy {
        config: cfg.clone(),
        mu: centering.mu,
        theta: centering.theta,
        theta_estimated: centering.estimated,
        theta_se: centering.se,
        rate_n,
        results: Series::new(results)?,
        per_rep_seeds,
        wall_time_ms: None,
    })
}
