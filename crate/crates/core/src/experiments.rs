//! Seeded Monte Carlo trials comparing norm exponents and threshold
//! strategies.
//!
//! Trial `t` of a campaign draws from its own ChaCha8 stream: the generator
//! is seeded with `master_seed` and switched to stream `t`, so changing the
//! trial count never reshuffles earlier trials. Within a trial one sample
//! subset and one noise realization are shared by every norm.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CsError, Result};
use crate::gd::{generalized_deviation, GdProfile, NormExponent};
use crate::noise::{add_noise, NoiseKind, NoiseSpec};
use crate::reconstruction::{build_cs_system, least_squares_solve, spectrum_from_coefficients};
use crate::signal::{
    dft, idft, reference_components, sample_measurements, synthesize_sparse_signal,
    ComplexSignal, MeasurementSet, SpectralComponent, Spectrum,
};
use crate::support::{compute_threshold, detect_support, SupportSet, ThresholdStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Cauchy noise, sigma1 = sigma2 = 1.
    Example1,
    /// Cubic Gaussian noise, sigma1 = sigma2 = 1.
    Example2,
    Noiseless,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Example1 => "example1",
            Preset::Example2 => "example2",
            Preset::Noiseless => "noiseless",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "example1" => Ok(Preset::Example1),
            "example2" => Ok(Preset::Example2),
            "noiseless" => Ok(Preset::Noiseless),
            other => Err(format!(
                "unknown preset `{other}` (expected example1, example2 or noiseless)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_len: usize,
    pub m: usize,
    pub components: Vec<SpectralComponent>,
    /// `None` leaves the measurements clean.
    pub noise: Option<NoiseSpec>,
    pub norms: Vec<NormExponent>,
    pub strategy: ThresholdStrategy,
    pub trials: usize,
    pub master_seed: u64,
}

impl ExperimentConfig {
    /// Trial count used for the published norm ranking.
    pub const PAPER_TRIALS: usize = 30;

    pub fn preset(preset: Preset) -> Self {
        let noise = match preset {
            Preset::Example1 => Some(NoiseKind::Cauchy),
            Preset::Example2 => Some(NoiseKind::CubicGaussian),
            Preset::Noiseless => None,
        }
        .map(|kind| NoiseSpec::new(kind, 1.0, 1.0).expect("unit scales"));
        Self {
            n_len: 128,
            m: 64,
            components: reference_components(),
            noise,
            norms: vec![NormExponent::L1, NormExponent::L2, NormExponent::L3],
            strategy: ThresholdStrategy::default(),
            trials: Self::PAPER_TRIALS,
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CsError::InvalidConfig(msg));
        if self.n_len == 0 {
            return bad("signal length must be positive".into());
        }
        if self.m < 2 || self.m > self.n_len {
            return bad(format!(
                "measurement count {} must lie in 2..={}",
                self.m, self.n_len
            ));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.norms.is_empty() {
            return bad("at least one norm exponent is required".into());
        }
        synthesize_sparse_signal(&self.components, self.n_len)?;
        Ok(())
    }

    pub fn true_support(&self) -> SupportSet {
        SupportSet::new(
            self.components.iter().map(|c| c.bin).collect(),
            self.n_len,
        )
        .expect("validated components")
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::preset(Preset::Example1)
    }
}

/// Random stream for one trial.
pub fn trial_rng(master_seed: u64, trial_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index as u64);
    rng
}

/// Why a norm produced no reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    EmptySupport,
    OversizedSupport { size: usize, m: usize },
    RankDeficient { bins: Vec<usize> },
}

impl Failure {
    pub fn tag(&self) -> &'static str {
        match self {
            Failure::EmptySupport => "empty_support",
            Failure::OversizedSupport { .. } => "oversized_support",
            Failure::RankDeficient { .. } => "rank_deficient",
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::EmptySupport => f.write_str("no bin fell below the threshold"),
            Failure::OversizedSupport { size, m } => {
                write!(f, "{size} support bins exceed {m} measurements")
            }
            Failure::RankDeficient { bins } => write!(f, "bins {bins:?} are linearly dependent"),
        }
    }
}

/// Coefficients on the detected support, embedded in the full spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub coefficients: Vec<Complex64>,
    pub spectrum: Spectrum,
    pub signal: ComplexSignal,
}

/// Everything one norm produces from one measurement set.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub profile: GdProfile,
    pub threshold: f64,
    pub support: SupportSet,
    pub outcome: std::result::Result<Solution, Failure>,
}

impl Reconstruction {
    /// The recovered spectrum, or all zeros after a failure.
    pub fn spectrum_or_zero(&self) -> Spectrum {
        match &self.outcome {
            Ok(s) => s.spectrum.clone(),
            Err(_) => Spectrum::zeros(self.profile.len()).expect("nonempty profile"),
        }
    }

    pub fn signal_or_zero(&self) -> ComplexSignal {
        match &self.outcome {
            Ok(s) => s.signal.clone(),
            Err(_) => ComplexSignal::zeros(self.profile.len()).expect("nonempty profile"),
        }
    }
}

/// GD profile, threshold, support detection and least-squares solve.
pub fn reconstruct(
    ms: &MeasurementSet,
    norm: NormExponent,
    strategy: &ThresholdStrategy,
) -> Result<Reconstruction> {
    let profile = generalized_deviation(ms, norm)?;
    let threshold = compute_threshold(&profile, strategy)?;
    let support = detect_support(&profile, strategy)?;
    let n_len = ms.n_len();

    let outcome = if support.is_empty() {
        Err(Failure::EmptySupport)
    } else if support.len() > ms.len() {
        Err(Failure::OversizedSupport {
            size: support.len(),
            m: ms.len(),
        })
    } else {
        let system = build_cs_system(ms, &support, n_len)?;
        match least_squares_solve(&system) {
            Ok(coefficients) => {
                let spectrum = spectrum_from_coefficients(&coefficients, &support, n_len)?;
                let signal = idft(&spectrum);
                Ok(Solution {
                    coefficients,
                    spectrum,
                    signal,
                })
            }
            Err(CsError::RankDeficient { bins, .. }) => Err(Failure::RankDeficient { bins }),
            Err(e) => return Err(e),
        }
    };
    Ok(Reconstruction {
        profile,
        threshold,
        support,
        outcome,
    })
}

/// Clean reference and the noisy measurements for one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialInputs {
    pub clean: ComplexSignal,
    pub clean_spectrum: Spectrum,
    pub measurements: MeasurementSet,
}

/// Draws the subset first, then the noise, from the trial's stream.
pub fn trial_inputs(config: &ExperimentConfig, trial_index: usize) -> Result<TrialInputs> {
    config.validate()?;
    let clean = synthesize_sparse_signal(&config.components, config.n_len)?;
    let clean_spectrum = dft(&clean);
    let mut rng = trial_rng(config.master_seed, trial_index);
    let subset = sample_measurements(&clean, config.m, &mut rng)?;
    let measurements = match &config.noise {
        Some(spec) => add_noise(&subset, spec, &mut rng),
        None => subset,
    };
    Ok(TrialInputs {
        clean,
        clean_spectrum,
        measurements,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormOutcome {
    pub norm: NormExponent,
    pub support: SupportSet,
    pub support_exact: bool,
    /// Mean `|x_hat(n) - x(n)|^2` over all N samples of the clean signal.
    pub mse_time: f64,
    /// Mean `|X_hat(k) - X(k)|^2` over all N bins.
    pub mse_freq: f64,
    pub failure: Option<Failure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_index: usize,
    pub outcomes: Vec<NormOutcome>,
}

fn score(
    inputs: &TrialInputs,
    truth: &SupportSet,
    norm: NormExponent,
    rec: Reconstruction,
) -> Result<NormOutcome> {
    let mse_time = rec.signal_or_zero().mse(&inputs.clean)?;
    let mse_freq = rec.spectrum_or_zero().mse(&inputs.clean_spectrum)?;
    Ok(NormOutcome {
        norm,
        support_exact: rec.support == *truth,
        support: rec.support,
        mse_time,
        mse_freq,
        failure: rec.outcome.err(),
    })
}

pub fn run_single_trial(config: &ExperimentConfig, trial_index: usize) -> Result<TrialResult> {
    let inputs = trial_inputs(config, trial_index)?;
    let truth = config.true_support();
    let outcomes = config
        .norms
        .iter()
        .map(|&norm| {
            let rec = reconstruct(&inputs.measurements, norm, &config.strategy)?;
            score(&inputs, &truth, norm, rec)
        })
        .collect::<Result<_>>()?;
    Ok(TrialResult {
        trial_index,
        outcomes,
    })
}

/// All trials of a campaign, in trial order. Runs in parallel; the result
/// does not depend on scheduling.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|t| run_single_trial(config, t))
        .collect()
}

#[cfg(test)]
pub(crate) fn run_trials_sequential(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    (0..config.trials)
        .map(|t| run_single_trial(config, t))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FailureCounts {
    pub empty_support: usize,
    pub oversized_support: usize,
    pub rank_deficient: usize,
}

impl FailureCounts {
    pub fn total(&self) -> usize {
        self.empty_support + self.oversized_support + self.rank_deficient
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormSummary {
    pub norm: NormExponent,
    pub trials: usize,
    /// Fraction of trials whose detected support equals the true support.
    pub exact_rate: f64,
    /// Fraction of trials that produced a reconstruction at all.
    pub completed_rate: f64,
    pub median_mse_time: f64,
    pub median_mse_freq: f64,
    /// Reported only; heavy-tailed noise makes it unstable.
    pub mean_mse_time: f64,
    pub failures: FailureCounts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSummary {
    pub strategy: ThresholdStrategy,
    pub trials: usize,
    pub norms: Vec<NormSummary>,
    /// Norms ordered by median time-domain MSE, best first.
    pub ranking: Vec<NormExponent>,
}

impl CampaignSummary {
    pub fn for_norm(&self, norm: NormExponent) -> Option<&NormSummary> {
        self.norms.iter().find(|s| s.norm == norm)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 0 {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    } else {
        v[n / 2]
    }
}

/// Aggregate trial results (any order) into per-norm statistics.
pub fn summarize(
    strategy: ThresholdStrategy,
    norms: &[NormExponent],
    results: &[TrialResult],
) -> CampaignSummary {
    let mut ordered: Vec<&TrialResult> = results.iter().collect();
    ordered.sort_by_key(|r| r.trial_index);

    let per_norm: Vec<NormSummary> = norms
        .iter()
        .enumerate()
        .map(|(i, &norm)| {
            let outs: Vec<&NormOutcome> = ordered.iter().map(|r| &r.outcomes[i]).collect();
            let n = outs.len();
            let mut failures = FailureCounts::default();
            for o in &outs {
                match o.failure {
                    Some(Failure::EmptySupport) => failures.empty_support += 1,
                    Some(Failure::OversizedSupport { .. }) => failures.oversized_support += 1,
                    Some(Failure::RankDeficient { .. }) => failures.rank_deficient += 1,
                    None => {}
                }
            }
            let exact = outs.iter().filter(|o| o.support_exact).count();
            NormSummary {
                norm,
                trials: n,
                exact_rate: exact as f64 / n as f64,
                completed_rate: (n - failures.total()) as f64 / n as f64,
                median_mse_time: median(outs.iter().map(|o| o.mse_time).collect()),
                median_mse_freq: median(outs.iter().map(|o| o.mse_freq).collect()),
                mean_mse_time: outs.iter().map(|o| o.mse_time).sum::<f64>() / n as f64,
                failures,
            }
        })
        .collect();

    let mut ranked: Vec<&NormSummary> = per_norm.iter().collect();
    ranked.sort_by(|a, b| a.median_mse_time.total_cmp(&b.median_mse_time));
    let ranking = ranked.iter().map(|s| s.norm).collect();

    CampaignSummary {
        strategy,
        trials: results.len(),
        norms: per_norm,
        ranking,
    }
}

pub fn run_campaign(config: &ExperimentConfig) -> Result<CampaignSummary> {
    let results = run_trials(config)?;
    Ok(summarize(config.strategy, &config.norms, &results))
}

/// One campaign per strategy over the same trial streams.
pub fn compare_thresholds(
    config: &ExperimentConfig,
    strategies: &[ThresholdStrategy],
) -> Result<Vec<CampaignSummary>> {
    if strategies.is_empty() {
        return Err(CsError::InvalidConfig(
            "at least one threshold strategy is required".into(),
        ));
    }
    strategies
        .iter()
        .map(|&strategy| {
            run_campaign(&ExperimentConfig {
                strategy,
                ..config.clone()
            })
        })
        .collect()
}
