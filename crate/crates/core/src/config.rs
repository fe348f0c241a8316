//! Flat `key = value` configuration for the command-line front end.
//!
//! Settings are layered: a preset supplies defaults, a config file
//! overrides the preset, and command-line flags override the file. Flags and
//! file keys share one parser, so they accept the same spellings:
//!
//! ```text
//! # comment
//! preset   = example1        # example1 | example2 | noiseless
//! n        = 128
//! m        = 64
//! noise    = cauchy          # gaussian | laplace | cauchy | cubic | none
//! sigma1   = 1
//! sigma2   = 1
//! norms    = 1,2,3
//! strategy = max             # max | mean | median, comma list for bench
//! alpha    = 0.89
//! trials   = 30
//! seed     = 7
//! trial    = 0               # trial index used by gd / reconstruct
//! out      = results
//! figures  = true
//! components = 16:4:0, 32:3:0, 64:2:0   # bin:amplitude[:phase]
//! ```

use std::path::{Path, PathBuf};

use crate::error::{CsError, Result};
use crate::experiments::{ExperimentConfig, Preset};
use crate::gd::NormExponent;
use crate::noise::{NoiseKind, NoiseSpec};
use crate::signal::SpectralComponent;
use crate::support::{ThresholdKind, ThresholdStrategy};

/// Where a setting came from, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    File(usize),
    Flag,
}

impl Origin {
    fn line(self) -> usize {
        match self {
            Origin::File(line) => line,
            Origin::Flag => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum NoiseSetting {
    None,
    Kind(NoiseKind),
}

/// Unresolved settings; `None` means "keep the lower layer's value".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    preset: Option<Preset>,
    n_len: Option<usize>,
    m: Option<usize>,
    noise: Option<NoiseSetting>,
    sigma1: Option<f64>,
    sigma2: Option<f64>,
    norms: Option<Vec<NormExponent>>,
    strategies: Option<Vec<ThresholdKind>>,
    alpha: Option<f64>,
    trials: Option<usize>,
    seed: Option<u64>,
    trial: Option<usize>,
    out: Option<PathBuf>,
    figures: Option<bool>,
    components: Option<Vec<SpectralComponent>>,
}

/// A fully resolved, validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub experiment: ExperimentConfig,
    /// Threshold strategies to compare; the first one is `experiment.strategy`.
    pub strategies: Vec<ThresholdStrategy>,
    /// Trial whose data feeds the single-run commands and figure files.
    pub trial: usize,
    pub out_dir: PathBuf,
    pub figures: bool,
    pub preset: Option<Preset>,
}

impl CliConfig {
    pub fn noise_label(&self) -> String {
        match &self.experiment.noise {
            Some(spec) => format!("{}({},{})", spec.kind(), spec.sigma1(), spec.sigma2()),
            None => "none".into(),
        }
    }
}

fn parse_err(origin: Origin, field: &str, message: impl Into<String>) -> CsError {
    CsError::ConfigParse {
        line: origin.line(),
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(origin: Origin, field: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| parse_err(origin, field, format!("`{value}` is not a valid number")))
}

fn parse_list<T>(
    origin: Origin,
    field: &str,
    value: &str,
    item: impl Fn(&str) -> std::result::Result<T, String>,
) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(s).map_err(|m| parse_err(origin, field, m)))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(parse_err(origin, field, "empty list"));
    }
    Ok(items)
}

fn parse_component(s: &str) -> std::result::Result<SpectralComponent, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(format!("`{s}` is not bin:amplitude[:phase]"));
    }
    let bin = parts[0]
        .parse()
        .map_err(|_| format!("bad bin `{}`", parts[0]))?;
    let amp = parts[1]
        .parse()
        .map_err(|_| format!("bad amplitude `{}`", parts[1]))?;
    let phase = match parts.get(2) {
        Some(p) => p.parse().map_err(|_| format!("bad phase `{p}`"))?,
        None => 0.0,
    };
    SpectralComponent::new(bin, amp, phase).map_err(|e| e.to_string())
}

impl Settings {
    /// Apply one `key = value` pair.
    pub fn apply(&mut self, key: &str, value: &str, origin: Origin) -> Result<()> {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "preset" => {
                self.preset = Some(v.parse().map_err(|m: String| parse_err(origin, &key, m))?)
            }
            "n" | "n_len" => self.n_len = Some(parse_num(origin, &key, v)?),
            "m" => self.m = Some(parse_num(origin, &key, v)?),
            "noise" => {
                self.noise = Some(if v.eq_ignore_ascii_case("none") {
                    NoiseSetting::None
                } else {
                    NoiseSetting::Kind(v.parse().map_err(|m: String| parse_err(origin, &key, m))?)
                })
            }
            "sigma1" => self.sigma1 = Some(parse_num(origin, &key, v)?),
            "sigma2" => self.sigma2 = Some(parse_num(origin, &key, v)?),
            "sigma" => {
                let s = parse_num(origin, &key, v)?;
                self.sigma1 = Some(s);
                self.sigma2 = Some(s);
            }
            "norms" => self.norms = Some(parse_list(origin, &key, v, |s| s.parse())?),
            "strategy" => self.strategies = Some(parse_list(origin, &key, v, |s| s.parse())?),
            "alpha" => self.alpha = Some(parse_num(origin, &key, v)?),
            "trials" => self.trials = Some(parse_num(origin, &key, v)?),
            "seed" => self.seed = Some(parse_num(origin, &key, v)?),
            "trial" => self.trial = Some(parse_num(origin, &key, v)?),
            "out" => {
                if v.is_empty() {
                    return Err(parse_err(origin, &key, "empty path"));
                }
                self.out = Some(PathBuf::from(v))
            }
            "figures" => {
                self.figures = Some(match v.to_ascii_lowercase().as_str() {
                    "true" | "yes" | "1" | "on" => true,
                    "false" | "no" | "0" | "off" => false,
                    _ => return Err(parse_err(origin, &key, format!("`{v}` is not a boolean"))),
                })
            }
            "components" => {
                self.components = Some(parse_list(origin, &key, v, parse_component)?)
            }
            _ => return Err(parse_err(origin, &key, "unknown field")),
        }
        Ok(())
    }

    /// Parse the text of a config file.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(parse_err(
                    Origin::File(line),
                    content,
                    "expected `key = value`",
                ));
            };
            s.apply(key, value, Origin::File(line))?;
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CsError::Io(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    /// `other` wins wherever it is set.
    pub fn overlay(self, other: Settings) -> Settings {
        Settings {
            preset: other.preset.or(self.preset),
            n_len: other.n_len.or(self.n_len),
            m: other.m.or(self.m),
            noise: other.noise.or(self.noise),
            sigma1: other.sigma1.or(self.sigma1),
            sigma2: other.sigma2.or(self.sigma2),
            norms: other.norms.or(self.norms),
            strategies: other.strategies.or(self.strategies),
            alpha: other.alpha.or(self.alpha),
            trials: other.trials.or(self.trials),
            seed: other.seed.or(self.seed),
            trial: other.trial.or(self.trial),
            out: other.out.or(self.out),
            figures: other.figures.or(self.figures),
            components: other.components.or(self.components),
        }
    }

    pub fn resolve(&self) -> Result<CliConfig> {
        let preset = self.preset;
        let mut exp = ExperimentConfig::preset(preset.unwrap_or(Preset::Example1));
        if let Some(n) = self.n_len {
            exp.n_len = n;
        }
        if let Some(m) = self.m {
            exp.m = m;
        }
        if let Some(c) = &self.components {
            exp.components = c.clone();
        }
        if let Some(norms) = &self.norms {
            exp.norms = norms.clone();
        }
        if let Some(t) = self.trials {
            exp.trials = t;
        }
        if let Some(seed) = self.seed {
            exp.master_seed = seed;
        }

        let base_noise = exp.noise;
        let kind = match self.noise {
            Some(NoiseSetting::None) => None,
            Some(NoiseSetting::Kind(k)) => Some(k),
            None => base_noise.map(|n| n.kind()),
        };
        exp.noise = match kind {
            None => None,
            Some(kind) => {
                let s1 = self.sigma1.or(base_noise.map(|n| n.sigma1())).unwrap_or(1.0);
                let s2 = self.sigma2.or(base_noise.map(|n| n.sigma2())).unwrap_or(1.0);
                Some(NoiseSpec::new(kind, s1, s2).map_err(|e| {
                    parse_err(Origin::Flag, "sigma", e.to_string())
                })?)
            }
        };

        let alpha = self.alpha.unwrap_or(ThresholdStrategy::DEFAULT_ALPHA);
        let kinds = self
            .strategies
            .clone()
            .unwrap_or_else(|| vec![exp.strategy.kind()]);
        let strategies = kinds
            .iter()
            .map(|&k| ThresholdStrategy::new(k, alpha))
            .collect::<Result<Vec<_>>>()?;
        exp.strategy = strategies[0];

        exp.validate()?;
        let trial = self.trial.unwrap_or(0);
        Ok(CliConfig {
            experiment: exp,
            strategies,
            trial,
            out_dir: self.out.clone().unwrap_or_else(|| PathBuf::from("out")),
            figures: self.figures.unwrap_or(true),
            preset,
        })
    }
}
