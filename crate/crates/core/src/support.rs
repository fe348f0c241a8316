//! Thresholding a GD profile into a detected frequency support.

use std::fmt;
use std::str::FromStr;

use crate::error::{CsError, Result};
use crate::gd::GdProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdKind {
    MaxScaled,
    MeanScaled,
    MedianScaled,
}

impl ThresholdKind {
    pub const ALL: [ThresholdKind; 3] = [
        ThresholdKind::MaxScaled,
        ThresholdKind::MeanScaled,
        ThresholdKind::MedianScaled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ThresholdKind::MaxScaled => "max",
            ThresholdKind::MeanScaled => "mean",
            ThresholdKind::MedianScaled => "median",
        }
    }
}

impl fmt::Display for ThresholdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ThresholdKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "max" => Ok(ThresholdKind::MaxScaled),
            "mean" => Ok(ThresholdKind::MeanScaled),
            "median" => Ok(ThresholdKind::MedianScaled),
            other => Err(format!(
                "unknown threshold strategy `{other}` (expected max, mean or median)"
            )),
        }
    }
}

/// `T = alpha * {max | mean | median}_k GD(k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdStrategy {
    kind: ThresholdKind,
    alpha: f64,
}

impl ThresholdStrategy {
    pub const DEFAULT_ALPHA: f64 = 0.89;

    pub fn new(kind: ThresholdKind, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(CsError::InvalidAlpha(alpha));
        }
        Ok(Self { kind, alpha })
    }

    pub fn kind(&self) -> ThresholdKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for ThresholdStrategy {
    fn default() -> Self {
        Self {
            kind: ThresholdKind::MaxScaled,
            alpha: Self::DEFAULT_ALPHA,
        }
    }
}

impl fmt::Display for ThresholdStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kind, self.alpha)
    }
}

/// Sorted, duplicate-free frequency bins.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SupportSet {
    bins: Vec<usize>,
}

impl SupportSet {
    /// Sorts and checks the bins against `n_len`.
    pub fn new(mut bins: Vec<usize>, n_len: usize) -> Result<Self> {
        bins.sort_unstable();
        if let Some(w) = bins.windows(2).find(|w| w[0] == w[1]) {
            return Err(CsError::DuplicateBin(w[0]));
        }
        if let Some(&last) = bins.last() {
            if last >= n_len {
                return Err(CsError::BinOutOfRange { bin: last, n_len });
            }
        }
        Ok(Self { bins })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn bins(&self) -> &[usize] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn contains(&self, bin: usize) -> bool {
        self.bins.binary_search(&bin).is_ok()
    }

    pub fn is_subset_of(&self, other: &SupportSet) -> bool {
        self.bins.iter().all(|&b| other.contains(b))
    }
}

impl fmt::Display for SupportSet {
    /// Bins joined with `;`, e.g. `16;32;64`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.bins.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 0 {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    } else {
        v[n / 2]
    }
}

pub fn compute_threshold(profile: &GdProfile, strategy: &ThresholdStrategy) -> Result<f64> {
    let v = profile.values();
    if v.is_empty() {
        return Err(CsError::EmptyProfile);
    }
    let reference = match strategy.kind {
        ThresholdKind::MaxScaled => v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ThresholdKind::MeanScaled => v.iter().sum::<f64>() / v.len() as f64,
        ThresholdKind::MedianScaled => median(v),
    };
    Ok(strategy.alpha * reference)
}

/// Bins with `GD(k) < T`, strictly. An empty result is not an error.
pub fn detect_support(profile: &GdProfile, strategy: &ThresholdStrategy) -> Result<SupportSet> {
    let t = compute_threshold(profile, strategy)?;
    let bins = profile
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &g)| g < t)
        .map(|(k, _)| k)
        .collect();
    Ok(SupportSet { bins })
}
