//! Per-bin robust location estimates and generalized-deviation profiles.
//!
//! For bin `k` the available samples are demodulated,
//! `z_m = x(n_m) * exp(-j*2*pi*k*n_m/N)`. At a true signal frequency the
//! component collapses to a constant and the spread of `z` drops, so the
//! generalized deviation
//!
//! ```text
//! GD(k) = (1/M) * sum_m | z_m - mean(z) |^L
//! ```
//!
//! dips at the signal bins. The deviation is always taken around the sample
//! mean, whatever `L` is; [`robust_transform_estimate`] exposes the
//! `L`-optimal location separately.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{CsError, Result};
use crate::signal::{MeasurementSet, SpectralComponent, Twiddles};

const LOCATION_MAX_ITERS: usize = 200;
const LOCATION_REL_TOL: f64 = 1e-9;

/// Exponent `L >= 1` of the `|e|^L` error functional.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NormExponent(f64);

impl NormExponent {
    pub const L1: NormExponent = NormExponent(1.0);
    pub const L2: NormExponent = NormExponent(2.0);
    pub const L3: NormExponent = NormExponent(3.0);

    pub fn new(l: f64) -> Result<Self> {
        if !l.is_finite() || l < 1.0 {
            return Err(CsError::InvalidNorm(l));
        }
        Ok(Self(l))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `|e|^L` given `|e|^2`, with exact shortcuts for L = 1, 2, 3.
    #[inline]
    pub fn pow_from_sq(self, modulus_sq: f64) -> f64 {
        if self.0 == 2.0 {
            modulus_sq
        } else if self.0 == 1.0 {
            modulus_sq.sqrt()
        } else if self.0 == 3.0 {
            modulus_sq * modulus_sq.sqrt()
        } else {
            modulus_sq.powf(0.5 * self.0)
        }
    }

    /// `a^L` for `a >= 0`.
    pub fn pow(self, a: f64) -> f64 {
        self.pow_from_sq(a * a)
    }
}

impl fmt::Display for NormExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for NormExponent {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = s.trim();
        let t = t.strip_prefix(['l', 'L']).unwrap_or(t);
        let v: f64 = t
            .parse()
            .map_err(|_| format!("`{s}` is not a norm exponent"))?;
        NormExponent::new(v).map_err(|e| e.to_string())
    }
}

/// GD(k) for k = 0..N-1 under one norm exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct GdProfile {
    values: Vec<f64>,
    norm: NormExponent,
    m_used: usize,
}

impl GdProfile {
    /// Wrap externally computed values (must be nonnegative and nonempty).
    pub fn new(values: Vec<f64>, norm: NormExponent, m_used: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(CsError::EmptyProfile);
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(CsError::InvalidMeasurements(format!(
                "GD value {bad} is not a nonnegative number"
            )));
        }
        Ok(Self {
            values,
            norm,
            m_used,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm(&self) -> NormExponent {
        self.norm
    }

    pub fn m_used(&self) -> usize {
        self.m_used
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Bins sharing the minimum value.
    pub fn argmin(&self) -> Vec<usize> {
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == min)
            .map(|(k, _)| k)
            .collect()
    }
}

fn check_bin(ms: &MeasurementSet, k: usize) -> Result<()> {
    if k >= ms.n_len() {
        return Err(CsError::BinOutOfRange {
            bin: k,
            n_len: ms.n_len(),
        });
    }
    Ok(())
}

fn rotate_with(ms: &MeasurementSet, k: usize, tw: &Twiddles, out: &mut Vec<Complex64>) {
    out.clear();
    out.extend(
        ms.indices()
            .iter()
            .zip(ms.values())
            .map(|(&n, &x)| x * tw.inverse(k, n)),
    );
}

/// Demodulated samples `x(n_m) * exp(-j*2*pi*k*n_m/N)`.
pub fn rotated_samples(ms: &MeasurementSet, k: usize) -> Result<Vec<Complex64>> {
    check_bin(ms, k)?;
    let tw = Twiddles::new(ms.n_len());
    let mut out = Vec::with_capacity(ms.len());
    rotate_with(ms, k, &tw, &mut out);
    Ok(out)
}

fn mean(z: &[Complex64]) -> Complex64 {
    z.iter().sum::<Complex64>() / z.len() as f64
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 0 {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    } else {
        v[n / 2]
    }
}

/// Location of the bin-`k` demodulated samples minimizing `sum |z - mu|^L`.
///
/// L = 2 gives the mean (the 1/M-scaled partial DFT bin); L = 1 gives the
/// componentwise median of real and imaginary parts. Other exponents use
/// iteratively reweighted averaging started from the mean.
pub fn robust_transform_estimate(
    ms: &MeasurementSet,
    k: usize,
    norm: NormExponent,
) -> Result<Complex64> {
    if ms.is_empty() {
        return Err(CsError::NotEnoughMeasurements { needed: 1, got: 0 });
    }
    let z = rotated_samples(ms, k)?;
    Ok(location_estimate(&z, norm))
}

pub(crate) fn location_estimate(z: &[Complex64], norm: NormExponent) -> Complex64 {
    if norm == NormExponent::L2 {
        return mean(z);
    }
    if norm == NormExponent::L1 {
        let mut re: Vec<f64> = z.iter().map(|v| v.re).collect();
        let mut im: Vec<f64> = z.iter().map(|v| v.im).collect();
        return Complex64::new(median(&mut re), median(&mut im));
    }
    lp_location(z, norm)
}

fn lp_objective(z: &[Complex64], mu: Complex64, norm: NormExponent) -> f64 {
    z.iter().map(|v| norm.pow_from_sq((v - mu).norm_sqr())).sum()
}

/// Damped IRLS. For L > 2 the reweighted mean overshoots, so the step is
/// scaled by 1/(L-1) and halved further whenever the objective would rise.
fn lp_location(z: &[Complex64], norm: NormExponent) -> Complex64 {
    let l = norm.value();
    let mut mu = mean(z);
    let scale = z.iter().map(|v| (v - mu).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return mu;
    }
    let floor = 1e-12 * scale;
    let base_step = if l > 2.0 { 1.0 / (l - 1.0) } else { 1.0 };
    let mut obj = lp_objective(z, mu, norm);

    for _ in 0..LOCATION_MAX_ITERS {
        let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
        for v in z {
            let w = (v - mu).norm().max(floor).powf(l - 2.0);
            num += v * w;
            den += w;
        }
        let dir = num / den - mu;

        let mut h = base_step;
        let mut cand = mu + dir * h;
        let mut cand_obj = lp_objective(z, cand, norm);
        while cand_obj > obj && h > 1e-8 {
            h *= 0.5;
            cand = mu + dir * h;
            cand_obj = lp_objective(z, cand, norm);
        }
        if cand_obj > obj {
            break;
        }
        let delta = (cand - mu).norm();
        mu = cand;
        obj = cand_obj;
        if delta <= LOCATION_REL_TOL * mu.norm().max(scale) {
            break;
        }
    }
    mu
}

/// GD(k) for every bin, centered on the sample mean of the demodulated
/// samples. Requires at least two measurements.
pub fn generalized_deviation(ms: &MeasurementSet, norm: NormExponent) -> Result<GdProfile> {
    if ms.len() < 2 {
        return Err(CsError::NotEnoughMeasurements {
            needed: 2,
            got: ms.len(),
        });
    }
    let n_len = ms.n_len();
    let tw = Twiddles::new(n_len);
    let inv_m = 1.0 / ms.len() as f64;
    let mut z = Vec::with_capacity(ms.len());
    let values = (0..n_len)
        .map(|k| {
            rotate_with(ms, k, &tw, &mut z);
            let mu = mean(&z);
            z.iter()
                .map(|v| norm.pow_from_sq((v - mu).norm_sqr()))
                .sum::<f64>()
                * inv_m
        })
        .collect();
    Ok(GdProfile {
        values,
        norm,
        m_used: ms.len(),
    })
}

/// Expected GD at signal bin `j` relative to a non-signal bin:
/// `sum_{i != j} A_i^L / sum_i A_i^L`.
///
/// An expectation over random sample subsets, exact for L = 2 only; for
/// other exponents it is a rough guide.
pub fn analytic_gd_ratio(
    components: &[SpectralComponent],
    j: usize,
    norm: NormExponent,
) -> Result<f64> {
    if components.is_empty() {
        return Err(CsError::InvalidConfig("no components".into()));
    }
    if j >= components.len() {
        return Err(CsError::InvalidConfig(format!(
            "component index {j} out of range for {} components",
            components.len()
        )));
    }
    let total: f64 = components.iter().map(|c| norm.pow(c.amplitude)).sum();
    let others = total - norm.pow(components[j].amplitude);
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(others.max(0.0) / total)
}
