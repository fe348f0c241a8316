//! CSV tables and whitespace-separated plot data.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a file
//! read back parses to the exact same `f64` values. Plot files start with
//! `#` comment lines naming their columns and the seed they came from.

use std::io::Write;

use crate::error::Result;
use crate::experiments::{CampaignSummary, TrialResult};
use crate::gd::{GdProfile, NormExponent};
use crate::signal::{ComplexSignal, Spectrum};
use crate::support::ThresholdStrategy;

pub const TRIALS_HEADER: [&str; 9] = [
    "trial",
    "L",
    "strategy",
    "alpha",
    "support",
    "exact",
    "mse_time",
    "mse_freq",
    "failure",
];

pub const SUMMARY_HEADER: [&str; 14] = [
    "strategy",
    "alpha",
    "L",
    "trials",
    "exact_rate",
    "completed_rate",
    "median_mse_time",
    "median_mse_freq",
    "mean_mse_time",
    "empty_support",
    "oversized_support",
    "rank_deficient",
    "rank",
    "noise",
];

/// Six significant digits, for console tables.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.5e}")
}

/// One row per trial per norm.
pub fn write_trials_csv<W: Write>(
    out: W,
    strategy: &ThresholdStrategy,
    results: &[TrialResult],
    with_header: bool,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if with_header {
        w.write_record(TRIALS_HEADER)?;
    }
    for r in results {
        for o in &r.outcomes {
            w.write_record([
                r.trial_index.to_string(),
                o.norm.to_string(),
                strategy.kind().to_string(),
                strategy.alpha().to_string(),
                o.support.to_string(),
                u8::from(o.support_exact).to_string(),
                o.mse_time.to_string(),
                o.mse_freq.to_string(),
                o.failure
                    .as_ref()
                    .map(|f| f.tag().to_string())
                    .unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per strategy per norm; `rank` is 1 for the lowest median MSE.
pub fn write_summary_csv<W: Write>(
    out: W,
    summaries: &[CampaignSummary],
    noise_label: &str,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for s in summaries {
        for n in &s.norms {
            let rank = s.ranking.iter().position(|r| *r == n.norm).unwrap_or(0) + 1;
            w.write_record([
                s.strategy.kind().to_string(),
                s.strategy.alpha().to_string(),
                n.norm.to_string(),
                n.trials.to_string(),
                n.exact_rate.to_string(),
                n.completed_rate.to_string(),
                n.median_mse_time.to_string(),
                n.median_mse_freq.to_string(),
                n.mean_mse_time.to_string(),
                n.failures.empty_support.to_string(),
                n.failures.oversized_support.to_string(),
                n.failures.rank_deficient.to_string(),
                rank.to_string(),
                noise_label.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Columns `k`, then `gd_L<l> t_L<l>` for each profile.
pub fn write_gd_profile<W: Write>(
    mut out: W,
    profiles: &[(GdProfile, f64)],
    comment: &str,
) -> Result<()> {
    writeln!(out, "# {comment}")?;
    let mut header = String::from("# k");
    for (p, _) in profiles {
        header.push_str(&format!(" gd_L{0} t_L{0}", p.norm()));
    }
    writeln!(out, "{header}")?;
    let n_len = profiles.first().map_or(0, |(p, _)| p.len());
    for k in 0..n_len {
        write!(out, "{k}")?;
        for (p, t) in profiles {
            write!(out, " {} {}", p.values()[k], t)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// `k |X_desired(k)| |X_reconstructed(k)|`
pub fn write_spectrum_overlay<W: Write>(
    mut out: W,
    norm: NormExponent,
    desired: &Spectrum,
    reconstructed: &Spectrum,
    comment: &str,
) -> Result<()> {
    writeln!(out, "# {comment}")?;
    writeln!(out, "# k abs_desired abs_reconstructed_L{norm}")?;
    for (k, (d, r)) in desired.bins().iter().zip(reconstructed.bins()).enumerate() {
        writeln!(out, "{k} {} {}", d.norm(), r.norm())?;
    }
    Ok(())
}

/// `n Re x(n) Re x_hat(n)`
pub fn write_time_overlay<W: Write>(
    mut out: W,
    norm: NormExponent,
    desired: &ComplexSignal,
    reconstructed: &ComplexSignal,
    comment: &str,
) -> Result<()> {
    writeln!(out, "# {comment}")?;
    writeln!(out, "# n re_desired re_reconstructed_L{norm}")?;
    for (n, (d, r)) in desired
        .samples()
        .iter()
        .zip(reconstructed.samples())
        .enumerate()
    {
        writeln!(out, "{n} {} {}", d.re, r.re)?;
    }
    Ok(())
}
