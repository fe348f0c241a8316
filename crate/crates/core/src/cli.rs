//! Command-line front end: `gd`, `reconstruct`, `bench` and `noise`.
//!
//! Every command resolves its full configuration and computes all results
//! before creating the output directory, so a bad config leaves no files
//! behind.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{CliConfig, Origin, Settings};
use crate::error::{CsError, Result};
use crate::experiments::{reconstruct, run_trials, summarize, trial_inputs, trial_rng, ExperimentConfig};
use crate::noise::generate_noise;
use crate::output::{
    sig6, write_gd_profile, write_spectrum_overlay, write_summary_csv, write_time_overlay,
    write_trials_csv,
};

#[derive(Debug, Parser)]
#[command(
    name = "robust-cs",
    version,
    about = "Sparse spectral reconstruction from random samples with selectable Lp deviation norms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the GD profile and threshold of one trial and print the detected support.
    Gd(CommonArgs),
    /// Reconstruct one trial with every norm; write spectrum and time overlays.
    Reconstruct(CommonArgs),
    /// Run a Monte Carlo campaign; write trials.csv and summary.csv.
    Bench(CommonArgs),
    /// Draw one noise realization and write it to noise.dat.
    Noise(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// example1 | example2 | noiseless
    #[arg(long)]
    pub preset: Option<String>,
    /// Key = value config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Signal length N.
    #[arg(long)]
    pub n: Option<String>,
    /// Number of available samples M.
    #[arg(long)]
    pub m: Option<String>,
    /// gaussian | laplace | cauchy | cubic | none
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long)]
    pub sigma1: Option<String>,
    #[arg(long)]
    pub sigma2: Option<String>,
    /// Comma-separated norm exponents, e.g. 1,2,3
    #[arg(long)]
    pub norms: Option<String>,
    /// max | mean | median (comma list compares strategies in `bench`)
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Trial index used by `gd`, `reconstruct` and `noise`.
    #[arg(long)]
    pub trial: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip the plot-data files.
    #[arg(long)]
    pub no_figures: bool,
}

impl CommonArgs {
    fn flag_settings(&self) -> Result<Settings> {
        let mut s = Settings::default();
        let pairs = [
            ("preset", &self.preset),
            ("n", &self.n),
            ("m", &self.m),
            ("noise", &self.noise),
            ("sigma1", &self.sigma1),
            ("sigma2", &self.sigma2),
            ("norms", &self.norms),
            ("strategy", &self.strategy),
            ("alpha", &self.alpha),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("trial", &self.trial),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                s.apply(key, v, Origin::Flag)?;
            }
        }
        if let Some(out) = &self.out {
            s.apply("out", &out.to_string_lossy(), Origin::Flag)?;
        }
        if self.no_figures {
            s.apply("figures", "false", Origin::Flag)?;
        }
        Ok(s)
    }

    /// Preset, then config file, then flags.
    pub fn resolve(&self) -> Result<CliConfig> {
        let file = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        file.overlay(self.flag_settings()?).resolve()
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| CsError::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn provenance(cfg: &CliConfig) -> String {
    let e = &cfg.experiment;
    format!(
        "preset={} noise={} N={} M={} strategy={} seed={} trial={}",
        cfg.preset.map_or("custom", |p| p.name()),
        cfg.noise_label(),
        e.n_len,
        e.m,
        e.strategy,
        e.master_seed,
        cfg.trial
    )
}

pub fn cmd_gd(cfg: &CliConfig, stdout: &mut dyn Write) -> Result<()> {
    let e = &cfg.experiment;
    let inputs = trial_inputs(e, cfg.trial)?;
    let recs = e
        .norms
        .iter()
        .map(|&l| reconstruct(&inputs.measurements, l, &e.strategy))
        .collect::<Result<Vec<_>>>()?;

    fs::create_dir_all(&cfg.out_dir)?;
    let profiles: Vec<_> = recs
        .iter()
        .map(|r| (r.profile.clone(), r.threshold))
        .collect();
    let mut f = create(&cfg.out_dir, "gd_profile.dat")?;
    write_gd_profile(&mut f, &profiles, &provenance(cfg))?;
    f.flush()?;

    writeln!(stdout, "{}", provenance(cfg))?;
    for (l, r) in e.norms.iter().zip(&recs) {
        writeln!(
            stdout,
            "L={l}  T={}  support={{{}}}",
            sig6(r.threshold),
            r.support.bins().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", ")
        )?;
    }
    Ok(())
}

pub fn cmd_reconstruct(cfg: &CliConfig, stdout: &mut dyn Write) -> Result<()> {
    let e = &cfg.experiment;
    let inputs = trial_inputs(e, cfg.trial)?;
    let truth = e.true_support();
    let recs = e
        .norms
        .iter()
        .map(|&l| reconstruct(&inputs.measurements, l, &e.strategy))
        .collect::<Result<Vec<_>>>()?;

    fs::create_dir_all(&cfg.out_dir)?;
    if cfg.figures {
        let tag = provenance(cfg);
        for (&l, r) in e.norms.iter().zip(&recs) {
            let mut f = create(&cfg.out_dir, &format!("spectrum_L{l}.dat"))?;
            write_spectrum_overlay(&mut f, l, &inputs.clean_spectrum, &r.spectrum_or_zero(), &tag)?;
            f.flush()?;
            let mut f = create(&cfg.out_dir, &format!("time_L{l}.dat"))?;
            write_time_overlay(&mut f, l, &inputs.clean, &r.signal_or_zero(), &tag)?;
            f.flush()?;
        }
    }

    writeln!(stdout, "{}", provenance(cfg))?;
    writeln!(
        stdout,
        "{:>5}  {:>12}  {:>12}  {:>5}  {:<20}  status",
        "L", "mse_time", "mse_freq", "exact", "support"
    )?;
    let mut any_ok = false;
    for (&l, r) in e.norms.iter().zip(&recs) {
        let mse_time = r.signal_or_zero().mse(&inputs.clean)?;
        let mse_freq = r.spectrum_or_zero().mse(&inputs.clean_spectrum)?;
        let status = match &r.outcome {
            Ok(_) => {
                any_ok = true;
                "ok".to_string()
            }
            Err(f) => format!("failed: {f}"),
        };
        writeln!(
            stdout,
            "{:>5}  {:>12}  {:>12}  {:>5}  {:<20}  {status}",
            l.to_string(),
            sig6(mse_time),
            sig6(mse_freq),
            if r.support == truth { "yes" } else { "no" },
            r.support.to_string(),
        )?;
    }
    if any_ok {
        Ok(())
    } else {
        Err(CsError::AllNormsFailed)
    }
}

pub fn cmd_bench(cfg: &CliConfig, stdout: &mut dyn Write) -> Result<()> {
    let mut runs = Vec::with_capacity(cfg.strategies.len());
    for &strategy in &cfg.strategies {
        let exp = ExperimentConfig {
            strategy,
            ..cfg.experiment.clone()
        };
        let results = run_trials(&exp)?;
        let summary = summarize(strategy, &exp.norms, &results);
        runs.push((strategy, results, summary));
    }

    fs::create_dir_all(&cfg.out_dir)?;
    let mut f = create(&cfg.out_dir, "trials.csv")?;
    for (i, (strategy, results, _)) in runs.iter().enumerate() {
        write_trials_csv(&mut f, strategy, results, i == 0)?;
    }
    f.flush()?;
    let summaries: Vec<_> = runs.iter().map(|(_, _, s)| s.clone()).collect();
    let mut f = create(&cfg.out_dir, "summary.csv")?;
    write_summary_csv(&mut f, &summaries, &cfg.noise_label())?;
    f.flush()?;

    writeln!(stdout, "{} trials={}", provenance(cfg), cfg.experiment.trials)?;
    for s in &summaries {
        writeln!(stdout, "strategy {}", s.strategy)?;
        writeln!(
            stdout,
            "{:>5}  {:>10}  {:>10}  {:>14}  {:>14}  {:>8}",
            "L", "exact", "completed", "median_mse_t", "median_mse_f", "failures"
        )?;
        for n in &s.norms {
            writeln!(
                stdout,
                "{:>5}  {:>10}  {:>10}  {:>14}  {:>14}  {:>8}",
                n.norm.to_string(),
                sig6(n.exact_rate),
                sig6(n.completed_rate),
                sig6(n.median_mse_time),
                sig6(n.median_mse_freq),
                n.failures.total()
            )?;
        }
        let ranking: Vec<String> = s.ranking.iter().map(|l| format!("l{l}")).collect();
        writeln!(stdout, "ranking (median time MSE): {}", ranking.join(" < "))?;
    }
    Ok(())
}

pub fn cmd_noise(cfg: &CliConfig, stdout: &mut dyn Write) -> Result<()> {
    let e = &cfg.experiment;
    let Some(spec) = e.noise else {
        return Err(CsError::InvalidConfig("`noise` needs a noise family, not none".into()));
    };
    let mut rng = trial_rng(e.master_seed, cfg.trial);
    let noise = generate_noise(&spec, e.n_len, &mut rng);

    fs::create_dir_all(&cfg.out_dir)?;
    let mut f = create(&cfg.out_dir, "noise.dat")?;
    writeln!(f, "# {}", provenance(cfg))?;
    writeln!(f, "# n re im")?;
    for (n, z) in noise.iter().enumerate() {
        writeln!(f, "{n} {} {}", z.re, z.im)?;
    }
    f.flush()?;

    let mut moduli: Vec<f64> = noise.iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    let median = moduli[moduli.len() / 2];
    let max = moduli[moduli.len() - 1];
    writeln!(
        stdout,
        "{} samples of {}: median |noise| {}, max |noise| {}",
        noise.len(),
        cfg.noise_label(),
        sig6(median),
        sig6(max)
    )?;
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Gd(a) => cmd_gd(&a.resolve()?, stdout),
        Command::Reconstruct(a) => cmd_reconstruct(&a.resolve()?, stdout),
        Command::Bench(a) => cmd_bench(&a.resolve()?, stdout),
        Command::Noise(a) => cmd_noise(&a.resolve()?, stdout),
    }
}

/// Parse `args` (program name first) and run the command.
pub fn run_from_args<I, T>(args: I, stdout: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CsError::InvalidConfig(e.to_string()))?;
    execute(&cli, stdout)
}
