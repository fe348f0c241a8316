//! Non-iterative compressive-sensing reconstruction of frequency-sparse
//! complex signals.
//!
//! The pipeline takes a random subset of time-domain samples, computes the
//! per-bin generalized deviation (GD) of the demodulated samples under an
//! `|e|^L` error functional, keeps the bins whose GD falls below a
//! threshold, and solves the partial DFT least-squares system on that
//! support. Changing `L` swaps the minimization norm without touching the
//! rest of the algorithm.
//!
//! Modules, bottom-up:
//!
//! - [`signal`]: sparse exponential synthesis, DFT/IDFT, random subsampling
//! - [`noise`]: Gaussian, Laplace, Cauchy and cubic-Gaussian noise
//! - [`gd`]: robust location estimates and GD profiles
//! - [`support`]: thresholding a GD profile into a frequency support
//! - [`reconstruction`]: partial DFT system and QR least squares
//! - [`experiments`]: seeded Monte Carlo trials and campaigns
//! - [`config`], [`output`], [`cli`]: the experiment front end

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod gd;
pub mod noise;
pub mod output;
pub mod reconstruction;
pub mod signal;
pub mod support;

pub use error::{CsError, Result};
pub use num_complex::Complex64;
