//! Complex noise generators and the maximum-likelihood norm of each family.
//!
//! All generators draw from the caller's random source in a fixed order, so
//! a seeded source gives a reproducible realization. Standard normals come
//! from `rand_distr::StandardNormal` (ziggurat); Laplace variates use the
//! inverse CDF on an open-interval uniform. Both are pinned by the crate
//! versions in `Cargo.lock`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal};

use crate::error::{CsError, Result};
use crate::gd::NormExponent;
use crate::signal::MeasurementSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    Gaussian,
    Laplace,
    /// Ratio of two independent complex Gaussians.
    Cauchy,
    /// Real and imaginary parts are cubed Gaussians.
    CubicGaussian,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 4] = [
        NoiseKind::Gaussian,
        NoiseKind::Laplace,
        NoiseKind::Cauchy,
        NoiseKind::CubicGaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Laplace => "laplace",
            NoiseKind::Cauchy => "cauchy",
            NoiseKind::CubicGaussian => "cubic",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "gauss" => Ok(NoiseKind::Gaussian),
            "laplace" => Ok(NoiseKind::Laplace),
            "cauchy" => Ok(NoiseKind::Cauchy),
            "cubic" | "cubicgaussian" | "cubic-gaussian" => Ok(NoiseKind::CubicGaussian),
            other => Err(format!(
                "unknown noise family `{other}` (expected gaussian, laplace, cauchy or cubic)"
            )),
        }
    }
}

/// Noise family with real-axis scale `sigma1` and imaginary-axis scale `sigma2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    kind: NoiseKind,
    sigma1: f64,
    sigma2: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, sigma1: f64, sigma2: f64) -> Result<Self> {
        for s in [sigma1, sigma2] {
            if !s.is_finite() || s <= 0.0 {
                return Err(CsError::InvalidNoiseScale(s));
            }
        }
        Ok(Self {
            kind,
            sigma1,
            sigma2,
        })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
}

fn normals<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

fn laplaces<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| {
            let u: f64 = Open01.sample(rng);
            let u = u - 0.5;
            -u.signum() * (1.0 - 2.0 * u.abs()).ln()
        })
        .collect()
}

/// Draw `n_len` complex noise values. Component vectors are drawn one after
/// another (all real parts, then all imaginary parts, and for Cauchy the two
/// denominator vectors), never interleaved.
pub fn generate_noise<R: Rng + ?Sized>(
    spec: &NoiseSpec,
    n_len: usize,
    rng: &mut R,
) -> Vec<Complex64> {
    let (s1, s2) = (spec.sigma1, spec.sigma2);
    match spec.kind {
        NoiseKind::Gaussian => {
            let re = normals(rng, n_len);
            let im = normals(rng, n_len);
            re.iter()
                .zip(&im)
                .map(|(a, b)| Complex64::new(s1 * a, s2 * b))
                .collect()
        }
        NoiseKind::Laplace => {
            let re = laplaces(rng, n_len);
            let im = laplaces(rng, n_len);
            re.iter()
                .zip(&im)
                .map(|(a, b)| Complex64::new(s1 * a, s2 * b))
                .collect()
        }
        NoiseKind::Cauchy => {
            let g1 = normals(rng, n_len);
            let g2 = normals(rng, n_len);
            let g3 = normals(rng, n_len);
            let g4 = normals(rng, n_len);
            (0..n_len)
                .map(|i| {
                    let num = Complex64::new(s1 * g1[i], s2 * g2[i]);
                    let den = Complex64::new(s1 * g3[i], s2 * g4[i]);
                    num / den
                })
                .collect()
        }
        NoiseKind::CubicGaussian => {
            let re = normals(rng, n_len);
            let im = normals(rng, n_len);
            re.iter()
                .zip(&im)
                .map(|(a, b)| Complex64::new((s1 * a).powi(3), (s2 * b).powi(3)))
                .collect()
        }
    }
}

/// Add one noise realization to every retained sample.
pub fn add_noise<R: Rng + ?Sized>(
    measurements: &MeasurementSet,
    spec: &NoiseSpec,
    rng: &mut R,
) -> MeasurementSet {
    let noise = generate_noise(spec, measurements.len(), rng);
    let values = measurements
        .values()
        .iter()
        .zip(&noise)
        .map(|(v, e)| v + e)
        .collect();
    measurements
        .with_values(values)
        .expect("indices are unchanged")
}

/// Which norm exponent suits a noise family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MlNorm {
    /// `|e|^L` is the negative log-density, so `L` is the ML choice.
    Exact(NormExponent),
    /// No finite `L` matches the density; this is the empirically preferred one.
    Empirical(NormExponent),
}

impl MlNorm {
    pub fn exponent(&self) -> NormExponent {
        match *self {
            MlNorm::Exact(l) | MlNorm::Empirical(l) => l,
        }
    }
}

pub fn ml_norm_for(kind: NoiseKind) -> MlNorm {
    match kind {
        NoiseKind::Gaussian => MlNorm::Exact(NormExponent::L2),
        NoiseKind::Laplace => MlNorm::Exact(NormExponent::L1),
        NoiseKind::Cauchy | NoiseKind::CubicGaussian => MlNorm::Empirical(NormExponent::L3),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{reference_components, sample_measurements, synthesize_sparse_signal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn spec(kind: NoiseKind, s: f64) -> NoiseSpec {
        NoiseSpec::new(kind, s, s).unwrap()
    }

    fn median(mut v: Vec<f64>) -> f64 {
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n % 2 == 0 {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        } else {
            v[n / 2]
        }
    }

    fn variance(v: &[f64]) -> f64 {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64
    }

    #[test]
    fn invalid_scales_rejected() {
        assert!(NoiseSpec::new(NoiseKind::Gaussian, 0.0, 1.0).is_err());
        assert!(NoiseSpec::new(NoiseKind::Gaussian, 1.0, -1.0).is_err());
        assert!(NoiseSpec::new(NoiseKind::Gaussian, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn cauchy_is_heavy_tailed_with_unit_median_modulus() {
        let small = generate_noise(&spec(NoiseKind::Cauchy, 1.0), 128, &mut rng(1));
        assert_eq!(small.len(), 128);

        let big = generate_noise(&spec(NoiseKind::Cauchy, 1.0), 100_000, &mut rng(2));
        let med = median(big.iter().map(|z| z.norm()).collect());
        // |num|/|den| is a ratio of iid Rayleighs: median exactly 1.
        assert!((med - 1.0).abs() < 0.05, "median modulus {med}");
        let max = big.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max > 100.0, "max modulus {max}");
    }

    #[test]
    fn cauchy_draws_are_independent() {
        let z = generate_noise(&spec(NoiseKind::Cauchy, 1.0), 10_000, &mut rng(3));
        let near_one = z
            .iter()
            .filter(|v| (*v - Complex64::new(1.0, 0.0)).norm() < 1e-6)
            .count();
        assert!(near_one < 100, "{near_one} values at 1+0j");
    }

    #[test]
    fn cubic_real_variance_matches_sixth_moment() {
        // Oracle: E[Z^6] = 5!! = 15 for standard normal Z.
        let z = generate_noise(&spec(NoiseKind::CubicGaussian, 1.0), 1_000_000, &mut rng(4));
        let re: Vec<f64> = z.iter().map(|v| v.re).collect();
        let var = variance(&re);
        assert!((14.5..=15.5).contains(&var), "variance {var}");
    }

    #[test]
    fn gaussian_real_variance_is_sigma_squared() {
        let s = NoiseSpec::new(NoiseKind::Gaussian, 1.7, 0.4).unwrap();
        let z = generate_noise(&s, 1_000_000, &mut rng(5));
        let re: Vec<f64> = z.iter().map(|v| v.re).collect();
        let im: Vec<f64> = z.iter().map(|v| v.im).collect();
        assert!((variance(&re) / (1.7 * 1.7) - 1.0).abs() < 0.02);
        assert!((variance(&im) / (0.4 * 0.4) - 1.0).abs() < 0.02);
    }

    #[test]
    fn laplace_matches_unit_scale_moments() {
        // Standard Laplace: variance 2, E|X| = 1.
        let z = generate_noise(&spec(NoiseKind::Laplace, 1.0), 1_000_000, &mut rng(6));
        let re: Vec<f64> = z.iter().map(|v| v.re).collect();
        assert!((variance(&re) - 2.0).abs() < 0.04);
        let mean_abs = re.iter().map(|x| x.abs()).sum::<f64>() / re.len() as f64;
        assert!((mean_abs - 1.0).abs() < 0.01);
        assert!(z.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    }

    #[test]
    fn vanishing_gaussian_is_negligible() {
        let z = generate_noise(&spec(NoiseKind::Gaussian, 1e-12), 128, &mut rng(7));
        assert!(z.iter().all(|v| v.norm() < 1e-9));
    }

    #[test]
    fn same_seed_same_bits() {
        for kind in NoiseKind::ALL {
            let a = generate_noise(&spec(kind, 1.3), 257, &mut rng(11));
            let b = generate_noise(&spec(kind, 1.3), 257, &mut rng(11));
            let bits = |v: &[Complex64]| -> Vec<(u64, u64)> {
                v.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
            };
            assert_eq!(bits(&a), bits(&b), "{kind}");
        }
    }

    #[test]
    fn add_noise_keeps_indices() {
        let x = synthesize_sparse_signal(&reference_components(), 128).unwrap();
        let ms = sample_measurements(&x, 64, &mut rng(8)).unwrap();

        let quiet = add_noise(&ms, &spec(NoiseKind::Gaussian, 1e-12), &mut rng(9));
        assert_eq!(quiet.indices(), ms.indices());
        for (a, b) in quiet.values().iter().zip(ms.values()) {
            assert!((a - b).norm() < 1e-9);
        }

        let a = add_noise(&ms, &spec(NoiseKind::Cauchy, 1.0), &mut rng(10));
        let b = add_noise(&ms, &spec(NoiseKind::Cauchy, 1.0), &mut rng(10));
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
        assert_ne!(a.values(), ms.values());
    }

    #[test]
    fn ml_norms() {
        assert_eq!(ml_norm_for(NoiseKind::Gaussian), MlNorm::Exact(NormExponent::L2));
        assert_eq!(ml_norm_for(NoiseKind::Laplace), MlNorm::Exact(NormExponent::L1));
        assert_eq!(ml_norm_for(NoiseKind::Cauchy), MlNorm::Empirical(NormExponent::L3));
        assert_eq!(
            ml_norm_for(NoiseKind::CubicGaussian).exponent(),
            NormExponent::L3
        );
    }

    #[test]
    fn parse_names() {
        for kind in NoiseKind::ALL {
            assert_eq!(kind.name().parse::<NoiseKind>(), Ok(kind));
        }
        assert!("poisson".parse::<NoiseKind>().is_err());
    }
}
