//! Sparse complex-exponential signals, the 1/N-normalized DFT and random
//! subsampling into measurement sets.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{CsError, Result};

/// One complex exponential `amplitude * exp(j(2*pi*bin*n/N + phase))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralComponent {
    pub bin: usize,
    pub amplitude: f64,
    pub phase: f64,
}

impl SpectralComponent {
    pub fn new(bin: usize, amplitude: f64, phase: f64) -> Result<Self> {
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(CsError::InvalidAmplitude(amplitude));
        }
        Ok(Self {
            bin,
            amplitude,
            phase,
        })
    }

    /// Complex amplitude `A * e^{j*phase}`, i.e. the DFT coefficient at `bin`.
    pub fn coefficient(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }
}

/// The three-tone test signal: bins 16, 32, 64 with amplitudes 4, 3, 2
/// and zero phase (intended for `N = 128`).
pub fn reference_components() -> Vec<SpectralComponent> {
    vec![
        SpectralComponent {
            bin: 16,
            amplitude: 4.0,
            phase: 0.0,
        },
        SpectralComponent {
            bin: 32,
            amplitude: 3.0,
            phase: 0.0,
        },
        SpectralComponent {
            bin: 64,
            amplitude: 2.0,
            phase: 0.0,
        },
    ]
}

/// `exp(j*2*pi*idx/n_len)`, with `idx` reduced modulo `n_len` first so that
/// kernel values for `k*n` products are exactly periodic.
pub(crate) fn unit_root(idx: usize, n_len: usize) -> Complex64 {
    let r = idx % n_len;
    Complex64::from_polar(1.0, TAU * r as f64 / n_len as f64)
}

/// Table of the `n_len` roots of unity `exp(j*2*pi*r/n_len)`.
#[derive(Debug, Clone)]
pub(crate) struct Twiddles {
    roots: Vec<Complex64>,
}

impl Twiddles {
    pub(crate) fn new(n_len: usize) -> Self {
        Self {
            roots: (0..n_len).map(|r| unit_root(r, n_len)).collect(),
        }
    }

    /// `exp(+j*2*pi*k*n/N)`
    #[inline]
    pub(crate) fn forward(&self, k: usize, n: usize) -> Complex64 {
        let len = self.roots.len();
        self.roots[(k % len) * (n % len) % len]
    }

    /// `exp(-j*2*pi*k*n/N)`
    #[inline]
    pub(crate) fn inverse(&self, k: usize, n: usize) -> Complex64 {
        self.forward(k, n).conj()
    }
}

/// Length-N complex time-domain samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    samples: Vec<Complex64>,
}

impl ComplexSignal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(CsError::EmptySignal);
        }
        Ok(Self { samples })
    }

    pub fn zeros(n_len: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n_len])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Mean squared modulus of the difference to `other`.
    pub fn mse(&self, other: &ComplexSignal) -> Result<f64> {
        mean_sq_diff(&self.samples, &other.samples)
    }
}

/// N complex DFT bins indexed by k.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(bins: Vec<Complex64>) -> Result<Self> {
        if bins.is_empty() {
            return Err(CsError::EmptySignal);
        }
        Ok(Self { bins })
    }

    pub fn zeros(n_len: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n_len])
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn mse(&self, other: &Spectrum) -> Result<f64> {
        mean_sq_diff(&self.bins, &other.bins)
    }
}

fn mean_sq_diff(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(CsError::LengthMismatch(format!(
            "{} vs {} samples",
            a.len(),
            b.len()
        )));
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    Ok(sum / a.len() as f64)
}

/// Sum of the given exponentials evaluated at `n = 0..n_len`.
pub fn synthesize_sparse_signal(
    components: &[SpectralComponent],
    n_len: usize,
) -> Result<ComplexSignal> {
    if n_len == 0 {
        return Err(CsError::EmptySignal);
    }
    let mut seen = vec![false; n_len];
    for c in components {
        if c.bin >= n_len {
            return Err(CsError::BinOutOfRange { bin: c.bin, n_len });
        }
        if std::mem::replace(&mut seen[c.bin], true) {
            return Err(CsError::DuplicateBin(c.bin));
        }
        if !c.amplitude.is_finite() || c.amplitude < 0.0 {
            return Err(CsError::InvalidAmplitude(c.amplitude));
        }
    }

    let tw = Twiddles::new(n_len);
    let samples = (0..n_len)
        .map(|n| {
            components
                .iter()
                .map(|c| c.coefficient() * tw.forward(c.bin, n))
                .sum()
        })
        .collect();
    ComplexSignal::new(samples)
}

/// `X(k) = (1/N) * sum_n x(n) exp(-j*2*pi*k*n/N)`.
pub fn dft(signal: &ComplexSignal) -> Spectrum {
    let n_len = signal.len();
    let tw = Twiddles::new(n_len);
    let scale = 1.0 / n_len as f64;
    let bins = (0..n_len)
        .map(|k| {
            let acc: Complex64 = signal
                .samples
                .iter()
                .enumerate()
                .map(|(n, &x)| x * tw.inverse(k, n))
                .sum();
            acc * scale
        })
        .collect();
    Spectrum { bins }
}

/// Inverse of [`dft`]: `x(n) = sum_k X(k) exp(j*2*pi*k*n/N)`.
pub fn idft(spectrum: &Spectrum) -> ComplexSignal {
    let n_len = spectrum.len();
    let tw = Twiddles::new(n_len);
    let samples = (0..n_len)
        .map(|n| {
            spectrum
                .bins
                .iter()
                .enumerate()
                .map(|(k, &x)| x * tw.forward(k, n))
                .sum()
        })
        .collect();
    ComplexSignal { samples }
}

/// The M retained samples of a length-N signal.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    indices: Vec<usize>,
    values: Vec<Complex64>,
    n_len: usize,
}

impl MeasurementSet {
    /// Indices must be strictly increasing and below `n_len`.
    pub fn new(indices: Vec<usize>, values: Vec<Complex64>, n_len: usize) -> Result<Self> {
        if n_len == 0 {
            return Err(CsError::EmptySignal);
        }
        if indices.len() != values.len() {
            return Err(CsError::InvalidMeasurements(format!(
                "{} indices but {} values",
                indices.len(),
                values.len()
            )));
        }
        if indices.len() > n_len {
            return Err(CsError::TooManyMeasurements {
                m: indices.len(),
                n_len,
            });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CsError::InvalidMeasurements(
                "indices must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = indices.last() {
            if last >= n_len {
                return Err(CsError::BinOutOfRange { bin: last, n_len });
            }
        }
        Ok(Self {
            indices,
            values,
            n_len,
        })
    }

    /// Samples of `signal` at the given indices.
    pub fn from_signal(signal: &ComplexSignal, indices: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= signal.len()) {
            return Err(CsError::BinOutOfRange {
                bin: bad,
                n_len: signal.len(),
            });
        }
        let values = indices.iter().map(|&i| signal.samples[i]).collect();
        Self::new(indices, values, signal.len())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn n_len(&self) -> usize {
        self.n_len
    }

    /// Number of available samples M.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Same indices, new values.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Self::new(self.indices.clone(), values, self.n_len)
    }

    /// Multiply every value by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
            n_len: self.n_len,
        }
    }
}

/// Draw `m` indices uniformly without replacement and copy the signal values
/// at those positions. Indices come back sorted.
pub fn sample_measurements<R: Rng + ?Sized>(
    signal: &ComplexSignal,
    m: usize,
    rng: &mut R,
) -> Result<MeasurementSet> {
    let n_len = signal.len();
    if m > n_len {
        return Err(CsError::TooManyMeasurements { m, n_len });
    }
    let mut indices = rand::seq::index::sample(rng, n_len, m).into_vec();
    indices.sort_unstable();
    MeasurementSet::from_signal(signal, indices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn reference_signal_first_sample() {
        let x = synthesize_sparse_signal(&reference_components(), 128).unwrap();
        assert_eq!(x.len(), 128);
        assert!((x.samples()[0] - c(9.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn empty_component_list_is_zero() {
        let x = synthesize_sparse_signal(&[], 8).unwrap();
        assert!(x.samples().iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn quarter_turn_phase() {
        let comp = SpectralComponent::new(1, 1.0, FRAC_PI_2).unwrap();
        let x = synthesize_sparse_signal(&[comp], 4).unwrap();
        let want = [c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0)];
        assert!(max_err(x.samples(), &want) < 1e-12);
    }

    #[test]
    fn synthesis_rejects_bad_components() {
        let a = SpectralComponent::new(3, 1.0, 0.0).unwrap();
        assert_eq!(
            synthesize_sparse_signal(&[a, a], 8),
            Err(CsError::DuplicateBin(3))
        );
        let b = SpectralComponent::new(8, 1.0, 0.0).unwrap();
        assert_eq!(
            synthesize_sparse_signal(&[b], 8),
            Err(CsError::BinOutOfRange { bin: 8, n_len: 8 })
        );
        assert!(SpectralComponent::new(0, -1.0, 0.0).is_err());
    }

    #[test]
    fn dft_single_tone() {
        let comp = SpectralComponent::new(16, 4.0, 0.0).unwrap();
        let spec = dft(&synthesize_sparse_signal(&[comp], 128).unwrap());
        for (k, v) in spec.bins().iter().enumerate() {
            let want = if k == 16 { c(4.0, 0.0) } else { c(0.0, 0.0) };
            assert!((v - want).norm() < 1e-12, "bin {k}: {v}");
        }
    }

    #[test]
    fn dft_reference_signal_amplitudes() {
        let spec = dft(&synthesize_sparse_signal(&reference_components(), 128).unwrap());
        for (k, v) in spec.bins().iter().enumerate() {
            let want = match k {
                16 => 4.0,
                32 => 3.0,
                64 => 2.0,
                _ => 0.0,
            };
            assert!((v - c(want, 0.0)).norm() < 1e-12, "bin {k}: {v}");
        }
        let nonzero = spec.bins().iter().filter(|v| v.norm() > 1e-9).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn dft_of_constant_is_dc() {
        let x = ComplexSignal::new(vec![c(1.0, 0.0); 8]).unwrap();
        let spec = dft(&x);
        assert!((spec.bins()[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(spec.bins()[1..].iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn idft_cases() {
        let x = synthesize_sparse_signal(&reference_components(), 128).unwrap();
        assert!(max_err(idft(&dft(&x)).samples(), x.samples()) < 1e-10);

        let zero = idft(&Spectrum::zeros(16).unwrap());
        assert!(zero.samples().iter().all(|v| v.norm() == 0.0));

        let mut bins = vec![c(0.0, 0.0); 16];
        bins[0] = c(2.5, -1.0);
        let dc = idft(&Spectrum::new(bins).unwrap());
        assert!(dc.samples().iter().all(|v| (v - c(2.5, -1.0)).norm() < 1e-15));
    }

    #[test]
    fn full_sampling_copies_signal() {
        let x = synthesize_sparse_signal(&reference_components(), 128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ms = sample_measurements(&x, 128, &mut rng).unwrap();
        assert_eq!(ms.indices(), (0..128).collect::<Vec<_>>().as_slice());
        assert_eq!(ms.values(), x.samples());
    }

    #[test]
    fn half_sampling_is_sorted_and_reproducible() {
        let x = synthesize_sparse_signal(&reference_components(), 128).unwrap();
        let a = sample_measurements(&x, 64, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_measurements(&x, 64, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a.len(), 64);
        assert!(a.indices().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(a, b);
    }

    #[test]
    fn oversampling_is_rejected() {
        let x = ComplexSignal::zeros(8).unwrap();
        let err = sample_measurements(&x, 9, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(err, Err(CsError::TooManyMeasurements { m: 9, n_len: 8 }));
    }

    #[test]
    fn measurement_set_validation() {
        let v = vec![c(0.0, 0.0); 2];
        assert!(MeasurementSet::new(vec![1, 1], v.clone(), 4).is_err());
        assert!(MeasurementSet::new(vec![2, 1], v.clone(), 4).is_err());
        assert!(MeasurementSet::new(vec![1, 4], v.clone(), 4).is_err());
        assert!(MeasurementSet::new(vec![1], v.clone(), 4).is_err());
        assert!(MeasurementSet::new(vec![0, 3], v, 4).is_ok());
    }

    #[test]
    fn sampled_indices_always_distinct_and_sorted() {
        let mut meta = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..1000 {
            let n_len = meta.random_range(1..=256usize);
            let m = meta.random_range(0..=n_len);
            let seed: u64 = meta.random();
            let x = ComplexSignal::zeros(n_len).unwrap();
            let ms = sample_measurements(&x, m, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(ms.len(), m);
            assert!(ms.indices().windows(2).all(|w| w[0] < w[1]));
            assert!(ms.indices().iter().all(|&i| i < n_len));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn signal(n_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
            prop::collection::vec(
                (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(re, im)| c(re, im)),
                n_len,
            )
        }

        fn sized_pair() -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>)> {
            prop_oneof![Just(4usize), Just(8), Just(128)]
                .prop_flat_map(|n| (signal(n), signal(n)))
        }

        proptest! {
            #[test]
            fn dft_is_linear(
                (x, z) in sized_pair(),
                a in (-3.0f64..3.0, -3.0f64..3.0),
                b in (-3.0f64..3.0, -3.0f64..3.0),
            ) {
                let (a, b) = (c(a.0, a.1), c(b.0, b.1));
                let combo: Vec<_> = x.iter().zip(&z).map(|(p, q)| a * p + b * q).collect();
                let lhs = dft(&ComplexSignal::new(combo).unwrap());
                let fx = dft(&ComplexSignal::new(x).unwrap());
                let fz = dft(&ComplexSignal::new(z).unwrap());
                let rhs: Vec<_> = fx.bins().iter().zip(fz.bins()).map(|(p, q)| a * p + b * q).collect();
                prop_assert!(max_err(lhs.bins(), &rhs) < 1e-10);
            }

            #[test]
            fn round_trip_is_identity((x, _) in sized_pair()) {
                let sig = ComplexSignal::new(x).unwrap();
                let back = idft(&dft(&sig));
                prop_assert!(max_err(back.samples(), sig.samples()) < 1e-10);
            }
        }
    }
}
