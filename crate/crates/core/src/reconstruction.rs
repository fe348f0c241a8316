//! Partial DFT least squares on a detected support.
//!
//! Rows of the system are the available sample positions `n_m`, columns the
//! support bins `k_i`, and entries `exp(j*2*pi*k_i*n_m/N)`. With no 1/N
//! factor in the kernel the solution holds the complex amplitudes
//! `A_i * e^{j*phi_i}` directly. The solve goes through a Householder QR
//! rather than forming `(A^H A)^{-1}`.

use num_complex::Complex64;

use crate::error::{CsError, Result};
use crate::signal::{MeasurementSet, Spectrum, Twiddles};
use crate::support::SupportSet;

/// Largest tolerated ratio between the biggest and smallest diagonal entry
/// of R.
pub const MAX_CONDITION: f64 = 1e12;

/// `y = A_cs * X` restricted to the measured rows and support columns.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialDftSystem {
    /// Row-major, `rows x cols`.
    matrix: Vec<Complex64>,
    rhs: Vec<Complex64>,
    support: SupportSet,
    rows: usize,
    cols: usize,
    n_len: usize,
}

impl PartialDftSystem {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_len(&self) -> usize {
        self.n_len
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn rhs(&self) -> &[Complex64] {
        &self.rhs
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.cols + col]
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.entry(r, col)).collect()
    }

    /// `A * x`
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|r| {
                self.matrix[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `A^H * v`
    pub fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.cols)
            .map(|c| {
                (0..self.rows)
                    .map(|r| self.entry(r, c).conj() * v[r])
                    .sum()
            })
            .collect()
    }

    /// Same matrix, different right-hand side.
    pub fn with_rhs(&self, rhs: Vec<Complex64>) -> Result<Self> {
        if rhs.len() != self.rows {
            return Err(CsError::LengthMismatch(format!(
                "{} right-hand side values for {} rows",
                rhs.len(),
                self.rows
            )));
        }
        Ok(Self {
            rhs,
            ..self.clone()
        })
    }
}

pub fn build_cs_system(
    ms: &MeasurementSet,
    support: &SupportSet,
    n_len: usize,
) -> Result<PartialDftSystem> {
    if support.is_empty() {
        return Err(CsError::EmptySupport);
    }
    if n_len != ms.n_len() {
        return Err(CsError::LengthMismatch(format!(
            "measurements are from length {} but system length is {n_len}",
            ms.n_len()
        )));
    }
    if support.len() > ms.len() {
        return Err(CsError::OversizedSupport {
            support: support.len(),
            m: ms.len(),
        });
    }
    if let Some(&last) = support.bins().last() {
        if last >= n_len {
            return Err(CsError::BinOutOfRange { bin: last, n_len });
        }
    }

    let tw = Twiddles::new(n_len);
    let matrix = ms
        .indices()
        .iter()
        .flat_map(|&n| support.bins().iter().map(move |&k| (k, n)))
        .map(|(k, n)| tw.forward(k, n))
        .collect();
    Ok(PartialDftSystem {
        matrix,
        rhs: ms.values().to_vec(),
        support: support.clone(),
        rows: ms.len(),
        cols: support.len(),
        n_len,
    })
}

/// Unique minimizer of `||A x - y||_2` for full-column-rank `A`.
pub fn least_squares_solve(system: &PartialDftSystem) -> Result<Vec<Complex64>> {
    let (rows, cols) = (system.rows, system.cols);
    if cols == 0 {
        return Err(CsError::EmptySupport);
    }
    if cols > rows {
        return Err(CsError::OversizedSupport {
            support: cols,
            m: rows,
        });
    }

    // Column-major working copy.
    let mut a: Vec<Vec<Complex64>> = (0..cols).map(|c| system.column(c)).collect();
    let mut b = system.rhs.clone();
    let mut diag = vec![Complex64::new(0.0, 0.0); cols];

    for j in 0..cols {
        let norm = a[j][j..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[j][j];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;

        let mut v: Vec<Complex64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let v_norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if v_norm == 0.0 {
            diag[j] = alpha;
            continue;
        }
        for z in &mut v {
            *z /= v_norm;
        }

        // H = I - 2 v v^H applied to the trailing columns and to b
        let reflect = |col: &mut [Complex64]| {
            let dot: Complex64 = v.iter().zip(col.iter()).map(|(p, q)| p.conj() * q).sum();
            for (q, p) in col.iter_mut().zip(&v) {
                *q -= p * (dot * 2.0);
            }
        };
        for col in a.iter_mut().skip(j + 1) {
            reflect(&mut col[j..]);
        }
        reflect(&mut b[j..]);
        diag[j] = alpha;
        a[j][j] = alpha;
        for z in &mut a[j][j + 1..] {
            *z = Complex64::new(0.0, 0.0);
        }
    }

    let max_d = diag.iter().map(|d| d.norm()).fold(0.0, f64::max);
    let min_d = diag.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
    let condition = if min_d == 0.0 { f64::INFINITY } else { max_d / min_d };
    if condition > MAX_CONDITION || max_d == 0.0 {
        return Err(CsError::RankDeficient {
            condition,
            bins: dependent_bins(system, &diag, max_d),
        });
    }

    // Back substitution on R x = Q^H b
    let mut x = vec![Complex64::new(0.0, 0.0); cols];
    for i in (0..cols).rev() {
        let mut acc = b[i];
        for (c, xc) in x.iter().enumerate().skip(i + 1) {
            acc -= a[c][i] * xc;
        }
        x[i] = acc / diag[i];
    }
    Ok(x)
}

/// Support bins involved in the first near-zero pivot: the pivot column plus
/// the earlier columns parallel to it, or all earlier columns if none is.
fn dependent_bins(system: &PartialDftSystem, diag: &[Complex64], max_d: f64) -> Vec<usize> {
    let bins = system.support.bins();
    let Some(j) = diag
        .iter()
        .position(|d| d.norm() * MAX_CONDITION <= max_d || d.norm() == 0.0)
    else {
        return bins.to_vec();
    };
    let cj = system.column(j);
    let nj = cj.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut out: Vec<usize> = (0..j)
        .filter(|&i| {
            let ci = system.column(i);
            let ni = ci.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let dot: Complex64 = ci.iter().zip(&cj).map(|(p, q)| p.conj() * q).sum();
            dot.norm() >= (1.0 - 1e-9) * ni * nj
        })
        .map(|i| bins[i])
        .collect();
    if out.is_empty() {
        out.extend_from_slice(&bins[..j]);
    }
    out.push(bins[j]);
    out
}

/// Full length-N spectrum: support bins carry the coefficients, all other
/// bins are zero.
pub fn spectrum_from_coefficients(
    coeffs: &[Complex64],
    support: &SupportSet,
    n_len: usize,
) -> Result<Spectrum> {
    if coeffs.len() != support.len() {
        return Err(CsError::LengthMismatch(format!(
            "{} coefficients for {} support bins",
            coeffs.len(),
            support.len()
        )));
    }
    let mut bins = vec![Complex64::new(0.0, 0.0); n_len];
    for (&k, &c) in support.bins().iter().zip(coeffs) {
        if k >= n_len {
            return Err(CsError::BinOutOfRange { bin: k, n_len });
        }
        bins[k] = c;
    }
    Spectrum::new(bins)
}
