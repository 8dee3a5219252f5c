//! Discrete Fourier analysis of real vectors of odd length.
//!
//! Coefficients follow the normalization `xi_k = (1/n) sum_i v_i exp(+2 pi I k i / n)`
//! with synthesis `v_i = sum_k xi_k exp(-2 pi I k i / n)`. Only the mean and the
//! positive frequencies `k = 1..=(n-1)/2` are stored; negative frequencies are the
//! complex conjugates for real input. Every two-sided quantity `sum_{|k|}` is therefore
//! twice the corresponding positive-frequency sum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-spectrum of a real vector of odd length `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    n: usize,
    mean_coeff: f64,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    /// Builds a spectrum from its parts; `coeffs[k - 1]` holds frequency `k`.
    pub fn new(n: usize, mean_coeff: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::EvenLength(n));
        }
        if n < 3 {
            return Err(Error::GridTooSmall { axis: 0, size: n });
        }
        if coeffs.len() != (n - 1) / 2 {
            return Err(Error::DesignMismatch(format!(
                "spectrum of length {n} needs {} coefficients, got {}",
                (n - 1) / 2,
                coeffs.len()
            )));
        }
        Ok(Self { n, mean_coeff, coeffs })
    }

    /// The all-zero spectrum for length `n`.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, 0.0, vec![Complex64::new(0.0, 0.0); n.saturating_sub(1) / 2])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Highest stored frequency, `(n - 1) / 2`.
    pub fn max_freq(&self) -> usize {
        self.coeffs.len()
    }

    pub fn mean_coeff(&self) -> f64 {
        self.mean_coeff
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at frequency `k >= 1`.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs[k - 1]
    }

    /// Same spectrum with the mean coefficient replaced.
    pub fn with_mean(mut self, mean_coeff: f64) -> Self {
        self.mean_coeff = mean_coeff;
        self
    }

    /// Keeps frequencies `1..=k_cut`, zeroes the rest and the mean.
    pub fn truncated(&self, k_cut: usize) -> Result<Self> {
        check_cut(k_cut, self.max_freq())?;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| if idx < k_cut { c } else { Complex64::new(0.0, 0.0) })
            .collect();
        Ok(Self { n: self.n, mean_coeff: 0.0, coeffs })
    }

    /// Positive-frequency partial energies: entry `m` is `sum_{k=1}^{m} |xi_k|^2`
    /// (entry 0 is 0).
    pub fn cumulative_energy(&self) -> Vec<f64> {
        let mut acc = Vec::with_capacity(self.coeffs.len() + 1);
        let mut s = 0.0;
        acc.push(0.0);
        for c in &self.coeffs {
            s += c.norm_sqr();
            acc.push(s);
        }
        acc
    }

    /// `mean^2 + 2 sum_{k>=1} |xi_k|^2`, which equals `(1/n) ||v||^2` by Parseval.
    pub fn total_energy(&self) -> f64 {
        self.mean_coeff * self.mean_coeff + 2.0 * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            n: self.n,
            mean_coeff: alpha * self.mean_coeff,
            coeffs: self.coeffs.iter().map(|c| c * alpha).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mean_coeff == 0.0 && self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }
}

fn check_cut(k_cut: usize, max: usize) -> Result<()> {
    if k_cut > max {
        return Err(Error::CutOutOfRange { cut: k_cut, max });
    }
    Ok(())
}

/// `exp(+2 pi I m / n)` for `m = 0..n`. Indexing by `(k * i) mod n` keeps the
/// phase argument small and exact.
fn twiddles(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|m| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / n as f64))
        .collect()
}

/// Forward transform of a real vector of odd length.
pub fn forward_dft(values: &[f64]) -> Result<Spectrum> {
    let n = values.len();
    if n.is_multiple_of(2) {
        return Err(Error::EvenLength(n));
    }
    if n < 3 {
        return Err(Error::GridTooSmall { axis: 0, size: n });
    }
    if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput(idx));
    }
    let w = twiddles(n);
    let inv_n = 1.0 / n as f64;
    let half = (n - 1) / 2;
    let coeffs = (1..=half)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut phase = 0usize;
            for &v in values {
                acc += w[phase] * v;
                phase += k;
                if phase >= n {
                    phase -= n;
                }
            }
            acc * inv_n
        })
        .collect();
    let mean = values.iter().sum::<f64>() * inv_n;
    Ok(Spectrum { n, mean_coeff: mean, coeffs })
}

/// Real synthesis `v_i = xi_0 + sum_{k>=1} 2 Re(xi_k exp(-2 pi I k i / n))`.
pub fn inverse_dft(spectrum: &Spectrum) -> Vec<f64> {
    let n = spectrum.n;
    let w = twiddles(n);
    (0..n)
        .map(|i| {
            let mut v = spectrum.mean_coeff;
            let mut phase = 0usize;
            for c in &spectrum.coeffs {
                phase += i;
                if phase >= n {
                    phase %= n;
                }
                // xi * exp(-I theta) has real part re*cos + im*sin
                v += 2.0 * (c.re * w[phase].re + c.im * w[phase].im);
            }
            v
        })
        .collect()
}

/// Two-sided tail energy `sum_{|k| > k_cut} |xi_k|^2`.
pub fn energy_tail(spectrum: &Spectrum, k_cut: usize) -> Result<f64> {
    check_cut(k_cut, spectrum.max_freq())?;
    Ok(2.0 * spectrum.coeffs[k_cut..].iter().map(|c| c.norm_sqr()).sum::<f64>())
}
