//! SPAM / group-lasso baseline in closed form.
//!
//! With fixed truncation points the group-lasso problem decouples over axes and each
//! truncated spectrum is shrunk toward zero by blockwise soft-thresholding:
//! `c_j = (1 - (lambda/2) sqrt(2 k_j) / ||xi_j||)_+ xi_j`, where the norm runs over the
//! `2 k_j` conjugate-paired entries `|k| <= k_j`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::Spectrum;
use crate::lattice::AveragedData;
use crate::map::marginal_spectra;

/// Two-sided norm of the frequencies `1..=k_cut`.
pub fn group_norm(spectrum: &Spectrum, k_cut: usize) -> f64 {
    (2.0 * spectrum.coeffs()[..k_cut].iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
}

/// Shrinkage factor in `[0, 1]` applied to the truncated spectrum.
pub fn shrink_factor(norm: f64, k_cut: usize, lambda: f64) -> f64 {
    if norm == 0.0 {
        return 0.0;
    }
    let threshold = 0.5 * lambda * (2.0 * k_cut as f64).sqrt();
    (1.0 - threshold / norm).max(0.0)
}

/// Blockwise soft-thresholding of `spectrum` truncated at `k_cut`.
pub fn spam_shrink(spectrum: &Spectrum, k_cut: usize, lambda: f64) -> Result<Spectrum> {
    let max = spectrum.max_freq();
    if k_cut == 0 || k_cut > max {
        return Err(Error::CutOutOfRange { cut: k_cut, max });
    }
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    let factor = shrink_factor(group_norm(spectrum, k_cut), k_cut, lambda);
    let coeffs = spectrum
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &c)| if i < k_cut { c * factor } else { Complex64::new(0.0, 0.0) })
        .collect();
    Spectrum::new(spectrum.n(), 0.0, coeffs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpamFit {
    pub a0_hat: f64,
    pub coeffs: Vec<Spectrum>,
    pub lambda: f64,
    pub cutpoints: BTreeMap<usize, usize>,
    /// Axes whose shrunk spectrum is nonzero.
    pub selected: Vec<usize>,
}

/// SPAM estimate from precomputed spectra; `cutpoints` must cover every axis.
pub fn spam_fit_spectra(
    spectra: &[Spectrum],
    cutpoints: &BTreeMap<usize, usize>,
    lambda: f64,
) -> Result<SpamFit> {
    if cutpoints.len() != spectra.len() || cutpoints.keys().any(|&j| j >= spectra.len()) {
        return Err(Error::AxisCountMismatch {
            what: "cutpoints",
            expected: spectra.len(),
            got: cutpoints.len(),
        });
    }
    let coeffs = spectra
        .iter()
        .enumerate()
        .map(|(j, s)| spam_shrink(s, cutpoints[&j], lambda))
        .collect::<Result<Vec<_>>>()?;
    let selected = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, _)| j)
        .collect();
    Ok(SpamFit { a0_hat: 0.0, coeffs, lambda, cutpoints: cutpoints.clone(), selected })
}

/// SPAM estimate of marginal data; the intercept is the unshrunk grand mean.
pub fn spam_fit(data: &AveragedData, cutpoints: &BTreeMap<usize, usize>, lambda: f64) -> Result<SpamFit> {
    let spectra = marginal_spectra(data)?;
    let mut fit = spam_fit_spectra(&spectra, cutpoints, lambda)?;
    fit.a0_hat = data.overall_mean();
    Ok(fit)
}

/// One point of an oracle-lambda curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub lambda: f64,
    pub amse: f64,
}

/// Oracle choice of lambda and the AMSE curve it was read from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleLambda {
    pub lambda_star: f64,
    pub curve: Vec<CurvePoint>,
}

/// `start:stop:step` inclusive grid, built from integer multiples of `step`.
pub fn lambda_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !(start >= 0.0) {
        return Err(Error::EmptyGrid);
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// The default grid `0.01, 0.02, ..., 0.50`.
pub fn default_lambda_grid() -> Vec<f64> {
    (1..=50).map(|i| i as f64 / 100.0).collect()
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(&bad) = grid.iter().find(|l| !(**l >= 0.0)) {
        return Err(Error::NegativeLambda(bad));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::UnsortedGrid);
    }
    Ok(())
}

/// Minimizer of a curve, the smallest lambda on ties.
pub fn argmin_curve(curve: &[CurvePoint]) -> Result<f64> {
    let mut best = curve.first().ok_or(Error::EmptyGrid)?;
    for p in &curve[1..] {
        if p.amse < best.amse {
            best = p;
        }
    }
    Ok(best.lambda)
}
