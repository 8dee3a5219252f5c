//! Sparse additive MAP estimation in the Fourier domain.
//!
//! Each axis is scored by the best truncation point of its empirical spectrum under a
//! geometric prior on the number of retained frequencies, axes are ranked by that
//! score, and the number of nonzero components is chosen under a geometric prior on
//! the support size. The resulting estimator minimizes the complexity-penalized
//! least-squares criterion
//!
//! ```text
//! sum_j ( ||xi_j - c_j||^2 + Pen_j(k_j) ) + Pen_0(d_0)
//! Pen_j(k) = 2 tau2 (1 + 1/gamma) ( -ln pi_j(k) + k ln(1 + gamma) )
//! Pen_0(h) = 2 tau2 (1 + 1/gamma) ( -ln pi_0(h) + ln C(d, h) )
//! ```
//!
//! over all supports and cut-points.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::fourier::{forward_dft, Spectrum};
use crate::lattice::{AveragedData, LatticeDesign};

/// Relative tolerance under which two criterion values count as tied.
pub const TIE_REL_TOL: f64 = 1e-12;

/// `a` beats `b` by more than the tie tolerance.
pub(crate) fn strictly_less(a: f64, b: f64) -> bool {
    a < b && (b - a) > TIE_REL_TOL * a.abs().max(b.abs())
}

pub(crate) fn tied(a: f64, b: f64) -> bool {
    !strictly_less(a, b) && !strictly_less(b, a)
}

/// How the retained energy `sum_{|k| <= m} |xi_k|^2` of a truncation is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyConvention {
    /// Both `+k` and `-k` contribute: `2 sum_{k=1}^{m} |xi_k|^2`.
    #[default]
    TwoSided,
    /// Positive frequencies only: `sum_{k=1}^{m} |xi_k|^2`. Equivalent to doubling
    /// every complexity penalty relative to `TwoSided`.
    PositiveOnly,
}

impl EnergyConvention {
    pub fn factor(self) -> f64 {
        match self {
            EnergyConvention::TwoSided => 2.0,
            EnergyConvention::PositiveOnly => 1.0,
        }
    }
}

/// Tie-breaking policy for the two argmins. `Reversed` exists only to exercise the
/// equivalence checker's failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    Parsimonious,
    Reversed,
}

/// Prior hyperparameters: `gamma` is the prior-to-noise variance ratio of nonzero
/// coefficients, `q` the geometric parameter of the support-size prior and `q_axis`
/// the geometric parameters of the per-axis cut-point priors. A single `q_axis`
/// entry applies to every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorConfig {
    pub gamma: f64,
    pub q: f64,
    pub q_axis: Vec<f64>,
    #[serde(default)]
    pub energy: EnergyConvention,
}

impl PriorConfig {
    pub fn uniform(gamma: f64, q: f64, q_axis: f64) -> Self {
        Self { gamma, q, q_axis: vec![q_axis], energy: EnergyConvention::default() }
    }

    pub fn with_energy(mut self, energy: EnergyConvention) -> Self {
        self.energy = energy;
        self
    }

    pub fn q_for(&self, axis: usize) -> f64 {
        if self.q_axis.len() == 1 {
            self.q_axis[0]
        } else {
            self.q_axis[axis]
        }
    }

    /// Range checks plus agreement of `q_axis` with the design.
    pub fn check(&self, design: &LatticeDesign) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidGamma(self.gamma));
        }
        check_q("q", self.q)?;
        if self.q_axis.is_empty() || (self.q_axis.len() != 1 && self.q_axis.len() != design.d()) {
            return Err(Error::AxisCountMismatch {
                what: "q_axis",
                expected: design.d(),
                got: self.q_axis.len(),
            });
        }
        for (j, &qj) in self.q_axis.iter().enumerate() {
            check_q(&format!("q_axis[{j}]"), qj)?;
        }
        Ok(())
    }

    /// `2 tau2 (1 + 1/gamma)`.
    fn penalty_scale(&self, tau2: f64) -> f64 {
        2.0 * tau2 * (1.0 + 1.0 / self.gamma)
    }
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self::uniform(5.0, 0.5, 0.5)
    }
}

fn check_q(name: &str, q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidQ { name: name.to_string(), value: q });
    }
    Ok(())
}

fn check_tau2(tau2: f64) -> Result<()> {
    if !(tau2 > 0.0 && tau2.is_finite()) {
        return Err(Error::NonPositiveTau2(tau2));
    }
    Ok(())
}

/// `ln sum_{m=lo}^{hi} q^m`.
fn ln_geometric_mass(q: f64, lo: usize, hi: usize) -> f64 {
    let terms = (hi - lo + 1) as f64;
    lo as f64 * q.ln() + (-q.powf(terms)).ln_1p() - (-q).ln_1p()
}

/// `ln C(d, h)` via log-gamma.
pub fn ln_binomial(d: usize, h: usize) -> f64 {
    if h == 0 || h == d {
        return 0.0;
    }
    ln_gamma(d as f64 + 1.0) - ln_gamma(h as f64 + 1.0) - ln_gamma((d - h) as f64 + 1.0)
}

fn ln_axis_prior(k: usize, q: f64, max_k: usize) -> f64 {
    k as f64 * q.ln() - ln_geometric_mass(q, 1, max_k)
}

fn ln_global_prior(h: usize, q: f64, d: usize) -> f64 {
    h as f64 * q.ln() - ln_geometric_mass(q, 0, d)
}

/// `pi_j(k) = q_j^k / sum_{m=1}^{(n_j-1)/2} q_j^m`.
pub fn axis_prior(k: usize, axis: usize, cfg: &PriorConfig, design: &LatticeDesign) -> Result<f64> {
    let max = design.max_freq(axis);
    if k == 0 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    Ok(ln_axis_prior(k, cfg.q_for(axis), max).exp())
}

/// `pi_0(h) = q^h / sum_{m=0}^{d} q^m`.
pub fn global_prior(h: usize, cfg: &PriorConfig, design: &LatticeDesign) -> Result<f64> {
    if h > design.d() {
        return Err(Error::D0OutOfRange { d0: h, d: design.d() });
    }
    Ok(ln_global_prior(h, cfg.q, design.d()).exp())
}

/// Complexity penalty for retaining frequencies `1..=k` on `axis`.
pub fn penalty_axis(
    k: usize,
    axis: usize,
    cfg: &PriorConfig,
    tau2: f64,
    design: &LatticeDesign,
) -> Result<f64> {
    let max = design.max_freq(axis);
    if k == 0 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    check_tau2(tau2)?;
    let ln_pi = ln_axis_prior(k, cfg.q_for(axis), max);
    Ok(cfg.penalty_scale(tau2) * (-ln_pi + k as f64 * cfg.gamma.ln_1p()))
}

/// `Pen_j(k)` for every `k = 1..=(n_j-1)/2`; entry `k - 1` holds `Pen_j(k)`.
pub fn axis_penalties(axis: usize, cfg: &PriorConfig, tau2: f64, design: &LatticeDesign) -> Result<Vec<f64>> {
    check_tau2(tau2)?;
    let max = design.max_freq(axis);
    let q = cfg.q_for(axis);
    let scale = cfg.penalty_scale(tau2);
    let ln_mass = ln_geometric_mass(q, 1, max);
    let per_k = cfg.gamma.ln_1p() - q.ln();
    Ok((1..=max).map(|k| scale * (ln_mass + k as f64 * per_k)).collect())
}

/// Complexity penalty for a support of size `d0`.
pub fn penalty_global(d0: usize, cfg: &PriorConfig, tau2: f64, design: &LatticeDesign) -> Result<f64> {
    let d = design.d();
    if d0 > d {
        return Err(Error::D0OutOfRange { d0, d });
    }
    check_tau2(tau2)?;
    Ok(cfg.penalty_scale(tau2) * (-ln_global_prior(d0, cfg.q, d) + ln_binomial(d, d0)))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// First frequency of the high-frequency pool used for noise estimation,
/// `ceil(0.8 (n - 1) / 2)`.
pub fn noise_pool_start(max_freq: usize) -> usize {
    (4 * max_freq).div_ceil(5).max(1)
}

/// Robust estimate of `tau = sigma / sqrt(N)` from the real and imaginary parts of the
/// top fifth of every axis' spectrum: `sqrt(2) MAD / 0.6745`.
pub fn estimate_tau(spectra: &[Spectrum]) -> Result<f64> {
    let mut pool = Vec::new();
    for s in spectra {
        let max = s.max_freq();
        for k in noise_pool_start(max)..=max {
            let c = s.coeff(k);
            pool.push(c.re);
            pool.push(c.im);
        }
    }
    if pool.len() < 2 {
        return Err(Error::EmptyPool);
    }
    let scale = spectra
        .iter()
        .flat_map(|s| s.coeffs())
        .fold(0.0f64, |m, c| m.max(c.re.abs()).max(c.im.abs()));
    let center = median(&mut pool);
    let mut dev: Vec<f64> = pool.iter().map(|v| (v - center).abs()).collect();
    let mad = median(&mut dev);
    let tau = std::f64::consts::SQRT_2 * mad / 0.6745;
    // below this the "noise" is rounding error of a noise-free signal
    if !(tau > 64.0 * f64::EPSILON * scale) {
        return Err(Error::ZeroTau);
    }
    Ok(tau)
}

/// Best truncation of one axis: cut-point and attained criterion value `W_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisScore {
    pub k_hat: usize,
    pub w: f64,
}

/// Exhaustive scan of `-E(k) + Pen_j(k)` over `k = 1..=(n_j-1)/2`, where `E(k)` is the
/// retained energy under the configured convention.
pub fn score_axis(
    spectrum: &Spectrum,
    tau2: f64,
    cfg: &PriorConfig,
    axis: usize,
    design: &LatticeDesign,
) -> Result<AxisScore> {
    score_axis_with(spectrum, tau2, cfg, axis, design, TieBreak::default())
}

pub(crate) fn score_axis_with(
    spectrum: &Spectrum,
    tau2: f64,
    cfg: &PriorConfig,
    axis: usize,
    design: &LatticeDesign,
    tie: TieBreak,
) -> Result<AxisScore> {
    if spectrum.n() != design.n(axis) {
        return Err(Error::DesignMismatch(format!(
            "spectrum length {} on axis {axis}, grid size {}",
            spectrum.n(),
            design.n(axis)
        )));
    }
    let pens = axis_penalties(axis, cfg, tau2, design)?;
    let cum = spectrum.cumulative_energy();
    let factor = cfg.energy.factor();
    let mut best = AxisScore { k_hat: 1, w: -factor * cum[1] + pens[0] };
    for k in 2..=pens.len() {
        let w = -factor * cum[k] + pens[k - 1];
        let better = match tie {
            TieBreak::Parsimonious => strictly_less(w, best.w),
            TieBreak::Reversed => !strictly_less(best.w, w),
        };
        if better {
            best = AxisScore { k_hat: k, w };
        }
    }
    Ok(best)
}

/// Chooses the support size and the support from per-axis scores.
///
/// Axes are ranked by `W` ascending (ties by axis index) and
/// `d0 = argmin_h sum_{i<=h} W_(i) + Pen_0(h)`, the smallest `h` on ties.
pub fn select_components(
    scores: &[AxisScore],
    tau2: f64,
    cfg: &PriorConfig,
    design: &LatticeDesign,
) -> Result<(usize, Vec<usize>)> {
    select_components_with(scores, tau2, cfg, design, TieBreak::default())
}

pub(crate) fn select_components_with(
    scores: &[AxisScore],
    tau2: f64,
    cfg: &PriorConfig,
    design: &LatticeDesign,
    tie: TieBreak,
) -> Result<(usize, Vec<usize>)> {
    let d = design.d();
    if scores.len() != d {
        return Err(Error::AxisCountMismatch { what: "scores", expected: d, got: scores.len() });
    }
    let mut order: Vec<usize> = (0..d).collect();
    match tie {
        TieBreak::Parsimonious => order.sort_by(|&a, &b| scores[a].w.total_cmp(&scores[b].w).then(a.cmp(&b))),
        TieBreak::Reversed => order.sort_by(|&a, &b| scores[a].w.total_cmp(&scores[b].w).then(b.cmp(&a))),
    }
    let mut best_h = 0;
    let mut best = penalty_global(0, cfg, tau2, design)?;
    let mut partial = 0.0;
    for h in 1..=d {
        partial += scores[order[h - 1]].w;
        let value = partial + penalty_global(h, cfg, tau2, design)?;
        let better = match tie {
            TieBreak::Parsimonious => strictly_less(value, best),
            TieBreak::Reversed => !strictly_less(best, value),
        };
        if better {
            best_h = h;
            best = value;
        }
    }
    let mut selected = order[..best_h].to_vec();
    selected.sort_unstable();
    Ok((best_h, selected))
}

/// Where the noise variance used by a fit came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tau2Source {
    Override,
    Dataset,
    Estimated,
}

/// Result of the MAP procedure on a set of spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFit {
    pub a0_hat: f64,
    /// Selected axes, ascending.
    pub selected: Vec<usize>,
    pub cutpoints: BTreeMap<usize, usize>,
    /// Coefficient estimates per axis; mean coefficient is always zero.
    pub coeffs: Vec<Spectrum>,
    pub tau2: f64,
    pub tau2_source: Tau2Source,
    /// Attained criterion value, shifted by the constant `sum_j ||xi_j||^2`.
    pub objective: f64,
    /// Per-axis scores, including unselected axes.
    pub scores: Vec<AxisScore>,
}

impl MapFit {
    pub fn d0_hat(&self) -> usize {
        self.selected.len()
    }

    pub fn candidate(&self) -> Candidate {
        Candidate { selected: self.selected.clone(), cutpoints: self.cutpoints.clone() }
    }
}

/// Runs the MAP procedure on precomputed spectra with a known `tau2`.
pub fn fit_spectra(
    spectra: &[Spectrum],
    design: &LatticeDesign,
    tau2: f64,
    cfg: &PriorConfig,
) -> Result<MapFit> {
    fit_spectra_with(spectra, design, tau2, cfg, TieBreak::default())
}

#[doc(hidden)]
pub fn fit_spectra_with(
    spectra: &[Spectrum],
    design: &LatticeDesign,
    tau2: f64,
    cfg: &PriorConfig,
    tie: TieBreak,
) -> Result<MapFit> {
    cfg.check(design)?;
    check_tau2(tau2)?;
    if spectra.len() != design.d() {
        return Err(Error::AxisCountMismatch { what: "spectra", expected: design.d(), got: spectra.len() });
    }
    let scores = spectra
        .iter()
        .enumerate()
        .map(|(j, s)| score_axis_with(s, tau2, cfg, j, design, tie))
        .collect::<Result<Vec<_>>>()?;
    let (d0, selected) = select_components_with(&scores, tau2, cfg, design, tie)?;
    let mut cutpoints = BTreeMap::new();
    let mut coeffs = Vec::with_capacity(design.d());
    let mut sel_iter = selected.iter().peekable();
    for (j, s) in spectra.iter().enumerate() {
        if sel_iter.peek() == Some(&&j) {
            sel_iter.next();
            cutpoints.insert(j, scores[j].k_hat);
            coeffs.push(s.truncated(scores[j].k_hat)?);
        } else {
            coeffs.push(Spectrum::zeros(s.n())?);
        }
    }
    let objective = selected.iter().map(|&j| scores[j].w).sum::<f64>() + penalty_global(d0, cfg, tau2, design)?;
    Ok(MapFit {
        a0_hat: 0.0,
        selected,
        cutpoints,
        coeffs,
        tau2,
        tau2_source: Tau2Source::Override,
        objective,
        scores,
    })
}

/// Spectra of every marginal of `data`.
pub fn marginal_spectra(data: &AveragedData) -> Result<Vec<Spectrum>> {
    data.marginals().iter().map(|m| forward_dft(m)).collect()
}

/// Picks the noise variance: explicit override, then the dataset's value, then the
/// robust estimate from the spectra.
pub fn resolve_tau2(
    data: &AveragedData,
    spectra: &[Spectrum],
    tau2_override: Option<f64>,
) -> Result<(f64, Tau2Source)> {
    let (tau2, source) = match (tau2_override, data.tau2()) {
        (Some(t), _) => (t, Tau2Source::Override),
        (None, Some(t)) => (t, Tau2Source::Dataset),
        (None, None) => {
            let tau = estimate_tau(spectra)?;
            (tau * tau, Tau2Source::Estimated)
        }
    };
    check_tau2(tau2)?;
    Ok((tau2, source))
}

/// Full MAP fit of marginal data.
pub fn map_fit(data: &AveragedData, cfg: &PriorConfig, tau2_override: Option<f64>) -> Result<MapFit> {
    map_fit_with(data, cfg, tau2_override, TieBreak::default())
}

#[doc(hidden)]
pub fn map_fit_with(
    data: &AveragedData,
    cfg: &PriorConfig,
    tau2_override: Option<f64>,
    tie: TieBreak,
) -> Result<MapFit> {
    cfg.check(data.design())?;
    let spectra = marginal_spectra(data)?;
    let (tau2, source) = resolve_tau2(data, &spectra, tau2_override)?;
    let mut fit = fit_spectra_with(&spectra, data.design(), tau2, cfg, tie)?;
    fit.a0_hat = data.overall_mean();
    fit.tau2_source = source;
    Ok(fit)
}

/// A candidate support with one cut-point per selected axis.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Candidate {
    pub selected: Vec<usize>,
    pub cutpoints: BTreeMap<usize, usize>,
}

/// Penalized criterion of a truncation candidate, without the candidate-independent
/// constant `sum_j ||xi_j||^2`.
pub fn map_objective(
    candidate: &Candidate,
    spectra: &[Spectrum],
    tau2: f64,
    cfg: &PriorConfig,
    design: &LatticeDesign,
) -> Result<f64> {
    let d = design.d();
    if spectra.len() != d {
        return Err(Error::AxisCountMismatch { what: "spectra", expected: d, got: spectra.len() });
    }
    let mut seen = vec![false; d];
    for &j in &candidate.selected {
        if j >= d || seen[j] {
            return Err(Error::InconsistentCandidate(format!("axis {j} is out of range or repeated")));
        }
        seen[j] = true;
    }
    if candidate.cutpoints.len() != candidate.selected.len()
        || candidate.cutpoints.keys().any(|&j| j >= d || !seen[j])
    {
        return Err(Error::InconsistentCandidate(
            "cut-points must be given exactly on the selected axes".into(),
        ));
    }
    let factor = cfg.energy.factor();
    let mut total = 0.0;
    for (&j, &k) in &candidate.cutpoints {
        let max = design.max_freq(j);
        if k == 0 || k > max {
            return Err(Error::InconsistentCandidate(format!("cut-point {k} on axis {j} outside 1..={max}")));
        }
        let energy: f64 = spectra[j].coeffs()[..k].iter().map(|c| c.norm_sqr()).sum();
        total += -factor * energy + penalty_axis(k, j, cfg, tau2, design)?;
    }
    Ok(total + penalty_global(candidate.selected.len(), cfg, tau2, design)?)
}

/// `c(gamma) = 8 (gamma + 3/4)^2`.
pub fn c_gamma(gamma: f64) -> f64 {
    8.0 * (gamma + 0.75).powi(2)
}

/// Outcome of checking prior hyperparameters against the sufficient conditions of the
/// risk bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorReport {
    pub c_gamma: f64,
    /// Per axis: whether the geometric decay `q_j^k <= exp(-c(gamma) k)` holds for all k.
    pub decay_condition: Vec<bool>,
    /// Per axis: `max_k pi_j(k) exp(c(gamma) k)` with the normalized prior.
    pub normalized_ratio: Vec<f64>,
    /// Smallest `C0` with `pi_0(h) >= (h/d)^{C0 h}` for `h <= d/e` and `pi_0(d) >= exp(-C0 d)`.
    pub min_c0: f64,
    /// Per axis: smallest `C1` with `pi_j(k) >= exp(-C1 k)`.
    pub min_c1: Vec<f64>,
    pub warnings: Vec<String>,
}

impl PriorReport {
    pub fn satisfied(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Validates hyperparameters. Out-of-range values are errors; a failed sufficient
/// condition is only a warning and never blocks fitting.
pub fn validate_priors(cfg: &PriorConfig, design: &LatticeDesign) -> Result<PriorReport> {
    cfg.check(design)?;
    let cg = c_gamma(cfg.gamma);
    let d = design.d();
    let mut decay_condition = Vec::with_capacity(d);
    let mut normalized_ratio = Vec::with_capacity(d);
    let mut min_c1 = Vec::with_capacity(d);
    let mut warnings = Vec::new();
    for j in 0..d {
        let q = cfg.q_for(j);
        let max = design.max_freq(j);
        let ok = (1..=max).all(|k| k as f64 * q.ln() <= -cg * k as f64);
        decay_condition.push(ok);
        let ln_ratio = (1..=max)
            .map(|k| ln_axis_prior(k, q, max) + cg * k as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        normalized_ratio.push(ln_ratio.exp());
        min_c1.push(
            (1..=max)
                .map(|k| -ln_axis_prior(k, q, max) / k as f64)
                .fold(0.0, f64::max),
        );
        if !ok {
            warnings.push(format!(
                "axis {j}: q_j = {q} decays slower than exp(-c(gamma)) with c(gamma) = {cg}; \
                 the risk bound's prior condition does not hold"
            ));
        }
    }
    let mut min_c0 = -ln_global_prior(d, cfg.q, d) / d as f64;
    let h_max = (d as f64 / std::f64::consts::E).floor() as usize;
    for h in 1..=h_max {
        let denom = h as f64 * (d as f64 / h as f64).ln();
        min_c0 = min_c0.max(-ln_global_prior(h, cfg.q, d) / denom);
    }
    Ok(PriorReport { c_gamma: cg, decay_condition, normalized_ratio, min_c0, min_c1, warnings })
}
