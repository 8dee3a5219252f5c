//! Monte-Carlo harness: test functions, replication engine, AMSE accounting and the
//! MAP-versus-SPAM report table.
//!
//! Replication `r` at SNR index `s` draws from the streams of
//! `StreamKey::new(seed, s, r)`, so any partitioning of replications across threads
//! yields identical results. Aggregation happens sequentially in replication order.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{forward_dft, Spectrum};
use crate::lattice::{synthesize_marginal, validate_design, ComponentFunction, LatticeDesign};
use crate::map::{estimate_tau, fit_spectra, map_objective, strictly_less, tied, Candidate, PriorConfig};
use crate::rng::StreamKey;
use crate::spam::{argmin_curve, check_grid, default_lambda_grid, group_norm, shrink_factor, CurvePoint, OracleLambda};

/// Raw (unstandardized) test functions `f1..f4`.
pub fn test_function(id: usize, x: f64) -> Result<f64> {
    let s = (2.0 * PI * x).sin();
    let c = (2.0 * PI * x).cos();
    match id {
        1 => Ok(x),
        2 => Ok((2.0 * x - 1.0).powi(2)),
        3 => Ok(s / (2.0 - s)),
        4 => Ok(0.1 * s + 0.2 * c + 0.3 * s * s + 0.4 * c.powi(3) + 0.5 * s.powi(3)),
        other => Err(Error::BadId(other)),
    }
}

/// `f_id` as a component function.
pub fn test_component(id: usize) -> Result<ComponentFunction> {
    test_function(id, 0.0)?;
    Ok(ComponentFunction::new(format!("f{id}"), move |x| {
        test_function(id, x).expect("id validated")
    }))
}

fn mean_and_rms(samples: &[f64]) -> Result<(f64, f64)> {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let rms = (samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if !(rms > 0.0) || samples.iter().all(|&v| v == samples[0]) {
        return Err(Error::ZeroVariance);
    }
    Ok((mean, rms))
}

/// Centers to grid mean zero and scales to unit grid mean square.
pub fn standardize(samples: &[f64]) -> Result<Vec<f64>> {
    let (mean, rms) = mean_and_rms(samples)?;
    Ok(samples.iter().map(|v| (v - mean) / rms).collect())
}

/// `f` standardized on the grid `i / n`; evaluates to `(f(x) - m) / s`.
pub fn standardized_component(f: &ComponentFunction, n: usize) -> Result<ComponentFunction> {
    let (mean, rms) = mean_and_rms(&f.sample(n)?)?;
    let inner = f.clone();
    Ok(ComponentFunction::new(format!("std({})", f.label()), move |x| (inner.eval(x) - mean) / rms))
}

/// Squared-error breakdown of a fit against the truth, by Parseval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmseBreakdown {
    /// `|c0_hat - c0|^2 + 2 sum_{k>=1} |c_hat_k - c_k|^2` per axis.
    pub per_axis: Vec<f64>,
    /// Sum over axes; the intercept is accounted separately.
    pub global: f64,
}

/// Per-axis and global squared errors between estimated and true spectra.
pub fn amse(fit: &[Spectrum], truth: &[Spectrum]) -> Result<AmseBreakdown> {
    if fit.len() != truth.len() {
        return Err(Error::DesignMismatch(format!("{} fitted axes, {} true axes", fit.len(), truth.len())));
    }
    let per_axis = fit
        .iter()
        .zip(truth)
        .enumerate()
        .map(|(j, (a, b))| {
            if a.n() != b.n() {
                return Err(Error::DesignMismatch(format!("axis {j}: lengths {} and {}", a.n(), b.n())));
            }
            Ok(axis_error(a, b))
        })
        .collect::<Result<Vec<_>>>()?;
    let global = per_axis.iter().sum();
    Ok(AmseBreakdown { per_axis, global })
}

fn axis_error(a: &Spectrum, b: &Spectrum) -> f64 {
    let dc = a.mean_coeff() - b.mean_coeff();
    dc * dc
        + 2.0
            * a.coeffs()
                .iter()
                .zip(b.coeffs())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
}

/// Which SPAM rows a scenario reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpamLambda {
    /// One lambda per SNR level (a single value applies to all levels).
    Fixed(Vec<f64>),
    /// Oracle lambda over `ScenarioConfig::lambda_grid`.
    Oracle,
}

/// Simulation scenario. Defaults: 50 axes of 101
/// points, `f1..f4` active, SNR 1/5/10, 1000 replications, `gamma = 5`,
/// `q = q_j = 0.5` with positive-frequency energy accounting.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub d: usize,
    pub n: usize,
    /// Active components placed on axes `0..len`, standardized before use.
    pub active_components: Vec<ComponentFunction>,
    pub snr_levels: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub prior: PriorConfig,
    pub lambda_grid: Vec<f64>,
    pub spam: Option<SpamLambda>,
    /// Use the dataset's true `tau2` instead of the robust estimate.
    pub known_noise: bool,
    /// Fixed `tau2` for every fit; needed for noise-free runs.
    pub tau2_override: Option<f64>,
    pub a0: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            d: 50,
            n: 101,
            active_components: (1..=4).map(|id| test_component(id).expect("valid id")).collect(),
            snr_levels: vec![1.0, 5.0, 10.0],
            reps: 1000,
            seed: 42,
            prior: PriorConfig::default().with_energy(crate::map::EnergyConvention::PositiveOnly),
            lambda_grid: default_lambda_grid(),
            spam: None,
            known_noise: false,
            tau2_override: None,
            a0: 0.0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<LatticeDesign> {
        if self.d < self.active_components.len() {
            return Err(Error::InvalidScenario(format!(
                "d = {} is smaller than the {} active components",
                self.d,
                self.active_components.len()
            )));
        }
        if self.reps == 0 {
            return Err(Error::InvalidScenario("reps must be at least 1".into()));
        }
        if self.snr_levels.is_empty() {
            return Err(Error::InvalidScenario("at least one SNR level is required".into()));
        }
        if let Some(&bad) = self.snr_levels.iter().find(|s| !(**s > 0.0)) {
            return Err(Error::NonPositiveSnr(bad));
        }
        let design = validate_design(&vec![self.n; self.d])?;
        self.prior.check(&design)?;
        match &self.spam {
            Some(SpamLambda::Fixed(l)) => {
                if l.len() != 1 && l.len() != self.snr_levels.len() {
                    return Err(Error::InvalidScenario(format!(
                        "{} lambda values for {} SNR levels",
                        l.len(),
                        self.snr_levels.len()
                    )));
                }
                if let Some(&bad) = l.iter().find(|v| !(**v >= 0.0)) {
                    return Err(Error::NegativeLambda(bad));
                }
            }
            Some(SpamLambda::Oracle) => check_grid(&self.lambda_grid)?,
            None => {}
        }
        Ok(design)
    }

    fn fixed_lambda(&self, snr_index: usize) -> Option<f64> {
        match &self.spam {
            Some(SpamLambda::Fixed(l)) if l.len() == 1 => Some(l[0]),
            Some(SpamLambda::Fixed(l)) => Some(l[snr_index]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "MAP")]
    Map,
    #[serde(rename = "SPAM")]
    Spam,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Map => "MAP",
            Method::Spam => "SPAM",
        }
    }
}

/// One row of the report table; all fields are means over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub snr: f64,
    pub method: Method,
    pub lambda: Option<f64>,
    pub amse_global: f64,
    pub amse_per_active: Vec<f64>,
    /// Mean over the inactive axes.
    pub amse_zero_avg: f64,
    pub d0_hat_mean: f64,
}

/// Per-replication outcome, kept for external plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub snr: f64,
    pub replication: usize,
    pub tau_hat: f64,
    pub map_amse: f64,
    pub map_d0: usize,
    pub spam_lambda: Option<f64>,
    pub spam_amse: Option<f64>,
    pub spam_d0: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub rows: Vec<ReportRow>,
    /// Oracle curves per SNR level when the oracle was run.
    pub oracle: Vec<Option<OracleLambda>>,
    pub replications: Vec<ReplicationRecord>,
}

/// Errors of one estimate, condensed to what the report needs.
#[derive(Debug, Clone, PartialEq)]
struct ErrorSummary {
    global: f64,
    active: Vec<f64>,
    zero_sum: f64,
    d0: usize,
}

impl ErrorSummary {
    fn new(per_axis: &[f64], n_active: usize, d0: usize) -> Self {
        Self {
            global: per_axis.iter().sum(),
            active: per_axis[..n_active].to_vec(),
            zero_sum: per_axis[n_active..].iter().sum(),
            d0,
        }
    }
}

#[derive(Debug, Clone)]
struct Replication {
    tau_hat: f64,
    map: ErrorSummary,
    /// One entry per evaluated lambda.
    spam: Vec<ErrorSummary>,
}

/// Everything a replication needs that does not change between replications.
struct Context {
    design: LatticeDesign,
    components: Vec<ComponentFunction>,
    truth: Vec<Spectrum>,
    n_active: usize,
}

impl Context {
    fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let design = cfg.validate()?;
        let mut components = Vec::with_capacity(cfg.d);
        for f in &cfg.active_components {
            components.push(standardized_component(f, cfg.n)?);
        }
        components.resize(cfg.d, ComponentFunction::zero());
        let truth = components
            .iter()
            .map(|c| forward_dft(&c.sample(cfg.n)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { design, components, truth, n_active: cfg.active_components.len() })
    }
}

fn replicate(
    cfg: &ScenarioConfig,
    ctx: &Context,
    snr_index: usize,
    rep: usize,
    lambdas: &[f64],
) -> Result<Replication> {
    let snr = cfg.snr_levels[snr_index];
    let key = StreamKey::new(cfg.seed, snr_index as u64, rep as u64);
    let data = synthesize_marginal(&ctx.design, &ctx.components, cfg.a0, snr, key)?;
    let spectra = data
        .marginals()
        .iter()
        .map(|m| forward_dft(m))
        .collect::<Result<Vec<_>>>()?;
    let tau2 = match (cfg.tau2_override, cfg.known_noise) {
        (Some(t), _) => t,
        (None, true) => data.tau2().unwrap_or(0.0),
        (None, false) => estimate_tau(&spectra)?.powi(2),
    };
    let fit = fit_spectra(&spectra, &ctx.design, tau2, &cfg.prior)?;
    let map_err: Vec<f64> = fit.coeffs.iter().zip(&ctx.truth).map(|(a, b)| axis_error(a, b)).collect();
    let map = ErrorSummary::new(&map_err, ctx.n_active, fit.d0_hat());

    // SPAM reuses the MAP cut-points on every axis
    let norms: Vec<f64> = spectra
        .iter()
        .zip(&fit.scores)
        .map(|(s, sc)| group_norm(s, sc.k_hat))
        .collect();
    let spam = lambdas
        .iter()
        .map(|&lambda| {
            let mut per_axis = Vec::with_capacity(spectra.len());
            let mut d0 = 0;
            for (j, s) in spectra.iter().enumerate() {
                let k = fit.scores[j].k_hat;
                let factor = shrink_factor(norms[j], k, lambda);
                if factor > 0.0 {
                    d0 += 1;
                }
                let truth = &ctx.truth[j];
                let mut err = truth.mean_coeff().powi(2);
                let mut tail = 0.0;
                for (idx, (x, c)) in s.coeffs().iter().zip(truth.coeffs()).enumerate() {
                    let est = if idx < k { x * factor } else { num_complex::Complex64::new(0.0, 0.0) };
                    tail += (est - c).norm_sqr();
                }
                err += 2.0 * tail;
                per_axis.push(err);
            }
            ErrorSummary::new(&per_axis, ctx.n_active, d0)
        })
        .collect();
    Ok(Replication { tau_hat: tau2.sqrt(), map, spam })
}

fn run_replications(
    cfg: &ScenarioConfig,
    ctx: &Context,
    snr_index: usize,
    lambdas: &[f64],
) -> Result<Vec<Replication>> {
    (0..cfg.reps)
        .into_par_iter()
        .map(|rep| replicate(cfg, ctx, snr_index, rep, lambdas))
        .collect()
}

fn mean_row(
    items: &[&ErrorSummary],
    snr: f64,
    method: Method,
    lambda: Option<f64>,
    n_active: usize,
    d: usize,
) -> ReportRow {
    let reps = items.len() as f64;
    let mut active = vec![0.0; n_active];
    let (mut global, mut zero, mut d0) = (0.0, 0.0, 0.0);
    for e in items {
        global += e.global;
        zero += e.zero_sum;
        d0 += e.d0 as f64;
        for (a, v) in active.iter_mut().zip(&e.active) {
            *a += v;
        }
    }
    let n_zero = d - n_active;
    ReportRow {
        snr,
        method,
        lambda,
        amse_global: global / reps,
        amse_per_active: active.into_iter().map(|a| a / reps).collect(),
        amse_zero_avg: if n_zero == 0 { 0.0 } else { zero / reps / n_zero as f64 },
        d0_hat_mean: d0 / reps,
    }
}

fn curve_from(reps: &[Replication], grid: &[f64]) -> Result<OracleLambda> {
    let curve: Vec<CurvePoint> = grid
        .iter()
        .enumerate()
        .map(|(i, &lambda)| CurvePoint {
            lambda,
            amse: reps.iter().map(|r| r.spam[i].global).sum::<f64>() / reps.len() as f64,
        })
        .collect();
    let lambda_star = argmin_curve(&curve)?;
    Ok(OracleLambda { lambda_star, curve })
}

/// Oracle lambda for SNR level `snr_index` of `cfg`: the grid value minimizing the
/// true AMSE averaged over `cfg.reps` replications. Every lambda sees the same
/// replications.
pub fn oracle_lambda(cfg: &ScenarioConfig, snr_index: usize, grid: &[f64]) -> Result<OracleLambda> {
    check_grid(grid)?;
    let ctx = Context::new(cfg)?;
    if snr_index >= cfg.snr_levels.len() {
        return Err(Error::InvalidScenario(format!("no SNR level with index {snr_index}")));
    }
    let reps = run_replications(cfg, &ctx, snr_index, grid)?;
    curve_from(&reps, grid)
}

/// Runs every SNR level of the scenario and aggregates the report table.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let ctx = Context::new(cfg)?;
    let mut rows = Vec::new();
    let mut oracle = Vec::new();
    let mut records = Vec::new();
    for (si, &snr) in cfg.snr_levels.iter().enumerate() {
        let lambdas: Vec<f64> = match &cfg.spam {
            None => Vec::new(),
            Some(SpamLambda::Fixed(_)) => vec![cfg.fixed_lambda(si).expect("fixed lambda")],
            Some(SpamLambda::Oracle) => cfg.lambda_grid.clone(),
        };
        let reps = run_replications(cfg, &ctx, si, &lambdas)?;
        let (spam_idx, curve) = match &cfg.spam {
            Some(SpamLambda::Oracle) => {
                let curve = curve_from(&reps, &lambdas)?;
                let idx = lambdas.iter().position(|&l| l == curve.lambda_star).expect("grid value");
                (Some(idx), Some(curve))
            }
            Some(SpamLambda::Fixed(_)) => (Some(0), None),
            None => (None, None),
        };
        let map_items: Vec<&ErrorSummary> = reps.iter().map(|r| &r.map).collect();
        rows.push(mean_row(&map_items, snr, Method::Map, None, ctx.n_active, cfg.d));
        if let Some(i) = spam_idx {
            let items: Vec<&ErrorSummary> = reps.iter().map(|r| &r.spam[i]).collect();
            rows.push(mean_row(&items, snr, Method::Spam, Some(lambdas[i]), ctx.n_active, cfg.d));
        }
        for (rep, r) in reps.iter().enumerate() {
            records.push(ReplicationRecord {
                snr,
                replication: rep,
                tau_hat: r.tau_hat,
                map_amse: r.map.global,
                map_d0: r.map.d0,
                spam_lambda: spam_idx.map(|i| lambdas[i]),
                spam_amse: spam_idx.map(|i| r.spam[i].global),
                spam_d0: spam_idx.map(|i| r.spam[i].d0),
            });
        }
        oracle.push(curve);
    }
    Ok(ScenarioReport { rows, oracle, replications: records })
}

/// Largest number of axes `brute_force_map` will enumerate.
pub const BRUTE_FORCE_MAX_AXES: usize = 12;
/// Largest number of candidates `brute_force_map` will enumerate.
pub const BRUTE_FORCE_MAX_CANDIDATES: u128 = 10_000_000;

/// Exact minimizer of `map_objective` over every support and every cut-point vector.
///
/// Candidates are enumerated in mixed radix, digit 0 meaning "axis not selected".
/// Among candidates whose objectives are tied, the one with fewer axes wins, then the
/// lexicographically smaller support, then the smaller cut-points; this mirrors the
/// parsimonious tie policy of the MAP procedure.
pub fn brute_force_map(
    spectra: &[Spectrum],
    tau2: f64,
    cfg: &PriorConfig,
    design: &LatticeDesign,
) -> Result<(Candidate, f64)> {
    let d = design.d();
    if d > BRUTE_FORCE_MAX_AXES {
        return Err(Error::SearchSpaceTooLarge(format!("{d} axes, at most {BRUTE_FORCE_MAX_AXES}")));
    }
    if spectra.len() != d {
        return Err(Error::AxisCountMismatch { what: "spectra", expected: d, got: spectra.len() });
    }
    let radix: Vec<usize> = (0..d).map(|j| design.max_freq(j) + 1).collect();
    let total = radix.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r as u128));
    match total {
        Some(t) if t <= BRUTE_FORCE_MAX_CANDIDATES => {}
        _ => {
            return Err(Error::SearchSpaceTooLarge(format!(
                "more than {BRUTE_FORCE_MAX_CANDIDATES} candidates"
            )))
        }
    }
    cfg.check(design)?;
    let mut digits = vec![0usize; d];
    let mut best: Option<(Candidate, f64)> = None;
    loop {
        let candidate = Candidate {
            selected: (0..d).filter(|&j| digits[j] > 0).collect(),
            cutpoints: (0..d).filter(|&j| digits[j] > 0).map(|j| (j, digits[j])).collect(),
        };
        let value = map_objective(&candidate, spectra, tau2, cfg, design)?;
        let replace = match &best {
            None => true,
            Some((inc, inc_value)) => {
                strictly_less(value, *inc_value)
                    || (tied(value, *inc_value) && preferred(&candidate, inc))
            }
        };
        if replace {
            best = Some((candidate, value));
        }
        // increment the mixed-radix counter
        let mut pos = 0;
        loop {
            if pos == d {
                return Ok(best.expect("at least the empty candidate"));
            }
            digits[pos] += 1;
            if digits[pos] < radix[pos] {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

fn preferred(a: &Candidate, b: &Candidate) -> bool {
    let key = |c: &Candidate| (c.selected.len(), c.selected.clone(), c.cutpoints.values().copied().collect::<Vec<_>>());
    key(a) < key(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::inverse_dft;

    #[test]
    fn raw_test_functions() {
        assert_eq!(test_function(1, 0.5).unwrap(), 0.5);
        assert_eq!(test_function(2, 0.5).unwrap(), 0.0);
        assert!((test_function(3, 0.25).unwrap() - 1.0).abs() < 1e-15);
        // sin = 0, cos = 1 at x = 0
        assert!((test_function(4, 0.0).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(test_function(5, 0.1), Err(Error::BadId(5)));
        assert!(test_component(0).is_err());
    }

    #[test]
    fn standardization() {
        let v: Vec<f64> = (0..101).map(|i| test_function(2, i as f64 / 101.0).unwrap()).collect();
        let g = standardize(&v).unwrap();
        let mean: f64 = g.iter().sum::<f64>() / 101.0;
        let ms: f64 = g.iter().map(|x| x * x).sum::<f64>() / 101.0;
        assert!(mean.abs() < 1e-12);
        assert!((ms - 1.0).abs() < 1e-12);
        assert_eq!(standardize(&[2.0; 7]), Err(Error::ZeroVariance));
        // independent two-pass oracle for the first entry
        let m = v.iter().fold(0.0, |a, b| a + b) / 101.0;
        let s = (v.iter().fold(0.0, |a, b| a + (b - m) * (b - m)) / 101.0).sqrt();
        assert!((g[0] - (1.0 - m) / s).abs() < 1e-12);
        let comp = standardized_component(&test_component(2).unwrap(), 101).unwrap();
        assert_eq!(comp.sample(101).unwrap(), g);
    }

    #[test]
    fn amse_of_zero_fit_is_one_for_standardized_truth() {
        let v: Vec<f64> = (0..101).map(|i| test_function(3, i as f64 / 101.0).unwrap()).collect();
        let truth = vec![forward_dft(&standardize(&v).unwrap()).unwrap()];
        let zero = vec![Spectrum::zeros(101).unwrap()];
        let b = amse(&zero, &truth).unwrap();
        assert!((b.global - 1.0).abs() < 1e-12);
        assert_eq!(amse(&truth, &truth).unwrap().global, 0.0);
        let short = vec![Spectrum::zeros(99).unwrap()];
        assert!(matches!(amse(&short, &truth), Err(Error::DesignMismatch(_))));
    }

    #[test]
    fn amse_matches_spatial_domain() {
        let a: Vec<f64> = (0..21).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let b: Vec<f64> = (0..21).map(|i| (i as f64 * 0.4).sin()).collect();
        let sa = forward_dft(&a).unwrap();
        let sb = forward_dft(&b).unwrap();
        let fourier = amse(std::slice::from_ref(&sa), std::slice::from_ref(&sb)).unwrap().global;
        let (ra, rb) = (inverse_dft(&sa), inverse_dft(&sb));
        let spatial: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / 21.0;
        assert!((fourier - spatial).abs() < 1e-12);
    }

    #[test]
    fn scenario_validation() {
        let cfg = ScenarioConfig { d: 3, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::InvalidScenario(_))));
        let cfg = ScenarioConfig { reps: 0, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::InvalidScenario(_))));
        let cfg = ScenarioConfig { n: 100, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::EvenGridSize { .. })));
        let cfg = ScenarioConfig {
            spam: Some(SpamLambda::Fixed(vec![0.1, 0.2])),
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::InvalidScenario(_))));
    }

    #[test]
    fn single_point_grid_oracle() {
        let cfg = ScenarioConfig { d: 6, reps: 3, snr_levels: vec![5.0], ..Default::default() };
        let o = oracle_lambda(&cfg, 0, &[0.1]).unwrap();
        assert_eq!(o.lambda_star, 0.1);
        assert_eq!(o.curve.len(), 1);
        assert_eq!(oracle_lambda(&cfg, 0, &[]), Err(Error::EmptyGrid));
    }
}
