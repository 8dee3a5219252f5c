//! Self-check of the MAP procedure against exhaustive enumeration on small random
//! instances.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fourier::Spectrum;
use crate::lattice::{validate_design, LatticeDesign};
use crate::map::{axis_penalties, fit_spectra_with, Candidate, EnergyConvention, PriorConfig, TieBreak};
use crate::simulation::brute_force_map;

/// Largest objective discrepancy tolerated between the two solvers.
pub const OBJECTIVE_TOL: f64 = 1e-9;

/// A small random problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckInstance {
    pub grid_sizes: Vec<usize>,
    pub spectra: Vec<Spectrum>,
    pub tau2: f64,
    pub prior: PriorConfig,
}

impl CheckInstance {
    pub fn design(&self) -> LatticeDesign {
        validate_design(&self.grid_sizes).expect("generated designs are valid")
    }
}

/// Disagreement between the MAP procedure and the exhaustive search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub index: usize,
    pub instance: CheckInstance,
    pub map: Candidate,
    pub map_objective: f64,
    pub brute_force: Candidate,
    pub brute_force_objective: f64,
}

/// Draws instance `index` of the stream selected by `seed`.
///
/// Axes count `1..=5`, grid sizes from `{5, 7, 9}`, coefficients that are either
/// noise only or carry a decaying signal. Every fourth instance plants an exact tie
/// between cut-points 1 and 2 on axis 0.
pub fn random_instance(seed: u64, index: usize) -> CheckInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let d = rng.random_range(1..=5usize);
    let grid_sizes: Vec<usize> = (0..d).map(|_| [5, 7, 9][rng.random_range(0..3)]).collect();
    let tau2 = 10f64.powf(rng.random_range(-2.0..0.0));
    let energy = if rng.random_bool(0.5) { EnergyConvention::TwoSided } else { EnergyConvention::PositiveOnly };
    let q_axis: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..0.9)).collect();
    let prior = PriorConfig { gamma: rng.random_range(0.5..10.0), q: rng.random_range(0.1..0.9), q_axis, energy };
    let tau = tau2.sqrt();
    let mut spectra: Vec<Spectrum> = grid_sizes
        .iter()
        .map(|&n| {
            let amp = if rng.random_bool(0.5) { rng.random_range(0.0..3.0) } else { 0.0 };
            let coeffs = (1..=(n - 1) / 2)
                .map(|k| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    let signal = amp / k as f64;
                    Complex64::new(signal + tau * re, tau * im)
                })
                .collect();
            Spectrum::new(n, 0.0, coeffs).expect("odd length")
        })
        .collect();
    if index % 4 == 3 {
        plant_tie(&mut spectra[0], &grid_sizes, tau2, &prior);
    }
    CheckInstance { grid_sizes, spectra, tau2, prior }
}

/// Makes cut-points 1 and 2 equally good on axis 0 with a strong first coefficient.
fn plant_tie(spectrum: &mut Spectrum, grid_sizes: &[usize], tau2: f64, prior: &PriorConfig) {
    let design = validate_design(grid_sizes).expect("valid");
    let pens = axis_penalties(0, prior, tau2, &design).expect("valid prior");
    let factor = prior.energy.factor();
    let gap = pens[1] - pens[0];
    let n = spectrum.n();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (n - 1) / 2];
    coeffs[0] = Complex64::new((4.0 * pens[0] / factor).sqrt(), 0.0);
    coeffs[1] = Complex64::new((gap / factor).sqrt(), 0.0);
    *spectrum = Spectrum::new(n, 0.0, coeffs).expect("odd length");
}

/// Compares both solvers on one instance; `None` when they agree.
pub fn check_instance(index: usize, instance: &CheckInstance, tie: TieBreak) -> Result<Option<Mismatch>> {
    let design = instance.design();
    let fit = fit_spectra_with(&instance.spectra, &design, instance.tau2, &instance.prior, tie)?;
    let (brute, brute_value) = brute_force_map(&instance.spectra, instance.tau2, &instance.prior, &design)?;
    let map = fit.candidate();
    let scale = 1.0f64.max(brute_value.abs());
    if map == brute && (fit.objective - brute_value).abs() <= OBJECTIVE_TOL * scale {
        return Ok(None);
    }
    Ok(Some(Mismatch {
        index,
        instance: instance.clone(),
        map,
        map_objective: fit.objective,
        brute_force: brute,
        brute_force_objective: brute_value,
    }))
}

/// Runs `count` instances and returns every mismatch, in instance order.
pub fn run_check(count: usize, seed: u64, tie: TieBreak) -> Result<Vec<Mismatch>> {
    let mut out = Vec::new();
    for index in 0..count {
        let instance = random_instance(seed, index);
        if let Some(m) = check_instance(index, &instance, tie)? {
            out.push(m);
        }
    }
    Ok(out)
}
