//! Tests against independent oracles: direct sums, Monte-Carlo moments, exhaustive
//! scans and randomized candidate search.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use samfit::fourier::{forward_dft, Spectrum};
use samfit::lattice::{full_lattice_average, synthesize_marginal, validate_design, ComponentFunction};
use samfit::map::{
    estimate_tau, fit_spectra, map_objective, penalty_axis, score_axis, Candidate, PriorConfig,
};
use samfit::simulation::{
    brute_force_map, run_scenario, standardized_component, test_component, ScenarioConfig, SpamLambda,
};
use samfit::StreamKey;

#[test]
fn lattice_average_variance_matches_replication_count() {
    let design = validate_design(&[5, 5, 5]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 500;
    let mut sum = [0.0; 15];
    let mut sum_sq = [0.0; 15];
    for _ in 0..draws {
        let tensor: Vec<f64> = (0..125).map(|_| rng.sample(StandardNormal)).collect();
        let avg = full_lattice_average(&tensor, &design).unwrap();
        for j in 0..3 {
            for i in 0..5 {
                let v = avg.marginal(j)[i];
                sum[5 * j + i] += v;
                sum_sq[5 * j + i] += v * v;
            }
        }
    }
    for idx in 0..15 {
        let mean = sum[idx] / draws as f64;
        let var = sum_sq[idx] / draws as f64 - mean * mean;
        assert!((var - 1.0 / 25.0).abs() < 0.2 / 25.0, "cell {idx}: variance {var}");
    }
}

#[test]
fn mad_scale_of_gaussian_pool() {
    // iid N(0, s^2) real and imaginary parts: the estimate targets sqrt(2) s
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = 0.3;
    let spectra: Vec<Spectrum> = (0..200)
        .map(|_| {
            let coeffs = (0..50)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(s * re, s * im)
                })
                .collect();
            Spectrum::new(101, 0.0, coeffs).unwrap()
        })
        .collect();
    let tau = estimate_tau(&spectra).unwrap();
    assert!((tau / (2f64.sqrt() * s) - 1.0).abs() < 0.03, "tau = {tau}");
}

#[test]
fn axis_score_matches_independent_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let design = validate_design(&[9]).unwrap();
    let prior = PriorConfig::uniform(2.0, 0.5, 0.4);
    for _ in 0..200 {
        let coeffs: Vec<Complex64> = (0..4).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let spectrum = Spectrum::new(9, 0.0, coeffs.clone()).unwrap();
        let tau2 = rng.random_range(0.01..0.5);
        let score = score_axis(&spectrum, tau2, &prior, 0, &design).unwrap();
        let mut best = (0, f64::INFINITY);
        for k in 1..=4 {
            let kept: f64 = coeffs[..k].iter().map(|c| c.re * c.re + c.im * c.im).sum();
            let value = -2.0 * kept + penalty_axis(k, 0, &prior, tau2, &design).unwrap();
            if value < best.1 {
                best = (k, value);
            }
        }
        assert_eq!(score.k_hat, best.0);
        assert!((score.w - best.1).abs() < 1e-12);
    }
}

#[test]
fn random_candidates_never_beat_the_fit() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let sizes = [7, 9, 5, 9];
    let design = validate_design(&sizes).unwrap();
    let spectra: Vec<Spectrum> = sizes
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let coeffs = (1..=(n - 1) / 2)
                .map(|k| {
                    let signal = if j % 2 == 0 { 1.0 / k as f64 } else { 0.0 };
                    Complex64::new(signal + 0.1 * rng.sample::<f64, _>(StandardNormal), 0.1 * rng.sample::<f64, _>(StandardNormal))
                })
                .collect();
            Spectrum::new(n, 0.0, coeffs).unwrap()
        })
        .collect();
    let prior = PriorConfig::default();
    let tau2 = 0.02;
    let fit = fit_spectra(&spectra, &design, tau2, &prior).unwrap();
    for _ in 0..200 {
        let selected: Vec<usize> = (0..4).filter(|_| rng.random_bool(0.5)).collect();
        let cutpoints: BTreeMap<usize, usize> =
            selected.iter().map(|&j| (j, rng.random_range(1..=design.max_freq(j)))).collect();
        let value = map_objective(&Candidate { selected, cutpoints }, &spectra, tau2, &prior, &design).unwrap();
        assert!(value >= fit.objective - 1e-12 * fit.objective.abs());
    }
}

#[test]
fn brute_force_structure() {
    let design = validate_design(&[7, 5]).unwrap();
    let prior = PriorConfig::default();
    let zeros = vec![Spectrum::zeros(7).unwrap(), Spectrum::zeros(5).unwrap()];
    let (best, value) = brute_force_map(&zeros, 0.5, &prior, &design).unwrap();
    assert_eq!(best, Candidate::default());
    assert_eq!(value, samfit::map::penalty_global(0, &prior, 0.5, &design).unwrap());

    // one axis: the empty support or the best single cut-point
    let one = validate_design(&[9]).unwrap();
    let s = Spectrum::new(9, 0.0, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.6), Complex64::new(0.05, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
    let (best, value) = brute_force_map(std::slice::from_ref(&s), 0.05, &prior, &one).unwrap();
    let mut options = vec![(Candidate::default(), map_objective(&Candidate::default(), std::slice::from_ref(&s), 0.05, &prior, &one).unwrap())];
    for k in 1..=4 {
        let c = Candidate { selected: vec![0], cutpoints: [(0, k)].into() };
        let v = map_objective(&c, std::slice::from_ref(&s), 0.05, &prior, &one).unwrap();
        options.push((c, v));
    }
    let min = options.iter().map(|o| o.1).fold(f64::INFINITY, f64::min);
    assert_eq!(value, min);
    assert_eq!(best, options.iter().find(|o| o.1 == min).unwrap().0);

    let wide = validate_design(&[3; 13]).unwrap();
    let spectra = vec![Spectrum::zeros(3).unwrap(); 13];
    assert!(matches!(
        brute_force_map(&spectra, 1.0, &prior, &wide),
        Err(samfit::Error::SearchSpaceTooLarge(_))
    ));
}

#[test]
fn noise_free_run_equals_direct_truncation() {
    let tau2 = 1e-4;
    let cfg = ScenarioConfig {
        reps: 1,
        snr_levels: vec![f64::INFINITY],
        tau2_override: Some(tau2),
        ..Default::default()
    };
    assert_eq!(
        run_scenario(&ScenarioConfig { tau2_override: None, ..cfg.clone() }),
        Err(samfit::Error::ZeroTau)
    );
    let report = run_scenario(&cfg).unwrap();
    let row = &report.rows[0];
    assert_eq!(row.d0_hat_mean, 4.0);
    assert_eq!(row.amse_zero_avg, 0.0);

    // the fitted estimate is a truncation of the true spectrum, so its error is the
    // energy of the truth beyond the cut-point
    let design = validate_design(&[101; 50]).unwrap();
    let mut comps: Vec<ComponentFunction> =
        (1..=4).map(|id| standardized_component(&test_component(id).unwrap(), 101).unwrap()).collect();
    comps.resize(50, ComponentFunction::zero());
    let data = synthesize_marginal(&design, &comps, 0.0, f64::INFINITY, StreamKey::new(cfg.seed, 0, 0)).unwrap();
    let spectra: Vec<Spectrum> = data.marginals().iter().map(|m| forward_dft(m).unwrap()).collect();
    let fit = fit_spectra(&spectra, &design, tau2, &cfg.prior).unwrap();
    for j in 0..4 {
        let k = fit.cutpoints[&j];
        let tail: f64 = spectra[j].coeffs()[k..].iter().map(|c| c.norm_sqr()).sum();
        assert!((row.amse_per_active[j] - 2.0 * tail).abs() < 1e-12);
    }
}

#[test]
fn runs_are_reproducible_and_schedule_independent() {
    let cfg = ScenarioConfig {
        d: 10,
        reps: 30,
        snr_levels: vec![1.0, 5.0],
        spam: Some(SpamLambda::Oracle),
        lambda_grid: vec![0.05, 0.1, 0.2],
        ..Default::default()
    };
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = single.install(|| run_scenario(&cfg)).unwrap();
    let b = many.install(|| run_scenario(&cfg)).unwrap();
    assert_eq!(a, b);
    let c = ScenarioConfig { seed: cfg.seed + 1, ..cfg.clone() };
    assert_ne!(run_scenario(&c).unwrap().rows, a.rows);
}

#[test]
fn prior_validation_examples() {
    let design = validate_design(&[101; 50]).unwrap();
    let report = samfit::validate_priors(&PriorConfig::default(), &design).unwrap();
    assert!((report.c_gamma - 264.5).abs() < 1e-12);
    assert!(!report.satisfied());
    let small = validate_design(&[5]).unwrap();
    let strict = PriorConfig::uniform(0.05, 0.5, (-6.0f64).exp());
    let report = samfit::validate_priors(&strict, &small).unwrap();
    assert!((report.c_gamma - 5.12).abs() < 1e-12);
    assert!(report.satisfied());
    assert_eq!(
        samfit::validate_priors(&PriorConfig::uniform(0.0, 0.5, 0.5), &small),
        Err(samfit::Error::InvalidGamma(0.0))
    );
}
