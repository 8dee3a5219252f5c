use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;
use samfit::fourier::{forward_dft, inverse_dft, Spectrum};
use samfit::lattice::{full_lattice_average, synthesize_marginal, validate_design, ComponentFunction};
use samfit::map::{
    fit_spectra, map_objective, penalty_axis, penalty_global, EnergyConvention, PriorConfig,
};
use samfit::simulation::{brute_force_map, run_scenario, ScenarioConfig, SpamLambda};
use samfit::spam::{group_norm, shrink_factor, spam_fit_spectra, spam_shrink};
use samfit::{AveragedData, StreamKey};

fn odd_len() -> impl Strategy<Value = usize> {
    (1usize..=25).prop_map(|h| 2 * h + 1)
}

fn vector() -> impl Strategy<Value = Vec<f64>> {
    odd_len().prop_flat_map(|n| prop::collection::vec(-10.0f64..10.0, n))
}

fn spectrum(n: usize, scale: f64) -> impl Strategy<Value = Spectrum> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), (n - 1) / 2).prop_map(move |c| {
        Spectrum::new(n, 0.0, c.into_iter().map(|(r, i)| Complex64::new(scale * r, scale * i)).collect()).unwrap()
    })
}

fn energy() -> impl Strategy<Value = EnergyConvention> {
    prop_oneof![Just(EnergyConvention::TwoSided), Just(EnergyConvention::PositiveOnly)]
}

/// Small instance: spectra on `d` axes of sizes 5..=9, a prior and tau2.
fn instance() -> impl Strategy<Value = (Vec<Spectrum>, f64, PriorConfig)> {
    (1usize..=4)
        .prop_flat_map(|d| prop::collection::vec(prop_oneof![Just(5usize), Just(7), Just(9)], d))
        .prop_flat_map(|sizes| {
            let spectra: Vec<_> = sizes.iter().map(|&n| spectrum(n, 1.0)).collect();
            (spectra, 0.001f64..0.5, 0.5f64..10.0, 0.1f64..0.9, 0.1f64..0.9, energy())
        })
        .prop_map(|(spectra, tau2, gamma, q, qj, energy)| {
            (spectra, tau2, PriorConfig::uniform(gamma, q, qj).with_energy(energy))
        })
}

fn design_of(spectra: &[Spectrum]) -> samfit::LatticeDesign {
    validate_design(&spectra.iter().map(Spectrum::n).collect::<Vec<_>>()).unwrap()
}

proptest! {
    #[test]
    fn parseval_and_round_trip(v in vector()) {
        let n = v.len() as f64;
        let s = forward_dft(&v).unwrap();
        let lhs = v.iter().map(|x| x * x).sum::<f64>() / n;
        let rhs = s.total_energy();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1.0));
        let back = inverse_dft(&s);
        for (a, b) in v.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-10 * 10.0);
        }
    }

    #[test]
    fn transform_is_linear(v in vector(), a in -3.0f64..3.0, b in -3.0f64..3.0, seed in any::<u64>()) {
        let w: Vec<f64> = (0..v.len()).map(|i| ((seed.wrapping_add(i as u64) % 97) as f64 - 48.0) / 7.0).collect();
        let combo: Vec<f64> = v.iter().zip(&w).map(|(x, y)| a * x + b * y).collect();
        let (sv, sw, sc) = (forward_dft(&v).unwrap(), forward_dft(&w).unwrap(), forward_dft(&combo).unwrap());
        prop_assert!((sc.mean_coeff() - (a * sv.mean_coeff() + b * sw.mean_coeff())).abs() < 1e-10);
        for k in 1..=sc.max_freq() {
            prop_assert!((sc.coeff(k) - (sv.coeff(k) * a + sw.coeff(k) * b)).norm() < 1e-10);
        }
    }

    #[test]
    fn lattice_average_is_linear_and_mean_consistent(
        sizes in prop::collection::vec(prop_oneof![Just(3usize), Just(5), Just(7)], 1..=3),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        seed in any::<u64>(),
    ) {
        let design = validate_design(&sizes).unwrap();
        let cells: usize = sizes.iter().product();
        let y: Vec<f64> = (0..cells).map(|i| ((i as u64 ^ seed) % 101) as f64 / 10.0).collect();
        let z: Vec<f64> = (0..cells).map(|i| ((i as u64).wrapping_mul(seed | 1) % 53) as f64 / 5.0).collect();
        let combo: Vec<f64> = y.iter().zip(&z).map(|(p, q)| a * p + b * q).collect();
        let (ay, az, ac) = (
            full_lattice_average(&y, &design).unwrap(),
            full_lattice_average(&z, &design).unwrap(),
            full_lattice_average(&combo, &design).unwrap(),
        );
        for j in 0..design.d() {
            let m = ac.marginal(j).iter().sum::<f64>() / sizes[j] as f64;
            prop_assert!((m - ac.overall_mean()).abs() < 1e-10);
            for i in 0..sizes[j] {
                let expect = a * ay.marginal(j)[i] + b * az.marginal(j)[i];
                prop_assert!((ac.marginal(j)[i] - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn noise_free_synthesis_is_exact_and_runs_are_deterministic(
        d in 1usize..4, half in 1usize..20, a0 in -5.0f64..5.0, seed in any::<u64>(), snr in 0.5f64..20.0,
    ) {
        let n = 2 * half + 1;
        let design = validate_design(&vec![n; d]).unwrap();
        let comps: Vec<ComponentFunction> = (0..d)
            .map(|j| ComponentFunction::new(format!("c{j}"), move |x| (x * (j + 1) as f64).sin()))
            .collect();
        let key = StreamKey::new(seed, 0, 0);
        let clean = synthesize_marginal(&design, &comps, a0, f64::INFINITY, key).unwrap();
        for (j, c) in comps.iter().enumerate() {
            for (i, v) in clean.marginal(j).iter().enumerate() {
                prop_assert_eq!(*v, a0 + c.eval(i as f64 / n as f64));
            }
        }
        let first = synthesize_marginal(&design, &comps, a0, snr, key).unwrap();
        let second = synthesize_marginal(&design, &comps, a0, snr, key).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn map_matches_exhaustive_search((spectra, tau2, prior) in instance()) {
        let design = design_of(&spectra);
        let fit = fit_spectra(&spectra, &design, tau2, &prior).unwrap();
        let (best, value) = brute_force_map(&spectra, tau2, &prior, &design).unwrap();
        prop_assert_eq!(&fit.candidate(), &best);
        prop_assert!((fit.objective - value).abs() <= 1e-9 * value.abs().max(1.0));
    }

    #[test]
    fn decomposition_and_selection_identity((spectra, tau2, prior) in instance()) {
        let design = design_of(&spectra);
        let fit = fit_spectra(&spectra, &design, tau2, &prior).unwrap();
        let w_sum: f64 = fit.selected.iter().map(|&j| fit.scores[j].w).sum();
        let expect = w_sum + penalty_global(fit.d0_hat(), &prior, tau2, &design).unwrap();
        prop_assert!((fit.objective - expect).abs() <= 1e-10 * expect.abs().max(1.0));
        let direct = map_objective(&fit.candidate(), &spectra, tau2, &prior, &design).unwrap();
        prop_assert!((fit.objective - direct).abs() <= 1e-10 * direct.abs().max(1.0));
        for &s in &fit.selected {
            for u in (0..design.d()).filter(|u| !fit.selected.contains(u)) {
                prop_assert!(fit.scores[s].w <= fit.scores[u].w);
            }
        }
        for (j, c) in fit.coeffs.iter().enumerate() {
            prop_assert_eq!(c.mean_coeff(), 0.0);
            let total: f64 = inverse_dft(c).iter().sum();
            prop_assert!(total.abs() < 1e-9, "axis {} sums to {}", j, total);
        }
    }

    #[test]
    fn scale_equivariance((spectra, tau2, prior) in instance(), alpha in 0.01f64..100.0) {
        let design = design_of(&spectra);
        let fit = fit_spectra(&spectra, &design, tau2, &prior).unwrap();
        let scaled: Vec<Spectrum> = spectra.iter().map(|s| s.scaled(alpha)).collect();
        let sfit = fit_spectra(&scaled, &design, tau2 * alpha * alpha, &prior).unwrap();
        prop_assert_eq!(&fit.selected, &sfit.selected);
        prop_assert_eq!(&fit.cutpoints, &sfit.cutpoints);
        for (a, b) in fit.coeffs.iter().zip(&sfit.coeffs) {
            for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                prop_assert!((x * alpha - y).norm() <= 1e-9 * alpha.max(1.0));
            }
        }
    }

    #[test]
    fn axis_penalty_increases(half in 2usize..60, gamma in 0.05f64..20.0, q in 0.01f64..0.99, tau2 in 1e-4f64..10.0) {
        let design = validate_design(&[2 * half + 1]).unwrap();
        let prior = PriorConfig::uniform(gamma, 0.5, q);
        let mut prev = penalty_axis(1, 0, &prior, tau2, &design).unwrap();
        for k in 2..=half {
            let p = penalty_axis(k, 0, &prior, tau2, &design).unwrap();
            prop_assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn shrinkage_bounds_and_zero_region(s in odd_len().prop_flat_map(|n| spectrum(n, 2.0)), lambda in 0.0f64..3.0, frac in 0.0f64..1.0) {
        let k = ((s.max_freq() as f64 * frac).floor() as usize).max(1);
        let c = spam_shrink(&s, k, lambda).unwrap();
        let norm = group_norm(&s, k);
        let factor = shrink_factor(norm, k, lambda);
        prop_assert!((0.0..=1.0).contains(&factor));
        prop_assert!(group_norm(&c, k) <= norm + 1e-12);
        let zero_region = norm <= 0.5 * lambda * (2.0 * k as f64).sqrt();
        prop_assert_eq!(c.is_zero(), zero_region);
    }

    #[test]
    fn shrinkage_is_jointly_homogeneous(s in odd_len().prop_flat_map(|n| spectrum(n, 1.0)), lambda in 0.0f64..2.0, alpha in 0.01f64..50.0) {
        let k = s.max_freq();
        let c = spam_shrink(&s, k, lambda).unwrap();
        let ca = spam_shrink(&s.scaled(alpha), k, lambda * alpha).unwrap();
        for (x, y) in c.coeffs().iter().zip(ca.coeffs()) {
            prop_assert!((x * alpha - y).norm() <= 1e-10 * alpha.max(1.0));
        }
    }

    #[test]
    fn spam_selection_shrinks_with_lambda(
        spectra in prop::collection::vec(spectrum(11, 1.0), 1..6),
        cuts in prop::collection::vec(1usize..=5, 6),
        l1 in 0.0f64..2.0,
        dl in 0.0f64..2.0,
    ) {
        let cutpoints: BTreeMap<usize, usize> = (0..spectra.len()).map(|j| (j, cuts[j])).collect();
        let small = spam_fit_spectra(&spectra, &cutpoints, l1).unwrap();
        let large = spam_fit_spectra(&spectra, &cutpoints, l1 + dl).unwrap();
        prop_assert!(large.selected.len() <= small.selected.len());
    }
}

#[test]
fn report_rows_sum_to_global() {
    let cfg = ScenarioConfig {
        d: 8,
        reps: 20,
        snr_levels: vec![2.0, 8.0],
        spam: Some(SpamLambda::Fixed(vec![0.1])),
        ..Default::default()
    };
    let report = run_scenario(&cfg).unwrap();
    assert_eq!(report.rows.len(), 4);
    for row in &report.rows {
        let sum: f64 = row.amse_per_active.iter().sum::<f64>() + row.amse_zero_avg * (cfg.d - 4) as f64;
        assert!((sum - row.amse_global).abs() < 1e-9, "{row:?}");
    }
}

#[test]
fn all_zero_marginals_select_nothing() {
    let design = validate_design(&[5, 7, 9]).unwrap();
    let data = AveragedData::new(design, vec![vec![0.0; 5], vec![0.0; 7], vec![0.0; 9]], 0.0, None).unwrap();
    let fit = samfit::map_fit(&data, &PriorConfig::default(), Some(1.0)).unwrap();
    assert!(fit.selected.is_empty());
    assert!(fit.coeffs.iter().all(Spectrum::is_zero));
    assert_eq!(fit.a0_hat, 0.0);
    assert_eq!(samfit::map_fit(&data, &PriorConfig::default(), None), Err(samfit::Error::ZeroTau));
}
