mod common;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erf;

use common::{corners, heap_lengths, random_instance};
use tsplab::distsim::{
    boltzmann_exact, chi_square_statistic, enumerate_lengths, gaussian_fit, h_function,
    normalized_weights, self_normalized_mean, sigma_ratio, sis_sample, tv_distance,
    LengthDistribution, LengthModel, TableSampler,
};
use tsplab::seeded_rng;
use tsplab::wavesim::{prepare_weighted, Alpha};
use tsplab::Error;

/// `∫_x^{x+w} e^(-t^2) dt` through the error function.
fn gauss_mass(x: f64, w: f64) -> f64 {
    0.5 * std::f64::consts::PI.sqrt() * (erf(x + w) - erf(x))
}

#[test]
fn enumerated_lengths_match_heap_enumeration() {
    for n in 3..=7 {
        let inst = random_instance(n, 40 + n as u64);
        let mut ours = enumerate_lengths(&inst).unwrap().lengths().to_vec();
        let mut theirs = heap_lengths(&inst);
        ours.sort_by(f64::total_cmp);
        theirs.sort_by(f64::total_cmp);
        assert_eq!(ours.len(), theirs.len());
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn h_against_error_function() {
    let h = h_function(0.0, 0.1, 3.0).unwrap();
    let reference = gauss_mass(0.0, 0.1) / gauss_mass(0.0, 3.0);
    assert!((h - reference).abs() < 1e-9);
    assert!((h - 0.11246).abs() < 1e-4);
    for &x in &[-2.0, -0.5, 0.0, 0.7, 1.5] {
        for &(a, b) in &[(0.05, 1.0), (0.2, 4.0), (1.0, 2.0)] {
            let r = gauss_mass(x, a) / gauss_mass(x, b);
            assert!(
                (h_function(x, a, b).unwrap() - r).abs() < 1e-8,
                "x={x} a={a} b={b}"
            );
        }
    }
}

#[test]
fn h_equals_one_exactly_at_full_width() {
    // keep x + w small enough that the trimmed tail is visible in f64
    for &(x, w) in &[
        (-3.0, 1.0),
        (-3.0, 5.0),
        (0.0, 0.1),
        (0.0, 2.5),
        (2.5, 0.1),
        (2.5, 0.4),
    ] {
        assert_eq!(h_function(x, w, w).unwrap(), 1.0);
        assert!(h_function(x, 0.999 * w, w).unwrap() < 1.0, "x={x} w={w}");
    }
    assert_eq!(h_function(2.5, 7.0, 7.0).unwrap(), 1.0);
}

#[test]
fn h_lower_bound_chain_on_grid() {
    for k in 1..=24 {
        let a = k as f64 / 100.0;
        for w in 1..=10 {
            let h = h_function(0.0, a, w as f64).unwrap();
            assert!(h >= a * a, "a={a} width={w}: h={h}");
            assert!(h > 0.0 && h <= 1.0);
        }
    }
}

#[test]
fn h_is_monotone_in_numerator_width() {
    for &x in &[-1.0, 0.0, 1.0] {
        let mut last = 0.0;
        for k in 1..=50 {
            let h = h_function(x, k as f64 * 0.1, 5.0).unwrap();
            assert!(h >= last);
            last = h;
        }
        assert_eq!(last, 1.0);
    }
}

#[test]
fn h_rejects_bad_widths() {
    assert!(matches!(
        h_function(0.0, 0.0, 1.0),
        Err(Error::OutOfRange { .. })
    ));
    assert!(matches!(
        h_function(0.0, 2.0, 1.0),
        Err(Error::OutOfRange { .. })
    ));
}

#[test]
fn sigma_ratio_is_monotone_and_saturates() {
    let inst = random_instance(7, 3);
    let dist = enumerate_lengths(&inst).unwrap();
    let fit = gaussian_fit(dist.lengths()).unwrap();
    let alpha = Alpha::from_ln(fit.centering_ln_alpha(dist.min())).unwrap();
    let gaussian = LengthModel::Gaussian {
        fit,
        x_min: dist.min(),
        x_max: dist.max(),
    };
    for model in [gaussian, LengthModel::Discrete(&dist)] {
        let mut last = 0.0;
        for k in 1..=60 {
            let eps = 0.01 * k as f64;
            let s = sigma_ratio(model, alpha, eps).unwrap();
            assert!((0.0..=1.0).contains(&s));
            assert!(s >= last - 1e-12, "eps={eps}: {s} < {last}");
            last = s;
        }
        let full = dist.max() / dist.min() - 1.0;
        assert!((sigma_ratio(model, alpha, full).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn gaussian_sigma_ratio_matches_error_function() {
    // With g = N(mu, s^2) the tilted density is again Gaussian, centered at
    // mu - ln(a) s^2, so the ratio has a closed form in erf.
    let samples: Vec<f64> = (0..1000).map(|i| 5.0 + (i as f64 / 999.0 - 0.5)).collect();
    let fit = gaussian_fit(&samples).unwrap();
    let (x_min, x_max, ln_a, eps) = (4.5, 6.0, 2.0, 0.05);
    let c = fit.mu - ln_a * fit.sigma * fit.sigma;
    let z = |x: f64| (x - c) / (std::f64::consts::SQRT_2 * fit.sigma);
    let expected = (erf(z(x_min * (1.0 + eps))) - erf(z(x_min))) / (erf(z(x_max)) - erf(z(x_min)));
    let got = sigma_ratio(
        LengthModel::Gaussian { fit, x_min, x_max },
        Alpha::from_ln(ln_a).unwrap(),
        eps,
    )
    .unwrap();
    assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
    assert!((fit.to_unit_frame(c, c)).abs() < 1e-15);
}

#[test]
fn gaussian_fit_recovers_parameters() {
    let mut rng = seeded_rng(12);
    let normal = Normal::new(5.0, 1.0).unwrap();
    let samples: Vec<f64> = (0..100_000).map(|_| normal.sample(&mut rng)).collect();
    let fit = gaussian_fit(&samples).unwrap();
    assert!((fit.mu - 5.0).abs() < 0.1);
    assert!((fit.sigma - 1.0).abs() < 0.02);
    assert_eq!(fit.sample_count, 100_000);
    assert!(matches!(
        gaussian_fit(&[3.0; 10]),
        Err(Error::DegenerateFit(_))
    ));
    assert!(matches!(gaussian_fit(&[3.0]), Err(Error::DegenerateFit(_))));
}

#[test]
fn boltzmann_table_is_normalized_and_label_blind() {
    let mut rng = seeded_rng(5);
    for n in 4..=6 {
        let dist = enumerate_lengths(&random_instance(n, 60 + n as u64)).unwrap();
        for a in [1.5, 1.0f64.exp(), 30.0] {
            let alpha = Alpha::new(a).unwrap();
            let table = boltzmann_exact(&dist, alpha);
            assert!((table.iter().sum::<f64>() - 1.0).abs() < 1e-12);

            let mut perm: Vec<usize> = (0..dist.len()).collect();
            perm.shuffle(&mut rng);
            let shuffled = LengthDistribution::from_lengths(
                n,
                perm.iter().map(|&i| dist.lengths()[i]).collect(),
            )
            .unwrap();
            let other = boltzmann_exact(&shuffled, alpha);
            for (j, &i) in perm.iter().enumerate() {
                assert!((other[j] - table[i]).abs() < 1e-15);
            }
        }
    }
    // equal lengths, equal mass
    let dist = enumerate_lengths(&corners()).unwrap();
    let table = boltzmann_exact(&dist, Alpha::new(3.0).unwrap());
    for i in 0..dist.len() {
        for j in 0..dist.len() {
            if (dist.lengths()[i] - dist.lengths()[j]).abs() < 1e-12 {
                assert!((table[i] - table[j]).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn table_sampler_passes_chi_square() {
    let mut rng = seeded_rng(9);
    for n in 3..=6 {
        let dist = enumerate_lengths(&random_instance(n, 70 + n as u64)).unwrap();
        let table = boltzmann_exact(&dist, Alpha::new(1.0f64.exp()).unwrap());
        let sampler = TableSampler::new(n, &table).unwrap();
        let mut counts = vec![0u64; table.len()];
        for _ in 0..100_000 {
            counts[sampler.sample_rank(&mut rng)] += 1;
        }
        let (stat, dof) = chi_square_statistic(&counts, &table).unwrap();
        let p = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat);
        assert!(p > 1e-3, "n={n}: chi2={stat} dof={dof} p={p}");
    }
}

#[test]
fn wave_measurement_passes_chi_square() {
    let mut rng = seeded_rng(10);
    for n in 3..=6 {
        let wave =
            prepare_weighted(&random_instance(n, 80 + n as u64), Alpha::new(2.0).unwrap()).unwrap();
        let probs = wave.probabilities();
        let mut counts = vec![0u64; probs.len()];
        for _ in 0..100_000 {
            counts[wave.measure(&mut rng).unwrap().rank().unwrap() as usize] += 1;
        }
        let (stat, dof) = chi_square_statistic(&counts, &probs).unwrap();
        let p = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat);
        assert!(p > 1e-3, "n={n}: chi2={stat} dof={dof} p={p}");
    }
}

#[test]
fn sis_estimates_boltzmann_mean() {
    let inst = random_instance(6, 91);
    let alpha = Alpha::new(1.0f64.exp()).unwrap();
    let dist = enumerate_lengths(&inst).unwrap();
    let exact = dist.expected_length(&boltzmann_exact(&dist, alpha));

    let mut rng = seeded_rng(92);
    let draws: Vec<_> = (0..100_000)
        .map(|_| sis_sample(&inst, alpha, &mut rng))
        .collect();
    for d in draws.iter().take(50) {
        let direct = inst.tour_length(&d.code.decode()).unwrap();
        assert!((d.length - direct).abs() < 1e-9);
    }
    let est = self_normalized_mean(&draws, |d| d.length);
    let w = normalized_weights(&draws);
    let se = w
        .iter()
        .zip(&draws)
        .map(|(wi, d)| wi * wi * (d.length - est).powi(2))
        .sum::<f64>()
        .sqrt();
    assert!(
        (est - exact).abs() < 3.0 * se,
        "est={est} exact={exact} se={se}"
    );
}

#[test]
fn circuit_matches_boltzmann_only_at_three_cities() {
    let alpha = Alpha::new(1.0f64.exp()).unwrap();
    let inst = random_instance(3, 1);
    let dist = enumerate_lengths(&inst).unwrap();
    let wave = prepare_weighted(&inst, alpha).unwrap();
    // every 3-city tour has the same length, so both sides are uniform
    assert!(tv_distance(&wave.probabilities(), &boltzmann_exact(&dist, alpha)).unwrap() < 1e-12);

    assert_eq!(tv_distance(&[0.5, 0.5], &[0.75, 0.25]).unwrap(), 0.25);
    assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
    assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
}
