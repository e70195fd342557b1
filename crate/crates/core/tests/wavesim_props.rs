mod common;

use std::collections::HashMap;

use common::{corners, naive_dist, random_instance};
use tsplab::distsim::{boltzmann_exact, enumerate_lengths, tv_distance};
use tsplab::geometry::{EuclideanInstance, NormalizedInstance};
use tsplab::permcode::{enumerate_codes, factorial, InsertionCode};
use tsplab::seeded_rng;
use tsplab::wavesim::{prepare_uniform, prepare_weighted, Alpha, WaveState};

/// Independent recursive evaluation of the tilted circuit's probability of
/// `code`: plain `alpha.powf(-inc)` weights, naive insertion, raw distances.
fn per_step_probability(inst: &EuclideanInstance, alpha: f64, code: &InsertionCode) -> f64 {
    let mut tour = vec![1usize];
    let mut prob = 1.0;
    for (i, &a) in code.entries().iter().enumerate().skip(1) {
        let v = i + 1;
        let t = tour.len();
        let inc = |pos: usize| {
            let (u, w) = if pos == 1 || pos == t + 1 {
                (tour[t - 1], tour[0])
            } else {
                (tour[pos - 2], tour[pos - 1])
            };
            naive_dist(inst, u, v) + naive_dist(inst, v, w) - naive_dist(inst, u, w)
        };
        let weights: Vec<f64> = (1..=t + 1).map(|p| alpha.powf(-inc(p))).collect();
        prob *= weights[a - 1] / weights.iter().sum::<f64>();
        tour.insert(a - 1, v);
    }
    prob
}

#[test]
fn uniform_wave_is_exactly_flat() {
    for n in 2..=7 {
        let mut state = WaveState::initial(n).unwrap();
        while !state.is_complete() {
            state = state.apply_uniform_gate().unwrap();
            assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
        }
        let target = 1.0 / factorial(n) as f64;
        assert_eq!(state.len() as u64, factorial(n));
        let probs = state.probabilities();
        let (lo, hi) = probs
            .iter()
            .fold((f64::MAX, f64::MIN), |(a, b), &p| (a.min(p), b.max(p)));
        assert!(probs.iter().all(|p| (p - target).abs() < 1e-12));
        assert!(hi - lo <= 1e-14 * target, "n = {n}: spread {}", hi - lo);
    }
    let six = prepare_uniform(3).unwrap();
    for code in enumerate_codes(3).unwrap() {
        assert!((six.probability_of(&code) - 1.0 / 6.0).abs() < 1e-15);
    }
}

#[test]
fn weighted_wave_factorizes_per_step() {
    let alphas = [0.5f64.exp(), 1.0f64.exp(), 2.0f64.exp()];
    for n in 2..=6 {
        for seed in 0..3 {
            let inst = random_instance(n, 100 + seed);
            for &a in &alphas {
                let alpha = Alpha::new(a).unwrap();
                let mut state = WaveState::initial(n).unwrap();
                while !state.is_complete() {
                    state = state.apply_weighted_gate(&inst, alpha).unwrap();
                    assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
                }
                for code in enumerate_codes(n).unwrap() {
                    let expected = per_step_probability(&inst, a, &code);
                    let got = state.probability_of(&code);
                    assert!(
                        (got - expected).abs() < 1e-12,
                        "n={n} code={code}: {got} vs {expected}"
                    );
                    assert!(got > 0.0);
                }
            }
        }
    }
}

#[test]
fn three_city_wave_is_uniform_for_every_alpha() {
    let inst = random_instance(3, 8);
    let dist = enumerate_lengths(&inst).unwrap();
    for a in [1.01, 2.0, 1.0f64.exp(), 50.0, 1e6] {
        let alpha = Alpha::new(a).unwrap();
        let wave = prepare_weighted(&inst, alpha).unwrap();
        assert!(wave
            .probabilities()
            .iter()
            .all(|p| (p - 1.0 / 6.0).abs() < 1e-12));
        let target = boltzmann_exact(&dist, alpha);
        assert!(tv_distance(&wave.probabilities(), &target).unwrap() < 1e-12);
    }
}

#[test]
fn weighted_gate_tends_to_uniform_as_alpha_falls_to_one() {
    let inst = random_instance(5, 21);
    let uniform = prepare_uniform(5).unwrap().probabilities();
    let mut last = f64::INFINITY;
    for ln_a in [1.0, 1e-2, 1e-4, 1e-8] {
        let w = prepare_weighted(&inst, Alpha::from_ln(ln_a).unwrap()).unwrap();
        let diff = w
            .iter()
            .zip(prepare_uniform(5).unwrap().iter())
            .map(|((_, a), (_, b))| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < last);
        last = diff;
    }
    assert!(last < 1e-8);
    assert_eq!(uniform.len(), 120);
}

#[test]
fn corner_branch_probabilities_match_recomputation() {
    let inst = corners();
    let e = 1.0f64.exp();
    let wave = prepare_weighted(&inst, Alpha::new(e).unwrap()).unwrap();
    for code in enumerate_codes(4).unwrap() {
        let expected = per_step_probability(&inst, e, &code);
        assert!((wave.probability_of(&code) - expected).abs() < 1e-12);
    }
}

#[test]
fn large_alpha_concentrates_on_perimeter_tours() {
    let inst = corners();
    let dist = enumerate_lengths(&inst).unwrap();
    let mut last = 0.0;
    for ln_a in [1.0, 5.0, 20.0, 60.0] {
        let wave = prepare_weighted(&inst, Alpha::from_ln(ln_a).unwrap()).unwrap();
        let mass: f64 = wave
            .probabilities()
            .iter()
            .zip(dist.lengths())
            .filter(|(_, &l)| (l - 4.0).abs() < 1e-9)
            .map(|(p, _)| p)
            .sum();
        assert!(mass >= last);
        last = mass;
    }
    assert!(last > 1.0 - 1e-9);
}

#[test]
fn tilt_lowers_expected_length() {
    let grid: Vec<f64> = (0..12).map(|k| 0.25 * 1.6f64.powi(k)).collect();
    for n in 4..=6 {
        for seed in 0..5 {
            let inst: NormalizedInstance = random_instance(n, 300 + seed);
            let dist = enumerate_lengths(&inst).unwrap();
            let mut last = f64::INFINITY;
            for &ln_a in &grid {
                let wave = prepare_weighted(&inst, Alpha::from_ln(ln_a).unwrap()).unwrap();
                let mean = dist.expected_length(&wave.probabilities());
                assert!(
                    mean <= last + 1e-12,
                    "n={n} seed={seed} ln_a={ln_a}: {mean} > {last}"
                );
                last = mean;
            }
        }
    }
}

#[test]
fn measurement_frequencies_follow_uniform_wave() {
    let wave = prepare_uniform(3).unwrap();
    let mut rng = seeded_rng(77);
    let mut counts: HashMap<InsertionCode, usize> = HashMap::new();
    for _ in 0..60_000 {
        *counts.entry(wave.measure(&mut rng).unwrap()).or_default() += 1;
    }
    assert_eq!(counts.len(), 6);
    for (code, c) in counts {
        assert!((9_500..=10_500).contains(&c), "{code}: {c}");
    }
}

#[test]
fn measurement_is_seed_deterministic() {
    let wave = prepare_weighted(&random_instance(5, 4), Alpha::new(3.0).unwrap()).unwrap();
    let draw = |seed| {
        let mut rng = seeded_rng(seed);
        (0..100)
            .map(|_| wave.measure(&mut rng).unwrap())
            .collect::<Vec<_>>()
    };
    assert_eq!(draw(5), draw(5));
    assert_ne!(draw(5), draw(6));
}
