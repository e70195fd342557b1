use tsplab::oracle::{
    both_zero_probability, oracle_experiment, oracle_repeated, oracle_vote, Vote,
};
use tsplab::seeded_rng;

/// The same probability spelled out term by term, for cross-checking.
fn reference(m: usize, total: usize) -> f64 {
    let f = m as f64 / total as f64;
    let a = (1.0 - f).sqrt();
    let b = f.sqrt();
    0.5 * (1.0 - f) * (a * a - 2.0 * a * b + b * b)
}

#[test]
fn empty_range_is_a_fair_coin_and_marked_ranges_are_not() {
    for total in 1..=2000 {
        assert_eq!(both_zero_probability(0, total).unwrap(), 0.5);
        for m in 1..=total {
            let p = both_zero_probability(m, total).unwrap();
            assert!(p < 0.5, "m={m} N={total}: {p}");
            assert!(p >= 0.0);
        }
    }
    for &(m, total) in &[(1, 24), (8, 24), (3, 7), (100, 2000)] {
        assert!((both_zero_probability(m, total).unwrap() - reference(m, total)).abs() < 1e-14);
    }
}

#[test]
fn single_tour_gap_closes_as_n_grows() {
    let mut last = f64::INFINITY;
    for total in 2..=2000 {
        let gap = 0.5 - both_zero_probability(1, total).unwrap();
        assert!(gap > 0.0);
        assert!(gap < last, "N={total}");
        last = gap;
    }
    // leading term is sqrt(m/N)
    assert!((last - (1.0f64 / 2000.0).sqrt()).abs() < 2e-3, "{last}");
}

#[test]
fn empirical_rate_tracks_formula() {
    let mut rng = seeded_rng(31);
    for &(m, total) in &[(0, 24), (1, 24), (8, 24)] {
        let trials = 10_000;
        let row = oracle_experiment(m, total, trials, &mut rng).unwrap();
        let p = row.formula_p;
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (row.empirical_p - p).abs() <= 4.0 * sd,
            "({m},{total}): {} vs {p}",
            row.empirical_p
        );
    }
}

#[test]
fn majority_of_1001_detects_a_single_tour_among_24() {
    let mut rng = seeded_rng(32);
    let runs = 2000;
    let hits = (0..runs)
        .filter(|_| oracle_repeated(1, 24, 1001, &mut rng).unwrap().answer)
        .count();
    assert!(hits as f64 / runs as f64 >= 0.999, "{hits}/{runs}");
}

#[test]
fn majority_on_an_empty_range_is_a_coin_flip() {
    let mut rng = seeded_rng(33);
    let runs = 4000;
    let hits = (0..runs)
        .filter(|_| oracle_repeated(0, 24, 101, &mut rng).unwrap().answer)
        .count();
    let frac = hits as f64 / runs as f64;
    // 4 standard deviations of a fair coin over 4000 runs
    assert!(
        (frac - 0.5).abs() < 4.0 * (0.25 / runs as f64).sqrt(),
        "{frac}"
    );
}

#[test]
fn margin_vote_rejects_empty_ranges() {
    let mut rng = seeded_rng(34);
    let vote = Vote::Margin { z: 4.0 };
    let false_accepts = (0..2000)
        .filter(|_| oracle_vote(0, 24, 1001, vote, &mut rng).unwrap().answer)
        .count();
    assert!(false_accepts <= 2, "{false_accepts}");
    let detects = (0..2000)
        .filter(|_| oracle_vote(8, 24, 1001, vote, &mut rng).unwrap().answer)
        .count();
    assert_eq!(detects, 2000);
}
