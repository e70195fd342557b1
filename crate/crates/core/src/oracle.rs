//! The two-machine probabilistic range oracle.
//!
//! Machine `M_1` marks tours whose length falls in the queried range in the
//! computational basis, `M_2` marks them in the `|±⟩` basis, and the
//! combined machine `M` answers `false` exactly when both validity qubits
//! read 0. With `m` marked tours out of `N`, that happens with probability
//!
//! ```text
//! (1 - m/N) * (sqrt(1 - m/N) - sqrt(m/N))^2 / 2
//! ```
//!
//! which is 1/2 when `m = 0` and strictly below 1/2 otherwise. The gap
//! `1/2 - P(1, N)` shrinks as `N` grows, so repeated runs cannot separate
//! "one tour" from "none" cheaply; [`oracle_repeated`] exposes that rather
//! than hiding it.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distsim::LengthDistribution;
use crate::error::{Error, Result};

/// Tour-length interval `[lo, hi)` plus verifier slack `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeQuery {
    lo: f64,
    hi: f64,
    delta: f64,
}

/// Whether lengths in the slack band `[hi, hi + delta)` count as hits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlackPolicy {
    /// Count only `[lo, hi)`.
    #[default]
    Strict,
    /// Count `[lo, hi + delta)`.
    Permissive,
}

impl RangeQuery {
    pub fn new(lo: f64, hi: f64, delta: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::out_of_range(
                lo,
                format!("query needs lo < hi (hi = {hi})"),
            ));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::out_of_range(
                delta,
                "delta must be finite and non-negative",
            ));
        }
        Ok(RangeQuery { lo, hi, delta })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn upper(&self, policy: SlackPolicy) -> f64 {
        match policy {
            SlackPolicy::Strict => self.hi,
            SlackPolicy::Permissive => self.hi + self.delta,
        }
    }

    pub fn contains(&self, length: f64, policy: SlackPolicy) -> bool {
        self.lo <= length && length < self.upper(policy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleOutcome {
    pub answer: bool,
    pub trials: usize,
    pub true_count: usize,
}

/// `(m, N)`: tours inside the query and the total `n!`.
pub fn count_in_range(
    dist: &LengthDistribution,
    q: &RangeQuery,
    policy: SlackPolicy,
) -> (usize, usize) {
    let m = dist
        .lengths()
        .iter()
        .filter(|&&l| q.contains(l, policy))
        .count();
    (m, dist.len())
}

/// Probability that both validity qubits read 0, as a function of `m` and `N`.
pub fn both_zero_probability(m: usize, total: usize) -> Result<f64> {
    if total == 0 {
        return Err(Error::out_of_range(0.0, "N must be at least 1"));
    }
    if m > total {
        return Err(Error::out_of_range(
            m as f64,
            format!("m must not exceed N = {total}"),
        ));
    }
    let f = m as f64 / total as f64;
    let g = 1.0 - f;
    Ok(g * (g.sqrt() - f.sqrt()).powi(2) / 2.0)
}

/// One run of the combined machine; `false` means both bits read 0.
pub fn oracle_sample<R: Rng + ?Sized>(m: usize, total: usize, rng: &mut R) -> Result<bool> {
    let p_false = both_zero_probability(m, total)?;
    Ok(rng.random::<f64>() >= p_false)
}

/// Majority vote over an odd number of runs.
///
/// With `m = 0` each run is a fair coin, so the verdict is a fair coin too;
/// callers must not trust it when `1/2 - both_zero_probability(m, N)` is small.
pub fn oracle_repeated<R: Rng + ?Sized>(
    m: usize,
    total: usize,
    trials: usize,
    rng: &mut R,
) -> Result<OracleOutcome> {
    if trials == 0 || trials.is_multiple_of(2) {
        return Err(Error::Usage(format!(
            "majority vote needs an odd, positive trial count (got {trials})"
        )));
    }
    let p_false = both_zero_probability(m, total)?;
    let true_count = (0..trials)
        .filter(|_| rng.random::<f64>() >= p_false)
        .count();
    Ok(OracleOutcome {
        answer: 2 * true_count > trials,
        trials,
        true_count,
    })
}

/// Decision rule applied to a batch of machine runs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "rule")]
pub enum Vote {
    /// `true` when more than half the runs say `true` (odd trial counts).
    #[default]
    Majority,
    /// `true` only when the `false` rate sits at least `z` binomial standard
    /// deviations below 1/2, so an empty range answers `false` except with
    /// the one-sided normal tail probability at `z`.
    Margin { z: f64 },
}

/// Runs `trials` machines and applies `vote` to the outcomes.
pub fn oracle_vote<R: Rng + ?Sized>(
    m: usize,
    total: usize,
    trials: usize,
    vote: Vote,
    rng: &mut R,
) -> Result<OracleOutcome> {
    match vote {
        Vote::Majority => oracle_repeated(m, total, trials, rng),
        Vote::Margin { z } => {
            if trials == 0 {
                return Err(Error::Usage("trial count must be positive".into()));
            }
            if !(z >= 0.0) || !z.is_finite() {
                return Err(Error::Usage(format!(
                    "margin z must be finite and non-negative (got {z})"
                )));
            }
            let p_false = both_zero_probability(m, total)?;
            let true_count = (0..trials)
                .filter(|_| rng.random::<f64>() >= p_false)
                .count();
            let false_rate = (trials - true_count) as f64 / trials as f64;
            let threshold = 0.5 - z * 0.5 / (trials as f64).sqrt();
            Ok(OracleOutcome {
                answer: false_rate < threshold,
                trials,
                true_count,
            })
        }
    }
}

/// The ideal oracle: does any tour fall inside the query?
pub fn oracle_exact(dist: &LengthDistribution, q: &RangeQuery, policy: SlackPolicy) -> bool {
    dist.lengths().iter().any(|&l| q.contains(l, policy))
}

/// One row of the oracle experiment report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleReportRow {
    pub m: usize,
    #[serde(rename = "N")]
    pub total: usize,
    pub formula_p: f64,
    pub empirical_p: f64,
    pub trials: usize,
}

/// Runs `trials` independent machines and compares the empirical `false`
/// rate with the formula.
pub fn oracle_experiment<R: Rng + ?Sized>(
    m: usize,
    total: usize,
    trials: usize,
    rng: &mut R,
) -> Result<OracleReportRow> {
    let formula_p = both_zero_probability(m, total)?;
    let mut falses = 0usize;
    for _ in 0..trials {
        if !oracle_sample(m, total, rng)? {
            falses += 1;
        }
    }
    Ok(OracleReportRow {
        m,
        total,
        formula_p,
        empirical_p: if trials == 0 {
            0.0
        } else {
            falses as f64 / trials as f64
        },
        trials,
    })
}

/// `m,N,formula_p,empirical_p,trials` rows.
pub fn write_report_csv<W: Write>(rows: &[OracleReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::Usage(format!("csv output failed: {e}")))?;
    }
    w.flush()
        .map_err(|e| Error::Usage(format!("csv output failed: {e}")))?;
    Ok(())
}
