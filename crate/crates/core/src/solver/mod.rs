//! End-to-end solvers.
//!
//! - [`solve_gaussian`]: tilt the tour distribution towards short tours
//!   (`alpha` chosen from a pilot Gaussian fit), read it `K` times, keep the
//!   best tour.
//! - [`solve_oracle`]: scan `epsilon`-wide length bins with a range oracle,
//!   stop at the first bin that answers `true`, then project the uniform wave
//!   onto that bin.
//! - [`held_karp`], [`brute_force`]: exact baselines.

mod exact;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use crate::distsim::{
    boltzmann_exact, enumerate_lengths_with_limit, gaussian_fit, normalized_weights, sis_sample,
    GaussianFit, TableSampler,
};
use crate::error::{Error, Result};
use crate::geometry::{length_bounds, NormalizedInstance};
use crate::oracle::{count_in_range, oracle_exact, oracle_vote, RangeQuery, SlackPolicy, Vote};
use crate::permcode::{decode_into, InsertionCode, Permutation};
use crate::wavesim::Alpha;
use crate::LENGTH_TOL;

pub use exact::{
    brute_force, brute_force_with_limit, held_karp, nearest_neighbor, HELD_KARP_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub tour: Permutation,
    pub length: f64,
    pub opt: Option<f64>,
    /// Relative excess `length / opt - 1`, filled by [`SolveResult::with_opt`].
    pub opt_gap: Option<f64>,
    pub samples_used: usize,
    pub oracle_calls: usize,
}

impl SolveResult {
    fn new(
        inst: &NormalizedInstance,
        tour: Permutation,
        samples_used: usize,
        oracle_calls: usize,
    ) -> Result<Self> {
        let length = inst.tour_length(&tour)?;
        Ok(SolveResult {
            tour,
            length,
            opt: None,
            opt_gap: None,
            samples_used,
            oracle_calls,
        })
    }

    /// Records an exact optimum and the relative gap to it.
    pub fn with_opt(mut self, opt: f64) -> Self {
        self.opt = Some(opt);
        self.opt_gap = Some(((self.length - opt) / opt).max(0.0));
        self
    }
}

/// Knobs for [`solve_gaussian`]. Unset `alpha` and `repetitions` are derived
/// from the pilot fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianParams {
    pub alpha: Option<Alpha>,
    pub repetitions: Option<usize>,
    pub pilot: usize,
    /// Constant in `K = ceil(c * p^2 * ln(1/fail) / eps^2)`.
    pub c: f64,
    pub fail: f64,
    /// Up to this `n` samples come from the exact Boltzmann table; above it,
    /// from importance-resampled sequential draws.
    pub enumeration_limit: usize,
}

impl Default for GaussianParams {
    fn default() -> Self {
        GaussianParams {
            alpha: None,
            repetitions: None,
            pilot: 10_000,
            c: 4.0,
            fail: 1e-3,
            enumeration_limit: crate::DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    /// `n <= 3`: there is only one tour.
    UniqueTour,
    ExactTable,
    SisResampling,
}

/// Everything [`solve_gaussian`] resolved along the way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianSolve {
    pub result: SolveResult,
    pub alpha: Option<Alpha>,
    pub repetitions: usize,
    pub fit: Option<GaussianFit>,
    pub x_min_estimate: Option<f64>,
    /// `p = sigma / x_min` used in the repetition count.
    pub p_scale: Option<f64>,
    pub sampler: SamplerKind,
}

/// A uniformly random code: each `a_i` independent and uniform on `1..=i`,
/// which is exactly the readout distribution of the uniform wave.
pub fn uniform_code<R: Rng + ?Sized>(n: usize, rng: &mut R) -> InsertionCode {
    let entries = (1..=n).map(|i| rng.random_range(1..=i)).collect();
    InsertionCode::new(entries).expect("entries drawn within range")
}

/// What a uniform pilot run tells us about the length distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pilot {
    pub fit: GaussianFit,
    /// Best of the pilot draws and a nearest-neighbour tour.
    pub x_min: f64,
    /// Longest pilot draw.
    pub x_max: f64,
}

/// Reads `count` tours from the uniform wave and fits a Gaussian to their
/// lengths.
pub fn pilot<R: Rng + ?Sized>(
    inst: &NormalizedInstance,
    count: usize,
    rng: &mut R,
) -> Result<Pilot> {
    let n = inst.len();
    let mut order = Vec::with_capacity(n);
    let lengths: Vec<f64> = (0..count)
        .map(|_| {
            decode_into(uniform_code(n, rng).entries(), &mut order);
            inst.cyclic_length(&order)
        })
        .collect();
    let fit = gaussian_fit(&lengths)?;
    let nn = inst.tour_length(&nearest_neighbor(inst))?;
    Ok(Pilot {
        fit,
        x_min: lengths.iter().copied().fold(nn, f64::min),
        x_max: lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Gaussian-assumption sampling solver.
///
/// 1. Pilot: read `pilot` uniform tours, fit a Gaussian, and estimate the
///    minimum `x_min` as the best of the pilot and a nearest-neighbour tour.
/// 2. `ln(alpha) = (mu - x_min) / sigma^2` puts the tilted Gaussian's center
///    on `x_min`.
/// 3. `K = ceil(c * (sigma / x_min)^2 * ln(1 / fail) / epsilon^2)`.
/// 4. Draw `K` tours from the tilted distribution and keep the shortest; the
///    earliest draw wins ties.
pub fn solve_gaussian<R: Rng + ?Sized>(
    inst: &NormalizedInstance,
    epsilon: f64,
    params: &GaussianParams,
    rng: &mut R,
) -> Result<GaussianSolve> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::out_of_range(epsilon, "epsilon must be positive"));
    }
    let n = inst.len();
    if n <= 3 {
        let tour = Permutation::identity(n);
        return Ok(GaussianSolve {
            result: SolveResult::new(inst, tour, 0, 0)?,
            alpha: params.alpha,
            repetitions: 0,
            fit: None,
            x_min_estimate: None,
            p_scale: None,
            sampler: SamplerKind::UniqueTour,
        });
    }

    let Pilot { fit, x_min, .. } = pilot(inst, params.pilot, rng)?;

    let alpha = match params.alpha {
        Some(a) => a,
        None => Alpha::from_ln(fit.centering_ln_alpha(x_min))
            .map_err(|e| Error::DegenerateFit(format!("cannot center the tilt: {e}")))?,
    };
    let p_scale = fit.sigma / x_min;
    let repetitions = match params.repetitions {
        Some(k) => k.max(1),
        None => {
            let k = params.c * p_scale * p_scale * (1.0 / params.fail).ln() / (epsilon * epsilon);
            (k.ceil() as usize).max(1)
        }
    };

    let (tour, sampler) = if n <= params.enumeration_limit {
        let dist = enumerate_lengths_with_limit(inst, params.enumeration_limit)?;
        let table = boltzmann_exact(&dist, alpha);
        let sampler = TableSampler::new(n, &table)?;
        let mut best: Option<(f64, usize)> = None;
        for _ in 0..repetitions {
            let r = sampler.sample_rank(rng);
            let l = dist.lengths()[r];
            if best.is_none_or(|(bl, _)| l < bl) {
                best = Some((l, r));
            }
        }
        let (_, r) = best.expect("at least one repetition");
        let code = InsertionCode::unrank(r as u64, n)?;
        (code.decode(), SamplerKind::ExactTable)
    } else {
        let draws: Vec<_> = (0..repetitions)
            .map(|_| sis_sample(inst, alpha, rng))
            .collect();
        let weights = normalized_weights(&draws);
        let index = WeightedIndex::new(&weights)
            .map_err(|e| Error::DegenerateFit(format!("importance weights unusable: {e}")))?;
        let mut best: Option<usize> = None;
        for _ in 0..repetitions {
            let i = index.sample(rng);
            if best.is_none_or(|b| draws[i].length < draws[b].length) {
                best = Some(i);
            }
        }
        let i = best.expect("at least one repetition");
        (draws[i].code.decode(), SamplerKind::SisResampling)
    };

    Ok(GaussianSolve {
        result: SolveResult::new(inst, tour, repetitions, 0)?,
        alpha: Some(alpha),
        repetitions,
        fit: Some(fit),
        x_min_estimate: Some(x_min),
        p_scale: Some(p_scale),
        sampler,
    })
}

/// `epsilon`-wide bins tiling `[2, sqrt(2) n)`, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinIndexing {
    pub lo: f64,
    pub eps: f64,
    pub count: usize,
    pub upper: f64,
}

impl BinIndexing {
    pub fn new(n: usize, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::out_of_range(eps, "bin width must be positive"));
        }
        if n < 2 {
            return Err(Error::out_of_range(
                n as f64,
                "binning needs at least 2 cities",
            ));
        }
        let (lo, upper) = length_bounds(n);
        let count = ((upper - lo) / eps).ceil().max(1.0) as usize;
        Ok(BinIndexing {
            lo,
            eps,
            count,
            upper,
        })
    }

    /// Nominal `[2 + (i-1) eps, 2 + i eps)`.
    pub fn bounds(&self, i: usize) -> (f64, f64) {
        (
            self.lo + (i - 1) as f64 * self.eps,
            self.lo + i as f64 * self.eps,
        )
    }

    /// Oracle query for bin `i`. The outer edges are widened by
    /// `LENGTH_TOL` so tours sitting exactly on `2` or `sqrt(2) n` (up to
    /// rounding) still land in the first or last bin.
    pub fn query(&self, i: usize, delta: f64) -> Result<RangeQuery> {
        if i < 1 || i > self.count {
            return Err(Error::out_of_range(
                i as f64,
                format!("bin index must lie in 1..={}", self.count),
            ));
        }
        let (mut lo, mut hi) = self.bounds(i);
        if i == 1 {
            lo -= LENGTH_TOL;
        }
        if i == self.count {
            hi = hi.max(self.upper) + LENGTH_TOL;
        }
        RangeQuery::new(lo, hi, delta)
    }
}

/// Bin holding `length`: `floor((length - 2) / eps) + 1`, clamped to
/// `1..=count`. Exact boundaries belong to the higher bin.
pub fn bin_of(length: f64, bins: &BinIndexing) -> Result<usize> {
    if !(length >= bins.lo - LENGTH_TOL) {
        return Err(Error::out_of_range(
            length,
            "tour lengths of normalized instances are at least 2",
        ));
    }
    if length > bins.upper + bins.eps {
        return Err(Error::out_of_range(
            length,
            format!("length exceeds the bin range ending at {}", bins.upper),
        ));
    }
    let raw = ((length - bins.lo) / bins.eps).floor();
    let mut i = (raw.max(0.0) as usize + 1).clamp(1, bins.count);
    // settle rounding disagreements against the nominal bounds
    while i > 1 && length < bins.bounds(i).0 {
        i -= 1;
    }
    while i < bins.count && length >= bins.bounds(i).1 {
        i += 1;
    }
    Ok(i)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum OracleMode {
    /// The ideal oracle (exact counts).
    Exact,
    /// Repeated runs of the two-machine oracle per bin.
    Sampled { trials: usize, vote: Vote },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSolve {
    pub result: SolveResult,
    pub i_0: usize,
    pub bins: BinIndexing,
    /// Codes in the projected bin.
    pub projected_count: usize,
}

/// Oracle-driven range search.
///
/// Scans bins `1, 2, ...` with slack `delta = epsilon`, takes the first bin
/// `i_0` the oracle accepts, and returns a uniformly chosen code whose length
/// lies in that bin (under `policy`), i.e. a measurement of the uniform wave
/// projected onto range register value `i_0`.
pub fn solve_oracle<R: Rng + ?Sized>(
    inst: &NormalizedInstance,
    epsilon: f64,
    mode: OracleMode,
    policy: SlackPolicy,
    rng: &mut R,
) -> Result<OracleSolve> {
    solve_oracle_with_limit(
        inst,
        epsilon,
        mode,
        policy,
        crate::DEFAULT_ENUMERATION_LIMIT,
        rng,
    )
}

pub fn solve_oracle_with_limit<R: Rng + ?Sized>(
    inst: &NormalizedInstance,
    epsilon: f64,
    mode: OracleMode,
    policy: SlackPolicy,
    limit: usize,
    rng: &mut R,
) -> Result<OracleSolve> {
    let n = inst.len();
    let bins = BinIndexing::new(n, epsilon)?;
    let dist = enumerate_lengths_with_limit(inst, limit)?;
    let delta = epsilon;

    let mut oracle_calls = 0;
    let mut hit = None;
    for i in 1..=bins.count {
        let q = bins.query(i, delta)?;
        oracle_calls += 1;
        let answer = match mode {
            OracleMode::Exact => oracle_exact(&dist, &q, policy),
            OracleMode::Sampled { trials, vote } => {
                let (m, total) = count_in_range(&dist, &q, policy);
                oracle_vote(m, total, trials, vote, rng)?.answer
            }
        };
        if answer {
            hit = Some((i, q));
            break;
        }
    }
    let (i_0, q) =
        hit.ok_or_else(|| Error::SearchFailure(format!("no bin of {} accepted", bins.count)))?;

    let projected: Vec<usize> = dist
        .lengths()
        .iter()
        .enumerate()
        .filter(|(_, &l)| q.contains(l, policy))
        .map(|(r, _)| r)
        .collect();
    if projected.is_empty() {
        return Err(Error::SearchFailure(format!(
            "oracle accepted bin {i_0} but it holds no tour; projection is empty"
        )));
    }
    let r = projected[rng.random_range(0..projected.len())];
    let tour = InsertionCode::unrank(r as u64, n)?.decode();
    Ok(OracleSolve {
        result: SolveResult::new(inst, tour, 1, oracle_calls)?,
        i_0,
        bins,
        projected_count: projected.len(),
    })
}
