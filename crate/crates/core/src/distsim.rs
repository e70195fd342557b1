//! Exact tour-length tables and the distributions built on them.
//!
//! A [`LengthDistribution`] lists the cyclic length of every code in rank
//! order. From it we derive the Boltzmann target `P(c) ∝ alpha^(-L(c))`, the
//! fraction of tilted mass near the optimum, and oracle counts. For sizes
//! beyond enumeration, [`sis_sample`] draws from the circuit's own sequential
//! distribution and attaches importance weights towards the exact target.
//!
//! # Coordinates
//!
//! [`sigma_ratio`] works in raw (normalized-instance) length units. The
//! analysis function [`h_function`] works in the rescaled frame where the
//! length density is `e^(-u^2)`: a raw length `x` maps to
//! `u = (x - center) / (sqrt(2) * sigma)`, see [`GaussianFit::to_unit_frame`].

use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{EuclideanInstance, NormalizedInstance};
use crate::permcode::{decode_into, enumerate_codes_with_limit, InsertionCode};
use crate::quadrature;
use crate::wavesim::{branch_probabilities, Alpha};
use crate::LENGTH_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct LengthDistribution {
    n: usize,
    lengths: Vec<f64>,
}

impl LengthDistribution {
    /// Wraps a rank-indexed table; `lengths.len()` must equal `n!`.
    pub fn from_lengths(n: usize, lengths: Vec<f64>) -> Result<Self> {
        let expected = crate::permcode::factorial(n) as usize;
        if lengths.len() != expected {
            return Err(Error::Dimension {
                expected,
                actual: lengths.len(),
            });
        }
        Ok(LengthDistribution { n, lengths })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.lengths
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.lengths.iter().sum::<f64>() / self.lengths.len() as f64
    }

    /// Lowest rank achieving the minimum length.
    pub fn argmin(&self) -> usize {
        let min = self.min();
        self.lengths
            .iter()
            .position(|&l| l == min)
            .expect("table is non-empty")
    }

    /// Expectation of the tour length under `probs` (rank-indexed).
    pub fn expected_length(&self, probs: &[f64]) -> f64 {
        self.lengths.iter().zip(probs).map(|(l, p)| l * p).sum()
    }

    /// Equal-width histogram over `[min, max]`; the last bin is closed.
    pub fn histogram(&self, bins: usize) -> Vec<HistogramBin> {
        histogram(&self.lengths, bins)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub count: usize,
}

pub fn histogram(values: &[f64], bins: usize) -> Vec<HistogramBin> {
    let bins = bins.max(1);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() {
        return Vec::new();
    }
    let width = if hi > lo {
        (hi - lo) / bins as f64
    } else {
        1.0
    };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| HistogramBin {
            bin_lo: lo + k as f64 * width,
            bin_hi: lo + (k + 1) as f64 * width,
            count,
        })
        .collect()
}

/// `bin_lo,bin_hi,count` rows.
pub fn write_histogram_csv<W: Write>(bins: &[HistogramBin], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for b in bins {
        w.serialize(b)
            .map_err(|e| Error::Usage(format!("csv output failed: {e}")))?;
    }
    w.flush()
        .map_err(|e| Error::Usage(format!("csv output failed: {e}")))?;
    Ok(())
}

/// Length of every code, indexed by rank.
pub fn enumerate_lengths(inst: &EuclideanInstance) -> Result<LengthDistribution> {
    enumerate_lengths_with_limit(inst, crate::DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_lengths_with_limit(
    inst: &EuclideanInstance,
    limit: usize,
) -> Result<LengthDistribution> {
    let n = inst.len();
    let codes = enumerate_codes_with_limit(n, limit)?;
    let mut lengths = Vec::with_capacity(codes.len());
    let mut order = Vec::with_capacity(n);
    for code in codes {
        decode_into(code.entries(), &mut order);
        lengths.push(inst.cyclic_length(&order));
    }
    Ok(LengthDistribution { n, lengths })
}

/// `P(c) = alpha^(-L(c)) / Z`, indexed by rank.
pub fn boltzmann_exact(dist: &LengthDistribution, alpha: Alpha) -> Vec<f64> {
    let ln_a = alpha.ln();
    let min = dist.min();
    let weights: Vec<f64> = dist
        .lengths
        .iter()
        .map(|&l| (-ln_a * (l - min)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

/// Repeated sampling from a fixed rank-indexed probability table.
#[derive(Debug, Clone)]
pub struct TableSampler {
    n: usize,
    index: WeightedIndex<f64>,
}

impl TableSampler {
    /// `table` must have `n!` entries.
    pub fn new(n: usize, table: &[f64]) -> Result<Self> {
        let expected = crate::permcode::factorial(n) as usize;
        if table.len() != expected {
            return Err(Error::Dimension {
                expected,
                actual: table.len(),
            });
        }
        let index = WeightedIndex::new(table)
            .map_err(|e| Error::Usage(format!("invalid probability table: {e}")))?;
        Ok(TableSampler { n, index })
    }

    pub fn sample_rank<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> InsertionCode {
        InsertionCode::unrank(self.sample_rank(rng) as u64, self.n).expect("rank below n!")
    }
}

/// One draw from `table`. Build a [`TableSampler`] when drawing repeatedly.
pub fn boltzmann_sample<R: Rng + ?Sized>(
    n: usize,
    table: &[f64],
    rng: &mut R,
) -> Result<InsertionCode> {
    Ok(TableSampler::new(n, table)?.sample(rng))
}

/// A code drawn by sequential tilted insertion, with its importance weight
/// towards the exact Boltzmann target.
#[derive(Debug, Clone, PartialEq)]
pub struct SisDraw {
    pub code: InsertionCode,
    pub length: f64,
    /// `ln(alpha^(-L) / q)`, `q` being the realized product of branch
    /// probabilities.
    pub log_weight: f64,
}

impl SisDraw {
    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }
}

/// Draws one code the way the tilted circuit would, without enumeration.
pub fn sis_sample<R: Rng + ?Sized>(
    inst: &NormalizedInstance,
    alpha: Alpha,
    rng: &mut R,
) -> SisDraw {
    let n = inst.len();
    let ln_a = alpha.ln();
    let mut entries = Vec::with_capacity(n);
    entries.push(1);
    let mut order = vec![1usize];
    let mut log_q = 0.0;
    let mut length = 0.0;
    let mut incs = Vec::with_capacity(n);
    for t in 1..n {
        incs.clear();
        incs.extend((1..=t + 1).map(|j| inst.increment_unchecked(&order, t + 1, j)));
        let probs = branch_probabilities(&incs, alpha);
        let u = rng.random::<f64>();
        let mut acc = 0.0;
        let mut pick = t;
        for (j, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                pick = j;
                break;
            }
        }
        log_q += probs[pick].ln();
        length += incs[pick];
        order.insert(pick, t + 1);
        entries.push(pick + 1);
    }
    SisDraw {
        code: InsertionCode::new(entries).expect("sequential draw yields a valid code"),
        length,
        log_weight: -ln_a * length - log_q,
    }
}

/// Normalized importance weights of `draws` (max-shifted in log space).
pub fn normalized_weights(draws: &[SisDraw]) -> Vec<f64> {
    let max = draws
        .iter()
        .map(|d| d.log_weight)
        .fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = draws.iter().map(|d| (d.log_weight - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Self-normalized importance estimate of `E[f]` under the Boltzmann target.
pub fn self_normalized_mean<F: Fn(&SisDraw) -> f64>(draws: &[SisDraw], f: F) -> f64 {
    normalized_weights(draws)
        .iter()
        .zip(draws)
        .map(|(w, d)| w * f(d))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianFit {
    pub mu: f64,
    pub sigma: f64,
    pub sample_count: usize,
}

/// Mean and unbiased standard deviation. A spread below `LENGTH_TOL` (relative
/// to the mean's magnitude) counts as zero variance.
pub fn gaussian_fit(samples: &[f64]) -> Result<GaussianFit> {
    let k = samples.len();
    if k < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least 2 samples, got {k}"
        )));
    }
    let mu = samples.iter().sum::<f64>() / k as f64;
    let var = samples.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (k - 1) as f64;
    let sigma = var.sqrt();
    if !(sigma > LENGTH_TOL * mu.abs().max(1.0)) {
        return Err(Error::DegenerateFit("samples have zero variance".into()));
    }
    Ok(GaussianFit {
        mu,
        sigma,
        sample_count: k,
    })
}

impl GaussianFit {
    /// Maps a raw length into the frame where the density is `e^(-u^2)`.
    pub fn to_unit_frame(&self, x: f64, center: f64) -> f64 {
        (x - center) / (std::f64::consts::SQRT_2 * self.sigma)
    }

    /// Default scale polynomials `(p, q) = (sigma / x_min, x_max / sigma)`,
    /// i.e. `x_min >= 1/p` and `x_max <= q` in sigma units.
    pub fn scale_polynomials(&self, x_min: f64, x_max: f64) -> (f64, f64) {
        (self.sigma / x_min, x_max / self.sigma)
    }

    /// `ln(alpha)` that moves the tilted Gaussian's center onto `x_min`:
    /// `e^(-ln_a x) N(mu, sigma^2)` peaks at `mu - ln_a sigma^2`.
    pub fn centering_ln_alpha(&self, x_min: f64) -> f64 {
        (self.mu - x_min) / (self.sigma * self.sigma)
    }
}

/// Source of the length density for [`sigma_ratio`].
#[derive(Debug, Clone, Copy)]
pub enum LengthModel<'a> {
    /// Fitted Gaussian restricted to `[x_min, x_max]`.
    Gaussian {
        fit: GaussianFit,
        x_min: f64,
        x_max: f64,
    },
    /// The exact discrete table (integrals become sums).
    Discrete(&'a LengthDistribution),
}

/// Tilted mass within `(1 + epsilon)` of the minimum length:
/// `∫_{x_min}^{x_min(1+ε)} α^(-x) g(x) dx / ∫_{x_min}^{x_max} α^(-x) g(x) dx`.
pub fn sigma_ratio(model: LengthModel<'_>, alpha: Alpha, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::out_of_range(epsilon, "epsilon must be positive"));
    }
    let ln_a = alpha.ln();
    match model {
        LengthModel::Gaussian { fit, x_min, x_max } => {
            if !(x_min < x_max) {
                return Err(Error::out_of_range(
                    x_min,
                    "empty integration range: x_min >= x_max",
                ));
            }
            let cut = x_min * (1.0 + epsilon);
            if cut >= x_max {
                return Ok(1.0);
            }
            let var2 = 2.0 * fit.sigma * fit.sigma;
            let exponent = |x: f64| -ln_a * x - (x - fit.mu).powi(2) / var2;
            // the exponent is a concave parabola; shift by its max on the range
            let peak = (fit.mu - ln_a * fit.sigma * fit.sigma).clamp(x_min, x_max);
            let shift = exponent(peak);
            let f = |x: f64| (exponent(x) - shift).exp();
            let num = quadrature::integrate(f, x_min, cut)?;
            let den = quadrature::integrate(f, x_min, x_max)?;
            Ok((num / den).clamp(0.0, 1.0))
        }
        LengthModel::Discrete(dist) => {
            let x_min = dist.min();
            let x_max = dist.max();
            if !(x_min < x_max) {
                return Err(Error::out_of_range(
                    x_min,
                    "empty integration range: all lengths equal",
                ));
            }
            let cut = x_min * (1.0 + epsilon) + LENGTH_TOL;
            let (mut num, mut den) = (0.0, 0.0);
            for &l in dist.lengths() {
                let w = (-ln_a * (l - x_min)).exp();
                den += w;
                if l <= cut {
                    num += w;
                }
            }
            Ok(num / den)
        }
    }
}

/// `h(x) = ∫_x^{x+a} e^(-t^2) dt / ∫_x^{x+b} e^(-t^2) dt` with
/// `a = eps_xmin`, `b = range_width`, in the unit frame.
pub fn h_function(x: f64, eps_xmin: f64, range_width: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::out_of_range(x, "x must be finite"));
    }
    if !(eps_xmin > 0.0) || !eps_xmin.is_finite() {
        return Err(Error::out_of_range(
            eps_xmin,
            "eps * x_min must be positive",
        ));
    }
    if !(range_width >= eps_xmin) || !range_width.is_finite() {
        return Err(Error::out_of_range(
            range_width,
            "range width must be at least eps * x_min",
        ));
    }
    if eps_xmin == range_width {
        return Ok(1.0);
    }
    // smallest |t| on [x, x + range_width] sets the integrand's peak
    let t_peak = 0.0f64.clamp(x, x + range_width);
    let shift = t_peak * t_peak;
    let f = |t: f64| (shift - t * t).exp();
    let num = quadrature::integrate(f, x, x + eps_xmin)?;
    let den = quadrature::integrate(f, x, x + range_width)?;
    Ok((num / den).clamp(0.0, 1.0))
}

/// Half the L1 distance between two tables over the same index set.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            actual: q.len(),
        });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Pearson statistic of `observed` counts against `probs`; cells with zero
/// probability are skipped. Returns `(statistic, degrees_of_freedom)`.
pub fn chi_square_statistic(observed: &[u64], probs: &[f64]) -> Result<(f64, usize)> {
    if observed.len() != probs.len() {
        return Err(Error::Dimension {
            expected: probs.len(),
            actual: observed.len(),
        });
    }
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(probs) {
        if p <= 0.0 {
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    Ok((stat, cells.saturating_sub(1)))
}
