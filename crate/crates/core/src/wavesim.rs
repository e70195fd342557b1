//! Logical-level simulation of the insertion-code register circuit.
//!
//! The physical picture has `n` one-hot registers, register `i` holding
//! `i + 1` slots. Only `n!` of those basis states are ever reachable, so the
//! simulator keys amplitudes by code prefix instead of by raw slot pattern.
//! Keys are stored as mixed-radix prefix ranks: a depth-`t` prefix with rank
//! `r` has children `r + (j - 1) * t!` for `j = 1..=t+1`, which keeps the map
//! ordered by rank without storing the prefixes themselves.
//!
//! [`render_registers`] maps a code back onto the slot picture.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::NormalizedInstance;
use crate::permcode::{decode_into, factorial, InsertionCode, MAX_RANKABLE};

/// Tilt base `alpha > 1`; a tour of length `L` is favoured in proportion to
/// `alpha^(-L)`. Equivalently `alpha = e^(2k)` with `k > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::out_of_range(
                value,
                "alpha must be a finite value above 1",
            ))
        }
    }

    /// `alpha = e^(2k)`.
    pub fn from_k(k: f64) -> Result<Self> {
        Self::from_ln(2.0 * k)
    }

    /// `alpha = e^ln_alpha`.
    pub fn from_ln(ln_alpha: f64) -> Result<Self> {
        if !(ln_alpha > 0.0) {
            return Err(Error::out_of_range(ln_alpha, "ln(alpha) must be positive"));
        }
        let value = ln_alpha.exp();
        if value.is_finite() && value > 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::out_of_range(
                ln_alpha,
                "ln(alpha) gives a non-representable alpha",
            ))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn ln(self) -> f64 {
        self.0.ln()
    }

    pub fn k(self) -> f64 {
        self.ln() / 2.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Alpha::new(v)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

/// Branch probabilities proportional to `alpha^(-inc_j)`.
pub fn branch_probabilities(increments: &[f64], alpha: Alpha) -> Vec<f64> {
    let ln_a = alpha.ln();
    let min = increments.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = increments
        .iter()
        .map(|&d| (-ln_a * (d - min)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    n: usize,
    depth: usize,
    amplitudes: BTreeMap<u64, Complex64>,
}

impl WaveState {
    /// `Phi_1`: register 1 holds `a_1 = 1`, every later register is undecided.
    pub fn initial(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Depth("a wave needs at least one register".into()));
        }
        if n > MAX_RANKABLE {
            return Err(Error::SizeLimit {
                n,
                limit: MAX_RANKABLE,
            });
        }
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(0, Complex64::new(1.0, 0.0));
        Ok(WaveState {
            n,
            depth: 1,
            amplitudes,
        })
    }

    /// A full-depth state with the given amplitudes; used for point masses
    /// and hand-built test states.
    pub fn from_amplitudes(
        n: usize,
        entries: impl IntoIterator<Item = (InsertionCode, Complex64)>,
    ) -> Result<Self> {
        let mut state = Self::initial(n)?;
        state.depth = n;
        state.amplitudes.clear();
        for (code, amp) in entries {
            if code.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    actual: code.len(),
                });
            }
            state.amplitudes.insert(code.rank()?, amp);
        }
        Ok(state)
    }

    pub fn registers(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_complete(&self) -> bool {
        self.depth == self.n
    }

    /// Number of stored prefixes.
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|z| z.norm_sqr()).sum()
    }

    /// `(prefix, amplitude)` pairs in ascending prefix rank.
    pub fn iter(&self) -> impl Iterator<Item = (InsertionCode, Complex64)> + '_ {
        let depth = self.depth;
        self.amplitudes.iter().map(move |(&r, &z)| {
            (
                InsertionCode::unrank(r, depth).expect("stored ranks are in range"),
                z,
            )
        })
    }

    pub fn amplitude_of(&self, code: &InsertionCode) -> Complex64 {
        if code.len() != self.depth {
            return Complex64::new(0.0, 0.0);
        }
        code.rank()
            .ok()
            .and_then(|r| self.amplitudes.get(&r).copied())
            .unwrap_or_default()
    }

    /// `|amplitude|^2` of `code`, zero when absent.
    pub fn probability_of(&self, code: &InsertionCode) -> f64 {
        self.amplitude_of(code).norm_sqr()
    }

    /// Dense probability vector indexed by rank, `depth!` entries.
    pub fn probabilities(&self) -> Vec<f64> {
        let mut out = vec![0.0; factorial(self.depth) as usize];
        for (&r, z) in &self.amplitudes {
            out[r as usize] = z.norm_sqr();
        }
        out
    }

    fn check_growable(&self) -> Result<()> {
        if self.depth >= self.n {
            return Err(Error::Depth(format!(
                "state already at full depth {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Gate `G_{t+1}`: every prefix spawns `t + 1` children of equal weight.
    pub fn apply_uniform_gate(&self) -> Result<WaveState> {
        self.check_growable()?;
        let t = self.depth;
        let stride = factorial(t);
        let split = 1.0 / ((t + 1) as f64).sqrt();
        let mut next = BTreeMap::new();
        for (&r, &z) in &self.amplitudes {
            for j in 0..=t as u64 {
                next.insert(r + j * stride, z * split);
            }
        }
        Ok(WaveState {
            n: self.n,
            depth: t + 1,
            amplitudes: next,
        })
    }

    /// Tilted gate: child `j` of a prefix receives probability proportional
    /// to `alpha^(-inc_j)`, where `inc_j` is the cyclic length added by
    /// inserting city `t + 1` at position `j` of the decoded prefix.
    pub fn apply_weighted_gate(
        &self,
        inst: &NormalizedInstance,
        alpha: Alpha,
    ) -> Result<WaveState> {
        self.check_growable()?;
        if inst.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: inst.len(),
            });
        }
        let t = self.depth;
        let stride = factorial(t);
        let new_city = t + 1;
        let mut next = BTreeMap::new();
        let mut order = Vec::with_capacity(t);
        let mut incs = vec![0.0; t + 1];
        for (&r, &z) in &self.amplitudes {
            let prefix = InsertionCode::unrank(r, t)?;
            decode_into(prefix.entries(), &mut order);
            for (j, inc) in incs.iter_mut().enumerate() {
                *inc = inst.increment_unchecked(&order, new_city, j + 1);
            }
            let probs = branch_probabilities(&incs, alpha);
            for (j, p) in probs.iter().enumerate() {
                next.insert(r + j as u64 * stride, z * p.sqrt());
            }
        }
        Ok(WaveState {
            n: self.n,
            depth: t + 1,
            amplitudes: next,
        })
    }

    /// Reads the wave: returns a code with probability `|amplitude|^2`.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<InsertionCode> {
        if !self.is_complete() {
            return Err(Error::Depth(format!(
                "cannot measure at depth {} of {}",
                self.depth, self.n
            )));
        }
        let total = self.norm_sqr();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut last = None;
        for (&r, z) in &self.amplitudes {
            let p = z.norm_sqr();
            if p == 0.0 {
                continue;
            }
            acc += p;
            last = Some(r);
            if target < acc {
                break;
            }
        }
        let r = last.ok_or_else(|| Error::Depth("state has no support".into()))?;
        InsertionCode::unrank(r, self.depth)
    }

    /// Debug dump: `rank,code,probability` rows in rank order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Usage(format!("csv output failed: {e}"));
        w.write_record(["rank", "code", "probability"])
            .map_err(io)?;
        for (&r, z) in &self.amplitudes {
            let code = InsertionCode::unrank(r, self.depth)?;
            w.write_record([
                r.to_string(),
                code.to_string(),
                format!("{:e}", z.norm_sqr()),
            ])
            .map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Usage(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

/// `Phi_n`: the equal superposition over all `n!` codes.
pub fn prepare_uniform(n: usize) -> Result<WaveState> {
    prepare_uniform_with_limit(n, crate::DEFAULT_ENUMERATION_LIMIT)
}

pub fn prepare_uniform_with_limit(n: usize, limit: usize) -> Result<WaveState> {
    if n > limit {
        return Err(Error::SizeLimit { n, limit });
    }
    let mut state = WaveState::initial(n)?;
    while !state.is_complete() {
        state = state.apply_uniform_gate()?;
    }
    Ok(state)
}

/// `Psi_alpha`: the initial state followed by `n - 1` tilted gates.
pub fn prepare_weighted(inst: &NormalizedInstance, alpha: Alpha) -> Result<WaveState> {
    prepare_weighted_with_limit(inst, alpha, crate::DEFAULT_ENUMERATION_LIMIT)
}

pub fn prepare_weighted_with_limit(
    inst: &NormalizedInstance,
    alpha: Alpha,
    limit: usize,
) -> Result<WaveState> {
    let n = inst.len();
    if n > limit {
        return Err(Error::SizeLimit { n, limit });
    }
    let mut state = WaveState::initial(n)?;
    while !state.is_complete() {
        state = state.apply_weighted_gate(inst, alpha)?;
    }
    Ok(state)
}

/// One-hot slot picture of a code: register `i` has `i + 1` slots, slot 1
/// marks "undecided" and slot `a_i + 1` carries the value `a_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registers(Vec<Vec<u8>>);

impl Registers {
    pub fn registers(&self) -> &[Vec<u8>] {
        &self.0
    }

    pub fn total_slots(&self) -> usize {
        self.0.iter().map(Vec::len).sum()
    }
}

impl fmt::Display for Registers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, reg) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for bit in reg {
                write!(f, "{bit}")?;
            }
        }
        Ok(())
    }
}

pub fn render_registers(code: &InsertionCode) -> Registers {
    let regs = code
        .entries()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let mut slots = vec![0u8; i + 2];
            slots[a] = 1;
            slots
        })
        .collect();
    Registers(regs)
}
