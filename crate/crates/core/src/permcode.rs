//! Insertion codes and their bijection with permutations.
//!
//! An insertion code `(a_1, ..., a_n)` with `1 <= a_i <= i` describes a
//! permutation of `1..=n` built incrementally: starting from `[1]`, element
//! `i` is inserted so that it becomes the `a_i`-th entry of the arrangement
//! of `1..=i`. `a_i = 1` puts it in front, `a_i = i` appends it.
//!
//! Codes are ranked in mixed radix, `rank = sum (a_i - 1) * (i - 1)!`, which
//! gives every table in this crate a dense `0..n!` index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` whose `n!` fits in a `u64` rank.
pub const MAX_RANKABLE: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct InsertionCode(Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl InsertionCode {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        check_code_prefix(&entries)?;
        if entries.is_empty() {
            return Err(Error::InvalidCode(
                "code must have at least one entry".into(),
            ));
        }
        Ok(InsertionCode(entries))
    }

    /// The code `(1, 2, ..., n)`, which decodes to the identity.
    pub fn identity(n: usize) -> Self {
        InsertionCode((1..=n.max(1)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<usize> {
        self.0
    }

    pub fn decode(&self) -> Permutation {
        let mut order = Vec::with_capacity(self.0.len());
        decode_into(&self.0, &mut order);
        Permutation(order)
    }

    pub fn rank(&self) -> Result<u64> {
        rank_entries(&self.0)
    }

    pub fn unrank(rank: u64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCode(
                "code must have at least one entry".into(),
            ));
        }
        if n > MAX_RANKABLE {
            return Err(Error::SizeLimit {
                n,
                limit: MAX_RANKABLE,
            });
        }
        let total = factorial(n);
        if rank >= total {
            return Err(Error::out_of_range(
                rank as f64,
                format!("rank must be below {n}! = {total}"),
            ));
        }
        let mut entries = vec![1; n];
        let mut rest = rank;
        for (i, slot) in entries.iter_mut().enumerate().skip(1) {
            let radix = (i + 1) as u64;
            *slot = (rest % radix) as usize + 1;
            rest /= radix;
        }
        Ok(InsertionCode(entries))
    }
}

/// Validates a (possibly partial) code: `1 <= a_i <= i` for every entry.
pub fn check_code_prefix(entries: &[usize]) -> Result<()> {
    for (i, &a) in entries.iter().enumerate() {
        if a < 1 || a > i + 1 {
            return Err(Error::InvalidCode(format!(
                "entry {} is {a}, must lie in 1..={}",
                i + 1,
                i + 1
            )));
        }
    }
    Ok(())
}

/// Decodes a validated code into `out`, replacing its contents.
pub fn decode_into(entries: &[usize], out: &mut Vec<usize>) {
    out.clear();
    for (i, &a) in entries.iter().enumerate() {
        out.insert(a - 1, i + 1);
    }
}

/// Mixed-radix rank of a validated code (or code prefix).
pub fn rank_entries(entries: &[usize]) -> Result<u64> {
    if entries.len() > MAX_RANKABLE {
        return Err(Error::SizeLimit {
            n: entries.len(),
            limit: MAX_RANKABLE,
        });
    }
    let mut rank = 0u64;
    let mut weight = 1u64;
    for (i, &a) in entries.iter().enumerate().skip(1) {
        weight *= i as u64;
        rank += (a as u64 - 1) * weight;
    }
    Ok(rank)
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("permutation is empty".into()));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v < 1 || v > n {
                return Err(Error::InvalidPermutation(format!(
                    "element {v} outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::InvalidPermutation(format!("element {v} repeated")));
            }
        }
        Ok(Permutation(order))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n.max(1)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    /// Inverse of [`InsertionCode::decode`]: removes `n, n-1, ..., 2` in turn
    /// and records the position each one occupied.
    pub fn encode(&self) -> InsertionCode {
        let n = self.0.len();
        let mut work = self.0.clone();
        let mut entries = vec![1; n];
        for element in (2..=n).rev() {
            let pos = work
                .iter()
                .position(|&v| v == element)
                .expect("validated permutation contains every element");
            entries[element - 1] = pos + 1;
            work.remove(pos);
        }
        InsertionCode(entries)
    }

    /// Keeps only elements `1..=t`, preserving their relative order.
    pub fn restrict(&self, t: usize) -> Permutation {
        Permutation(self.0.iter().copied().filter(|&v| v <= t).collect())
    }
}

/// All codes of length `n` in ascending rank order (`a_2` varies fastest).
pub fn enumerate_codes(n: usize) -> Result<Codes> {
    enumerate_codes_with_limit(n, crate::DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_codes_with_limit(n: usize, limit: usize) -> Result<Codes> {
    if n == 0 {
        return Err(Error::InvalidCode(
            "code must have at least one entry".into(),
        ));
    }
    if n > limit || n > MAX_RANKABLE {
        return Err(Error::SizeLimit { n, limit });
    }
    Ok(Codes {
        next: Some(vec![1; n]),
        remaining: factorial(n),
    })
}

/// Iterator returned by [`enumerate_codes`].
#[derive(Debug, Clone)]
pub struct Codes {
    next: Option<Vec<usize>>,
    remaining: u64,
}

impl Iterator for Codes {
    type Item = InsertionCode;

    fn next(&mut self) -> Option<InsertionCode> {
        let current = self.next.take()?;
        self.remaining -= 1;
        let mut succ = current.clone();
        // odometer: digit i has radix i + 1, least significant first
        let mut carried = true;
        for (i, digit) in succ.iter_mut().enumerate().skip(1) {
            if *digit < i + 1 {
                *digit += 1;
                carried = false;
                break;
            }
            *digit = 1;
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(InsertionCode(current))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

impl ExactSizeIterator for Codes {}

impl TryFrom<Vec<usize>> for InsertionCode {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        InsertionCode::new(v)
    }
}

impl From<InsertionCode> for Vec<usize> {
    fn from(c: InsertionCode) -> Self {
        c.0
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, items: &[usize]) -> fmt::Result {
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

fn parse_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad entry {:?}: {e}", t.trim()))
        })
        .collect()
}

impl fmt::Display for InsertionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.0)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.0)
    }
}

impl FromStr for InsertionCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        InsertionCode::new(parse_list(s).map_err(Error::InvalidCode)?)
    }
}

impl FromStr for Permutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Permutation::new(parse_list(s).map_err(Error::InvalidPermutation)?)
    }
}
