use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{EuclideanInstance, Point};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    /// i.i.d. points in the unit square.
    Uniform,
    /// Odd cities on `(0, 0)`, even cities on `(1, 1)`; alternating tours reach
    /// the `sqrt(2) * n` ceiling.
    TwoCorner,
    /// Evenly spaced points on the segment `x = 0, 0 <= y <= 1` in shuffled
    /// label order; the shortest tour has length exactly 2.
    Collinear,
}

impl InstanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::Uniform => "uniform",
            InstanceKind::TwoCorner => "two-corner",
            InstanceKind::Collinear => "collinear",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InstanceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(InstanceKind::Uniform),
            "two-corner" => Ok(InstanceKind::TwoCorner),
            "collinear" => Ok(InstanceKind::Collinear),
            other => Err(Error::Usage(format!("unknown instance kind {other:?}"))),
        }
    }
}

/// Deterministic fixture generator; the same `rng` state gives the same
/// instance.
pub fn generate<R: Rng + ?Sized>(
    kind: InstanceKind,
    n: usize,
    rng: &mut R,
) -> Result<EuclideanInstance> {
    if n < 2 {
        return Err(Error::out_of_range(
            n as f64,
            "instances need at least 2 cities",
        ));
    }
    let points = match kind {
        InstanceKind::Uniform => (0..n)
            .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
            .collect(),
        InstanceKind::TwoCorner => (0..n)
            .map(|i| {
                if i % 2 == 0 {
                    Point::new(0.0, 0.0)
                } else {
                    Point::new(1.0, 1.0)
                }
            })
            .collect(),
        InstanceKind::Collinear => {
            let mut ys: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
            ys.shuffle(rng);
            ys.into_iter().map(|y| Point::new(0.0, y)).collect()
        }
    };
    EuclideanInstance::new(Some(format!("{kind}-{n}")), points)
}
