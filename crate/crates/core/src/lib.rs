//! Desk-scale laboratory for the insertion-code approach to approximate
//! Euclidean TSP.
//!
//! The crate is organised bottom-up:
//!
//! - [`permcode`]: insertion codes, their bijection with permutations, and
//!   mixed-radix ranking.
//! - [`geometry`]: Euclidean instances, unit-square normalization, cyclic
//!   tour lengths and insertion increments.
//! - [`wavesim`]: a logical-level simulation of the register circuit that
//!   builds the uniform and the tour-length-tilted superpositions.
//! - [`distsim`]: exact length tables, the Boltzmann target, Gaussian fits
//!   and the tilt analysis functions.
//! - [`oracle`]: the two-machine probabilistic range oracle.
//! - [`solver`]: Gaussian-tilt sampling, oracle range search and exact
//!   baselines.
//!
//! Every randomized routine takes a caller-supplied RNG; the CLI uses
//! [`rand_chacha::ChaCha8Rng`] seeded with `seed_from_u64`.

// `!(x > 0.0)` is how NaN gets rejected alongside the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distsim;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod permcode;
pub mod quadrature;
pub mod solver;
pub mod wavesim;

pub use error::{Error, Result};

/// Absolute tolerance for length equality and range-boundary checks.
pub const LENGTH_TOL: f64 = 1e-9;

/// Default ceiling on `n` for anything that enumerates all `n!` codes.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 10;

/// The RNG used by the CLI and the acceptance suite.
pub type LabRng = rand_chacha::ChaCha8Rng;

/// Builds the lab RNG from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> LabRng {
    use rand::SeedableRng;
    LabRng::seed_from_u64(seed)
}
