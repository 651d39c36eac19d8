//! Approximate edit distance between pseudorandom strings.
//!
//! The exact edit distance of two n-letter strings takes quadratic time
//! in general, but if one string x has no pair of disjoint B-letter
//! substrings within pB edits of each other ((p, B)-pseudorandomness),
//! the distance to an *arbitrary* second string y can be approximated
//! within O(1/p) in near-linear time. This crate implements that
//! pipeline end to end:
//!
//! - [`distance`]: exact DP and a resumable bounded search with
//!   deterministic work metering, used both standalone and as the
//!   low-distance branch of the racing drivers.
//! - [`sparse`]: optimal non-crossing matching restricted to a sparse
//!   candidate edge set.
//! - [`clean`]: the randomized divide-and-conquer solver for matching
//!   block sequences under an asymmetric cost, probing the comparison
//!   function sparingly.
//! - [`blocks`]: the reduction from string pairs to block matching and
//!   back to an edit script.
//! - [`audit`]: exact and sampled verification of the pseudorandomness
//!   hypothesis for a string.
//! - [`detect`]: parameter-oblivious drivers - single-shot estimation
//!   and preprocess-then-query for source strings.
//! - [`gen`]: seeded instance generators for tests and benchmarks.

pub mod audit;
pub mod blocks;
pub mod clean;
pub mod detect;
pub mod distance;
pub mod error;
pub mod gen;
pub mod meter;
pub mod rng;
pub mod script;
pub mod sparse;
pub mod text;

pub use error::{Error, Result};
pub use meter::WorkMeter;
pub use rng::Prng;
pub use script::{apply_script, EditOp, EditScript};
pub use text::{Symbol, Text, PAD};
