//! Simulation framework for online algorithms with advice.
//!
//! The crate implements the advice-on-tape model end to end: an omniscient
//! oracle writes a binary tape, an online algorithm reads bits on demand, and
//! the harness measures the competitive ratio against exhaustive offline
//! optima together with the exact number of advice bits read.
//!
//! Subsystems:
//! - [`tape`]: the bit tape and its fixed-width / self-delimiting encodings;
//! - [`covering`]: greedy covering families and the covering advice scheme;
//! - [`problems`]: accept/reject problem definitions, feasibility, brute force;
//! - [`reductions`]: length-preserving reductions from string guessing;
//! - [`sparsify`] and [`weighted`]: exponential weight sparsification and the
//!   weighted accept/reject algorithms built on it;
//! - [`scheduling`]: advice-based scheduling on related and unrelated machines;
//! - [`adversary`]: lower-bound constructions and black-box verifiers;
//! - [`harness`]: seeded generators, experiment runner, and reports.

pub mod adversary;
pub mod bitstr;
pub mod covering;
pub mod harness;
pub mod problems;
pub mod reductions;
pub mod rng;
pub mod scheduling;
pub mod sparsify;
pub mod tape;
pub mod weighted;

pub use bitstr::BitStr;
pub use tape::AdviceTape;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller violated an operation's contract (bad lengths, wrong
    /// problem/algorithm pairing, malformed inputs).
    #[error("contract violation: {0}")]
    Contract(String),
    /// An encoding precondition failed (value out of range for a width, ...).
    #[error("encoding error: {0}")]
    Encoding(String),
    /// An exhaustive-computation cap would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
