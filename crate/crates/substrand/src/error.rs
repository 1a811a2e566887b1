//! Crate-wide error type.
//!
//! Errors here are *usage* errors: violated parameter invariants, malformed
//! inputs, out-of-range indices. Data-driven reconstruction failures (a
//! spectrum that does not determine a string) are not errors; they are
//! reported as structured values in [`crate::outcome::ReconstructionOutcome`].

use thiserror::Error;

/// Errors raised by library operations on invalid inputs or parameters.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two strings given to a distance computation differ in length.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A window request `(start, len)` falls outside the string.
    #[error("window ({start}, {len}) out of range for string of length {n}")]
    WindowOutOfRange { start: usize, len: usize, n: usize },

    /// A string literal contained a symbol other than '0'/'1', or was empty.
    #[error("invalid binary string: {reason}")]
    ParseBitString { reason: String },

    /// A spectrum file or read set is malformed.
    #[error("invalid spectrum: {reason}")]
    InvalidSpectrum { reason: String },

    /// A derived parameter set violates its invariants.
    #[error("invalid parameters: {reason}")]
    InvalidParams { reason: String },

    /// Overlap stitching found no valid starting segment (or duplicate
    /// reads), which cannot happen for inputs meeting the reconstruction
    /// preconditions; surfaced defensively instead of guessing.
    #[error("stitch cycle: {reason}")]
    StitchCycle { reason: String },

    /// An exhaustive enumeration was requested beyond the configured limit.
    #[error("enumeration limit exceeded: n = {n} > limit {limit}")]
    EnumerationLimit { n: usize, limit: usize },

    /// A majority vote was requested over an empty multiset.
    #[error("majority of empty multiset")]
    EmptyMajority,

    /// Difference encoding asked to represent more differing positions than
    /// its block budget allows.
    #[error("distance {distance} exceeds difference-encoding budget {budget}")]
    DistanceBudget { distance: usize, budget: usize },

    /// A difference-encoding payload is malformed (index out of range,
    /// non-increasing positions, or a value after the zero padding).
    #[error("malformed difference encoding: {reason}")]
    MalformedEncDist { reason: String },

    /// The encoder could not shrink the working string during an elimination
    /// iteration; a larger slack constant makes every case shrink.
    #[error(
        "elimination failed to shrink (removed {removed} bits, header {inserted} bits); \
         increase the slack constant c (currently {slack})"
    )]
    EliminationStuck {
        removed: usize,
        inserted: usize,
        slack: usize,
    },

    /// The marker search exhausted its length bound without a witness;
    /// indicates an internal inconsistency, not bad user input.
    #[error("no {d}-auto-cyclic string of length <= {bound} found")]
    AutoCyclicSearch { d: usize, bound: usize },

    /// The expansion phase ran out of candidate blocks; indicates an internal
    /// inconsistency, not bad user input.
    #[error("codec expansion found no admissible block")]
    ExpansionExhausted,

    /// A codeword handed to the decoder is not decodable under the given
    /// parameters.
    #[error("decode failed: {reason}")]
    DecodeCorrupt { reason: String },
}
