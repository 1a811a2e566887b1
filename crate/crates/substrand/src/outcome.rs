//! Result values for reconstruction runs.
//!
//! Reconstruction from a noisy spectrum can succeed with limited positional
//! knowledge (the recovered string may be a substring of the original whose
//! exact start is only bounded), and it can fail on spectra that violate the
//! algorithm's preconditions. Both cases are ordinary data here — errors are
//! reserved for malformed inputs and bad parameters.

use crate::bits::BitString;

/// Which maximal-reconstructible-substring semantics a successful result
/// satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WSemantics {
    /// Largest consecutive substring recoverable from a loss-only spectrum.
    W1,
    /// Per-position majority string over an error-carrying spectrum.
    W2,
    /// Consensus of the largest agreeing read subset.
    W3,
}

impl WSemantics {
    /// Stable lowercase name (`"w1"`, `"w2"`, `"w3"`).
    pub fn name(self) -> &'static str {
        match self {
            WSemantics::W1 => "w1",
            WSemantics::W2 => "w2",
            WSemantics::W3 => "w3",
        }
    }
}

/// A successful reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction {
    /// The recovered string.
    pub value: BitString,
    /// Inclusive bounds `(lo, hi)` on the 1-based position of `value`'s
    /// first symbol within the (unknown) original string. A full
    /// reconstruction has bounds `(1, 1)`.
    pub start_offset_bounds: (usize, usize),
    /// Which W-semantics the value satisfies.
    pub semantics: WSemantics,
    /// True when several maximum-size consensus subsets with differing
    /// consensus values existed and a deterministic first pick was returned
    /// (only consensus-based reconstruction can set this).
    pub ambiguous: bool,
}

/// Why a reconstruction declined to produce a string. Every variant means
/// the input spectrum cannot have come from a string meeting the algorithm's
/// preconditions (or noise exceeded the stated budget).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// Initial stitching left more segments than the loss budget permits.
    SegmentOverflow,
    /// No stitch combination merged the segments into a single string.
    StitchFailed,
    /// Duplicate reads or cyclic overlap structure stopped stitching.
    CyclicOverlaps,
    /// Zero or several reads qualified as the leading read.
    NoUniqueHead,
    /// Zero or several successor reads matched at some chain position.
    BrokenChain,
    /// Every trimmed-subset candidate failed to reconstruct.
    NoConsensusCandidate,
}

impl FailureKind {
    /// Stable kebab-case name for reports.
    pub fn name(self) -> &'static str {
        match self {
            FailureKind::SegmentOverflow => "segment-overflow",
            FailureKind::StitchFailed => "stitch-failed",
            FailureKind::CyclicOverlaps => "cyclic-overlaps",
            FailureKind::NoUniqueHead => "no-unique-head",
            FailureKind::BrokenChain => "broken-chain",
            FailureKind::NoConsensusCandidate => "no-consensus-candidate",
        }
    }
}

/// A structured reconstruction failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionFailure {
    pub kind: FailureKind,
    /// Human-readable specifics (segment counts, chain position, ...).
    pub detail: String,
}

/// Either a reconstruction or a structured failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReconstructionOutcome {
    Reconstructed(Reconstruction),
    Failed(ReconstructionFailure),
}

impl ReconstructionOutcome {
    /// Convenience constructor for failures.
    pub fn failed(kind: FailureKind, detail: impl Into<String>) -> Self {
        ReconstructionOutcome::Failed(ReconstructionFailure {
            kind,
            detail: detail.into(),
        })
    }

    /// True for the success variant.
    pub fn is_reconstructed(&self) -> bool {
        matches!(self, ReconstructionOutcome::Reconstructed(_))
    }

    /// The recovered string, if any.
    pub fn value(&self) -> Option<&BitString> {
        match self {
            ReconstructionOutcome::Reconstructed(r) => Some(&r.value),
            ReconstructionOutcome::Failed(_) => None,
        }
    }

    /// The success payload, if any.
    pub fn reconstruction(&self) -> Option<&Reconstruction> {
        match self {
            ReconstructionOutcome::Reconstructed(r) => Some(r),
            ReconstructionOutcome::Failed(_) => None,
        }
    }

    /// The failure payload, if any.
    pub fn failure(&self) -> Option<&ReconstructionFailure> {
        match self {
            ReconstructionOutcome::Reconstructed(_) => None,
            ReconstructionOutcome::Failed(f) => Some(f),
        }
    }
}
