//! Reconstruction of binary strings from their substring spectra, and coding
//! into substring-distant strings.
//!
//! A length-`n` binary string `w` has an *L-multispectrum*: the multiset of its
//! `n − L + 1` length-`L` windows, the idealized output of a shotgun-sequencing
//! read process. This crate provides
//!
//! * the combinatorial predicates on strings that make spectra informative
//!   ([`bits::is_substring_distant`], [`lossy::check_lrec`],
//!   [`erroneous::check_erec`]),
//! * the two noise channels on spectra — lost reads and substitution-corrupted
//!   reads ([`spectrum`]),
//! * reconstruction algorithms for each channel ([`lossy::reconstruct_lossy`],
//!   [`erroneous::reconstruct_majority`], [`erroneous::reconstruct_erec`]),
//! * an encoder/decoder pair mapping arbitrary messages into substring-distant
//!   codewords at a single bit of redundancy ([`codec`]),
//! * read-count and enumeration studies ([`coverage`]), and
//! * a name-keyed registry of reconstruction strategies and constraint
//!   checks for front ends ([`registry`]).
//!
//! All public indices are 1-based: `w_{i,k}` denotes the length-`k` window of
//! `w` starting at position `i`, mirroring the usual notation in the
//! combinatorics-of-sequences literature.

pub mod bits;
pub mod codec;
pub mod coverage;
pub mod erroneous;
pub mod error;
pub mod lossy;
pub mod outcome;
pub mod registry;
pub mod spectrum;

pub use bits::BitString;
pub use error::Error;
pub use outcome::{Reconstruction, ReconstructionFailure, ReconstructionOutcome, WSemantics};
pub use spectrum::Spectrum;
