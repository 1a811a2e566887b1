//! Named strategy registry.
//!
//! Reconstruction algorithms and constraint checks are exposed behind two
//! small trait objects so front ends can select them by name (`--mode`,
//! `--constraint`) without matching on an enum at every call site. Each
//! strategy reads only the options it needs and documents which ones.

use crate::bits::{is_substring_distant, BitString};
use crate::error::Error;
use crate::erroneous::{check_erec, reconstruct_erec, reconstruct_majority};
use crate::lossy::{check_lrec, reconstruct_lossy, CheckReport, Violation};
use crate::outcome::ReconstructionOutcome;
use crate::spectrum::Spectrum;

/// Options for a [`Reconstructor`]: loss/trim budget `t` and substitution
/// radius `s` (read only by the strategies that model substitutions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReconstructOptions {
    pub t: usize,
    pub s: usize,
}

/// Options for a [`ConstraintCheck`]: window length `big_l`, loss budget
/// `t`, substitution radius `s`, and pairwise window distance `d`. Each
/// check reads the subset that defines it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub big_l: usize,
    pub t: usize,
    pub s: usize,
    pub d: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            big_l: 1,
            t: 0,
            s: 0,
            d: 1,
        }
    }
}

/// A named reconstruction strategy over spectra.
pub trait Reconstructor: Sync {
    /// Stable registry name.
    fn name(&self) -> &'static str;
    /// Runs the strategy on a spectrum.
    fn reconstruct(
        &self,
        u: &Spectrum,
        opts: &ReconstructOptions,
    ) -> Result<ReconstructionOutcome, Error>;
}

/// A named constraint check over strings.
pub trait ConstraintCheck: Sync {
    /// Stable registry name.
    fn name(&self) -> &'static str;
    /// Checks the constraint, reporting a witness on violation.
    fn check(&self, w: &BitString, opts: &CheckOptions) -> Result<CheckReport, Error>;
}

/// Reconstruction from a lossy spectrum (up to `t` missing reads); ignores
/// `s`.
struct LossyStrategy;

impl Reconstructor for LossyStrategy {
    fn name(&self) -> &'static str {
        "lossy"
    }

    fn reconstruct(
        &self,
        u: &Spectrum,
        opts: &ReconstructOptions,
    ) -> Result<ReconstructionOutcome, Error> {
        reconstruct_lossy(u, opts.t)
    }
}

/// Chain-and-vote reconstruction from an erroneous spectrum (up to `t`
/// corrupted reads, each within radius `s`).
struct MajorityStrategy;

impl Reconstructor for MajorityStrategy {
    fn name(&self) -> &'static str {
        "majority"
    }

    fn reconstruct(
        &self,
        u: &Spectrum,
        opts: &ReconstructOptions,
    ) -> Result<ReconstructionOutcome, Error> {
        reconstruct_majority(u, opts.t, opts.s)
    }
}

/// Trim-search reconstruction from an erroneous spectrum via consensus
/// candidates.
struct ErecStrategy;

impl Reconstructor for ErecStrategy {
    fn name(&self) -> &'static str {
        "erec"
    }

    fn reconstruct(
        &self,
        u: &Spectrum,
        opts: &ReconstructOptions,
    ) -> Result<ReconstructionOutcome, Error> {
        reconstruct_erec(u, opts.t, opts.s)
    }
}

/// The loss-reconstruction constraint family at `(big_l, t)`; ignores `s`
/// and `d`.
struct LrecCheck;

impl ConstraintCheck for LrecCheck {
    fn name(&self) -> &'static str {
        "lrec"
    }

    fn check(&self, w: &BitString, opts: &CheckOptions) -> Result<CheckReport, Error> {
        check_lrec(w, opts.big_l, opts.t)
    }
}

/// The substitution-robust constraint family at `(big_l, t, s)`; ignores
/// `d`.
struct ErecCheck;

impl ConstraintCheck for ErecCheck {
    fn name(&self) -> &'static str {
        "erec"
    }

    fn check(&self, w: &BitString, opts: &CheckOptions) -> Result<CheckReport, Error> {
        check_erec(w, opts.big_l, opts.t, opts.s)
    }
}

/// Pairwise window distance `>= d` at window length `big_l`; ignores `t`
/// and `s`.
struct DistantCheck;

impl ConstraintCheck for DistantCheck {
    fn name(&self) -> &'static str {
        "distant"
    }

    fn check(&self, w: &BitString, opts: &CheckOptions) -> Result<CheckReport, Error> {
        let (ok, profile) = is_substring_distant(w, opts.big_l, opts.d)?;
        if ok {
            return Ok(CheckReport {
                satisfied: true,
                violation: None,
            });
        }
        let witness = profile
            .witness_pair
            .expect("violated distance check carries a witness");
        let min = profile
            .min_pairwise_distance
            .expect("violated distance check carries a distance");
        Ok(CheckReport {
            satisfied: false,
            violation: Some(Violation {
                constraint: "window-distance",
                witness,
                window_len: opts.big_l,
                detail: format!(
                    "windows at {} and {} have distance {min} < {}",
                    witness.0, witness.1, opts.d
                ),
            }),
        })
    }
}

static RECONSTRUCTORS: [&dyn Reconstructor; 3] =
    [&ErecStrategy, &LossyStrategy, &MajorityStrategy];

static CONSTRAINT_CHECKS: [&dyn ConstraintCheck; 3] = [&DistantCheck, &ErecCheck, &LrecCheck];

/// Looks up a reconstruction strategy by name.
pub fn reconstructor(name: &str) -> Option<&'static dyn Reconstructor> {
    RECONSTRUCTORS.iter().copied().find(|r| r.name() == name)
}

/// Looks up a constraint check by name.
pub fn constraint_check(name: &str) -> Option<&'static dyn ConstraintCheck> {
    CONSTRAINT_CHECKS.iter().copied().find(|c| c.name() == name)
}

/// Registered reconstruction strategy names, sorted.
pub fn reconstructor_names() -> Vec<&'static str> {
    RECONSTRUCTORS.iter().map(|r| r.name()).collect()
}

/// Registered constraint check names, sorted.
pub fn constraint_names() -> Vec<&'static str> {
    CONSTRAINT_CHECKS.iter().map(|c| c.name()).collect()
}
