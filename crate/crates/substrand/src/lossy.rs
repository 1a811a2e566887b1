//! Reconstruction from spectra with missing reads.
//!
//! A string whose windows satisfy the three LREC (lossy-reconstruction)
//! constraints can be recovered from its `L`-multispectrum even after up to
//! `t` reads are lost. The constraints ([`check_lrec`]) force enough window
//! uniqueness that greedy overlap stitching ([`stitch`]) is unambiguous; the
//! driver ([`reconstruct_lossy`]) stitches at increasing overlap slack and
//! recovers the maximal reconstructible substring `W1` — everything between
//! the first and last surviving read.
//!
//! Lost boundary reads are unrecoverable, so a successful result may be a
//! proper substring of the original; its start-offset bounds say how far
//! right it can sit. [`max_reconstructible_w1`] is the ground-truth oracle
//! for what a loss pattern leaves recoverable, and [`count_lrec`] counts the
//! constraint-satisfying strings exhaustively.

use rayon::prelude::*;
use std::collections::BTreeSet;

use crate::bits::{distance_profile, BitString};
use crate::error::Error;
use crate::outcome::{
    FailureKind, Reconstruction, ReconstructionOutcome, WSemantics,
};
use crate::spectrum::Spectrum;

/// Default cap on exhaustive enumeration (`2^n` strings).
pub const DEFAULT_ENUMERATION_LIMIT: usize = 22;

/// Derived LREC parameters for a length-`n` string read at window length `L`
/// with up to `t` losses.
///
/// The three derived window lengths trade overlap slack against uniqueness:
/// `l1 = L − ⌊t/3⌋ − 1`, `l2 = L − ⌊2t/3⌋ − 1`, `l3 = L − t − 1`. `I2` and
/// `I3` are the suffix index ranges the boundary constraints quantify over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrecParams {
    pub n: usize,
    pub big_l: usize,
    pub t: usize,
    pub l1: usize,
    pub l2: usize,
    pub l3: usize,
    /// Inclusive suffix range `[n−l2−t+1, n−l2+1]` (before clamping).
    pub i2: (isize, isize),
    /// Inclusive suffix range `[n−l3−t+1, n−l3+1]` (before clamping).
    pub i3: (isize, isize),
}

impl LrecParams {
    /// Validates `t < min{L−1, 3(L−⌈log₂ n⌉−1)}` and `l3 >= 1`, then derives
    /// the window lengths and index ranges.
    pub fn new(n: usize, big_l: usize, t: usize) -> Result<Self, Error> {
        if n == 0 || big_l < 2 {
            return Err(Error::InvalidParams {
                reason: format!("need n >= 1 and L >= 2, got n={n}, L={big_l}"),
            });
        }
        let log_n = ceil_log2(n);
        let slack_bound = 3 * (big_l as isize - log_n as isize - 1);
        let bound = (big_l as isize - 1).min(slack_bound);
        if (t as isize) >= bound {
            return Err(Error::InvalidParams {
                reason: format!(
                    "loss budget t={t} violates t < min{{L−1, 3(L−⌈log₂n⌉−1)}} = {bound} \
                     at n={n}, L={big_l}"
                ),
            });
        }
        Self::derive(n, big_l, t)
    }

    /// Derives the window lengths and index ranges without the loss-budget
    /// admissibility bound (the substitution-robust constraint family uses
    /// the same lengths under its own `t < L/2` regime).
    pub(crate) fn derive(n: usize, big_l: usize, t: usize) -> Result<Self, Error> {
        if n == 0 || big_l < 2 {
            return Err(Error::InvalidParams {
                reason: format!("need n >= 1 and L >= 2, got n={n}, L={big_l}"),
            });
        }
        if t + 2 > big_l {
            return Err(Error::InvalidParams {
                reason: format!("l3 = L−t−1 must be >= 1, got t={t}, L={big_l}"),
            });
        }
        let l1 = big_l - t / 3 - 1;
        let l2 = big_l - (2 * t) / 3 - 1;
        let l3 = big_l - t - 1;
        let i2 = (
            n as isize - l2 as isize - t as isize + 1,
            n as isize - l2 as isize + 1,
        );
        let i3 = (
            n as isize - l3 as isize - t as isize + 1,
            n as isize - l3 as isize + 1,
        );
        Ok(LrecParams {
            n,
            big_l,
            t,
            l1,
            l2,
            l3,
            i2,
            i3,
        })
    }
}

/// `⌈log₂ n⌉` for `n >= 1`.
pub(crate) fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// One violated constraint with its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Stable constraint name (`"c1-window-uniqueness"`, ...).
    pub constraint: &'static str,
    /// 1-based window start positions `(i, j)` witnessing the violation.
    pub witness: (usize, usize),
    /// Window length the witness windows have.
    pub window_len: usize,
    /// Human-readable specifics.
    pub detail: String,
}

/// Outcome of a constraint check: satisfied, or a named violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub satisfied: bool,
    pub violation: Option<Violation>,
}

impl CheckReport {
    pub(crate) fn ok() -> Self {
        CheckReport {
            satisfied: true,
            violation: None,
        }
    }

    pub(crate) fn violated(v: Violation) -> Self {
        CheckReport {
            satisfied: false,
            violation: Some(v),
        }
    }
}

/// Checks the three LREC constraints for `w` at `(L, t)`:
///
/// 1. all length-`l1` windows are pairwise distinct;
/// 2. each of the first `t+1` and last `t+1` length-`l2` windows differs
///    from every other length-`l2` window;
/// 3. each of the first `t+1` length-`l3` windows differs from every
///    length-`l3` window starting in `I3` (self-comparisons excluded).
///
/// Index sets are intersected with the valid window-start range, so window
/// lengths exceeding `|w|` make a constraint vacuous. Errors when the
/// parameter invariants fail (this is an error, not `false`).
pub fn check_lrec(w: &BitString, big_l: usize, t: usize) -> Result<CheckReport, Error> {
    let params = LrecParams::new(w.len(), big_l, t)?;
    Ok(check_lrec_params(w, &params))
}

/// [`check_lrec`] against pre-validated parameters (enumeration fast path).
pub fn check_lrec_params(w: &BitString, params: &LrecParams) -> CheckReport {
    check_shaped(w, params, 1)
}

/// Shared evaluator for the LREC-shaped constraint family: every quantified
/// window pair must have Hamming distance >= `threshold` (LREC uses 1,
/// the substitution-robust variant uses `2s+1`).
pub(crate) fn check_shaped(w: &BitString, params: &LrecParams, threshold: usize) -> CheckReport {
    let n = w.len();
    let t = params.t;

    // Constraint 1: length-l1 windows pairwise far.
    if params.l1 <= n {
        let profile = distance_profile(w, params.l1);
        if let (Some(min), Some(pair)) = (profile.min_pairwise_distance, profile.witness_pair) {
            if min < threshold {
                return CheckReport::violated(Violation {
                    constraint: "c1-window-uniqueness",
                    witness: pair,
                    window_len: params.l1,
                    detail: format!(
                        "length-{} windows at {} and {} have distance {} < {}",
                        params.l1, pair.0, pair.1, min, threshold
                    ),
                });
            }
        }
    }

    // Constraint 2: first/last t+1 length-l2 windows vs all others.
    if params.l2 <= n {
        let m2 = n - params.l2 + 1;
        let packed = w.windows_packed(params.l2);
        let mut heads: BTreeSet<usize> = (1..=(t + 1).min(m2)).collect();
        for v in clamp_range(params.i2, m2) {
            heads.insert(v);
        }
        for &i in &heads {
            for j in 1..=m2 {
                if j == i {
                    continue;
                }
                let dist = window_pair_distance(w, &packed, i, j, params.l2);
                if dist < threshold {
                    return CheckReport::violated(Violation {
                        constraint: "c2-boundary-uniqueness",
                        witness: (i, j),
                        window_len: params.l2,
                        detail: format!(
                            "boundary window {} matches window {} within distance {} < {}",
                            i, j, dist, threshold
                        ),
                    });
                }
            }
        }
    }

    // Constraint 3: first t+1 length-l3 windows vs windows starting in I3.
    if params.l3 <= n {
        let m3 = n - params.l3 + 1;
        let packed = w.windows_packed(params.l3);
        for i in 1..=(t + 1).min(m3) {
            for j in clamp_range(params.i3, m3) {
                if j == i {
                    continue;
                }
                let dist = window_pair_distance(w, &packed, i, j, params.l3);
                if dist < threshold {
                    return CheckReport::violated(Violation {
                        constraint: "c3-prefix-suffix-uniqueness",
                        witness: (i, j),
                        window_len: params.l3,
                        detail: format!(
                            "prefix window {} matches suffix-range window {} within \
                             distance {} < {}",
                            i, j, dist, threshold
                        ),
                    });
                }
            }
        }
    }

    CheckReport::ok()
}

/// Intersects an `isize` inclusive range with `[1, m]`.
fn clamp_range(range: (isize, isize), m: usize) -> impl Iterator<Item = usize> {
    let lo = range.0.max(1) as usize;
    let hi = range.1.min(m as isize);
    let hi = if hi < 1 { 0 } else { hi as usize };
    lo..=hi
}

fn window_pair_distance(w: &BitString, packed: &Option<Vec<u64>>, i: usize, j: usize, len: usize) -> usize {
    match packed {
        Some(p) => (p[i - 1] ^ p[j - 1]).count_ones() as usize,
        None => w.range_distance(i, w, j, len),
    }
}

/// A set of stitched segments; every input read survives as a window of
/// exactly one segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StitchSet {
    /// Segments in lexicographic order, each of length >= `read_len`.
    pub segments: Vec<BitString>,
    /// The read length `L` the overlap arithmetic is based on.
    pub read_len: usize,
}

/// Greedy overlap stitching at increasing slack.
///
/// For each `k = 0..=rho`, repeatedly: pick the lexicographically smallest
/// segment whose `(L−k−1)`-prefix matches no other segment's
/// `(L−k−1)`-suffix, then extend it rightward while some segment's
/// `(L−k−1)`-prefix equals its `(L−k−1)`-suffix, appending the matched
/// segment's remainder (ties again lexicographic). The chains formed at
/// slack `k` are the input to slack `k+1`.
///
/// Errors: duplicate segments, or no valid starting segment while segments
/// remain (a cyclic overlap structure) — both impossible for spectra of
/// constraint-satisfying strings and surfaced defensively; `rho > L−2`
/// (overlap would vanish) and segments shorter than `L` are parameter
/// errors.
pub fn stitch(segments: &[BitString], big_l: usize, rho: usize) -> Result<StitchSet, Error> {
    if segments.is_empty() {
        return Err(Error::InvalidParams {
            reason: "stitch requires at least one segment".into(),
        });
    }
    if big_l < 2 || rho + 2 > big_l {
        return Err(Error::InvalidParams {
            reason: format!("overlap slack rho={rho} needs L >= rho+2, got L={big_l}"),
        });
    }
    if let Some(short) = segments.iter().find(|s| s.len() < big_l) {
        return Err(Error::InvalidParams {
            reason: format!(
                "segment of length {} is shorter than the read length {big_l}",
                short.len()
            ),
        });
    }
    let mut a: Vec<BitString> = segments.to_vec();
    a.sort();
    if a.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::StitchCycle {
            reason: "duplicate reads are unsupported".into(),
        });
    }

    for k in 0..=rho {
        let ov = big_l - k - 1;
        let mut done: Vec<BitString> = Vec::with_capacity(a.len());
        while !a.is_empty() {
            // Valid start: prefix matches no *other* remaining segment's
            // suffix. `a` is sorted, so the first hit is the smallest.
            let start = a.iter().position(|w| {
                a.iter()
                    .all(|o| o == w || !o.range_eq(o.len() - ov + 1, w, 1, ov))
            });
            let Some(idx) = start else {
                return Err(Error::StitchCycle {
                    reason: format!(
                        "no valid starting segment among {} at slack {k}",
                        a.len()
                    ),
                });
            };
            let mut w = a.remove(idx);
            loop {
                let next = a
                    .iter()
                    .position(|cand| w.range_eq(w.len() - ov + 1, cand, 1, ov));
                match next {
                    Some(j) => {
                        let cand = a.remove(j);
                        let tail = cand.suffix(cand.len() - ov);
                        w.extend(&tail);
                    }
                    None => break,
                }
            }
            done.push(w);
        }
        done.sort();
        a = done;
    }
    Ok(StitchSet {
        segments: a,
        read_len: big_l,
    })
}

/// Reconstructs from a loss-damaged spectrum with budget `t`.
///
/// Stitches at slack `⌊t/3⌋`; one segment is the answer, two are re-stitched
/// at slack `t`, three trigger the remove-one retry at slack `⌈2t/3⌉`
/// (candidates in lexicographic order, first doubly-successful wins). More
/// than three segments, an unmergeable pair, failed retries, or cyclic
/// overlaps mean the spectrum violates the preconditions: a structured
/// failure, not an error. Errors indicate bad parameters (`t >= L−1`).
pub fn reconstruct_lossy(u: &Spectrum, t: usize) -> Result<ReconstructionOutcome, Error> {
    let big_l = u.read_len();
    if t + 2 > big_l {
        return Err(Error::InvalidParams {
            reason: format!("loss budget t={t} needs L >= t+2, got L={big_l}"),
        });
    }
    let a0 = match stitch(u.reads(), big_l, t / 3) {
        Ok(s) => s,
        Err(Error::StitchCycle { reason }) => {
            return Ok(ReconstructionOutcome::failed(
                FailureKind::CyclicOverlaps,
                reason,
            ))
        }
        Err(e) => return Err(e),
    };

    match a0.segments.len() {
        1 => Ok(w1_success(a0.segments.into_iter().next().unwrap(), u, t)),
        2 => match stitch(&a0.segments, big_l, t) {
            Ok(s) if s.segments.len() == 1 => {
                Ok(w1_success(s.segments.into_iter().next().unwrap(), u, t))
            }
            Ok(s) => Ok(ReconstructionOutcome::failed(
                FailureKind::StitchFailed,
                format!(
                    "two segments failed to merge at slack {t} (still {})",
                    s.segments.len()
                ),
            )),
            Err(Error::StitchCycle { reason }) => Ok(ReconstructionOutcome::failed(
                FailureKind::CyclicOverlaps,
                reason,
            )),
            Err(e) => Err(e),
        },
        3 => {
            let slack = (2 * t).div_ceil(3);
            for leave_out in 0..3 {
                let rest: Vec<BitString> = a0
                    .segments
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != leave_out)
                    .map(|(_, s)| s.clone())
                    .collect();
                let Ok(merged) = stitch(&rest, big_l, slack) else {
                    continue;
                };
                if merged.segments.len() != 1 {
                    continue;
                }
                let mut joined = merged.segments;
                joined.push(a0.segments[leave_out].clone());
                let Ok(full) = stitch(&joined, big_l, slack) else {
                    continue;
                };
                if full.segments.len() == 1 {
                    return Ok(w1_success(
                        full.segments.into_iter().next().unwrap(),
                        u,
                        t,
                    ));
                }
            }
            Ok(ReconstructionOutcome::failed(
                FailureKind::StitchFailed,
                "no segment removal led to a double stitch success".to_string(),
            ))
        }
        count => Ok(ReconstructionOutcome::failed(
            FailureKind::SegmentOverflow,
            format!("initial stitching left {count} segments (> 3)"),
        )),
    }
}

fn w1_success(value: BitString, u: &Spectrum, t: usize) -> ReconstructionOutcome {
    // Interior gaps consumed part of the loss budget; the rest bounds how
    // many reads may be missing before the first survivor.
    let interior = (value.len() - u.read_len() + 1).saturating_sub(u.len());
    let hi = t.saturating_sub(interior) + 1;
    ReconstructionOutcome::Reconstructed(Reconstruction {
        value,
        start_offset_bounds: (1, hi),
        semantics: WSemantics::W1,
        ambiguous: false,
    })
}

/// Ground-truth oracle: the maximal reconstructible substring left by a loss
/// pattern — everything from the first surviving window to the end of the
/// last one.
///
/// # Panics
/// Panics if a drop position is out of range or every window is dropped.
pub fn max_reconstructible_w1(
    w: &BitString,
    big_l: usize,
    drop_positions: &BTreeSet<usize>,
) -> BitString {
    let m = w.len() - big_l + 1;
    for &p in drop_positions {
        assert!(p >= 1 && p <= m, "drop position {p} out of 1..={m}");
    }
    let first = (1..=m)
        .find(|p| !drop_positions.contains(p))
        .expect("at least one window must survive");
    let last = (1..=m)
        .rev()
        .find(|p| !drop_positions.contains(p))
        .expect("at least one window must survive");
    w.window(first, last + big_l - first).expect("in range")
}

/// Exhaustively counts the strings of length `n` satisfying the LREC
/// constraints at `(L, t)`, refusing beyond the default enumeration limit.
pub fn count_lrec(n: usize, big_l: usize, t: usize) -> Result<u64, Error> {
    count_lrec_with_limit(n, big_l, t, DEFAULT_ENUMERATION_LIMIT)
}

/// [`count_lrec`] with a caller-chosen enumeration limit.
pub fn count_lrec_with_limit(
    n: usize,
    big_l: usize,
    t: usize,
    limit: usize,
) -> Result<u64, Error> {
    if n > limit || n >= 63 {
        return Err(Error::EnumerationLimit { n, limit });
    }
    let params = LrecParams::new(n, big_l, t)?;
    let count = (0u64..(1u64 << n))
        .into_par_iter()
        .filter(|&v| {
            let w = BitString::from_u64_msb(v, n);
            check_lrec_params(&w, &params).satisfied
        })
        .count();
    Ok(count as u64)
}
