//! Encoding arbitrary messages into substring-distant codewords.
//!
//! The encoder maps a message of `n − 1` bits to a codeword of `n` bits —
//! one bit of redundancy — whose length-`L` windows are pairwise at Hamming
//! distance `≥ d`. It appends a marker, repeatedly *eliminates* violations
//! (near-duplicate `L`-window pairs, and `ℓ`-windows too close to the
//! marker's tail pattern) by removing the offending window and prepending a
//! self-describing header that lets the decoder reinsert it, then *expands*
//! with safe blocks if elimination shrank the string below `n`.
//!
//! The decoder anchors on the marker (or its truncated prefix at the end of
//! the codeword), replays the headers last-in-first-out, and strips the
//! marker.
//!
//! Window lengths scale as `ℓ = ⌈log₂ n⌉ + (d−1)⌈log₂⌈log₂ n⌉⌉ + 2 + c` and
//! `L = 2ℓ`, where the slack `c` keeps every elimination step strictly
//! shrinking at finite `n` (the margins vanish under integer ceilings
//! without it); [`auto_slack`] computes the smallest safe value.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::bits::{is_substring_distant, BitString};
use crate::error::Error;
use crate::lossy::DEFAULT_ENUMERATION_LIMIT;
use rayon::prelude::*;

/// `⌈log₂(v)⌉` for `v >= 1` (0 for v = 1).
fn ceil_log2(v: usize) -> usize {
    (usize::BITS - (v - 1).leading_zeros()) as usize
}

/// True iff `u` stays at distance `>= d` from each of its first `d`
/// zero-padded right-shifts: `d_H(u, 0^i ∘ u_{1,|u|−i}) >= d` for
/// `1 <= i <= d`.
///
/// # Panics
/// Panics when `|u| < d`.
pub fn is_auto_cyclic(u: &BitString, d: usize) -> bool {
    let n = u.len();
    assert!(n >= d, "need |u| >= d, got |u|={n}, d={d}");
    for i in 1..=d {
        let mut dist = 0usize;
        // Shifted string: i zeros, then u_1 .. u_{n−i}.
        for p in 1..=n {
            let shifted = if p <= i { false } else { u.get(p - i) };
            if u.get(p) != shifted {
                dist += 1;
            }
        }
        if dist < d {
            return false;
        }
    }
    true
}

/// The lexicographically smallest shortest string `u` with
/// [`is_auto_cyclic`]`(u, d)`, searched up to length `d⌈log₂ d⌉ + 2d`
/// (a length at which one always exists). Memoized per `d`.
pub fn find_auto_cyclic(d: usize) -> Result<BitString, Error> {
    assert!(d >= 1, "need d >= 1");
    static CACHE: OnceLock<Mutex<HashMap<usize, BitString>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&d) {
        return Ok(hit.clone());
    }
    let bound = d * ceil_log2(d).max(0) + 2 * d;
    for len in d..=bound {
        if len >= 64 {
            break;
        }
        for v in 0..(1u64 << len) {
            let u = BitString::from_u64_msb(v, len);
            if is_auto_cyclic(&u, d) {
                cache.lock().unwrap().insert(d, u.clone());
                return Ok(u);
            }
        }
    }
    Err(Error::AutoCyclicSearch { d, bound })
}

/// Codec parameters: codeword length `n`, window distance `d`, slack `c`,
/// the derived window lengths `ℓ` and `L = 2ℓ`, the auto-cyclic tail `u_d`,
/// and the marker `0 ∘ 1^d ∘ 0^{ℓ−|u_d|} ∘ u_d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodecParams {
    pub n: usize,
    pub d: usize,
    pub slack: usize,
    pub ell: usize,
    pub big_l: usize,
    pub u_d: BitString,
    pub marker: BitString,
}

impl CodecParams {
    /// Derives parameters with an explicit slack. Validates that the marker
    /// fits (`|u_d| + d + 1 <= ℓ`), that the expansion phase is feasible
    /// (`ℓ >= log₂ n + (d−1) log₂ ℓ`), and that `n >= L`.
    pub fn new(n: usize, d: usize, slack: usize) -> Result<Self, Error> {
        if n < 2 || d < 1 {
            return Err(Error::InvalidParams {
                reason: format!("need n >= 2 and d >= 1, got n={n}, d={d}"),
            });
        }
        let log_n = ceil_log2(n);
        let ell = log_n + (d - 1) * ceil_log2(log_n.max(1)) + 2 + slack;
        let big_l = 2 * ell;
        let u_d = find_auto_cyclic(d)?;
        if u_d.len() + d + 1 > ell {
            return Err(Error::InvalidParams {
                reason: format!(
                    "marker needs |u_d| + d + 1 = {} <= ℓ = {ell}",
                    u_d.len() + d + 1
                ),
            });
        }
        if (ell as f64) < (n as f64).log2() + ((d - 1) as f64) * (ell as f64).log2() {
            return Err(Error::InvalidParams {
                reason: format!("expansion infeasible: ℓ = {ell} < log₂({n}) + {}·log₂(ℓ)", d - 1),
            });
        }
        if n < big_l {
            return Err(Error::InvalidParams {
                reason: format!("need n >= L = {big_l}, got n={n}"),
            });
        }
        let mut marker = BitString::zeros(1);
        marker.extend(&BitString::ones(d));
        marker.extend(&BitString::zeros(ell - u_d.len()));
        marker.extend(&u_d);
        Ok(CodecParams {
            n,
            d,
            slack,
            ell,
            big_l,
            u_d,
            marker,
        })
    }

    /// Derives parameters with the smallest statically shrink-safe slack.
    pub fn auto(n: usize, d: usize) -> Result<Self, Error> {
        Self::new(n, d, auto_slack(n, d)?)
    }

    /// The marker's length-`ℓ` suffix pattern `0^{ℓ−|u_d|} ∘ u_d`, the
    /// anchor the eliminator keeps unique.
    pub fn pattern(&self) -> BitString {
        self.marker.suffix(self.ell)
    }

    /// Width of an absolute-position field: 1-based values up to the
    /// initial working length `n + ℓ + d`.
    fn w_abs(&self) -> usize {
        ceil_log2(self.n + self.ell + self.d + 1)
    }

    /// Width of a marker-relative field for window-pair removals near the
    /// marker (`|J1| = ℓ + d + 2` slots).
    fn w_j1(&self) -> usize {
        ceil_log2(self.ell + self.d + 2 + 1)
    }

    /// Width of a marker-relative field for pattern-window removals near
    /// the marker (`|J2| = |u_d| + d + 1` slots).
    fn w_j2(&self) -> usize {
        ceil_log2(self.u_d.len() + self.d + 1 + 1)
    }

    /// Difference-encoding width for windows of length `m`.
    fn dist_width(&self, m: usize) -> usize {
        (self.d - 1) * ceil_log2(m + 1)
    }
}

/// Smallest slack `c` at which every elimination case strictly shrinks the
/// working string regardless of where it fires, by static margin analysis.
pub fn auto_slack(n: usize, d: usize) -> Result<usize, Error> {
    for c in 0..=64usize {
        let p = match CodecParams::new(n, d, c) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let case1_full = p.big_l > 3 + 2 * p.w_abs() + p.dist_width(p.big_l);
        let case1_partial =
            p.ell - p.d - 1 > 3 + p.w_abs() + p.w_j1() + p.dist_width(p.big_l);
        let case2_full = p.ell > 1 + p.w_abs() + p.dist_width(p.ell);
        let case2_partial = p.ell - p.d - p.u_d.len() > 2 + p.w_j2() + p.dist_width(p.ell);
        if case1_full && case1_partial && case2_full && case2_partial {
            return Ok(c);
        }
    }
    Err(Error::InvalidParams {
        reason: format!("no slack <= 64 makes elimination shrink-safe at n={n}, d={d}"),
    })
}

/// Encodes the positions where `w` and `w'` differ: `ρ` fixed-width blocks,
/// block `i` holding the `i`-th differing position as a 1-based value
/// (width `⌈log₂(|w|+1)⌉`), remaining blocks all-zero. Errors when the
/// strings' distance exceeds `ρ`.
pub fn enc_dist(w: &BitString, w_prime: &BitString, rho: usize) -> Result<BitString, Error> {
    if w.len() != w_prime.len() {
        return Err(Error::LengthMismatch {
            left: w.len(),
            right: w_prime.len(),
        });
    }
    let width = ceil_log2(w.len() + 1);
    let diffs: Vec<usize> = (1..=w.len()).filter(|&p| w.get(p) != w_prime.get(p)).collect();
    if diffs.len() > rho {
        return Err(Error::DistanceBudget {
            distance: diffs.len(),
            budget: rho,
        });
    }
    let mut out = BitString::new();
    for b in 0..rho {
        let value = diffs.get(b).copied().unwrap_or(0) as u64;
        out.extend(&BitString::from_u64_msb(value, width));
    }
    Ok(out)
}

/// Inverts [`enc_dist`]: flips `w` at each nonzero-encoded position.
/// Validates the layout: exact length `ρ·width`, strictly increasing
/// positions within range, and no nonzero block after a zero block.
pub fn dec_dist(w: &BitString, code: &BitString, rho: usize) -> Result<BitString, Error> {
    let positions = parse_dist_positions(code, rho, w.len())?;
    let mut out = w.clone();
    for p in positions {
        out.flip(p);
    }
    Ok(out)
}

/// Parses an [`enc_dist`] payload into its difference positions.
fn parse_dist_positions(code: &BitString, rho: usize, m: usize) -> Result<Vec<usize>, Error> {
    let width = ceil_log2(m + 1);
    if code.len() != rho * width {
        return Err(Error::MalformedEncDist {
            reason: format!("payload length {} != {rho}·{width}", code.len()),
        });
    }
    let mut positions = Vec::new();
    let mut seen_zero = false;
    for b in 0..rho {
        let mut value = 0usize;
        for k in 1..=width {
            value = (value << 1) | usize::from(code.get(b * width + k));
        }
        if value == 0 {
            seen_zero = true;
            continue;
        }
        if seen_zero {
            return Err(Error::MalformedEncDist {
                reason: "nonzero block after zero padding".into(),
            });
        }
        if value > m {
            return Err(Error::MalformedEncDist {
                reason: format!("position {value} exceeds window length {m}"),
            });
        }
        if let Some(&last) = positions.last() {
            if value <= last {
                return Err(Error::MalformedEncDist {
                    reason: format!("positions not increasing: {last} then {value}"),
                });
            }
        }
        positions.push(value);
    }
    Ok(positions)
}

/// Membership of `y` in the radius-`t` concatenation ball of `w`: true iff
/// `y` differs from the `|y|`-prefix of `w ∘ y` in at most `t` positions —
/// equivalently, `y` can be built by repeatedly appending a copy of the
/// previous block with at most `t` total substitutions.
pub fn in_concat_ball(w: &BitString, y: &BitString, t: usize) -> bool {
    assert!(!w.is_empty(), "concatenation ball needs a nonempty seed");
    let mut mismatches = 0usize;
    for j in 1..=y.len() {
        let reference = if j <= w.len() { w.get(j) } else { y.get(j - w.len()) };
        if y.get(j) != reference {
            mismatches += 1;
            if mismatches > t {
                return false;
            }
        }
    }
    true
}

/// One elimination event, as the encoder applies it and the decoder undoes
/// it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Elimination {
    /// Two `L`-windows at distance `< d`: remove the later one entirely.
    PairFull { i: usize, j: usize },
    /// Two `L`-windows at distance `< d`, the later overlapping the
    /// marker: remove only its `u` symbols before the marker.
    PairPartial { i: usize, j: usize, u: usize },
    /// An `ℓ`-window within distance `< d` of the marker pattern: remove
    /// it entirely.
    PatternFull { i: usize },
    /// Such a window overlapping the marker: remove only its `u` symbols
    /// before the marker.
    PatternPartial { i: usize, u: usize },
}

/// Removes `len` symbols starting at 1-based `start`.
fn remove_range(x: &BitString, start: usize, len: usize) -> BitString {
    let mut out = if start > 1 {
        x.window(1, start - 1).expect("prefix in range")
    } else {
        BitString::new()
    };
    if start + len <= x.len() {
        out.extend(&x.window(start + len, x.len() - start - len + 1).expect("suffix in range"));
    }
    out
}

/// Inserts `w` before 1-based position `start` (`start = |x|+1` appends).
fn insert_at(x: &BitString, start: usize, w: &BitString) -> BitString {
    let mut out = if start > 1 {
        x.window(1, start - 1).expect("prefix in range")
    } else {
        BitString::new()
    };
    out.extend(w);
    if start <= x.len() {
        out.extend(&x.window(start, x.len() - start + 1).expect("suffix in range"));
    }
    out
}

/// Finds the lexicographically smallest violating `L`-window pair
/// `(i, j)`, `i < j`, with `d_H(x_{i,L}, x_{j,L}) <= d−1`.
fn find_pair_violation(x: &BitString, p: &CodecParams) -> Option<(usize, usize)> {
    let big_l = p.big_l;
    if x.len() < big_l {
        return None;
    }
    let m = x.len() - big_l + 1;
    if let Some(packed) = x.windows_packed(big_l) {
        for i in 0..m {
            for j in (i + 1)..m {
                if (packed[i] ^ packed[j]).count_ones() as usize <= p.d - 1 {
                    return Some((i + 1, j + 1));
                }
            }
        }
        None
    } else {
        for i in 1..=m {
            for j in (i + 1)..=m {
                if x.range_distance(i, x, j, big_l) <= p.d - 1 {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Finds the smallest `i` in the scan range `[1, |x|−2ℓ+|u_d|]` whose
/// `ℓ`-window is within distance `d−1` of the marker pattern.
fn find_pattern_violation(x: &BitString, p: &CodecParams, pattern: &BitString) -> Option<usize> {
    let hi = (x.len() + p.u_d.len()).checked_sub(2 * p.ell)?;
    let hi = hi.min(x.len().saturating_sub(p.ell) + 1);
    (1..=hi).find(|&i| x.range_distance(i, pattern, 1, p.ell) <= p.d - 1)
}

/// Builds the header for an elimination and returns it with the number of
/// symbols the elimination removes.
fn build_header(x: &BitString, p: &CodecParams, e: Elimination) -> Result<(BitString, usize), Error> {
    let w_abs = p.w_abs();
    let index = |v: usize, width: usize| BitString::from_u64_msb(v as u64, width);
    match e {
        Elimination::PairFull { i, j } => {
            let mut h: BitString = "101".parse().unwrap();
            h.extend(&index(i, w_abs));
            h.extend(&index(j, w_abs));
            let wi = x.window(i, p.big_l).expect("window in range");
            let wj = x.window(j, p.big_l).expect("window in range");
            h.extend(&enc_dist(&wi, &wj, p.d - 1)?);
            Ok((h, p.big_l))
        }
        Elimination::PairPartial { i, j, u } => {
            let mut h: BitString = "100".parse().unwrap();
            h.extend(&index(i, w_abs));
            // Slot of j within J1 = [P−L, |x|−L+1]: r1 = j − (P−L) + 1 = L−u+1.
            h.extend(&index(p.big_l - u + 1, p.w_j1()));
            let wi = x.window(i, p.big_l).expect("window in range");
            let wj = x.window(j, p.big_l).expect("window in range");
            h.extend(&enc_dist(&wi, &wj, p.d - 1)?);
            Ok((h, u))
        }
        Elimination::PatternFull { i } => {
            let mut h: BitString = "0".parse().unwrap();
            h.extend(&index(i, w_abs));
            let wi = x.window(i, p.ell).expect("window in range");
            h.extend(&enc_dist(&p.pattern(), &wi, p.d - 1)?);
            Ok((h, p.ell))
        }
        Elimination::PatternPartial { i, u } => {
            let mut h: BitString = "11".parse().unwrap();
            // Slot of i within J2 = [|x|−2ℓ−d, |x|−2ℓ+|u_d|]: u = ℓ+1−slot.
            h.extend(&index(p.ell + 1 - u, p.w_j2()));
            let wi = x.window(i, p.ell).expect("window in range");
            h.extend(&enc_dist(&p.pattern(), &wi, p.d - 1)?);
            Ok((h, u))
        }
    }
}

/// Encodes a message of `n − 1` bits into an `(L, d)`-substring-distant
/// codeword of `n` bits: appends the marker, eliminates violations while
/// prepending replayable headers (each step must strictly shrink the
/// working string — [`Error::EliminationStuck`] advises a larger slack
/// otherwise), expands with safe blocks if the string fell below `n`, and
/// returns the `n`-prefix.
pub fn ld_encode(w: &BitString, p: &CodecParams) -> Result<BitString, Error> {
    if w.len() + 1 != p.n {
        return Err(Error::InvalidParams {
            reason: format!("message length {} != n−1 = {}", w.len(), p.n - 1),
        });
    }
    let pattern = p.pattern();
    let mut x = w.concat(&p.marker);

    // Elimination: remove near-duplicate L-windows and pattern-like
    // ℓ-windows, recording each removal in a prepended header.
    loop {
        let marker_start = x.len() - p.ell - p.d; // 1-based marker position
        let e = if let Some((i, j)) = find_pair_violation(&x, p) {
            if j + p.big_l > marker_start {
                // J1: the window overlaps the marker; remove only the part
                // before it.
                Some(Elimination::PairPartial { i, j, u: marker_start - j })
            } else {
                Some(Elimination::PairFull { i, j })
            }
        } else if let Some(i) = find_pattern_violation(&x, p, &pattern) {
            if i + p.ell > marker_start {
                Some(Elimination::PatternPartial { i, u: marker_start - i })
            } else {
                Some(Elimination::PatternFull { i })
            }
        } else {
            None
        };
        let Some(e) = e else { break };
        let (header, removed) = build_header(&x, p, e)?;
        if header.len() >= removed {
            return Err(Error::EliminationStuck {
                removed,
                inserted: header.len(),
                slack: p.slack,
            });
        }
        let start = match e {
            Elimination::PairFull { j, .. } | Elimination::PairPartial { j, .. } => j,
            Elimination::PatternFull { i } | Elimination::PatternPartial { i, .. } => i,
        };
        x = header.concat(&remove_range(&x, start, removed));
        debug_assert!(x.suffix(p.marker.len()) == p.marker, "marker must survive");
    }

    // Expansion: append safe length-ℓ blocks until the string reaches n.
    while x.len() < p.n {
        let y = find_expansion_block(&x, p)?;
        x.extend(&y);
        debug_assert!(
            is_substring_distant(&x, p.big_l, p.d).map(|r| r.0).unwrap_or(true),
            "expansion must preserve window distance"
        );
    }
    Ok(x.prefix(p.n))
}

/// Lexicographically smallest length-`ℓ` block whose append cannot create a
/// window violation: at distance `>= d` from every existing `ℓ`-window and
/// outside the radius-`(d−1)` concatenation ball of every proper suffix.
fn find_expansion_block(x: &BitString, p: &CodecParams) -> Result<BitString, Error> {
    let ell = p.ell;
    debug_assert!(ell < 64, "expansion enumerates 2^ℓ candidates");
    'cand: for v in 0..(1u64 << ell) {
        let y = BitString::from_u64_msb(v, ell);
        if x.len() >= ell {
            for i in 1..=(x.len() - ell + 1) {
                if x.range_distance(i, &y, 1, ell) <= p.d - 1 {
                    continue 'cand;
                }
            }
        }
        for k in 1..ell.min(x.len() + 1) {
            if in_concat_ball(&x.suffix(k), &y, p.d - 1) {
                continue 'cand;
            }
        }
        return Ok(y);
    }
    Err(Error::ExpansionExhausted)
}

/// A bit cursor over the header region during decode.
struct HeaderReader<'a> {
    x: &'a BitString,
    pos: usize, // next unread 1-based position
}

impl<'a> HeaderReader<'a> {
    fn new(x: &'a BitString) -> Self {
        HeaderReader { x, pos: 1 }
    }

    fn take(&mut self) -> Result<bool, Error> {
        if self.pos > self.x.len() {
            return Err(Error::DecodeCorrupt {
                reason: "header truncated".into(),
            });
        }
        let b = self.x.get(self.pos);
        self.pos += 1;
        Ok(b)
    }

    fn take_value(&mut self, width: usize) -> Result<usize, Error> {
        let mut v = 0usize;
        for _ in 0..width {
            v = (v << 1) | usize::from(self.take()?);
        }
        Ok(v)
    }

    fn take_bits(&mut self, width: usize) -> Result<BitString, Error> {
        let mut out = BitString::new();
        for _ in 0..width {
            out.push(self.take()?);
        }
        Ok(out)
    }
}

/// Undoes the first (most recent) elimination header of `x`, returning the
/// restored string.
fn replay_one(x: &BitString, p: &CodecParams) -> Result<BitString, Error> {
    let mut r = HeaderReader::new(x);
    let w_abs = p.w_abs();
    let corrupt = |reason: String| Error::DecodeCorrupt { reason };
    let restored = if r.take()? {
        if r.take()? {
            // Tag 11: pattern window, partial removal before the marker.
            let slot = r.take_value(p.w_j2())?;
            if slot < 1 || slot > p.u_d.len() + p.d + 1 {
                return Err(corrupt(format!("marker-relative slot {slot} out of range")));
            }
            let u = p.ell + 1 - slot;
            let code = r.take_bits(p.dist_width(p.ell))?;
            let w = dec_dist(&p.pattern(), &code, p.d - 1)?;
            let body = strip_header(x, r.pos);
            let insert_pos = body
                .len()
                .checked_sub(p.ell + p.d)
                .ok_or_else(|| corrupt("string shorter than its marker".into()))?;
            insert_at(&body, insert_pos, &w.prefix(u))
        } else if r.take()? {
            // Tag 101: window pair, full removal of the later window.
            let i = r.take_value(w_abs)?;
            let j = r.take_value(w_abs)?;
            let code = r.take_bits(p.dist_width(p.big_l))?;
            let diffs = parse_dist_positions(&code, p.d - 1, p.big_l)?;
            let body = strip_header(x, r.pos);
            if i < 1 || j <= i || j > body.len() + 1 {
                return Err(corrupt(format!("window positions ({i}, {j}) out of range")));
            }
            let w = refill_window(&body, i, j, p.big_l, p.big_l, &diffs)?;
            insert_at(&body, j, &w)
        } else {
            // Tag 100: window pair, partial removal before the marker.
            let i = r.take_value(w_abs)?;
            let slot = r.take_value(p.w_j1())?;
            if slot < 1 || slot > p.ell + p.d + 2 {
                return Err(corrupt(format!("marker-relative slot {slot} out of range")));
            }
            let u = p.big_l + 1 - slot;
            let code = r.take_bits(p.dist_width(p.big_l))?;
            let diffs = parse_dist_positions(&code, p.d - 1, p.big_l)?;
            let body = strip_header(x, r.pos);
            let j = body
                .len()
                .checked_sub(p.ell + p.d)
                .ok_or_else(|| corrupt("string shorter than its marker".into()))?;
            if i < 1 || j <= i {
                return Err(corrupt(format!("window positions ({i}, {j}) out of range")));
            }
            let w = refill_window(&body, i, j, u, p.big_l, &diffs)?;
            insert_at(&body, j, &w.prefix(u))
        }
    } else {
        // Tag 0: pattern window, full removal.
        let i = r.take_value(w_abs)?;
        let code = r.take_bits(p.dist_width(p.ell))?;
        let w = dec_dist(&p.pattern(), &code, p.d - 1)?;
        let body = strip_header(x, r.pos);
        if i < 1 || i > body.len() + 1 {
            return Err(corrupt(format!("window position {i} out of range")));
        }
        insert_at(&body, i, &w)
    };
    Ok(restored)
}

/// Drops the first `next_pos − 1` symbols (the parsed header).
fn strip_header(x: &BitString, next_pos: usize) -> BitString {
    x.suffix(x.len() - (next_pos - 1))
}

/// Reconstructs a removed window from its surviving reference window.
///
/// `body` is the string after removal, `i` the reference window's start,
/// `j` the removed range's start, `u` the removed length, `m` the window
/// length, and `diffs` the differing positions. Symbols of the reference
/// window that fell inside the removed range refer forward into the window
/// being rebuilt; symbols past it are read at their shifted positions.
fn refill_window(
    body: &BitString,
    i: usize,
    j: usize,
    u: usize,
    m: usize,
    diffs: &[usize],
) -> Result<BitString, Error> {
    let delta = j - i;
    let mut w = BitString::new();
    for k in 1..=m {
        let pos = i + k - 1;
        let base = if pos < j {
            if pos > body.len() {
                return Err(Error::DecodeCorrupt {
                    reason: format!("reference position {pos} out of range"),
                });
            }
            body.get(pos)
        } else if pos < j + u {
            w.get(k - delta)
        } else {
            let shifted = pos - u;
            if shifted > body.len() {
                return Err(Error::DecodeCorrupt {
                    reason: format!("reference position {shifted} out of range"),
                });
            }
            body.get(shifted)
        };
        w.push(base ^ diffs.contains(&k));
    }
    Ok(w)
}

/// Decodes a codeword produced by [`ld_encode`] back to its `n − 1`-bit
/// message: anchors on the leftmost full marker occurrence (or completes
/// the truncated marker prefix at the end, longest candidate first,
/// validating by re-encoding), replays the elimination headers
/// last-in-first-out until the working string regains its initial length,
/// checks the marker, and strips it.
pub fn ld_decode(x: &BitString, p: &CodecParams) -> Result<BitString, Error> {
    if x.len() != p.n {
        return Err(Error::DecodeCorrupt {
            reason: format!("codeword length {} != n = {}", x.len(), p.n),
        });
    }
    let mlen = p.marker.len();
    // Full marker present: truncate anything to its right (expansion
    // blocks), then replay.
    if x.len() >= mlen {
        for start in 1..=(x.len() - mlen + 1) {
            if x.range_eq(start, &p.marker, 1, mlen) {
                let body = x.prefix(start + mlen - 1);
                return replay_all(&body, p);
            }
        }
    }
    // Truncated marker: the codeword ends with a proper marker prefix.
    // Try completions longest-first; the true one must re-encode to the
    // input exactly.
    for k in (1..=(mlen - 1).min(x.len())).rev() {
        if !x.range_eq(x.len() - k + 1, &p.marker, 1, k) {
            continue;
        }
        let completed = x.concat(&p.marker.suffix(mlen - k));
        let Ok(message) = replay_all(&completed, p) else { continue };
        match ld_encode(&message, p) {
            Ok(again) if &again == x => return Ok(message),
            _ => continue,
        }
    }
    Err(Error::DecodeCorrupt {
        reason: "no marker occurrence or completable marker prefix".into(),
    })
}

/// Replays elimination headers until the working string regains length
/// `n + ℓ + d`, then validates and strips the marker.
fn replay_all(body: &BitString, p: &CodecParams) -> Result<BitString, Error> {
    let target = p.n + p.ell + p.d;
    let mut x = body.clone();
    while x.len() < target {
        let restored = replay_one(&x, p)?;
        if restored.len() <= x.len() {
            return Err(Error::DecodeCorrupt {
                reason: "replay failed to grow the string".into(),
            });
        }
        x = restored;
    }
    if x.len() != target {
        return Err(Error::DecodeCorrupt {
            reason: format!("replay overshot: {} != {target}", x.len()),
        });
    }
    if x.suffix(p.marker.len()) != p.marker {
        return Err(Error::DecodeCorrupt {
            reason: "replayed string does not end with the marker".into(),
        });
    }
    Ok(x.prefix(p.n - 1))
}

/// Exhaustive count of `(L, d)`-substring-distant strings of length `n`,
/// refusing beyond the enumeration limit.
pub fn count_distant(n: usize, big_l: usize, d: usize) -> Result<u64, Error> {
    count_distant_with_limit(n, big_l, d, DEFAULT_ENUMERATION_LIMIT)
}

/// [`count_distant`] with an explicit limit.
pub fn count_distant_with_limit(
    n: usize,
    big_l: usize,
    d: usize,
    limit: usize,
) -> Result<u64, Error> {
    if n > limit || n >= 63 {
        return Err(Error::EnumerationLimit { n, limit });
    }
    let count = (0u64..(1u64 << n))
        .into_par_iter()
        .filter(|&v| {
            let w = BitString::from_u64_msb(v, n);
            is_substring_distant(&w, big_l, d).map(|r| r.0).unwrap_or(false)
        })
        .count() as u64;
    Ok(count)
}

/// Histogram of the minimum pairwise `L`-window distance over all strings
/// of length `n`: entry `k` counts strings whose closest window pair is at
/// distance exactly `k`; the final entry (index `L+1`) counts strings with
/// fewer than two windows (vacuously distant at any `d`). The count of
/// `(L, d)`-distant strings is the sum of entries `d ..= L+1`.
pub fn min_distance_histogram(n: usize, big_l: usize, limit: usize) -> Result<Vec<u64>, Error> {
    if n > limit || n >= 63 {
        return Err(Error::EnumerationLimit { n, limit });
    }
    if big_l < 1 || big_l > n {
        return Err(Error::WindowOutOfRange {
            start: 1,
            len: big_l,
            n,
        });
    }
    let hist = (0u64..(1u64 << n))
        .into_par_iter()
        .fold(
            || vec![0u64; big_l + 2],
            |mut acc, v| {
                let w = BitString::from_u64_msb(v, n);
                let m = n - big_l + 1;
                let mut min_d = usize::MAX;
                if let Some(packed) = w.windows_packed(big_l) {
                    'outer: for i in 0..m {
                        for j in (i + 1)..m {
                            let d = (packed[i] ^ packed[j]).count_ones() as usize;
                            if d < min_d {
                                min_d = d;
                                if min_d == 0 {
                                    break 'outer;
                                }
                            }
                        }
                    }
                } else {
                    for i in 1..=m {
                        for j in (i + 1)..=m {
                            min_d = min_d.min(w.range_distance(i, &w, j, big_l));
                        }
                    }
                }
                let slot = if min_d == usize::MAX { big_l + 1 } else { min_d };
                acc[slot] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; big_l + 2],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn random_message(n: usize, seed: u64) -> BitString {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = BitString::new();
        for _ in 0..(n - 1) {
            w.push(rng.gen_bool(0.5));
        }
        w
    }

    #[test]
    fn auto_cyclic_basics() {
        assert!(is_auto_cyclic(&bs("1"), 1));
        assert!(!is_auto_cyclic(&bs("0"), 1));
        assert_eq!(find_auto_cyclic(1).unwrap(), bs("1"));
        assert_eq!(find_auto_cyclic(2).unwrap(), bs("100"));
        for d in 1..=4 {
            let u = find_auto_cyclic(d).unwrap();
            assert!(is_auto_cyclic(&u, d), "d={d}: {u}");
            assert!(u.len() <= d * ceil_log2(d) + 2 * d);
            // Memoized second call returns the same string.
            assert_eq!(find_auto_cyclic(d).unwrap(), u);
        }
    }

    #[test]
    fn enc_dist_layout_and_roundtrip() {
        assert_eq!(
            enc_dist(&bs("00000000"), &bs("01000000"), 2).unwrap(),
            bs("00100000")
        );
        assert_eq!(enc_dist(&bs("0101"), &bs("0101"), 2).unwrap(), bs("000000"));
        assert!(matches!(
            enc_dist(&bs("0000"), &bs("1111"), 2),
            Err(Error::DistanceBudget { distance: 4, budget: 2 })
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=20);
            let rho = rng.gen_range(0..=4);
            let mut w = BitString::new();
            for _ in 0..n {
                w.push(rng.gen_bool(0.5));
            }
            let mut w2 = w.clone();
            let flips = rng.gen_range(0..=rho.min(n));
            let mut chosen: Vec<usize> = (1..=n).collect();
            for k in 0..flips {
                let pick = rng.gen_range(k..n);
                chosen.swap(k, pick);
            }
            for &p in &chosen[..flips] {
                w2.flip(p);
            }
            let code = enc_dist(&w, &w2, rho).unwrap();
            assert_eq!(code.len(), rho * ceil_log2(n + 1));
            assert_eq!(dec_dist(&w, &code, rho).unwrap(), w2);
        }
    }

    #[test]
    fn dec_dist_rejects_malformed_payloads() {
        let w = bs("00000000"); // width 4
        // Wrong length.
        assert!(matches!(
            dec_dist(&w, &bs("0010"), 2),
            Err(Error::MalformedEncDist { .. })
        ));
        // Nonzero after zero padding.
        assert!(matches!(
            dec_dist(&w, &bs("00000010"), 2),
            Err(Error::MalformedEncDist { .. })
        ));
        // Position out of range.
        assert!(matches!(
            dec_dist(&w, &bs("10010000"), 2),
            Err(Error::MalformedEncDist { .. })
        ));
        // Not increasing.
        assert!(matches!(
            dec_dist(&w, &bs("01000010"), 2),
            Err(Error::MalformedEncDist { .. })
        ));
    }

    /// Brute-force concatenation-ball membership by enumerating block hops.
    fn concat_ball_oracle(w: &BitString, y: &BitString, t: usize) -> bool {
        // Members built block-by-block: each block is the previous one with
        // some substitutions, budgets summing to <= t; y's length may end
        // mid-block.
        fn expand(prev: &BitString, built: &BitString, y: &BitString, budget: usize) -> bool {
            if built.len() >= y.len() {
                return built.prefix(y.len()) == *y;
            }
            // Next block: any string at distance <= budget from prev,
            // counting only positions that fit within y.
            let keep = (y.len() - built.len()).min(prev.len());
            let block_len = prev.len();
            for mask in 0u64..(1u64 << block_len) {
                let flips = mask.count_ones() as usize;
                if flips > budget {
                    continue;
                }
                let mut block = prev.clone();
                for p in 1..=block_len {
                    if mask >> (p - 1) & 1 == 1 {
                        block.flip(p);
                    }
                }
                let mut next = built.clone();
                next.extend(&block.prefix(keep));
                // Differences beyond y's length can't occur (trimmed), and
                // the hop's budget counts the flips we made.
                if expand(&block, &next, y, budget - flips) {
                    return true;
                }
            }
            false
        }
        expand(w, &BitString::new(), y, t)
    }

    #[test]
    fn concat_ball_examples_and_oracle() {
        // Periodic extension is in the radius-0 ball.
        let w = bs("101");
        assert!(in_concat_ball(&w, &bs("101101101"), 0));
        assert!(in_concat_ball(&w, &bs("1011011"), 0));
        assert!(!in_concat_ball(&w, &bs("1011010"), 0));
        assert!(in_concat_ball(&w, &bs("1011010"), 1));
        // Exhaustive cross-check against the hop enumeration.
        for (wl, yl) in [(2usize, 5usize), (3, 7), (4, 6)] {
            for wv in 0..(1u64 << wl) {
                let w = BitString::from_u64_msb(wv, wl);
                for yv in 0..(1u64 << yl) {
                    let y = BitString::from_u64_msb(yv, yl);
                    for t in 0..=2 {
                        assert_eq!(
                            in_concat_ball(&w, &y, t),
                            concat_ball_oracle(&w, &y, t),
                            "w={w}, y={y}, t={t}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn params_and_slack_derivation() {
        assert_eq!(auto_slack(256, 1).unwrap(), 10);
        let p = CodecParams::auto(256, 1).unwrap();
        assert_eq!((p.ell, p.big_l), (20, 40));
        assert_eq!(p.u_d, bs("1"));
        assert_eq!(p.marker.len(), p.ell + 2);
        assert_eq!(p.pattern(), bs("00000000000000000001"));

        let c2 = auto_slack(4096, 2).unwrap();
        let p2 = CodecParams::new(4096, 2, c2).unwrap();
        assert_eq!(c2, 15);
        assert_eq!((p2.ell, p2.big_l), (33, 66));
        assert_eq!(p2.u_d, bs("100"));
    }

    #[test]
    fn roundtrip_at_256_1() {
        let p = CodecParams::auto(256, 1).unwrap();
        for seed in 0..25u64 {
            let w = random_message(256, seed);
            let x = ld_encode(&w, &p).unwrap();
            assert_eq!(x.len(), 256);
            let (ok, _) = is_substring_distant(&x, p.big_l, p.d).unwrap();
            assert!(ok, "seed {seed}");
            assert_eq!(ld_decode(&x, &p).unwrap(), w, "seed {seed}");
        }
    }

    #[test]
    fn roundtrip_at_4096_2() {
        let p = CodecParams::auto(4096, 2).unwrap();
        for seed in 0..3u64 {
            let w = random_message(4096, seed);
            let x = ld_encode(&w, &p).unwrap();
            assert_eq!(x.len(), 4096);
            let (ok, _) = is_substring_distant(&x, p.big_l, p.d).unwrap();
            assert!(ok, "seed {seed}");
            assert_eq!(ld_decode(&x, &p).unwrap(), w, "seed {seed}");
        }
    }

    #[test]
    fn violation_free_message_passes_through() {
        // A message whose initial string has no violations encodes to
        // itself up to the truncated marker: the output begins with w.
        let p = CodecParams::auto(256, 1).unwrap();
        let pattern = p.pattern();
        let mut found = false;
        for seed in 0..20u64 {
            let w = random_message(256, seed);
            let x0 = w.concat(&p.marker);
            if find_pair_violation(&x0, &p).is_some()
                || find_pattern_violation(&x0, &p, &pattern).is_some()
            {
                continue;
            }
            found = true;
            let x = ld_encode(&w, &p).unwrap();
            assert_eq!(x.prefix(w.len()), w);
            assert_eq!(ld_decode(&x, &p).unwrap(), w);
            break;
        }
        assert!(found, "no violation-free message among the seeds");
    }

    #[test]
    fn heavy_elimination_roundtrip() {
        // The all-zero message maximally violates both cases; the encoder
        // must grind it down and the decoder restore it.
        let p = CodecParams::auto(64, 1).unwrap();
        let w = BitString::zeros(63);
        let x = ld_encode(&w, &p).unwrap();
        assert_eq!(x.len(), 64);
        let (ok, _) = is_substring_distant(&x, p.big_l, p.d).unwrap();
        assert!(ok);
        assert_eq!(ld_decode(&x, &p).unwrap(), w);
        // And at a few nearby lengths / messages.
        for seed in 0..5u64 {
            let mut w = BitString::zeros(63);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..6 {
                let pflip = rng.gen_range(1..=63);
                w.set(pflip, rng.gen_bool(0.5));
            }
            let x = ld_encode(&w, &p).unwrap();
            assert_eq!(ld_decode(&x, &p).unwrap(), w, "seed {seed}");
        }
    }

    #[test]
    fn insufficient_slack_reports_stuck() {
        // At (32, 1) with no slack the header is wider than a removed
        // window, so the all-zero message (full of duplicate windows)
        // cannot shrink.
        let p = CodecParams::new(32, 1, 0).unwrap();
        let w = BitString::zeros(31);
        assert!(matches!(
            ld_encode(&w, &p),
            Err(Error::EliminationStuck { .. })
        ));
    }

    #[test]
    fn decode_rejects_garbage() {
        let p = CodecParams::auto(256, 1).unwrap();
        // All-ones: contains no marker occurrence and ends in 1, which is
        // no marker prefix.
        assert!(matches!(
            ld_decode(&BitString::ones(256), &p),
            Err(Error::DecodeCorrupt { .. })
        ));
        // Wrong length.
        assert!(matches!(
            ld_decode(&BitString::ones(255), &p),
            Err(Error::DecodeCorrupt { .. })
        ));
    }

    #[test]
    fn message_length_is_validated() {
        let p = CodecParams::auto(256, 1).unwrap();
        assert!(matches!(
            ld_encode(&BitString::zeros(256), &p),
            Err(Error::InvalidParams { .. })
        ));
    }

    #[test]
    fn distant_counts_small() {
        // Two-windows strings of length 4: the distinct-window condition.
        assert_eq!(count_distant(4, 2, 1).unwrap(), 8);
        // A single window is vacuously distant at any d.
        assert_eq!(count_distant(10, 10, 3).unwrap(), 1 << 10);
        assert!(matches!(
            count_distant(40, 8, 1),
            Err(Error::EnumerationLimit { .. })
        ));
    }

    #[test]
    fn histogram_agrees_with_direct_counts() {
        for (n, big_l) in [(10usize, 4usize), (12, 6)] {
            let hist = min_distance_histogram(n, big_l, DEFAULT_ENUMERATION_LIMIT).unwrap();
            assert_eq!(hist.iter().sum::<u64>(), 1u64 << n);
            for d in 1..=big_l {
                let from_hist: u64 = hist[d..].iter().sum();
                assert_eq!(
                    from_hist,
                    count_distant(n, big_l, d).unwrap(),
                    "n={n}, L={big_l}, d={d}"
                );
            }
        }
    }

    #[test]
    fn union_bound_on_non_distant_counts() {
        // The number of strings violating (L,d)-distantness is at most
        // n² · 2^{n−L} · L^{d−1}.
        for (n, big_l, d) in [(10usize, 5usize, 1usize), (12, 6, 2), (12, 8, 3)] {
            let distant = count_distant(n, big_l, d).unwrap();
            let non_distant = (1u128 << n) - distant as u128;
            let bound = (n as u128).pow(2) * (1u128 << (n - big_l)) * (big_l as u128).pow(d as u32 - 1);
            assert!(
                non_distant <= bound,
                "n={n}, L={big_l}, d={d}: {non_distant} > {bound}"
            );
        }
    }
}
