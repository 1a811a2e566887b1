//! Binary strings, windows, and Hamming geometry.
//!
//! [`BitString`] is an immutable-by-convention packed bit vector with 1-based
//! positional access. Position `p` of a string `w` is written `w_p`, and
//! `w_{i,k}` is the length-`k` window starting at position `i`; all public
//! operations speak this 1-based language. Bits are packed 64 per word,
//! position 1 in the least significant bit of the first word, so window
//! extraction and range distances run on whole words.
//!
//! # Example
//!
//! ```
//! use substrand::bits::BitString;
//!
//! let x: BitString = "0100000111011111".parse().unwrap();
//! assert_eq!(x.window(7, 6).unwrap().to_string(), "011101");
//! let (distant, _) = substrand::bits::is_substring_distant(&x, 6, 1).unwrap();
//! assert!(distant);
//! ```

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

const WORD_BITS: usize = 64;

/// A finite binary string with 1-based window access.
///
/// The empty string is representable (it arises as a concatenation identity,
/// e.g. a zero-block difference encoding) but cannot be parsed from text:
/// parsed strings always have length >= 1.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    /// Packed bits, position `p` at `words[(p-1)/64]` bit `(p-1)%64`.
    /// Invariant: bits beyond `len` are zero (required for `Eq`/`Hash`).
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    /// The empty string.
    pub fn new() -> Self {
        BitString::default()
    }

    /// A string of `len` zeros.
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        }
    }

    /// A string of `len` ones.
    pub fn ones(len: usize) -> Self {
        let mut s = BitString::zeros(len);
        for w in &mut s.words {
            *w = u64::MAX;
        }
        s.clear_tail();
        s
    }

    /// Builds a length-`len` string from the low `len` bits of `v`, most
    /// significant bit first: position `j` is bit `len - j` of `v`. With this
    /// convention `v` ascending enumerates strings in lexicographic order.
    ///
    /// # Panics
    /// Panics if `len > 64` or `v` has bits above `len`.
    pub fn from_u64_msb(v: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64_msb supports at most 64 bits");
        if len < 64 {
            assert!(v < (1u64 << len), "value has bits beyond len");
        }
        let mut s = BitString::zeros(len);
        for j in 1..=len {
            if (v >> (len - j)) & 1 == 1 {
                s.set(j, true);
            }
        }
        s
    }

    /// Length in symbols.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True iff the string has no symbols.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Symbol at 1-based position `p` as a bool (`true` = '1').
    ///
    /// # Panics
    /// Panics if `p` is out of range.
    pub fn get(&self, p: usize) -> bool {
        assert!(p >= 1 && p <= self.len, "position {p} out of 1..={}", self.len);
        (self.words[(p - 1) / WORD_BITS] >> ((p - 1) % WORD_BITS)) & 1 == 1
    }

    /// Sets 1-based position `p`.
    ///
    /// # Panics
    /// Panics if `p` is out of range.
    pub fn set(&mut self, p: usize, value: bool) {
        assert!(p >= 1 && p <= self.len, "position {p} out of 1..={}", self.len);
        let (w, b) = ((p - 1) / WORD_BITS, (p - 1) % WORD_BITS);
        if value {
            self.words[w] |= 1u64 << b;
        } else {
            self.words[w] &= !(1u64 << b);
        }
    }

    /// Flips 1-based position `p`.
    ///
    /// # Panics
    /// Panics if `p` is out of range.
    pub fn flip(&mut self, p: usize) {
        let v = self.get(p);
        self.set(p, !v);
    }

    /// Appends one symbol.
    pub fn push(&mut self, value: bool) {
        self.len += 1;
        if self.words.len() * WORD_BITS < self.len {
            self.words.push(0);
        }
        if value {
            let p = self.len;
            self.words[(p - 1) / WORD_BITS] |= 1u64 << ((p - 1) % WORD_BITS);
        }
    }

    /// Concatenation `self ∘ other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    /// Appends `other` in place.
    pub fn extend(&mut self, other: &BitString) {
        // Word-align when possible; otherwise shift other's words in.
        let shift = self.len % WORD_BITS;
        let new_len = self.len + other.len;
        if shift == 0 {
            self.words.truncate(self.len / WORD_BITS);
            self.words.extend_from_slice(&other.words);
        } else {
            let base = self.len / WORD_BITS;
            self.words.resize(new_len.div_ceil(WORD_BITS), 0);
            for (k, &w) in other.words.iter().enumerate() {
                self.words[base + k] |= w << shift;
                if base + k + 1 < self.words.len() {
                    self.words[base + k + 1] = w >> (WORD_BITS - shift);
                }
            }
        }
        self.len = new_len;
        self.clear_tail();
    }

    /// The window `w_{i,k}` as an owned string.
    ///
    /// Errors when the window falls outside the string (requires `1 <= i`,
    /// `k >= 1`, and `i + k - 1 <= len`).
    pub fn window(&self, i: usize, k: usize) -> Result<BitString, Error> {
        if i < 1 || k < 1 || i + k - 1 > self.len {
            return Err(Error::WindowOutOfRange {
                start: i,
                len: k,
                n: self.len,
            });
        }
        let mut out = BitString::zeros(k);
        let mut done = 0;
        while done < k {
            let take = (k - done).min(WORD_BITS);
            let w = self.extract_word(i - 1 + done, take);
            out.words[done / WORD_BITS] = w;
            done += take;
        }
        out.clear_tail();
        Ok(out)
    }

    /// The length-`k` prefix.
    ///
    /// # Panics
    /// Panics if `k > len`.
    pub fn prefix(&self, k: usize) -> BitString {
        assert!(k <= self.len, "prefix {k} of length {}", self.len);
        if k == 0 {
            return BitString::new();
        }
        self.window(1, k).expect("in range")
    }

    /// The length-`k` suffix.
    ///
    /// # Panics
    /// Panics if `k > len`.
    pub fn suffix(&self, k: usize) -> BitString {
        assert!(k <= self.len, "suffix {k} of length {}", self.len);
        if k == 0 {
            return BitString::new();
        }
        self.window(self.len - k + 1, k).expect("in range")
    }

    /// Number of '1' symbols.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Hamming distance to `other`; errors on length mismatch.
    pub fn hamming_distance(&self, other: &BitString) -> Result<usize, Error> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Hamming distance between `self[i..i+k-1]` and `other[j..j+k-1]`
    /// (1-based starts) without allocating the windows.
    ///
    /// # Panics
    /// Panics if either range is out of bounds.
    pub fn range_distance(&self, i: usize, other: &BitString, j: usize, k: usize) -> usize {
        assert!(i >= 1 && i + k - 1 <= self.len, "left range out of bounds");
        assert!(j >= 1 && j + k - 1 <= other.len, "right range out of bounds");
        let mut dist = 0;
        let mut done = 0;
        while done < k {
            let take = (k - done).min(WORD_BITS);
            let a = self.extract_word(i - 1 + done, take);
            let b = other.extract_word(j - 1 + done, take);
            dist += (a ^ b).count_ones() as usize;
            done += take;
        }
        dist
    }

    /// True iff `self[i..i+k-1]` equals `other[j..j+k-1]` (1-based starts).
    ///
    /// # Panics
    /// Panics if either range is out of bounds.
    pub fn range_eq(&self, i: usize, other: &BitString, j: usize, k: usize) -> bool {
        assert!(i >= 1 && i + k - 1 <= self.len, "left range out of bounds");
        assert!(j >= 1 && j + k - 1 <= other.len, "right range out of bounds");
        let mut done = 0;
        while done < k {
            let take = (k - done).min(WORD_BITS);
            if self.extract_word(i - 1 + done, take) != other.extract_word(j - 1 + done, take) {
                return false;
            }
            done += take;
        }
        true
    }

    /// All length-`L` windows packed into one `u64` each (position `j` of a
    /// window in bit `j - 1`), or `None` when `L > 64`. Window `i` of the
    /// result corresponds to `w_{i,L}` (index 0 holds start position 1).
    pub fn windows_packed(&self, big_l: usize) -> Option<Vec<u64>> {
        if big_l > WORD_BITS || big_l < 1 || big_l > self.len {
            return None;
        }
        let m = self.len - big_l + 1;
        Some((0..m).map(|off| self.extract_word(off, big_l)).collect())
    }

    /// Reads `nbits <= 64` bits starting at 0-based bit offset `off`, LSB
    /// first, zero-padded above `nbits`.
    fn extract_word(&self, off: usize, nbits: usize) -> u64 {
        debug_assert!(nbits >= 1 && nbits <= WORD_BITS);
        debug_assert!(off + nbits <= self.len);
        let (w, b) = (off / WORD_BITS, off % WORD_BITS);
        let mut out = self.words[w] >> b;
        if b != 0 && w + 1 < self.words.len() {
            out |= self.words[w + 1] << (WORD_BITS - b);
        }
        if nbits < WORD_BITS {
            out &= (1u64 << nbits) - 1;
        }
        out
    }

    /// Zeroes the bits beyond `len` in the last word (the `Eq`/`Hash`
    /// invariant).
    fn clear_tail(&mut self) {
        let b = self.len % WORD_BITS;
        if b != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << b) - 1;
            }
        }
        // Drop fully unused words (can appear after truncating extends).
        self.words.truncate(self.len.div_ceil(WORD_BITS));
    }

    /// Iterator over symbols as bools, position 1 first.
    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (1..=self.len).map(move |p| self.get(p))
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(Error::ParseBitString {
                reason: "empty string".into(),
            });
        }
        let mut out = BitString::zeros(s.len());
        for (idx, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => out.set(idx + 1, true),
                other => {
                    return Err(Error::ParseBitString {
                        reason: format!("invalid symbol {other:?} at position {}", idx + 1),
                    })
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 1..=self.len {
            f.write_str(if self.get(p) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl Ord for BitString {
    /// Lexicographic order with '0' < '1'; a proper prefix sorts before its
    /// extensions.
    fn cmp(&self, other: &Self) -> Ordering {
        let common = self.len.min(other.len);
        let mut done = 0;
        while done < common {
            let take = (common - done).min(WORD_BITS);
            let a = self.extract_word(done, take);
            let b = other.extract_word(done, take);
            let x = a ^ b;
            if x != 0 {
                // Lowest differing bit = earliest differing position.
                let bit = x.trailing_zeros();
                return if (a >> bit) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
            done += take;
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Hamming distance between two equal-length symbol sequences over any
/// alphabet; errors on length mismatch. The binary fast path lives on
/// [`BitString::hamming_distance`].
pub fn hamming_distance<S: PartialEq>(a: &[S], b: &[S]) -> Result<usize, Error> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

/// Minimum pairwise Hamming distance over the distinct-position length-`L`
/// windows of a string, with the pair attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceProfile {
    /// The window length the profile was computed for.
    pub window_len: usize,
    /// Minimum pairwise distance, `None` when fewer than two windows exist.
    pub min_pairwise_distance: Option<usize>,
    /// 1-based start positions `(i, j)`, `i < j`, attaining the minimum;
    /// present exactly when the minimum is. Among all attaining pairs, the
    /// lexicographically greatest is reported.
    pub witness_pair: Option<(usize, usize)>,
}

/// Decides whether `w` is `(L, d)`-substring distant: every pair of
/// distinct-position length-`L` windows has Hamming distance >= `d`. With
/// `d = 1` this is the substring-unique predicate. Returns the decision along
/// with the distance profile; when the answer is `false` the profile's
/// witness is a violating pair.
///
/// Errors when `L` is out of `1..=|w|` or `d == 0`.
pub fn is_substring_distant(
    w: &BitString,
    big_l: usize,
    d: usize,
) -> Result<(bool, DistanceProfile), Error> {
    if big_l < 1 || big_l > w.len() {
        return Err(Error::WindowOutOfRange {
            start: 1,
            len: big_l,
            n: w.len(),
        });
    }
    if d < 1 {
        return Err(Error::InvalidParams {
            reason: "distance d must be >= 1".into(),
        });
    }
    let profile = distance_profile(w, big_l);
    let ok = profile.min_pairwise_distance.map_or(true, |m| m >= d);
    Ok((ok, profile))
}

/// Computes the [`DistanceProfile`] of `w` at window length `big_l`
/// (`1 <= big_l <= |w|`).
///
/// # Panics
/// Panics if `big_l` is out of range.
pub fn distance_profile(w: &BitString, big_l: usize) -> DistanceProfile {
    assert!(big_l >= 1 && big_l <= w.len(), "window length out of range");
    let m = w.len() - big_l + 1;
    if m < 2 {
        return DistanceProfile {
            window_len: big_l,
            min_pairwise_distance: None,
            witness_pair: None,
        };
    }
    let mut best = usize::MAX;
    let mut witness = (0, 0);
    if let Some(packed) = w.windows_packed(big_l) {
        for i in 0..m {
            for j in (i + 1)..m {
                let dist = (packed[i] ^ packed[j]).count_ones() as usize;
                if dist <= best {
                    best = dist;
                    witness = (i + 1, j + 1);
                }
            }
        }
    } else {
        for i in 1..=m {
            for j in (i + 1)..=m {
                let dist = w.range_distance(i, w, j, big_l);
                if dist <= best {
                    best = dist;
                    witness = (i, j);
                }
            }
        }
    }
    DistanceProfile {
        window_len: big_l,
        min_pairwise_distance: Some(best),
        witness_pair: Some(witness),
    }
}

/// Binomial coefficient `C(n, k)` as a `u128` (exact for the parameter sizes
/// this crate enumerates).
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Size of the radius-`t` Hamming ball around a length-`n` string:
/// `sum_{k=0}^{t} C(n, k)`. Radii beyond `n` saturate at `2^n`.
pub fn hamming_ball_size(n: usize, t: usize) -> u128 {
    (0..=t.min(n)).map(|k| binomial(n, k)).sum()
}
