//! Multispectra and their two noise channels.
//!
//! The `L`-multispectrum of a length-`n` string is the multiset of its
//! `n − L + 1` length-`L` windows. Spectra are delivered in a canonical
//! sorted order so that reconstruction code cannot peek at read positions;
//! ground-truth positions travel as optional provenance metadata used only
//! by test oracles.
//!
//! Two noise channels are modeled:
//!
//! * **losses** — up to `t` reads are missing ([`apply_losses`],
//!   [`enumerate_loss_subsets`]);
//! * **substitution errors** — up to `t` reads are corrupted, each in at most
//!   `s` positions ([`apply_errors`], [`sample_erroneous`]).
//!
//! # Text format
//!
//! A spectrum file starts with a line `L=<int>` followed by one ASCII `0`/`1`
//! read per line; reads may appear in any order and duplicate lines encode
//! multiset multiplicity.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{binomial, hamming_ball_size, BitString};
use crate::error::Error;

/// A multiset of equal-length reads, kept in canonical sorted order.
///
/// Equality and hashing consider the read multiset only; provenance is
/// test-side metadata and never influences comparisons.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Reads sorted lexicographically (the canonical multiset order).
    reads: Vec<BitString>,
    /// Common read length `L`.
    read_len: usize,
    /// Optional true start positions, aligned with `reads`.
    provenance: Option<Vec<usize>>,
}

impl PartialEq for Spectrum {
    fn eq(&self, other: &Self) -> bool {
        self.read_len == other.read_len && self.reads == other.reads
    }
}

impl Eq for Spectrum {}

impl Hash for Spectrum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.read_len.hash(state);
        self.reads.hash(state);
    }
}

impl Spectrum {
    /// Builds a spectrum from reads without provenance. Errors when the read
    /// set is empty or the reads disagree in length.
    pub fn from_reads(mut reads: Vec<BitString>) -> Result<Self, Error> {
        let read_len = match reads.first() {
            Some(r) => r.len(),
            None => {
                return Err(Error::InvalidSpectrum {
                    reason: "spectrum must contain at least one read".into(),
                })
            }
        };
        if read_len == 0 {
            return Err(Error::InvalidSpectrum {
                reason: "reads must be nonempty".into(),
            });
        }
        if let Some(bad) = reads.iter().find(|r| r.len() != read_len) {
            return Err(Error::InvalidSpectrum {
                reason: format!(
                    "read lengths disagree: {} vs {}",
                    read_len,
                    bad.len()
                ),
            });
        }
        reads.sort();
        Ok(Spectrum {
            reads,
            read_len,
            provenance: None,
        })
    }

    /// Builds a spectrum from `(true start position, read)` pairs, keeping
    /// the positions as provenance. Same validation as [`Self::from_reads`].
    pub fn from_positioned_reads(pairs: Vec<(usize, BitString)>) -> Result<Self, Error> {
        let mut pairs: Vec<(BitString, usize)> =
            pairs.into_iter().map(|(p, r)| (r, p)).collect();
        pairs.sort();
        let provenance = pairs.iter().map(|(_, p)| *p).collect();
        let reads: Vec<BitString> = pairs.into_iter().map(|(r, _)| r).collect();
        let mut s = Spectrum::from_reads(reads)?;
        s.provenance = Some(provenance);
        Ok(s)
    }

    /// The reads in canonical sorted order.
    pub fn reads(&self) -> &[BitString] {
        &self.reads
    }

    /// Common read length `L`.
    pub fn read_len(&self) -> usize {
        self.read_len
    }

    /// Number of reads (with multiplicity).
    pub fn len(&self) -> usize {
        self.reads.len()
    }

    /// True iff the spectrum holds no reads (unreachable through
    /// constructors; kept for the usual pairing with `len`).
    pub fn is_empty(&self) -> bool {
        self.reads.is_empty()
    }

    /// True start positions aligned with [`Self::reads`], when known.
    pub fn provenance(&self) -> Option<&[usize]> {
        self.provenance.as_deref()
    }

    /// Serializes to the text format (`L=<int>` header, one read per line).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "L={}", self.read_len);
        for r in &self.reads {
            let _ = writeln!(out, "{r}");
        }
        out
    }

    /// Parses the text format. Provenance is never read from files.
    pub fn parse_text(text: &str) -> Result<Self, Error> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidSpectrum {
            reason: "missing L=<int> header".into(),
        })?;
        let read_len: usize = header
            .trim()
            .strip_prefix("L=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::InvalidSpectrum {
                reason: format!("malformed header line {header:?}, expected L=<int>"),
            })?;
        let mut reads = Vec::new();
        for line in lines {
            let read: BitString = line.trim().parse().map_err(|e| Error::InvalidSpectrum {
                reason: format!("bad read line {line:?}: {e}"),
            })?;
            reads.push(read);
        }
        let s = Spectrum::from_reads(reads)?;
        if s.read_len != read_len {
            return Err(Error::InvalidSpectrum {
                reason: format!(
                    "header says L={read_len} but reads have length {}",
                    s.read_len
                ),
            });
        }
        Ok(s)
    }

    /// Checks the substitution-noise membership predicate against ground
    /// truth: at most `t` reads differ from the window at their true
    /// position, each in at most `s` places. Requires provenance.
    ///
    /// # Panics
    /// Panics if the spectrum carries no provenance.
    pub fn erroneous_membership(&self, w: &BitString, t: usize, s: usize) -> bool {
        let prov = self
            .provenance
            .as_ref()
            .expect("membership check requires provenance");
        let mut corrupted = 0usize;
        for (read, &pos) in self.reads.iter().zip(prov) {
            let dist = w.range_distance(pos, read, 1, self.read_len);
            if dist > 0 {
                corrupted += 1;
                if dist > s {
                    return false;
                }
            }
        }
        corrupted <= t
    }
}

/// The `L`-multispectrum of `w`: all `|w| − L + 1` windows, with provenance.
/// Errors when `L` is out of `1..=|w|`.
pub fn multispectrum(w: &BitString, big_l: usize) -> Result<Spectrum, Error> {
    if big_l < 1 || big_l > w.len() {
        return Err(Error::WindowOutOfRange {
            start: 1,
            len: big_l,
            n: w.len(),
        });
    }
    let m = w.len() - big_l + 1;
    let pairs = (1..=m)
        .map(|i| Ok((i, w.window(i, big_l)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    Spectrum::from_positioned_reads(pairs)
}

/// Removes the reads whose true start positions are listed in
/// `drop_positions`. The input must carry provenance (it is how dropped
/// reads are identified); survivors keep theirs.
///
/// # Panics
/// Panics if the spectrum has no provenance, a drop position does not name a
/// read, or all reads would be dropped.
pub fn apply_losses(full: &Spectrum, drop_positions: &BTreeSet<usize>) -> Spectrum {
    let prov = full
        .provenance()
        .expect("apply_losses requires provenance to identify reads");
    for &p in drop_positions {
        assert!(
            prov.contains(&p),
            "drop position {p} does not name a read in the spectrum"
        );
    }
    let kept: Vec<(usize, BitString)> = full
        .reads()
        .iter()
        .zip(prov)
        .filter(|(_, pos)| !drop_positions.contains(pos))
        .map(|(r, &p)| (p, r.clone()))
        .collect();
    assert!(!kept.is_empty(), "cannot drop every read");
    Spectrum::from_positioned_reads(kept).expect("survivors form a valid spectrum")
}

/// Flips each listed read at the listed positions: `edits` maps a true start
/// position to the set of 1-based within-read positions to substitute.
/// Requires provenance. Errors when a substitution position is outside
/// `1..=L` or an edited start position names no read.
pub fn apply_errors(
    full: &Spectrum,
    edits: &BTreeMap<usize, BTreeSet<usize>>,
) -> Result<Spectrum, Error> {
    let prov = full.provenance().ok_or_else(|| Error::InvalidSpectrum {
        reason: "apply_errors requires provenance to identify reads".into(),
    })?;
    let big_l = full.read_len();
    for (&start, positions) in edits {
        if !prov.contains(&start) {
            return Err(Error::InvalidSpectrum {
                reason: format!("edited start position {start} names no read"),
            });
        }
        if let Some(&bad) = positions.iter().find(|&&p| p < 1 || p > big_l) {
            return Err(Error::WindowOutOfRange {
                start: bad,
                len: 1,
                n: big_l,
            });
        }
    }
    let pairs = full
        .reads()
        .iter()
        .zip(prov)
        .map(|(r, &pos)| {
            let mut read = r.clone();
            if let Some(flips) = edits.get(&pos) {
                for &p in flips {
                    read.flip(p);
                }
            }
            (pos, read)
        })
        .collect();
    Spectrum::from_positioned_reads(pairs)
}

/// Enumerates the loss ball around `w`: every spectrum obtained by dropping
/// at most `t` window positions. When the ball has at most `cap` members the
/// enumeration is exhaustive, ordered by drop count then lexicographic drop
/// set; otherwise it is a uniform seeded sample of `cap` distinct members.
///
/// Errors when `L` is out of range or `cap == 0`. Dropping every read (only
/// possible when `t >= n − L + 1`) is excluded.
pub fn enumerate_loss_subsets(
    w: &BitString,
    big_l: usize,
    t: usize,
    cap: usize,
    seed: u64,
) -> Result<Vec<Spectrum>, Error> {
    if cap == 0 {
        return Err(Error::InvalidParams {
            reason: "cap must be positive".into(),
        });
    }
    let full = multispectrum(w, big_l)?;
    let m = full.len();
    let t_eff = t.min(m.saturating_sub(1));
    let ball: u128 = hamming_ball_size(m, t_eff);
    let mut out = Vec::new();
    if ball <= cap as u128 {
        for k in 0..=t_eff {
            for combo in combinations(m, k) {
                let drops: BTreeSet<usize> = combo.into_iter().collect();
                out.push(apply_losses(&full, &drops));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let weights: Vec<u128> = (0..=t_eff).map(|k| binomial(m, k)).collect();
        while out.len() < cap {
            let mut pick = rng.gen_range(0..ball);
            let mut k = 0usize;
            for (idx, &wgt) in weights.iter().enumerate() {
                if pick < wgt {
                    k = idx;
                    break;
                }
                pick -= wgt;
            }
            let combo = random_subset(&mut rng, m, k);
            if seen.insert(combo.clone()) {
                let drops: BTreeSet<usize> = combo.into_iter().collect();
                out.push(apply_losses(&full, &drops));
            }
        }
    }
    Ok(out)
}

/// Draws one substitution-noisy spectrum: the corrupted read set `I_e` is
/// uniform over all subsets of size at most `t`, and each corrupted read's
/// flip set is uniform over all position subsets of size at most `s`.
/// Deterministic under `seed`. With `t == 0` or `s == 0` the result is the
/// clean multispectrum.
pub fn sample_erroneous(
    w: &BitString,
    big_l: usize,
    t: usize,
    s: usize,
    seed: u64,
) -> Result<Spectrum, Error> {
    let full = multispectrum(w, big_l)?;
    let m = full.len();
    if t == 0 || s == 0 {
        return Ok(full);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corrupted = random_bounded_subset(&mut rng, m, t.min(m));
    let mut edits: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for start in corrupted {
        let flips = random_bounded_subset(&mut rng, big_l, s.min(big_l));
        // An empty flip set leaves the read clean; that still satisfies the
        // noise budget, so it is kept as drawn.
        if !flips.is_empty() {
            edits.insert(start, flips.into_iter().collect());
        }
    }
    apply_errors(&full, &edits)
}

/// Uniform subset of `{1..m}` over all subsets of size `<= bound` (sizes
/// weighted by their counts so the draw is uniform over the union).
fn random_bounded_subset(rng: &mut ChaCha8Rng, m: usize, bound: usize) -> Vec<usize> {
    let weights: Vec<u128> = (0..=bound).map(|k| binomial(m, k)).collect();
    let total: u128 = weights.iter().sum();
    let mut pick = rng.gen_range(0..total);
    let mut size = 0usize;
    for (idx, &wgt) in weights.iter().enumerate() {
        if pick < wgt {
            size = idx;
            break;
        }
        pick -= wgt;
    }
    random_subset(rng, m, size)
}

/// Uniform `k`-subset of `{1..m}` via partial Fisher-Yates; sorted ascending.
fn random_subset(rng: &mut ChaCha8Rng, m: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (1..=m).collect();
    for i in 0..k {
        let j = Uniform::from(i..m).sample(rng);
        idx.swap(i, j);
    }
    let mut chosen = idx[..k].to_vec();
    chosen.sort_unstable();
    chosen
}

/// All `k`-subsets of `{1..m}` in lexicographic order.
fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for v in start..=(m + 1 - need) {
            cur.push(v);
            rec(m, k, v + 1, cur, out);
            cur.pop();
        }
    }
    rec(m, k, 1, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn read_strings(s: &Spectrum) -> Vec<String> {
        s.reads().iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn six_spectrum_of_the_first_worked_example() {
        let x = bs("0100000111011111");
        let s = multispectrum(&x, 6).unwrap();
        assert_eq!(s.len(), 11);
        let mut expect = vec![
            "010000", "100000", "000001", "000011", "000111", "001110", "011101", "111011",
            "110111", "101111", "011111",
        ];
        expect.sort();
        assert_eq!(read_strings(&s), expect);
    }

    #[test]
    fn ten_spectrum_of_the_substitution_example() {
        let x = bs("1011100010110111");
        let s = multispectrum(&x, 10).unwrap();
        assert_eq!(s.len(), 7);
        let mut expect = vec![
            "1011100010",
            "0111000101",
            "1110001011",
            "1100010110",
            "1000101101",
            "0001011011",
            "0010110111",
        ];
        expect.sort();
        assert_eq!(read_strings(&s), expect);
    }

    #[test]
    fn full_window_spectrum_is_singleton() {
        let w = bs("101101");
        let s = multispectrum(&w, w.len()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.reads()[0], w);
        assert!(multispectrum(&w, 7).is_err());
        assert!(multispectrum(&w, 0).is_err());
    }

    #[test]
    fn losses_drop_the_named_positions() {
        let x = bs("0100000111011111");
        let full = multispectrum(&x, 8).unwrap();
        assert_eq!(full.len(), 9);

        let u1 = apply_losses(&full, &BTreeSet::from([1, 5, 6]));
        assert_eq!(u1.len(), 6);
        let prov: BTreeSet<usize> = u1.provenance().unwrap().iter().copied().collect();
        assert_eq!(prov, BTreeSet::from([2, 3, 4, 7, 8, 9]));

        let u2 = apply_losses(&full, &BTreeSet::from([2, 3, 5, 6]));
        assert_eq!(u2.len(), 5);

        let untouched = apply_losses(&full, &BTreeSet::new());
        assert_eq!(untouched, full);
    }

    #[test]
    fn losses_then_readding_restores_the_multiset() {
        let x = bs("0100000111011111");
        let full = multispectrum(&x, 8).unwrap();
        let drops = BTreeSet::from([2, 4, 9]);
        let lossy = apply_losses(&full, &drops);
        let mut pairs: Vec<(usize, BitString)> = lossy
            .reads()
            .iter()
            .zip(lossy.provenance().unwrap())
            .map(|(r, &p)| (p, r.clone()))
            .collect();
        for &d in &drops {
            pairs.push((d, x.window(d, 8).unwrap()));
        }
        assert_eq!(Spectrum::from_positioned_reads(pairs).unwrap(), full);
    }

    #[test]
    fn errors_flip_and_unflip() {
        let x = bs("1011100010110111");
        let full = multispectrum(&x, 10).unwrap();
        let edits = BTreeMap::from([
            (1, BTreeSet::from([1])),
            (3, BTreeSet::from([3])),
            (4, BTreeSet::from([7])),
        ]);
        let noisy = apply_errors(&full, &edits).unwrap();
        assert_ne!(noisy, full);
        assert!(noisy.erroneous_membership(&x, 3, 1));
        assert!(!noisy.erroneous_membership(&x, 2, 1));

        // Flipping the same positions again is an involution.
        let back = apply_errors(&noisy, &edits).unwrap();
        assert_eq!(back, full);

        let empty = apply_errors(&full, &BTreeMap::new()).unwrap();
        assert_eq!(empty, full);

        let bad = apply_errors(&full, &BTreeMap::from([(1, BTreeSet::from([11]))]));
        assert!(bad.is_err());
    }

    #[test]
    fn loss_ball_counts() {
        let x = bs("0100000111011111");
        let t1 = enumerate_loss_subsets(&x, 8, 1, 100_000, 0).unwrap();
        assert_eq!(t1.len(), 10); // C(9,0) + C(9,1)
        let t3 = enumerate_loss_subsets(&x, 8, 3, 100_000, 0).unwrap();
        assert_eq!(t3.len(), 130); // 1 + 9 + 36 + 84
        let t0 = enumerate_loss_subsets(&x, 8, 0, 100_000, 0).unwrap();
        assert_eq!(t0.len(), 1);
        assert_eq!(t0[0], multispectrum(&x, 8).unwrap());
    }

    #[test]
    fn loss_ball_sampling_is_deterministic_and_distinct() {
        let x = bs("0110100110010110");
        // Ball at t=4 has 1+9+36+84+126 = 256 members; cap below that forces
        // sampling.
        let a = enumerate_loss_subsets(&x, 8, 4, 50, 7).unwrap();
        let b = enumerate_loss_subsets(&x, 8, 4, 50, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        let distinct: HashSet<Vec<String>> = a
            .iter()
            .map(|s| s.reads().iter().map(|r| r.to_string()).collect())
            .collect();
        assert_eq!(distinct.len(), 50);
        let c = enumerate_loss_subsets(&x, 8, 4, 50, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn erroneous_sampling_contract() {
        let x = bs("0100000111011111");
        let clean = multispectrum(&x, 8).unwrap();
        assert_eq!(sample_erroneous(&x, 8, 0, 2, 3).unwrap(), clean);
        assert_eq!(sample_erroneous(&x, 8, 2, 0, 3).unwrap(), clean);

        for seed in 0..50 {
            let u = sample_erroneous(&x, 8, 2, 1, seed).unwrap();
            assert!(u.erroneous_membership(&x, 2, 1), "seed {seed}");
        }
        let a = sample_erroneous(&x, 8, 2, 1, 9).unwrap();
        let b = sample_erroneous(&x, 8, 2, 1, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn text_roundtrip() {
        let x = bs("1011100010110111");
        let s = multispectrum(&x, 10).unwrap();
        let text = s.to_text();
        assert!(text.starts_with("L=10\n"));
        let back = Spectrum::parse_text(&text).unwrap();
        assert_eq!(back, s);
        assert!(back.provenance().is_none());

        assert!(Spectrum::parse_text("").is_err());
        assert!(Spectrum::parse_text("L=\n01\n").is_err());
        assert!(Spectrum::parse_text("L=3\n01\n").is_err());
        assert!(Spectrum::parse_text("L=2\n01\n02\n").is_err());
    }

    #[test]
    fn duplicate_lines_carry_multiplicity() {
        let text = "L=3\n010\n010\n111\n";
        let s = Spectrum::parse_text(text).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(read_strings(&s), vec!["010", "010", "111"]);
    }

    #[test]
    fn spectra_determine_substring_unique_strings_small() {
        // Strings whose (L-1)-windows are pairwise distinct share their
        // L-multispectrum with no other string; exhaustive at n = 9, L = 4.
        let (n, big_l) = (9usize, 4usize);
        let mut by_spectrum: HashMap<Spectrum, Vec<u64>> = HashMap::new();
        for v in 0..(1u64 << n) {
            let w = BitString::from_u64_msb(v, n);
            let s = multispectrum(&w, big_l).unwrap();
            by_spectrum.entry(s).or_default().push(v);
        }
        for (spec, members) in &by_spectrum {
            if members.len() > 1 {
                for &v in members {
                    let w = BitString::from_u64_msb(v, n);
                    let (unique, _) =
                        crate::bits::is_substring_distant(&w, big_l - 1, 1).unwrap();
                    assert!(
                        !unique,
                        "{w} is ({},1)-substring distant yet shares spectrum {:?}",
                        big_l - 1,
                        spec.reads().len()
                    );
                }
            }
        }
    }
}
