//! Suffix array and LCP array over the token sequence.
//!
//! Stands in for a compressed suffix array: callers only need the locus of a
//! pattern as an SA range and extraction of text.

use std::cmp::Ordering;
use std::io::{Read, Write};

use crate::codec;
use crate::corpus::SENTINEL;
use crate::error::{Error, Result};

pub(crate) const SA_TAG: &[u8; 4] = b"SRFS";
pub(crate) const LCP_TAG: &[u8; 4] = b"SRFL";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixArray {
    sa: Vec<usize>,
}

impl SuffixArray {
    /// Sorts all suffixes of `text` by prefix doubling with radix passes.
    ///
    /// `text` must end with a sentinel `0` occurring nowhere else.
    pub fn build(text: &[u32]) -> Result<Self> {
        let n = text.len();
        if n == 0 || text[n - 1] != SENTINEL || text[..n - 1].contains(&SENTINEL) {
            return Err(Error::MissingSentinel);
        }
        let sigma = *text.iter().max().unwrap() as usize + 1;
        let mut sa: Vec<usize> = (0..n).collect();
        counting_sort(&mut sa, sigma, |i| text[i] as usize);
        let mut rank = vec![0usize; n];
        let mut classes = 1;
        for w in 1..n {
            if text[sa[w]] != text[sa[w - 1]] {
                classes += 1;
            }
            rank[sa[w]] = classes - 1;
        }
        let mut tmp = vec![0usize; n];
        let mut next_rank = vec![0usize; n];
        let mut k = 1;
        while classes < n {
            // order by the second half: suffixes without one come first
            let mut p = 0;
            for i in n - k..n {
                tmp[p] = i;
                p += 1;
            }
            for &s in &sa {
                if s >= k {
                    tmp[p] = s - k;
                    p += 1;
                }
            }
            // stable pass on the first half
            let mut count = vec![0usize; classes + 1];
            for &s in &tmp {
                count[rank[s] + 1] += 1;
            }
            for c in 1..count.len() {
                count[c] += count[c - 1];
            }
            for &s in &tmp {
                sa[count[rank[s]]] = s;
                count[rank[s]] += 1;
            }
            let second = |i: usize, rank: &[usize]| if i + k < n { rank[i + k] as isize } else { -1 };
            next_rank[sa[0]] = 0;
            classes = 1;
            for w in 1..n {
                let (a, b) = (sa[w - 1], sa[w]);
                if rank[a] != rank[b] || second(a, &rank) != second(b, &rank) {
                    classes += 1;
                }
                next_rank[b] = classes - 1;
            }
            std::mem::swap(&mut rank, &mut next_rank);
            k *= 2;
        }
        Ok(Self { sa })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.sa
    }

    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    /// Inclusive SA range of suffixes prefixed by `pattern`, if any.
    pub fn locus(&self, text: &[u32], pattern: &[u32]) -> Option<(usize, usize)> {
        if pattern.is_empty() {
            return None;
        }
        let cmp = |i: usize| {
            let s = self.sa[i];
            let end = (s + pattern.len()).min(text.len());
            text[s..end].cmp(pattern)
        };
        let lo = partition_point(self.sa.len(), |i| cmp(i) == Ordering::Less);
        let hi = partition_point(self.sa.len(), |i| cmp(i) != Ordering::Greater);
        (lo < hi).then(|| (lo, hi - 1))
    }

    pub fn size_in_bytes(&self) -> usize {
        self.sa.len() * 8
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, SA_TAG)?;
        codec::write_u64s(w, self.sa.iter().map(|&s| s as u64))
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::read_header(r, SA_TAG)?;
        let sa: Vec<usize> = codec::read_u64s(r)?.into_iter().map(|s| s as usize).collect();
        let mut seen = vec![false; sa.len()];
        for &s in &sa {
            if s >= sa.len() || std::mem::replace(&mut seen[s], true) {
                return Err(Error::Corrupt("suffix array is not a permutation".into()));
            }
        }
        Ok(Self { sa })
    }
}

fn partition_point(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

fn counting_sort(items: &mut [usize], keys: usize, key: impl Fn(usize) -> usize) {
    let mut count = vec![0usize; keys + 1];
    for &i in items.iter() {
        count[key(i) + 1] += 1;
    }
    for c in 1..count.len() {
        count[c] += count[c - 1];
    }
    let src = items.to_vec();
    for i in src {
        let k = key(i);
        items[count[k]] = i;
        count[k] += 1;
    }
}

/// `lcp[i]` is the longest common prefix of suffixes `sa[i-1]` and `sa[i]`;
/// `lcp[0] == 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcpArray {
    lcp: Vec<u32>,
}

impl LcpArray {
    /// Linear-time construction walking suffixes in text order.
    pub fn build(text: &[u32], sa: &SuffixArray) -> Self {
        let n = text.len();
        let sa = sa.as_slice();
        let mut inv = vec![0usize; n];
        for (i, &s) in sa.iter().enumerate() {
            inv[s] = i;
        }
        let mut lcp = vec![0u32; n];
        let mut h = 0usize;
        for pos in 0..n {
            let i = inv[pos];
            if i == 0 {
                h = 0;
                continue;
            }
            let prev = sa[i - 1];
            while pos + h < n && prev + h < n && text[pos + h] == text[prev + h] {
                h += 1;
            }
            lcp[i] = h as u32;
            h = h.saturating_sub(1);
        }
        Self { lcp }
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.lcp
    }

    pub fn len(&self) -> usize {
        self.lcp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lcp.is_empty()
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, LCP_TAG)?;
        codec::write_u32s(w, &self.lcp)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::read_header(r, LCP_TAG)?;
        Ok(Self { lcp: codec::read_u32s(r)? })
    }
}

/// `text[pos..pos + len]`.
pub fn extract(text: &[u32], pos: usize, len: usize) -> Result<&[u32]> {
    let end = pos.checked_add(len).filter(|&e| e <= text.len());
    match end {
        Some(end) => Ok(&text[pos..end]),
        None => Err(Error::OutOfBounds { pos: pos.saturating_add(len), len: text.len() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const RUNNING_C: [u32; 14] = [2, 3, 2, 1, 3, 2, 2, 2, 1, 3, 3, 2, 1, 0];

    fn naive_sa(text: &[u32]) -> Vec<usize> {
        let mut sa: Vec<usize> = (0..text.len()).collect();
        sa.sort_by(|&a, &b| text[a..].cmp(&text[b..]));
        sa
    }

    fn naive_lcp(text: &[u32], sa: &[usize]) -> Vec<u32> {
        let mut out = vec![0];
        for w in sa.windows(2) {
            let l = text[w[0]..].iter().zip(&text[w[1]..]).take_while(|(a, b)| a == b).count();
            out.push(l as u32);
        }
        out
    }

    fn count_occurrences(text: &[u32], pattern: &[u32]) -> usize {
        text.windows(pattern.len()).filter(|w| *w == pattern).count()
    }

    fn random_text(rng: &mut ChaCha8Rng, n: usize, sigma: u32) -> Vec<u32> {
        let mut t: Vec<u32> = (0..n - 1).map(|_| rng.random_range(1..sigma)).collect();
        t.push(0);
        t
    }

    #[test]
    fn running_example_sa_and_lcp() {
        let sa = SuffixArray::build(&RUNNING_C).unwrap();
        assert_eq!(sa.as_slice(), &[13, 12, 3, 8, 11, 2, 7, 6, 5, 0, 10, 1, 4, 9]);
        let lcp = LcpArray::build(&RUNNING_C, &sa);
        assert_eq!(lcp.as_slice(), &[0, 0, 1, 2, 0, 2, 3, 1, 2, 1, 0, 3, 2, 1]);
    }

    #[test]
    fn tiny_texts() {
        let sa = SuffixArray::build(&[0]).unwrap();
        assert_eq!(sa.as_slice(), &[0]);
        assert_eq!(LcpArray::build(&[0], &sa).as_slice(), &[0]);
        let sa = SuffixArray::build(&[2, 1, 0]).unwrap();
        assert_eq!(sa.as_slice(), &[2, 1, 0]);
        let text = [2, 2, 1, 0];
        let sa = SuffixArray::build(&text).unwrap();
        let lcp = LcpArray::build(&text, &sa);
        // suffixes "2 1 0" and "2 2 1 0" are adjacent and share one symbol
        assert_eq!(sa.as_slice(), &[3, 2, 1, 0]);
        assert_eq!(lcp.as_slice()[3], 1);
    }

    #[test]
    fn missing_sentinel_rejected() {
        assert!(matches!(SuffixArray::build(&[2, 1]), Err(Error::MissingSentinel)));
        assert!(matches!(SuffixArray::build(&[0, 2, 0]), Err(Error::MissingSentinel)));
        assert!(matches!(SuffixArray::build(&[]), Err(Error::MissingSentinel)));
    }

    #[test]
    fn running_example_loci() {
        let sa = SuffixArray::build(&RUNNING_C).unwrap();
        assert_eq!(sa.locus(&RUNNING_C, &[2]), Some((4, 9)));
        assert_eq!(sa.locus(&RUNNING_C, &[0]), Some((0, 0)));
        assert_eq!(sa.locus(&RUNNING_C, &[2, 1]), Some((4, 6)));
        assert_eq!(sa.locus(&RUNNING_C, &[3, 3, 3]), None);
        assert_eq!(sa.locus(&RUNNING_C, &[7]), None);
        assert_eq!(sa.locus(&RUNNING_C, &[]), None);
    }

    #[test]
    fn extraction() {
        assert_eq!(extract(&RUNNING_C, 0, 4).unwrap(), &[2, 3, 2, 1]);
        assert!(extract(&RUNNING_C, 5, 0).unwrap().is_empty());
        assert_eq!(extract(&RUNNING_C, 13, 1).unwrap(), &[0]);
        assert!(extract(&RUNNING_C, 13, 2).is_err());
        assert!(extract(&RUNNING_C, usize::MAX, 2).is_err());
    }

    #[test]
    fn matches_naive_oracle_on_large_text() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, sigma) in &[(10_000, 4), (10_000, 50), (3_000, 2)] {
            let text = random_text(&mut rng, n, sigma);
            let sa = SuffixArray::build(&text).unwrap();
            assert_eq!(sa.as_slice(), naive_sa(&text).as_slice());
        }
        // periodic text forces many doubling rounds
        let mut text: Vec<u32> = (0..2000).map(|i| 1 + (i % 3)).collect();
        text.push(0);
        let sa = SuffixArray::build(&text).unwrap();
        assert_eq!(sa.as_slice(), naive_sa(&text).as_slice());
        assert_eq!(LcpArray::build(&text, &sa).as_slice(), naive_lcp(&text, sa.as_slice()).as_slice());
    }

    #[test]
    fn locus_agrees_with_scan_on_random_patterns() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let text = random_text(&mut rng, 400, 6);
        let sa = SuffixArray::build(&text).unwrap();
        for _ in 0..1000 {
            let m = rng.random_range(1..=4);
            let pattern: Vec<u32> = (0..m).map(|_| rng.random_range(1..6)).collect();
            let occ = count_occurrences(&text, &pattern);
            match sa.locus(&text, &pattern) {
                Some((l, r)) => {
                    assert_eq!(r - l + 1, occ);
                    for &s in &sa.as_slice()[l..=r] {
                        assert!(text[s..].starts_with(&pattern));
                    }
                }
                None => assert_eq!(occ, 0),
            }
        }
    }

    #[test]
    fn serialization_round_trip() {
        let sa = SuffixArray::build(&RUNNING_C).unwrap();
        let mut buf = Vec::new();
        sa.write_to(&mut buf).unwrap();
        assert_eq!(SuffixArray::read_from(&mut buf.as_slice()).unwrap(), sa);
        buf[20] ^= 0xff;
        assert!(SuffixArray::read_from(&mut buf.as_slice()).is_err());
    }

    proptest! {
        #[test]
        fn sa_lcp_and_loci_match_brute_force(
            body in proptest::collection::vec(1u32..5, 0..512)
        ) {
            let mut text = body;
            text.push(0);
            let sa = SuffixArray::build(&text).unwrap();
            prop_assert_eq!(sa.as_slice(), &naive_sa(&text)[..]);
            let lcp = LcpArray::build(&text, &sa);
            prop_assert_eq!(lcp.as_slice(), &naive_lcp(&text, sa.as_slice())[..]);
            for m in 1..=3usize {
                for start in (0..text.len().saturating_sub(m)).step_by(7) {
                    let pattern = &text[start..start + m];
                    let (l, r) = sa.locus(&text, pattern).unwrap();
                    prop_assert_eq!(r - l + 1, count_occurrences(&text, pattern));
                }
            }
        }
    }
}
