//! Document array, repetition structures and the length-1 restricted variant.
//!
//! For every pair of consecutive occurrences `P[i] < i` of the same document
//! in `D`, one repetition is charged to the internal node of the binary
//! suffix tree that joins them: the rightmost minimum of `LCP(P[i], i]`.
//! Internal node `j` sits between leaves `j - 1` and `j`, so the repetitions
//! inside a locus `[l, r]` are exactly those charged to nodes `l+1 ..= r`.
//!
//! `H` writes one leading 1 and then, per internal node, its repetition
//! count in unary followed by a 1. `R` lists the repetitions node by node.
//! `R̂` drops the nodes with an empty path label (`LCP == 0`), which no
//! non-empty pattern's locus can contain.

use std::io::{Read, Write};

use crate::codec;
use crate::corpus::{Collection, DocId};
use crate::error::{Error, Result};
use crate::succinct::{BitsBuilder, NodeRange, RankSelectBits, WaveletTree};
use crate::suffixindex::SuffixArray;

pub(crate) const DOCS_TAG: &[u8; 4] = b"SRFD";
pub(crate) const DF_TAG: &[u8; 4] = b"SRFH";
pub(crate) const REPS_TAG: &[u8; 4] = b"SRFR";
pub(crate) const RESTRICTED_TAG: &[u8; 4] = b"SRF1";

/// `D[i]` = document containing suffix `SA[i]`.
pub fn build_docarray(sa: &SuffixArray, collection: &Collection) -> Vec<DocId> {
    let owner = collection.doc_of_positions();
    sa.as_slice().iter().map(|&p| owner[p]).collect()
}

/// `P[i]` = previous position holding the same document, if any.
pub fn prev_occurrence(d: &[DocId]) -> Vec<Option<usize>> {
    let num_docs = d.iter().max().map_or(0, |&m| m as usize + 1);
    let mut last = vec![usize::MAX; num_docs];
    d.iter()
        .enumerate()
        .map(|(i, &doc)| {
            let prev = std::mem::replace(&mut last[doc as usize], i);
            (prev != usize::MAX).then_some(prev)
        })
        .collect()
}

/// Wavelet tree over the document array.
#[derive(Debug, Clone)]
pub struct DocArray {
    wt: WaveletTree,
}

impl DocArray {
    pub fn new(d: &[DocId], num_docs: usize) -> Result<Self> {
        Ok(Self { wt: WaveletTree::new(d, num_docs as u32)? })
    }

    pub fn wt(&self) -> &WaveletTree {
        &self.wt
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, DOCS_TAG)?;
        self.wt.write_to(w)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::read_header(r, DOCS_TAG)?;
        Ok(Self { wt: WaveletTree::read_from(r)? })
    }
}

/// Per-node repetition lists, the build-time source of `H`, `R` and `R̂`.
#[derive(Debug, Clone)]
pub struct RepetitionLists {
    // bucket j occupies values[starts[j]..starts[j + 1]]
    starts: Vec<usize>,
    values: Vec<DocId>,
    // LCP[j] > 0, i.e. the node has a non-empty path label
    labeled: Vec<bool>,
}

impl RepetitionLists {
    pub fn build(d: &[DocId], lcp: &[u32]) -> Self {
        assert_eq!(d.len(), lcp.len());
        let n = d.len();
        let prev = prev_occurrence(d);
        // stack of positions whose LCP is smaller than every LCP after them
        let mut stack: Vec<usize> = Vec::new();
        let mut charged: Vec<(u32, DocId)> = Vec::new();
        for i in 0..n {
            if i > 0 {
                while stack.last().is_some_and(|&t| lcp[t] >= lcp[i]) {
                    stack.pop();
                }
                stack.push(i);
            }
            if let Some(p) = prev[i] {
                let at = stack.partition_point(|&t| t <= p);
                charged.push((stack[at] as u32, d[i]));
            }
        }
        charged.sort_unstable();
        let mut starts = vec![0usize; n + 1];
        for &(j, _) in &charged {
            starts[j as usize + 1] += 1;
        }
        for j in 1..=n {
            starts[j] += starts[j - 1];
        }
        let values = charged.into_iter().map(|(_, doc)| doc).collect();
        let labeled = lcp.iter().map(|&l| l > 0).collect();
        Self { starts, values, labeled }
    }

    pub fn bucket(&self, j: usize) -> &[DocId] {
        &self.values[self.starts[j]..self.starts[j + 1]]
    }

    /// The repetition array `R`.
    pub fn r(&self) -> &[DocId] {
        &self.values
    }

    pub fn h(&self) -> RankSelectBits {
        let n = self.labeled.len();
        let mut b = BitsBuilder::with_capacity(n + self.values.len());
        b.push(true);
        for j in 1..n {
            b.push_run(false, self.bucket(j).len());
            b.push(true);
        }
        b.finish()
    }

    /// Marks the entries of `R` that survive into `R̂`.
    pub fn keep(&self) -> RankSelectBits {
        let mut b = BitsBuilder::with_capacity(self.values.len());
        for j in 0..self.labeled.len() {
            b.push_run(self.labeled[j], self.bucket(j).len());
        }
        b.finish()
    }

    pub fn rhat(&self) -> Vec<DocId> {
        (0..self.labeled.len()).filter(|&j| self.labeled[j]).flat_map(|j| self.bucket(j).iter().copied()).collect()
    }
}

/// Document-frequency structure: the `H` bitvector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocFrequency {
    h: RankSelectBits,
}

impl DocFrequency {
    pub fn new(h: RankSelectBits) -> Self {
        Self { h }
    }

    pub fn h(&self) -> &RankSelectBits {
        &self.h
    }

    /// Number of suffix-array positions covered.
    pub fn len(&self) -> usize {
        self.h.ones()
    }

    pub fn is_empty(&self) -> bool {
        self.h.ones() == 0
    }

    /// Half-open range of `R` holding the repetitions inside locus `[l, r]`.
    pub fn reps_range(&self, l: usize, r: usize) -> Result<(usize, usize)> {
        if l > r || r >= self.len() {
            return Err(Error::OutOfBounds { pos: r.max(l), len: self.len() });
        }
        Ok((self.h.select1(l)? - l, self.h.select1(r)? - r))
    }

    /// Distinct documents in `D[l..=r]`.
    pub fn doc_frequency(&self, l: usize, r: usize) -> Result<u64> {
        let (a, b) = self.reps_range(l, r)?;
        Ok((r - l + 1 - (b - a)) as u64)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, DF_TAG)?;
        self.h.write_to(w)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::read_header(r, DF_TAG)?;
        Ok(Self { h: RankSelectBits::read_from(r)? })
    }
}

/// Maps a half-open `R` range onto `R̂` through the keep bitvector.
fn map_to_rhat(keep: &RankSelectBits, a: usize, b: usize) -> NodeRange {
    NodeRange::new(keep.rank1_unchecked(a), keep.rank1_unchecked(b))
}

/// Wavelet tree over `R̂` together with the `R` to `R̂` mapping.
#[derive(Debug, Clone)]
pub struct RepetitionIndex {
    keep: RankSelectBits,
    wt: WaveletTree,
}

impl RepetitionIndex {
    pub fn new(lists: &RepetitionLists, num_docs: usize) -> Result<Self> {
        Ok(Self { keep: lists.keep(), wt: WaveletTree::new(&lists.rhat(), num_docs as u32)? })
    }

    pub fn wt(&self) -> &WaveletTree {
        &self.wt
    }

    pub fn keep(&self) -> &RankSelectBits {
        &self.keep
    }

    /// Root range in `R̂` for the `R` range `[a, b)`.
    pub fn rhat_range(&self, a: usize, b: usize) -> NodeRange {
        map_to_rhat(&self.keep, a, b)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, REPS_TAG)?;
        self.keep.write_to(w)?;
        self.wt.write_to(w)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::read_header(r, REPS_TAG)?;
        let keep = RankSelectBits::read_from(r)?;
        let wt = WaveletTree::read_from(r)?;
        if keep.ones() != wt.len() {
            return Err(Error::Corrupt("keep bitvector does not match R̂ length".into()));
        }
        Ok(Self { keep, wt })
    }
}

/// Per-term ranges carried through a parallel traversal of the document
/// tree and the repetition tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TermRanges {
    pub docs: NodeRange,
    pub reps: NodeRange,
}

impl TermRanges {
    /// Repetitions plus one: an upper bound on any single document's term
    /// frequency below the current node, exact at a leaf.
    #[inline]
    pub fn delta(&self) -> u64 {
        if self.docs.is_empty() {
            0
        } else {
            self.reps.len() as u64 + 1
        }
    }

    /// Term frequency at a leaf of the restricted trees, where the document
    /// range only records presence.
    #[inline]
    pub fn restricted_tf_leaf(&self) -> u64 {
        self.delta()
    }
}

/// Length-1 restricted index: per-symbol sorted distinct document lists
/// (`D¹`) and `R̂` with each symbol's span sorted (`R̂¹`).
#[derive(Debug, Clone)]
pub struct RestrictedIndex {
    // D¹ segment of symbol c is d1_starts[c]..d1_starts[c + 1]
    d1_starts: Vec<usize>,
    keep: RankSelectBits,
    d1: WaveletTree,
    rhat1: WaveletTree,
}

impl RestrictedIndex {
    /// `text` is the token sequence the suffix array was built over.
    pub fn build(
        d: &[DocId],
        text: &[u32],
        lists: &RepetitionLists,
        df: &DocFrequency,
        num_docs: usize,
    ) -> Result<Self> {
        let symbols = text.iter().max().map_or(0, |&m| m as usize + 1);
        // single-symbol loci are consecutive blocks of the suffix array
        let mut locus_starts = vec![0usize; symbols + 1];
        for &c in text {
            locus_starts[c as usize + 1] += 1;
        }
        for c in 1..=symbols {
            locus_starts[c] += locus_starts[c - 1];
        }
        let keep = lists.keep();
        let mut rhat1 = lists.rhat();
        let mut d1 = Vec::new();
        let mut d1_starts = Vec::with_capacity(symbols + 1);
        let mut stamp = vec![usize::MAX; num_docs];
        for c in 0..symbols {
            d1_starts.push(d1.len());
            let (l, r) = (locus_starts[c], locus_starts[c + 1]);
            if l == r {
                continue;
            }
            let seg_start = d1.len();
            for &doc in &d[l..r] {
                if std::mem::replace(&mut stamp[doc as usize], c) != c {
                    d1.push(doc);
                }
            }
            d1[seg_start..].sort_unstable();
            let (a, b) = df.reps_range(l, r - 1)?;
            let span = map_to_rhat(&keep, a, b);
            rhat1[span.start..span.end].sort_unstable();
        }
        d1_starts.push(d1.len());
        Ok(Self {
            d1_starts,
            keep,
            d1: WaveletTree::new(&d1, num_docs as u32)?,
            rhat1: WaveletTree::new(&rhat1, num_docs as u32)?,
        })
    }

    /// Root range of symbol `c`'s segment in `D¹`.
    pub fn segment(&self, c: u32) -> NodeRange {
        let c = c as usize;
        if c + 1 >= self.d1_starts.len() {
            return NodeRange::EMPTY;
        }
        NodeRange::new(self.d1_starts[c], self.d1_starts[c + 1])
    }

    pub fn rhat_range(&self, a: usize, b: usize) -> NodeRange {
        map_to_rhat(&self.keep, a, b)
    }

    pub fn d1(&self) -> &WaveletTree {
        &self.d1
    }

    pub fn rhat1(&self) -> &WaveletTree {
        &self.rhat1
    }

    pub fn size_in_bytes(&self) -> usize {
        self.d1_starts.len() * 8 + self.keep.size_in_bytes() + self.d1.size_in_bytes() + self.rhat1.size_in_bytes()
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, RESTRICTED_TAG)?;
        codec::write_u64s(w, self.d1_starts.iter().map(|&s| s as u64))?;
        self.keep.write_to(w)?;
        self.d1.write_to(w)?;
        self.rhat1.write_to(w)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::read_header(r, RESTRICTED_TAG)?;
        let d1_starts: Vec<usize> = codec::read_u64s(r)?.into_iter().map(|s| s as usize).collect();
        let keep = RankSelectBits::read_from(r)?;
        let d1 = WaveletTree::read_from(r)?;
        let rhat1 = WaveletTree::read_from(r)?;
        if d1_starts.last() != Some(&d1.len())
            || d1_starts.windows(2).any(|w| w[0] > w[1])
            || keep.ones() != rhat1.len()
        {
            return Err(Error::Corrupt("restricted index tables are inconsistent".into()));
        }
        Ok(Self { d1_starts, keep, d1, rhat1 })
    }
}
