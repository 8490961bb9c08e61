//! Balanced, pointerless wavelet tree.
//!
//! Level `l` stores one bit per sequence element, with elements grouped by
//! their level-`l` node in symbol order. The bit for symbol `c` on level `l`
//! is bit `height - 1 - l` of `c`. Node `(l, i)` covers the symbols
//! `[i * 2^(height-l), (i+1) * 2^(height-l))`, so its segment in the level
//! bitvector starts at the number of elements with a smaller symbol. Those
//! prefix counts are the only auxiliary data kept besides the levels.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::bits::{BitsBuilder, RankSelectBits};
use crate::codec;
use crate::error::{Error, Result};

pub(crate) const WT_TAG: &[u8; 4] = b"SRFW";

/// Position of a node in the balanced tree: root is `(0, 0)`, leaves live on
/// level `height` and their index is the symbol they represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeHandle {
    pub level: u32,
    pub index: u64,
}

impl NodeHandle {
    pub const ROOT: NodeHandle = NodeHandle { level: 0, index: 0 };

    pub fn new(level: u32, index: u64) -> Self {
        Self { level, index }
    }

    /// Smallest symbol in the node's alphabet for a tree of the given height.
    #[inline]
    pub fn first_symbol(&self, height: u32) -> u64 {
        self.index << (height - self.level)
    }
}

/// Half-open interval of positions inside a node's filtered subsequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NodeRange {
    pub start: usize,
    pub end: usize,
}

impl NodeRange {
    pub const EMPTY: NodeRange = NodeRange { start: 0, end: 0 };

    #[inline]
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    /// Builds a range from inclusive bounds; `lo > hi` yields the empty range.
    pub fn inclusive(lo: usize, hi: usize) -> Self {
        if lo > hi {
            Self::EMPTY
        } else {
            Self { start: lo, end: hi + 1 }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Inclusive `(lo, hi)` bounds, or `None` when empty.
    pub fn bounds(&self) -> Option<(usize, usize)> {
        (!self.is_empty()).then(|| (self.start, self.end - 1))
    }
}

#[derive(Debug, Clone)]
pub struct WaveletTree {
    len: usize,
    sigma: u32,
    height: u32,
    levels: Vec<RankSelectBits>,
    // symbol_starts[c] = number of elements with symbol < c, for c in 0..=sigma
    symbol_starts: Vec<usize>,
}

fn height_for(sigma: u32) -> u32 {
    if sigma <= 1 {
        0
    } else {
        32 - (sigma - 1).leading_zeros()
    }
}

impl WaveletTree {
    pub fn new(seq: &[u32], sigma: u32) -> Result<Self> {
        if let Some((pos, &symbol)) = seq.iter().enumerate().find(|(_, &c)| c >= sigma) {
            return Err(Error::SymbolOutOfAlphabet { symbol, pos, sigma });
        }
        let height = height_for(sigma);
        let mut levels = Vec::with_capacity(height as usize);
        let mut cur = seq.to_vec();
        let mut next = Vec::with_capacity(seq.len());
        for level in 0..height {
            let shift = height - 1 - level;
            let mut bits = BitsBuilder::with_capacity(cur.len());
            for &c in &cur {
                bits.push((c >> shift) & 1 == 1);
            }
            levels.push(bits.finish());
            // stable split of every node segment into its left and right child
            next.clear();
            let mut i = 0;
            while i < cur.len() {
                let node = cur[i] >> (shift + 1);
                let mut j = i;
                while j < cur.len() && cur[j] >> (shift + 1) == node {
                    j += 1;
                }
                next.extend(cur[i..j].iter().filter(|&&c| (c >> shift) & 1 == 0));
                next.extend(cur[i..j].iter().filter(|&&c| (c >> shift) & 1 == 1));
                i = j;
            }
            std::mem::swap(&mut cur, &mut next);
        }
        let mut symbol_starts = vec![0usize; sigma as usize + 1];
        for &c in seq {
            symbol_starts[c as usize + 1] += 1;
        }
        for c in 1..symbol_starts.len() {
            symbol_starts[c] += symbol_starts[c - 1];
        }
        Ok(Self { len: seq.len(), sigma, height, levels, symbol_starts })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn root(&self) -> NodeHandle {
        NodeHandle::ROOT
    }

    #[inline]
    pub fn is_leaf(&self, v: NodeHandle) -> bool {
        v.level == self.height
    }

    pub fn bits_stored(&self) -> usize {
        self.levels.iter().map(RankSelectBits::len).sum()
    }

    pub fn expand(&self, v: NodeHandle) -> Result<(NodeHandle, NodeHandle)> {
        if v.level >= self.height {
            return Err(Error::ExpandLeaf { level: v.level });
        }
        Ok((NodeHandle::new(v.level + 1, 2 * v.index), NodeHandle::new(v.level + 1, 2 * v.index + 1)))
    }

    /// Symbols `[c_lo, c_hi]` covered by `v`, with `c_hi` clamped to `sigma - 1`.
    pub fn sym_range(&self, v: NodeHandle) -> (u64, u64) {
        let width = 1u64 << (self.height - v.level);
        let lo = v.index * width;
        let hi = (lo + width - 1).min(self.sigma.saturating_sub(1) as u64);
        (lo, hi)
    }

    #[inline]
    fn symbol_start(&self, c: u64) -> usize {
        self.symbol_starts[c.min(self.sigma as u64) as usize]
    }

    /// Offset of `v`'s segment in its level and the segment length.
    #[inline]
    fn segment(&self, v: NodeHandle) -> (usize, usize) {
        let width = 1u64 << (self.height - v.level);
        let lo = v.index * width;
        let start = self.symbol_start(lo);
        (start, self.symbol_start(lo + width) - start)
    }

    /// Length of the subsequence filtered by `v`'s alphabet.
    pub fn node_len(&self, v: NodeHandle) -> usize {
        self.segment(v).1
    }

    /// The whole-sequence range `[lo, hi]` at the root.
    pub fn root_range(&self, lo: usize, hi: usize) -> Result<NodeRange> {
        let r = NodeRange::inclusive(lo, hi);
        if r.end > self.len {
            return Err(Error::RangeOutOfNode { start: r.start, end: r.end, len: self.len });
        }
        Ok(r)
    }

    pub fn expand_range(&self, v: NodeHandle, r: NodeRange) -> Result<(NodeRange, NodeRange)> {
        if v.level >= self.height {
            return Err(Error::ExpandLeaf { level: v.level });
        }
        let (_, len) = self.segment(v);
        if r.end > len || r.start > r.end {
            return Err(Error::RangeOutOfNode { start: r.start, end: r.end, len });
        }
        Ok(self.expand_range_unchecked(v, r))
    }

    /// Maps `r` at inner node `v` to both children without bounds checks.
    #[inline]
    pub fn expand_range_unchecked(&self, v: NodeHandle, r: NodeRange) -> (NodeRange, NodeRange) {
        if r.is_empty() {
            return (NodeRange::EMPTY, NodeRange::EMPTY);
        }
        let bits = &self.levels[v.level as usize];
        let (start, _) = self.segment(v);
        let z0 = bits.rank0_unchecked(start);
        let za = bits.rank0_unchecked(start + r.start) - z0;
        let zb = bits.rank0_unchecked(start + r.end) - z0;
        (NodeRange::new(za, zb), NodeRange::new(r.start - za, r.end - zb))
    }

    /// Symbol at position `pos` of the original sequence.
    pub fn access(&self, pos: usize) -> Result<u32> {
        if pos >= self.len {
            return Err(Error::OutOfBounds { pos, len: self.len });
        }
        let mut v = NodeHandle::ROOT;
        let mut p = pos;
        while v.level < self.height {
            let bits = &self.levels[v.level as usize];
            let (start, _) = self.segment(v);
            let z0 = bits.rank0_unchecked(start);
            if bits.get(start + p) {
                p -= bits.rank0_unchecked(start + p) - z0;
                v = NodeHandle::new(v.level + 1, 2 * v.index + 1);
            } else {
                p = bits.rank0_unchecked(start + p) - z0;
                v = NodeHandle::new(v.level + 1, 2 * v.index);
            }
        }
        Ok(v.index as u32)
    }

    pub fn to_vec(&self) -> Vec<u32> {
        (0..self.len).map(|p| self.access(p).unwrap()).collect()
    }

    pub fn size_in_bytes(&self) -> usize {
        self.levels.iter().map(RankSelectBits::size_in_bytes).sum::<usize>() + self.symbol_starts.len() * 8
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, WT_TAG)?;
        w.write_u64::<LittleEndian>(self.len as u64)?;
        w.write_u32::<LittleEndian>(self.sigma)?;
        w.write_u32::<LittleEndian>(self.height)?;
        for level in &self.levels {
            level.write_to(w)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::read_header(r, WT_TAG)?;
        let len = codec::read_len(r)?;
        let sigma = r.read_u32::<LittleEndian>()?;
        let height = r.read_u32::<LittleEndian>()?;
        if height != height_for(sigma) {
            return Err(Error::Corrupt(format!("height {height} does not match sigma {sigma}")));
        }
        let mut levels = Vec::with_capacity(height as usize);
        for _ in 0..height {
            let level = RankSelectBits::read_from(r)?;
            if level.len() != len {
                return Err(Error::Corrupt("wavelet level length mismatch".into()));
            }
            levels.push(level);
        }
        let symbol_starts = Self::recover_symbol_starts(&levels, len, sigma, height)?;
        Ok(Self { len, sigma, height, levels, symbol_starts })
    }

    /// Recomputes per-symbol prefix counts by splitting node segments level
    /// by level, the same way the tree was laid out.
    fn recover_symbol_starts(levels: &[RankSelectBits], len: usize, sigma: u32, height: u32) -> Result<Vec<usize>> {
        // segment boundaries of every node on the current level
        let mut bounds = vec![0usize, len];
        for bits in levels {
            let mut next = Vec::with_capacity(bounds.len() * 2 - 1);
            for w in bounds.windows(2) {
                let zeros = bits.rank0_unchecked(w[1]) - bits.rank0_unchecked(w[0]);
                next.push(w[0]);
                next.push(w[0] + zeros);
            }
            next.push(len);
            bounds = next;
        }
        let mut starts = Vec::with_capacity(sigma as usize + 1);
        for c in 0..=sigma as usize {
            starts.push(*bounds.get(c).unwrap_or(&len));
        }
        // symbols >= sigma never occur, so the padded leaves must be empty
        if height > 0 && bounds[sigma as usize..].iter().any(|&b| b != len) {
            return Err(Error::Corrupt("wavelet tree holds symbols outside its alphabet".into()));
        }
        Ok(starts)
    }
}
