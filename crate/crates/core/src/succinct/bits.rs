//! Plain bitvector with constant-time rank and sampled select.
//!
//! Layout: raw 64-bit words, one cumulative popcount per 512-bit superblock,
//! and the superblock index of every 512th set bit for select.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::codec;
use crate::error::{Error, Result};

const WORDS_PER_SUPER: usize = 8;
const SELECT_SAMPLE: usize = 512;

pub(crate) const BITS_TAG: &[u8; 4] = b"SRFB";

#[derive(Debug, Default, Clone)]
pub struct BitsBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitsBuilder {
    pub fn with_capacity(bits: usize) -> Self {
        Self { words: Vec::with_capacity(bits.div_ceil(64)), len: 0 }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let off = self.len % 64;
        if off == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1 << off;
        }
        self.len += 1;
    }

    pub fn push_run(&mut self, bit: bool, count: usize) {
        for _ in 0..count {
            self.push(bit);
        }
    }

    pub fn finish(self) -> RankSelectBits {
        RankSelectBits::from_words(self.words, self.len)
    }
}

#[derive(Debug, Clone)]
pub struct RankSelectBits {
    words: Vec<u64>,
    len: usize,
    ones: usize,
    supers: Vec<u64>,
    select_samples: Vec<u32>,
}

impl RankSelectBits {
    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut b = BitsBuilder::default();
        for bit in bits {
            b.push(bit);
        }
        b.finish()
    }

    /// Parses a string of `0`/`1` characters, ignoring anything else.
    pub fn from_bit_str(s: &str) -> Self {
        Self::from_bools(s.chars().filter_map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        }))
    }

    fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.truncate(len.div_ceil(64));
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        let mut supers = Vec::with_capacity(words.len() / WORDS_PER_SUPER + 1);
        let mut select_samples = Vec::new();
        let mut acc = 0u64;
        for (sb, chunk) in words.chunks(WORDS_PER_SUPER).enumerate() {
            supers.push(acc);
            let here: u64 = chunk.iter().map(|w| w.count_ones() as u64).sum();
            // record each sample threshold crossed inside this superblock
            let mut next = select_samples.len() as u64 * SELECT_SAMPLE as u64;
            while next < acc + here {
                select_samples.push(sb as u32);
                next += SELECT_SAMPLE as u64;
            }
            acc += here;
        }
        supers.push(acc);
        Self { words, len, ones: acc as usize, supers, select_samples }
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
    pub fn ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        (self.words[pos / 64] >> (pos % 64)) & 1 == 1
    }

    pub fn try_get(&self, pos: usize) -> Result<bool> {
        if pos >= self.len {
            return Err(Error::OutOfBounds { pos, len: self.len });
        }
        Ok(self.get(pos))
    }

    /// Number of set bits in `[0, pos)`. Caller guarantees `pos <= len`.
    #[inline]
    pub fn rank1_unchecked(&self, pos: usize) -> usize {
        let word = pos / 64;
        let sb = word / WORDS_PER_SUPER;
        let mut count = self.supers[sb] as usize;
        for w in &self.words[sb * WORDS_PER_SUPER..word] {
            count += w.count_ones() as usize;
        }
        let off = pos % 64;
        if off != 0 {
            count += (self.words[word] & ((1u64 << off) - 1)).count_ones() as usize;
        }
        count
    }

    #[inline]
    pub fn rank0_unchecked(&self, pos: usize) -> usize {
        pos - self.rank1_unchecked(pos)
    }

    pub fn rank1(&self, pos: usize) -> Result<usize> {
        if pos > self.len {
            return Err(Error::OutOfBounds { pos, len: self.len });
        }
        Ok(self.rank1_unchecked(pos))
    }

    pub fn rank0(&self, pos: usize) -> Result<usize> {
        Ok(pos - self.rank1(pos)?)
    }

    /// Position of the set bit with zero-based rank `i`.
    pub fn select1(&self, i: usize) -> Result<usize> {
        if i >= self.ones {
            return Err(Error::SelectOutOfRange { rank: i, ones: self.ones });
        }
        let mut sb = self.select_samples[i / SELECT_SAMPLE] as usize;
        while self.supers[sb + 1] as usize <= i {
            sb += 1;
        }
        let mut remaining = i - self.supers[sb] as usize;
        let mut word = sb * WORDS_PER_SUPER;
        loop {
            let c = self.words[word].count_ones() as usize;
            if remaining < c {
                break;
            }
            remaining -= c;
            word += 1;
        }
        let mut w = self.words[word];
        for _ in 0..remaining {
            w &= w - 1;
        }
        Ok(word * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |p| self.get(p))
    }

    /// Bytes occupied by the raw bits plus acceleration tables.
    pub fn size_in_bytes(&self) -> usize {
        self.words.len() * 8 + self.supers.len() * 8 + self.select_samples.len() * 4
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, BITS_TAG)?;
        w.write_u64::<LittleEndian>(self.len as u64)?;
        for &word in &self.words {
            w.write_u64::<LittleEndian>(word)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::read_header(r, BITS_TAG)?;
        let len = codec::read_len(r)?;
        let mut words = vec![0u64; len.div_ceil(64)];
        r.read_u64_into::<LittleEndian>(&mut words)?;
        Ok(Self::from_words(words, len))
    }
}

impl PartialEq for RankSelectBits {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.words == other.words
    }
}

impl Eq for RankSelectBits {}
