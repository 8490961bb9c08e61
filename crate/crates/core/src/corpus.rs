//! Text ingestion into the integer token sequence.
//!
//! Every document becomes its word ids followed by the terminator `1`; a
//! sentinel document holding the single symbol `0` closes the sequence.
//! Document ids are assigned by length so that the smallest id under any
//! wavelet-tree node also names its shortest document.

use std::collections::HashMap;
use std::io::{Read, Write};

use xxhash_rust::xxh3::xxh3_64;

use crate::codec;
use crate::error::{Error, Result};
use crate::succinct::NodeHandle;

pub const SENTINEL: u32 = 0;
pub const TERMINATOR: u32 = 1;
pub const FIRST_WORD_ID: u32 = 2;

pub(crate) const COLLECTION_TAG: &[u8; 4] = b"SRFC";
pub(crate) const VOCAB_TAG: &[u8; 4] = b"SRFV";

/// Document identifier after length relabeling.
pub type DocId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    ids: HashMap<String, u32>,
    tokens: Vec<String>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        let mut v = Self { ids: HashMap::new(), tokens: Vec::new() };
        v.tokens.push("$".into());
        v.tokens.push("#".into());
        v
    }
}

impl Vocabulary {
    /// Id of a word; the reserved `$` and `#` are never looked up as words.
    pub fn get(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }

    pub fn get_or_insert(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.tokens.len() as u32;
        self.ids.insert(word.to_owned(), id);
        self.tokens.push(word.to_owned());
        id
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    /// Number of assigned ids, including the two reserved symbols.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.len() <= FIRST_WORD_ID as usize
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, VOCAB_TAG)?;
        codec::write_len(w, self.tokens.len())?;
        for t in &self.tokens {
            codec::write_str(w, t)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::read_header(r, VOCAB_TAG)?;
        let len = codec::read_len(r)?;
        if len < FIRST_WORD_ID as usize {
            return Err(Error::Corrupt("vocabulary lacks reserved symbols".into()));
        }
        let mut v = Self::default();
        for _ in 0..2 {
            codec::read_str(r)?;
        }
        for _ in 2..len {
            let t = codec::read_str(r)?;
            v.get_or_insert(&t);
        }
        if v.len() != len {
            return Err(Error::Corrupt("duplicate vocabulary entry".into()));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectionStats {
    /// Number of documents, sentinel included.
    pub num_docs: usize,
    /// Total number of tokens.
    pub len: usize,
    pub avg_len: f64,
    pub min_len: u32,
    pub max_len: u32,
    /// Largest assigned word id.
    pub sigma: u32,
}

/// Document lengths indexed by relabeled id; non-decreasing, `L[0] == 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling {
    lengths: Vec<u32>,
}

impl Relabeling {
    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn len_of(&self, doc: DocId) -> u32 {
        self.lengths[doc as usize]
    }

    /// Length of the shortest document under `node` of a tree of `height`
    /// over document ids.
    #[inline]
    pub fn min_doc_length(&self, node: NodeHandle, height: u32) -> u32 {
        let first = node.first_symbol(height).min(self.lengths.len() as u64 - 1);
        self.lengths[first as usize]
    }
}

/// Assigns ids in non-decreasing length order, ties by slot order, with the
/// sentinel (last slot) pinned to id 0. Returns `pi` (slot to id) and `L`.
pub fn relabel_by_length(slot_lengths: &[u32]) -> (Vec<DocId>, Relabeling) {
    let sentinel = slot_lengths.len() - 1;
    let mut order: Vec<usize> = (0..slot_lengths.len()).collect();
    order.sort_by_key(|&s| (s != sentinel, slot_lengths[s], s));
    let mut pi = vec![0; slot_lengths.len()];
    let mut lengths = Vec::with_capacity(slot_lengths.len());
    for (id, &slot) in order.iter().enumerate() {
        pi[slot] = id as DocId;
        lengths.push(slot_lengths[slot]);
    }
    (pi, Relabeling { lengths })
}

#[derive(Debug, Default)]
pub struct CollectionBuilder {
    vocab: Vocabulary,
    text: Vec<u32>,
    slot_starts: Vec<usize>,
    names: Vec<String>,
}

impl CollectionBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends one document; tokens are split on whitespace.
    pub fn add_document(&mut self, name: impl Into<String>, body: &str) {
        self.slot_starts.push(self.text.len());
        self.names.push(name.into());
        for tok in body.split_whitespace() {
            let id = self.vocab.get_or_insert(tok);
            self.text.push(id);
        }
        self.text.push(TERMINATOR);
    }

    pub fn finish(mut self) -> Result<Collection> {
        if self.names.is_empty() {
            return Err(Error::EmptyCollection);
        }
        self.slot_starts.push(self.text.len());
        self.names.push("$".into());
        self.text.push(SENTINEL);
        Collection::from_parts(self.text, self.slot_starts, self.names, self.vocab)
    }
}

/// The concatenated token sequence with relabeled document ids.
#[derive(Debug, Clone)]
pub struct Collection {
    text: Vec<u32>,
    // start offset of every concatenation slot
    slot_starts: Vec<usize>,
    pi: Vec<DocId>,
    slot_of: Vec<usize>,
    // external names by concatenation slot
    slot_names: Vec<String>,
    relabeling: Relabeling,
    vocab: Vocabulary,
    stats: CollectionStats,
}

/// One document per line; documents are named by their 1-based line number.
pub fn ingest<I, S>(lines: I) -> Result<Collection>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut b = CollectionBuilder::new();
    for (i, line) in lines.into_iter().enumerate() {
        b.add_document((i + 1).to_string(), line.as_ref());
    }
    b.finish()
}

impl Collection {
    fn from_parts(text: Vec<u32>, slot_starts: Vec<usize>, slot_names: Vec<String>, vocab: Vocabulary) -> Result<Self> {
        let slots = slot_names.len();
        if slots < 2 || slot_starts.len() != slots || text.last() != Some(&SENTINEL) {
            return Err(Error::Corrupt("inconsistent collection layout".into()));
        }
        let mut slot_lengths = Vec::with_capacity(slots);
        for s in 0..slots {
            let end = slot_starts.get(s + 1).copied().unwrap_or(text.len());
            if end <= slot_starts[s] {
                return Err(Error::Corrupt("empty document slot".into()));
            }
            slot_lengths.push((end - slot_starts[s]) as u32);
        }
        if slot_lengths[slots - 1] != 1 {
            return Err(Error::Corrupt("sentinel document must be a single symbol".into()));
        }
        let (pi, relabeling) = relabel_by_length(&slot_lengths);
        let mut slot_of = vec![0; slots];
        for (s, &d) in pi.iter().enumerate() {
            slot_of[d as usize] = s;
        }
        let stats = CollectionStats {
            num_docs: slots,
            len: text.len(),
            avg_len: text.len() as f64 / slots as f64,
            min_len: relabeling.lengths[0],
            max_len: *relabeling.lengths.last().unwrap(),
            sigma: vocab.len() as u32 - 1,
        };
        Ok(Self { text, slot_starts, pi, slot_of, slot_names, relabeling, vocab, stats })
    }

    pub fn text(&self) -> &[u32] {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn num_docs(&self) -> usize {
        self.pi.len()
    }

    /// Slot-to-id permutation.
    pub fn pi(&self) -> &[DocId] {
        &self.pi
    }

    pub fn slot_starts(&self) -> &[usize] {
        &self.slot_starts
    }

    pub fn relabeling(&self) -> &Relabeling {
        &self.relabeling
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn stats(&self) -> &CollectionStats {
        &self.stats
    }

    pub fn doc_name(&self, doc: DocId) -> &str {
        &self.slot_names[self.slot_of[doc as usize]]
    }

    /// Tokens of document `doc`, terminator included.
    pub fn doc_tokens(&self, doc: DocId) -> &[u32] {
        let slot = self.slot_of[doc as usize];
        let end = self.slot_starts.get(slot + 1).copied().unwrap_or(self.text.len());
        &self.text[self.slot_starts[slot]..end]
    }

    /// Document id owning each text position.
    pub fn doc_of_positions(&self) -> Vec<DocId> {
        let mut out = Vec::with_capacity(self.text.len());
        for (slot, &doc) in self.pi.iter().enumerate() {
            let end = self.slot_starts.get(slot + 1).copied().unwrap_or(self.text.len());
            out.extend(std::iter::repeat_n(doc, end - self.slot_starts[slot]));
        }
        out
    }

    /// Maps a whitespace-separated string to ids; unknown words yield `None`.
    pub fn tokenize(&self, s: &str) -> Vec<Option<u32>> {
        s.split_whitespace().map(|w| self.vocab.get(w)).collect()
    }

    /// Reconstructs the input text of slot `slot` (terminator dropped).
    pub fn detokenize_slot(&self, slot: usize) -> String {
        let end = self.slot_starts.get(slot + 1).copied().unwrap_or(self.text.len());
        self.text[self.slot_starts[slot]..end]
            .iter()
            .filter(|&&t| t >= FIRST_WORD_ID)
            .map(|&t| self.vocab.token(t).unwrap_or("?"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// 64-bit checksum of the token sequence.
    pub fn fingerprint(&self) -> u64 {
        let bytes: Vec<u8> = self.text.iter().flat_map(|t| t.to_le_bytes()).collect();
        xxh3_64(&bytes)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        codec::write_header(w, COLLECTION_TAG)?;
        codec::write_u32s(w, &self.text)?;
        codec::write_u64s(w, self.slot_starts.iter().map(|&s| s as u64))?;
        codec::write_len(w, self.slot_names.len())?;
        for name in &self.slot_names {
            codec::write_str(w, name)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R, vocab: Vocabulary) -> Result<Self> {
        codec::read_header(r, COLLECTION_TAG)?;
        let text = codec::read_u32s(r)?;
        let slot_starts: Vec<usize> = codec::read_u64s(r)?.into_iter().map(|s| s as usize).collect();
        let count = codec::read_len(r)?;
        let mut names = Vec::with_capacity(count);
        for _ in 0..count {
            names.push(codec::read_str(r)?);
        }
        if text.iter().any(|&t| t as usize >= vocab.len()) {
            return Err(Error::Corrupt("token id outside vocabulary".into()));
        }
        Self::from_parts(text, slot_starts, names, vocab)
    }
}
