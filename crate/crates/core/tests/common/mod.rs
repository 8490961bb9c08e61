#![allow(dead_code)]

use proptest::prelude::*;
use topk_core::{ingest, Collection};

/// Documents over words `w0..w{vocab-1}`, given as whitespace-joined lines.
pub fn lines_from(docs: &[Vec<u8>]) -> Vec<String> {
    docs.iter().map(|d| d.iter().map(|w| format!("w{w}")).collect::<Vec<_>>().join(" ")).collect()
}

pub fn collection_from(docs: &[Vec<u8>]) -> Collection {
    ingest(lines_from(docs)).unwrap()
}

/// Small collections: up to `max_docs` documents of up to 32 words over a
/// vocabulary of `vocab` words.
pub fn docs_strategy(max_docs: usize, vocab: u8) -> impl Strategy<Value = Vec<Vec<u8>>> {
    prop::collection::vec(prop::collection::vec(0..vocab, 0..=32), 1..=max_docs)
}

/// Ids of word `w{w}` in `c`, if it occurs.
pub fn word_id(c: &Collection, w: u8) -> Option<u32> {
    c.vocab().get(&format!("w{w}"))
}

/// Every distinct substring of length 1..=max_len of `text`.
pub fn distinct_substrings(text: &[u32], max_len: usize) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> =
        (1..=max_len).flat_map(|m| text.windows(m).map(<[u32]>::to_vec).collect::<Vec<_>>()).collect();
    out.sort();
    out.dedup();
    out
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}
