//! Exhaustive reference rankers: a direct scan over the token sequence and
//! a document-at-a-time inverted index. Both share the engine's tie policy.

use std::collections::BTreeMap;

use crate::corpus::{Collection, CollectionStats, DocId, FIRST_WORD_ID};
use crate::engine::{Mode, Query, ResultList};
use crate::error::{Error, Result};
use crate::ranking::{score, MeasureParams, QueryWeights};

/// Ascending `(doc, tf)` pairs for one term.
pub type PostingsList = Vec<(DocId, u32)>;

#[derive(Debug, Clone)]
pub struct InvertedIndex {
    postings: BTreeMap<u32, PostingsList>,
    lengths: Vec<u32>,
    stats: CollectionStats,
}

impl InvertedIndex {
    pub fn postings(&self, term: u32) -> Option<&PostingsList> {
        self.postings.get(&term)
    }

    pub fn num_terms(&self) -> usize {
        self.postings.len()
    }

    pub fn stats(&self) -> &CollectionStats {
        &self.stats
    }
}

/// Postings for every word id (terminators and the sentinel excluded).
pub fn build_inverted(collection: &Collection) -> InvertedIndex {
    let mut postings: BTreeMap<u32, PostingsList> = BTreeMap::new();
    for doc in 0..collection.num_docs() as DocId {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for &t in collection.doc_tokens(doc) {
            if t >= FIRST_WORD_ID {
                *counts.entry(t).or_default() += 1;
            }
        }
        for (t, tf) in counts {
            postings.entry(t).or_default().push((doc, tf));
        }
    }
    InvertedIndex { postings, lengths: collection.relabeling().lengths().to_vec(), stats: *collection.stats() }
}

fn eligible(mode: Mode, tfs: &[u64]) -> bool {
    match mode {
        Mode::Or => tfs.iter().any(|&f| f > 0),
        Mode::And => tfs.iter().all(|&f| f > 0),
    }
}

/// Merges the postings of single-token elements in document order and
/// scores every candidate.
pub fn daat_topk(
    inv: &InvertedIndex,
    query: &Query,
    k: usize,
    mode: Mode,
    params: &MeasureParams,
) -> Result<ResultList> {
    let mut lists = Vec::new();
    let mut terms = Vec::new();
    for (element, qf) in query.distinct() {
        let &[t] = element else {
            return Err(Error::InvalidQuery("postings answer single-token elements only".into()));
        };
        match inv.postings(t) {
            Some(list) => {
                lists.push(list.as_slice());
                terms.push((list.len() as u64, qf));
            }
            None if mode == Mode::And => return Ok(ResultList::default()),
            None => {}
        }
    }
    if lists.is_empty() || k == 0 {
        return Ok(ResultList::default());
    }
    let weights = QueryWeights::new(params, &inv.stats, &terms)?;
    let mut cursors = vec![0usize; lists.len()];
    let mut tfs = vec![0u64; lists.len()];
    let mut scored = Vec::new();
    loop {
        let next = lists.iter().zip(&cursors).filter_map(|(l, &c)| l.get(c).map(|p| p.0)).min();
        let Some(doc) = next else { break };
        for (i, list) in lists.iter().enumerate() {
            tfs[i] = match list.get(cursors[i]) {
                Some(&(d, tf)) if d == doc => {
                    cursors[i] += 1;
                    tf as u64
                }
                _ => 0,
            };
        }
        if eligible(mode, &tfs) {
            scored.push((doc, score(params, &inv.stats, &weights, &tfs, inv.lengths[doc as usize])));
        }
    }
    Ok(ResultList::from_scored(scored, k))
}

/// Occurrences of `pattern` in `tokens`, overlaps included.
pub fn count_occurrences(tokens: &[u32], pattern: &[u32]) -> u64 {
    if pattern.is_empty() || pattern.len() > tokens.len() {
        return 0;
    }
    tokens.windows(pattern.len()).filter(|w| *w == pattern).count() as u64
}

/// Scores every document by scanning its tokens; phrases are counted as
/// contiguous subsequences, overlaps included.
pub fn direct_scan_topk(
    collection: &Collection,
    query: &Query,
    k: usize,
    mode: Mode,
    params: &MeasureParams,
) -> Result<ResultList> {
    let n_docs = collection.num_docs();
    let mut per_element: Vec<(Vec<u64>, u32)> = Vec::new();
    for (element, qf) in query.distinct() {
        let tfs: Vec<u64> =
            (0..n_docs as DocId).map(|d| count_occurrences(collection.doc_tokens(d), element)).collect();
        if tfs.iter().all(|&f| f == 0) {
            if mode == Mode::And {
                return Ok(ResultList::default());
            }
            continue;
        }
        per_element.push((tfs, qf));
    }
    if per_element.is_empty() || k == 0 {
        return Ok(ResultList::default());
    }
    let terms: Vec<(u64, u32)> =
        per_element.iter().map(|(tfs, qf)| (tfs.iter().filter(|&&f| f > 0).count() as u64, *qf)).collect();
    let stats = collection.stats();
    let weights = QueryWeights::new(params, stats, &terms)?;
    let lengths = collection.relabeling();
    let mut tfs = vec![0u64; per_element.len()];
    let mut scored = Vec::new();
    for d in 0..n_docs {
        for (slot, (column, _)) in tfs.iter_mut().zip(&per_element) {
            *slot = column[d];
        }
        if eligible(mode, &tfs) {
            scored.push((d as DocId, score(params, stats, &weights, &tfs, lengths.len_of(d as DocId))));
        }
    }
    Ok(ResultList::from_scored(scored, k))
}
