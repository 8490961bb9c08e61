//! Rank-safe best-first top-k traversal of the document wavelet tree.
//!
//! A state pairs a tree node with one range per query element and an upper
//! bound on the score of every document below the node. States are popped
//! in bound order; a leaf's bound is its exact score, so when a leaf comes
//! off the queue no unseen document can beat it. Equal bounds are broken by
//! the node's first document id, which keeps emission order identical to a
//! full sort by (score desc, id asc).

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use crate::corpus::{CollectionStats, DocId, Relabeling};
use crate::docrep::TermRanges;
use crate::error::{Error, Result};
use crate::index::{Index, Variant};
use crate::ranking::{bound, MeasureParams, QueryWeights};
use crate::succinct::{NodeHandle, NodeRange, WaveletTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// At least one element must occur.
    Or,
    /// Every element must occur.
    And,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "or" => Ok(Mode::Or),
            "and" => Ok(Mode::And),
            other => Err(Error::InvalidConfig(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Or => "or",
            Mode::And => "and",
        })
    }
}

/// How inner-node term frequencies and document lengths are bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Estimator {
    /// Range size with the collection-wide shortest length.
    E0,
    /// Range size with the shortest length below the node.
    E1,
    /// Repetition count plus one with the shortest length below the node.
    E2,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Estimator::E0, Estimator::E1, Estimator::E2];

    pub fn supported_by(self, variant: Variant) -> bool {
        self != Estimator::E2 || variant.has_repetitions()
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e0" => Ok(Estimator::E0),
            "e1" => Ok(Estimator::E1),
            "e2" => Ok(Estimator::E2),
            other => Err(Error::InvalidConfig(format!("unknown estimator {other:?}"))),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::E0 => "e0",
            Estimator::E1 => "e1",
            Estimator::E2 => "e2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub k: usize,
    pub mode: Mode,
    pub params: MeasureParams,
    pub estimator: Estimator,
}

impl SearchConfig {
    pub fn new(k: usize, mode: Mode, params: impl Into<MeasureParams>, estimator: Estimator) -> Self {
        Self { k, mode, params: params.into(), estimator }
    }

    /// Checks the configuration against an index variant.
    pub fn validate(&self, variant: Variant) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be positive".into()));
        }
        if !self.estimator.supported_by(variant) {
            return Err(Error::InvalidConfig(format!(
                "estimator {} needs repetition structures, index variant is {variant}",
                self.estimator
            )));
        }
        self.params.validate()
    }
}

/// A bag of query elements: single terms or phrases, as token-id sequences.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Query {
    elements: Vec<Vec<u32>>,
}

impl Query {
    pub fn new(elements: Vec<Vec<u32>>) -> Result<Self> {
        if elements.is_empty() || elements.iter().any(Vec::is_empty) {
            return Err(Error::InvalidQuery("query elements must be non-empty".into()));
        }
        Ok(Self { elements })
    }

    /// Single-token elements.
    pub fn terms(ids: &[u32]) -> Result<Self> {
        Self::new(ids.iter().map(|&t| vec![t]).collect())
    }

    pub fn elements(&self) -> &[Vec<u32>] {
        &self.elements
    }

    /// Element count including duplicates.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Distinct elements in first-occurrence order with their multiplicity.
    pub fn distinct(&self) -> Vec<(&[u32], u32)> {
        let mut out: Vec<(&[u32], u32)> = Vec::new();
        for e in &self.elements {
            match out.iter_mut().find(|(x, _)| *x == e.as_slice()) {
                Some((_, count)) => *count += 1,
                None => out.push((e, 1)),
            }
        }
        out
    }
}

/// Top-k documents ordered by score descending, then id ascending.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultList {
    pub entries: Vec<(DocId, f64)>,
}

impl ResultList {
    /// Sorts arbitrary scored documents under the tie policy and keeps `k`.
    pub fn from_scored(mut scored: Vec<(DocId, f64)>, k: usize) -> Self {
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Self { entries: scored }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> Vec<DocId> {
        self.entries.iter().map(|e| e.0).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TraversalStats {
    /// States taken off the queue.
    pub states_processed: u64,
    /// Child states added to the queue.
    pub heap_pushes: u64,
    /// States processed when draining the queue (`k = N`), if measured.
    pub exhaustive_denominator: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedElement {
    pub pattern: Vec<u32>,
    pub locus: (usize, usize),
    pub df: u64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub elements: Vec<PlannedElement>,
    pub weights: QueryWeights,
}

/// Locates every element and fixes the query weights. `None` means the
/// result is empty (an absent element under AND, or all absent under OR).
pub fn plan(index: &Index, query: &Query, mode: Mode, params: &MeasureParams) -> Result<Option<Plan>> {
    if query.is_empty() {
        return Err(Error::InvalidQuery("empty query".into()));
    }
    let mut elements = Vec::new();
    for (pattern, multiplicity) in query.distinct() {
        match index.locus(pattern) {
            Some(locus) => {
                let df = index.doc_frequency().doc_frequency(locus.0, locus.1)?;
                elements.push(PlannedElement { pattern: pattern.to_vec(), locus, df, multiplicity });
            }
            None if mode == Mode::And => return Ok(None),
            None => {}
        }
    }
    if elements.is_empty() {
        return Ok(None);
    }
    let terms: Vec<(u64, u32)> = elements.iter().map(|e| (e.df, e.multiplicity)).collect();
    let weights = QueryWeights::new(params, index.collection().stats(), &terms)?;
    Ok(Some(Plan { elements, weights }))
}

struct State {
    bound: f64,
    node: NodeHandle,
    first_doc: u64,
    ranges: Box<[TermRanges]>,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for State {}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.first_doc.cmp(&self.first_doc))
            .then_with(|| self.node.level.cmp(&other.node.level))
    }
}

/// The trees a traversal walks in lockstep.
struct Trees<'a> {
    docs: &'a WaveletTree,
    reps: Option<&'a WaveletTree>,
    // document ranges hold distinct documents only (restricted variant)
    restricted: bool,
}

struct Traversal<'a> {
    trees: Trees<'a>,
    config: &'a SearchConfig,
    stats: &'a CollectionStats,
    lengths: &'a Relabeling,
    weights: &'a QueryWeights,
    height: u32,
    num_docs: u64,
    f_scratch: Vec<u64>,
}

impl Traversal<'_> {
    #[inline]
    fn tf_bound(&self, t: &TermRanges, leaf: bool) -> u64 {
        if self.trees.restricted {
            // a document range holds each document once
            if leaf || self.config.estimator == Estimator::E2 {
                t.delta()
            } else if t.docs.is_empty() {
                0
            } else {
                (t.docs.len() + t.reps.len()) as u64
            }
        } else if leaf || self.config.estimator != Estimator::E2 {
            t.docs.len() as u64
        } else {
            t.delta()
        }
    }

    fn viable(&self, ranges: &[TermRanges]) -> bool {
        match self.config.mode {
            Mode::Or => ranges.iter().any(|t| !t.docs.is_empty()),
            Mode::And => ranges.iter().all(|t| !t.docs.is_empty()),
        }
    }

    fn bound_for(&mut self, node: NodeHandle, ranges: &[TermRanges]) -> f64 {
        let leaf = node.level == self.height;
        self.f_scratch.clear();
        for t in ranges {
            let f = self.tf_bound(t, leaf);
            self.f_scratch.push(f);
        }
        let min_len = if leaf {
            self.lengths.len_of(node.index as DocId)
        } else {
            match self.config.estimator {
                Estimator::E0 => self.stats.min_len,
                Estimator::E1 | Estimator::E2 => self.lengths.min_doc_length(node, self.height),
            }
        };
        bound(&self.config.params, self.stats, self.weights, &self.f_scratch, min_len)
    }

    fn state(&mut self, node: NodeHandle, ranges: Box<[TermRanges]>) -> State {
        State { bound: self.bound_for(node, &ranges), node, first_doc: node.first_symbol(self.height), ranges }
    }

    fn run(&mut self, root_ranges: Box<[TermRanges]>) -> (ResultList, TraversalStats) {
        let mut stats = TraversalStats::default();
        let mut results = Vec::new();
        if !self.viable(&root_ranges) {
            return (ResultList::default(), stats);
        }
        let mut heap = BinaryHeap::new();
        let root = self.state(NodeHandle::ROOT, root_ranges);
        heap.push(root);
        while let Some(state) = heap.pop() {
            stats.states_processed += 1;
            if state.node.level == self.height {
                results.push((state.node.index as DocId, state.bound));
                if results.len() == self.config.k {
                    break;
                }
                continue;
            }
            let m = state.ranges.len();
            let mut left = Vec::with_capacity(m);
            let mut right = Vec::with_capacity(m);
            for t in state.ranges.iter() {
                let (dl, dr) = self.trees.docs.expand_range_unchecked(state.node, t.docs);
                let (rl, rr) = match self.trees.reps {
                    Some(reps) => reps.expand_range_unchecked(state.node, t.reps),
                    None => (NodeRange::EMPTY, NodeRange::EMPTY),
                };
                left.push(TermRanges { docs: dl, reps: rl });
                right.push(TermRanges { docs: dr, reps: rr });
            }
            let child_level = state.node.level + 1;
            for (index, ranges) in [(2 * state.node.index, left), (2 * state.node.index + 1, right)] {
                let node = NodeHandle::new(child_level, index);
                if node.first_symbol(self.height) >= self.num_docs || !self.viable(&ranges) {
                    continue;
                }
                let child = self.state(node, ranges.into_boxed_slice());
                // rounding may push a child a hair above its parent; harmless
                debug_assert!(child.bound <= state.bound + 4.0 * f64::EPSILON * state.bound.abs().max(1e-300));
                heap.push(child);
                stats.heap_pushes += 1;
            }
        }
        (ResultList { entries: results }, stats)
    }
}

/// Runs a planned query against `index`.
pub fn top_k_planned(index: &Index, config: &SearchConfig, plan: &Plan) -> Result<(ResultList, TraversalStats)> {
    config.validate(index.variant())?;
    let df = index.doc_frequency();
    let use_reps = config.estimator == Estimator::E2 || index.variant() == Variant::D1R1;
    let mut root_ranges = Vec::with_capacity(plan.elements.len());
    let trees = match index.variant() {
        Variant::D | Variant::DR => {
            let docs = index.docs().ok_or_else(|| Error::Corrupt("document tree missing".into()))?;
            let reps = if use_reps { index.reps() } else { None };
            for e in &plan.elements {
                let (l, r) = e.locus;
                let reps_range = match reps {
                    Some(reps) => {
                        let (a, b) = df.reps_range(l, r)?;
                        reps.rhat_range(a, b)
                    }
                    None => NodeRange::EMPTY,
                };
                root_ranges.push(TermRanges { docs: NodeRange::inclusive(l, r), reps: reps_range });
            }
            Trees { docs: docs.wt(), reps: reps.map(|r| r.wt()), restricted: false }
        }
        Variant::D1R1 => {
            let rx = index.restricted().ok_or_else(|| Error::Corrupt("restricted index missing".into()))?;
            for e in &plan.elements {
                let &[symbol] = e.pattern.as_slice() else {
                    return Err(Error::InvalidConfig("the d1r1 variant answers single-token elements only".into()));
                };
                let (a, b) = df.reps_range(e.locus.0, e.locus.1)?;
                root_ranges.push(TermRanges { docs: rx.segment(symbol), reps: rx.rhat_range(a, b) });
            }
            Trees { docs: rx.d1(), reps: Some(rx.rhat1()), restricted: true }
        }
    };
    let collection = index.collection();
    let mut traversal = Traversal {
        height: trees.docs.height(),
        trees,
        config,
        stats: collection.stats(),
        lengths: collection.relabeling(),
        weights: &plan.weights,
        num_docs: collection.num_docs() as u64,
        f_scratch: Vec::with_capacity(plan.elements.len()),
    };
    Ok(traversal.run(root_ranges.into_boxed_slice()))
}

/// Rejects phrase elements on the single-token variant, present or not.
pub fn check_query(variant: Variant, query: &Query) -> Result<()> {
    if variant == Variant::D1R1 && query.elements().iter().any(|e| e.len() > 1) {
        return Err(Error::InvalidConfig("the d1r1 variant answers single-token elements only".into()));
    }
    Ok(())
}

/// Plans and runs `query`; an empty plan yields an empty result.
pub fn top_k(index: &Index, config: &SearchConfig, query: &Query) -> Result<(ResultList, TraversalStats)> {
    config.validate(index.variant())?;
    check_query(index.variant(), query)?;
    match plan(index, query, config.mode, &config.params)? {
        Some(plan) => top_k_planned(index, config, &plan),
        None => Ok((ResultList::default(), TraversalStats::default())),
    }
}

/// States processed when the queue is drained (`k = N`).
pub fn exhaustive_states(index: &Index, config: &SearchConfig, query: &Query) -> Result<u64> {
    let full = SearchConfig { k: index.collection().num_docs(), ..*config };
    Ok(top_k(index, &full, query)?.1.states_processed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ingest;
    use crate::ranking::Measure;

    const RUNNING: [&str; 3] = ["LA O LA", "O LA LA LA", "O O LA"];

    fn running(variant: Variant) -> Index {
        Index::build(ingest(RUNNING).unwrap(), variant).unwrap()
    }

    #[test]
    fn plan_running_example() {
        let idx = running(Variant::DR);
        let p = MeasureParams::new(Measure::Bm25);
        let plan = plan(&idx, &Query::terms(&[2]).unwrap(), Mode::Or, &p).unwrap().unwrap();
        assert_eq!(plan.elements[0].locus, (4, 9));
        assert_eq!(plan.elements[0].df, 3);

        let phrase = Query::new(vec![vec![2, 1]]).unwrap();
        let plan2 = super::plan(&idx, &phrase, Mode::Or, &p).unwrap().unwrap();
        assert_eq!((plan2.elements[0].locus, plan2.elements[0].df), ((4, 6), 3));

        let absent = Query::terms(&[2, 99]).unwrap();
        assert!(super::plan(&idx, &absent, Mode::And, &p).unwrap().is_none());
        let or = super::plan(&idx, &absent, Mode::Or, &p).unwrap().unwrap();
        assert_eq!(or.elements.len(), 1);

        let dup = Query::terms(&[2, 3, 2]).unwrap();
        let plan3 = super::plan(&idx, &dup, Mode::Or, &p).unwrap().unwrap();
        assert_eq!(plan3.elements.iter().map(|e| e.multiplicity).collect::<Vec<_>>(), vec![2, 1]);
        assert_eq!(plan3.weights.m(), 3);
    }

    #[test]
    fn rejects_bad_configs() {
        let q = Query::terms(&[2]).unwrap();
        let zero = SearchConfig::new(0, Mode::Or, Measure::Bm25, Estimator::E0);
        assert!(top_k(&running(Variant::DR), &zero, &q).is_err());
        let e2 = SearchConfig::new(3, Mode::Or, Measure::Bm25, Estimator::E2);
        assert!(matches!(top_k(&running(Variant::D), &e2, &q), Err(Error::InvalidConfig(_))));
        let phrase = Query::new(vec![vec![2, 1]]).unwrap();
        assert!(matches!(top_k(&running(Variant::D1R1), &e2, &phrase), Err(Error::InvalidConfig(_))));
        let absent_phrase = Query::new(vec![vec![2], vec![9, 9]]).unwrap();
        assert!(matches!(top_k(&running(Variant::D1R1), &e2, &absent_phrase), Err(Error::InvalidConfig(_))));
        assert!(Query::new(vec![]).is_err());
        assert!(Query::new(vec![vec![]]).is_err());
    }

    #[test]
    fn frequency_measure_top2() {
        for variant in Variant::ALL {
            let idx = running(variant);
            for est in Estimator::ALL.into_iter().filter(|e| e.supported_by(variant)) {
                let cfg = SearchConfig::new(2, Mode::Or, Measure::Freq, est);
                let (res, stats) = top_k(&idx, &cfg, &Query::terms(&[2]).unwrap()).unwrap();
                assert_eq!(res.entries, vec![(3, 3.0), (1, 2.0)], "{variant} {est}");
                assert!(stats.states_processed <= stats.heap_pushes + 1);
            }
        }
    }

    #[test]
    fn or_query_skips_documents_without_term() {
        let idx = running(Variant::DR);
        let cfg = SearchConfig::new(4, Mode::Or, Measure::Bm25, Estimator::E2);
        let (res, _) = top_k(&idx, &cfg, &Query::terms(&[2]).unwrap()).unwrap();
        assert_eq!(res.len(), 3);
        assert!(!res.ids().contains(&0));
    }

    #[test]
    fn and_query_matches_all_three_documents() {
        let idx = running(Variant::DR);
        let cfg = SearchConfig::new(3, Mode::And, Measure::Bm25, Estimator::E1);
        let (res, _) = top_k(&idx, &cfg, &Query::terms(&[2, 3]).unwrap()).unwrap();
        let mut ids = res.ids();
        ids.sort_unstable();
        assert_eq!(ids, vec![1, 2, 3]);
        for w in res.entries.windows(2) {
            assert!(w[0].1 >= w[1].1);
        }
    }

    #[test]
    fn exhaustive_state_counts() {
        let idx = running(Variant::DR);
        let q = Query::terms(&[2]).unwrap();
        for est in Estimator::ALL {
            let cfg = SearchConfig::new(1, Mode::Or, Measure::Bm25, est);
            let all = exhaustive_states(&idx, &cfg, &q).unwrap();
            // viable nodes for LA: root, both level-1 nodes, leaves 1, 2, 3
            assert_eq!(all, 6);
            let (_, stats) = top_k(&idx, &cfg, &q).unwrap();
            assert!(stats.states_processed <= all);
        }
        let one = Index::build(ingest(["a"]).unwrap(), Variant::D).unwrap();
        let cfg = SearchConfig::new(1, Mode::Or, Measure::Bm25, Estimator::E0);
        assert!(exhaustive_states(&one, &cfg, &Query::terms(&[2]).unwrap()).unwrap() >= 1);
    }
}
