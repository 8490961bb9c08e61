mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{collection_from, distinct_substrings, docs_strategy};
use proptest::prelude::*;
use topk_core::baseline::count_occurrences;
use topk_core::docrep::TermRanges;
use topk_core::ranking::{bound, score};
use topk_core::succinct::{NodeHandle, NodeRange};
use topk_core::{plan, Collection, DocId, Index, Measure, MeasureParams, Mode, Query, Variant};

/// Document id of every suffix array position, computed from text positions.
fn doc_array(idx: &Index) -> Vec<DocId> {
    let owner = idx.collection().doc_of_positions();
    idx.suffix_array().as_slice().iter().map(|&p| owner[p]).collect()
}

fn tf(c: &Collection, doc: DocId, pattern: &[u32]) -> u64 {
    count_occurrences(c.doc_tokens(doc), pattern)
}

/// Visits every node reachable from the root ranges with non-empty document
/// range, passing the node, its symbol interval and the ranges there.
fn walk(idx: &Index, root: TermRanges, visit: &mut dyn FnMut(NodeHandle, (u64, u64), TermRanges, Option<TermRanges>)) {
    let docs = idx.docs().unwrap().wt();
    let reps = idx.reps().unwrap().wt();
    let mut stack = vec![(NodeHandle::ROOT, root, None)];
    while let Some((v, t, parent)) = stack.pop() {
        if t.docs.is_empty() {
            continue;
        }
        visit(v, docs.sym_range(v), t, parent);
        if docs.is_leaf(v) {
            continue;
        }
        let (dl, dr) = docs.expand_range(v, t.docs).unwrap();
        let (rl, rr) = reps.expand_range(v, t.reps).unwrap();
        let (l, r) = docs.expand(v).unwrap();
        stack.push((l, TermRanges { docs: dl, reps: rl }, Some(t)));
        stack.push((r, TermRanges { docs: dr, reps: rr }, Some(t)));
    }
}

fn root_ranges(idx: &Index, locus: (usize, usize)) -> TermRanges {
    let (a, b) = idx.doc_frequency().reps_range(locus.0, locus.1).unwrap();
    TermRanges { docs: NodeRange::inclusive(locus.0, locus.1), reps: idx.reps().unwrap().rhat_range(a, b) }
}

fn check_docrep(docs: &[Vec<u8>]) -> Result<(), TestCaseError> {
    let idx = Index::build(collection_from(docs), Variant::DR).unwrap();
    let c = idx.collection();
    let d = doc_array(&idx);
    prop_assert_eq!(idx.docs().unwrap().wt().to_vec(), d.clone());
    let keep = idx.reps().unwrap().keep();
    let owner = c.doc_of_positions();
    for pattern in distinct_substrings(c.text(), 3) {
        let Some((l, r)) = idx.locus(&pattern) else {
            return Err(TestCaseError::fail(format!("substring {pattern:?} not found")));
        };
        // occurrences are attributed to the document holding their first token
        let mut tf_by_doc = vec![0u64; c.num_docs()];
        for (p, w) in c.text().windows(pattern.len()).enumerate() {
            if w == pattern.as_slice() {
                tf_by_doc[owner[p] as usize] += 1;
            }
        }
        prop_assert_eq!((r - l + 1) as u64, tf_by_doc.iter().sum::<u64>());
        let distinct: BTreeSet<DocId> = d[l..=r].iter().copied().collect();
        prop_assert_eq!(idx.doc_frequency().doc_frequency(l, r).unwrap(), distinct.len() as u64);
        let (a, b) = idx.doc_frequency().reps_range(l, r).unwrap();
        for i in a..b {
            prop_assert!(keep.get(i), "dropped repetition inside {:?}", pattern);
        }
        walk(&idx, root_ranges(&idx, (l, r)), &mut |_, (lo, hi), t, parent| {
            let below: Vec<DocId> = d[l..=r].iter().copied().filter(|&x| (lo..=hi).contains(&(x as u64))).collect();
            let distinct_below = below.iter().collect::<BTreeSet<_>>().len();
            assert_eq!(t.docs.len() - t.reps.len(), distinct_below);
            let max_tf = (lo..=hi.min(c.num_docs() as u64 - 1)).map(|x| tf_by_doc[x as usize]).max().unwrap();
            assert!(t.delta() >= max_tf);
            if let Some(p) = parent {
                assert!(t.delta() <= p.delta());
            }
        });
    }
    Ok(())
}

/// Checks bound admissibility and parent dominance for every estimator
/// input choice at every reachable node.
fn check_bounds(docs: &[Vec<u8>], query: &[u32], measure: Measure) -> Result<(), TestCaseError> {
    let idx = Index::build(collection_from(docs), Variant::DR).unwrap();
    let c = idx.collection();
    let params = MeasureParams::new(measure);
    let q = Query::terms(query).unwrap();
    let Some(plan) = plan(&idx, &q, Mode::Or, &params).unwrap() else { return Ok(()) };
    let stats = c.stats();
    let lengths = c.relabeling();
    let height = idx.docs().unwrap().wt().height();
    let exact = |doc: DocId| -> Option<f64> {
        let tfs: Vec<u64> = plan.elements.iter().map(|e| tf(c, doc, &e.pattern)).collect();
        tfs.iter().any(|&f| f > 0).then(|| score(&params, stats, &plan.weights, &tfs, lengths.len_of(doc)))
    };
    let mut seen: BTreeMap<(u32, u64), Vec<TermRanges>> = BTreeMap::new();
    for e in &plan.elements {
        let root = root_ranges(&idx, e.locus);
        walk(&idx, root, &mut |v, _, t, _| seen.entry((v.level, v.index)).or_default().push(t));
    }
    let docs_wt = idx.docs().unwrap().wt();
    let mut bounds: BTreeMap<(u32, u64), [f64; 3]> = BTreeMap::new();
    for &(level, index) in seen.keys() {
        let v = NodeHandle::new(level, index);
        let mut ranges = Vec::new();
        for e in &plan.elements {
            let mut t = root_ranges(&idx, e.locus);
            // descend from the root to v
            for l in 0..level {
                let anc = NodeHandle::new(l, index >> (level - l));
                let bit = (index >> (level - l - 1)) & 1;
                let (dl, dr) = docs_wt.expand_range(anc, t.docs).unwrap();
                let (rl, rr) = idx.reps().unwrap().wt().expand_range(anc, t.reps).unwrap();
                t = if bit == 0 { TermRanges { docs: dl, reps: rl } } else { TermRanges { docs: dr, reps: rr } };
            }
            ranges.push(t);
        }
        let sizes: Vec<u64> = ranges.iter().map(|t| t.docs.len() as u64).collect();
        let deltas: Vec<u64> = ranges.iter().map(TermRanges::delta).collect();
        let node_min = lengths.min_doc_length(v, height);
        let b = [
            bound(&params, stats, &plan.weights, &sizes, stats.min_len),
            bound(&params, stats, &plan.weights, &sizes, node_min),
            bound(&params, stats, &plan.weights, &deltas, node_min),
        ];
        let (lo, hi) = docs_wt.sym_range(v);
        let best = (lo..=hi).filter_map(|x| exact(x as DocId)).fold(f64::NEG_INFINITY, f64::max);
        for (i, &bi) in b.iter().enumerate() {
            prop_assert!(bi >= best, "E{} bound {} below {} at {:?}", i, bi, best, v);
        }
        prop_assert!(b[1] <= b[0] && b[2] <= b[1], "estimators out of order at {:?}: {:?}", v, b);
        if level > 0 {
            if let Some(parent) = bounds.get(&(level - 1, index >> 1)) {
                for i in 0..3 {
                    let tol = 1e-12 * parent[i].abs();
                    prop_assert!(b[i] <= parent[i] + tol, "E{} child {} above parent {}", i, b[i], parent[i]);
                }
            }
        }
        bounds.insert((level, index), b);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn docrep_invariants(docs in docs_strategy(24, 6)) {
        check_docrep(&docs)?;
    }

    #[test]
    fn bounds_admissible_and_dominated(
        docs in docs_strategy(64, 16),
        words in prop::collection::vec(0u8..16, 1..=3),
        m in 0usize..3,
    ) {
        let c = collection_from(&docs);
        let query: Vec<u32> = words.iter().filter_map(|&w| common::word_id(&c, w)).collect();
        prop_assume!(!query.is_empty());
        check_bounds(&docs, &query, [Measure::Bm25, Measure::TfIdf, Measure::Lmds][m])?;
    }

    #[test]
    fn restricted_segments_match_df(docs in docs_strategy(48, 12)) {
        let idx = Index::build(collection_from(&docs), Variant::D1R1).unwrap();
        let c = idx.collection();
        let rx = idx.restricted().unwrap();
        for t in 2..=c.stats().sigma {
            let (l, r) = idx.locus(&[t]).unwrap();
            prop_assert_eq!(rx.segment(t).len() as u64, idx.doc_frequency().doc_frequency(l, r).unwrap());
        }
    }

    #[test]
    fn collection_round_trip(docs in docs_strategy(32, 10)) {
        let lines = common::lines_from(&docs);
        let c = collection_from(&docs);
        let mut pi = c.pi().to_vec();
        pi.sort_unstable();
        prop_assert_eq!(pi, (0..c.num_docs() as DocId).collect::<Vec<_>>());
        for (slot, line) in lines.iter().enumerate() {
            prop_assert_eq!(&c.detokenize_slot(slot), line);
            prop_assert_eq!(c.doc_name(c.pi()[slot]), (slot + 1).to_string());
        }
        let lengths = c.relabeling().lengths();
        prop_assert!(lengths.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn random_texts_df_equivalence() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let n_docs = rng.random_range(1..=24);
        let docs: Vec<Vec<u8>> =
            (0..n_docs).map(|_| (0..rng.random_range(0..=20)).map(|_| rng.random_range(0..5)).collect()).collect();
        check_docrep(&docs).unwrap();
    }
}
