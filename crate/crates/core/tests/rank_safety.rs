mod common;

use common::{collection_from, docs_strategy, rel_close, word_id};
use proptest::prelude::*;
use topk_core::baseline::{build_inverted, daat_topk, direct_scan_topk};
use topk_core::{
    top_k, Collection, Estimator, Index, Measure, MeasureParams, Mode, Query, ResultList, SearchConfig, Variant,
};

const MEASURES: [Measure; 3] = [Measure::Bm25, Measure::TfIdf, Measure::Lmds];
const MODES: [Mode; 2] = [Mode::Or, Mode::And];
const KS: [usize; 3] = [1, 3, 10];
const ABSENT: u32 = 1 << 20;

/// Query elements as word lists; words past the vocabulary never occur.
fn query_strategy(vocab: u8) -> impl Strategy<Value = Vec<Vec<u8>>> {
    let element = prop_oneof![
        3 => (0..vocab + 2).prop_map(|w| vec![w]),
        1 => prop::collection::vec(0..vocab, 2..=2),
    ];
    prop::collection::vec(element, 1..=3)
}

fn to_query(c: &Collection, words: &[Vec<u8>]) -> Query {
    let elements = words.iter().map(|e| e.iter().map(|&w| word_id(c, w).unwrap_or(ABSENT)).collect()).collect();
    Query::new(elements).unwrap()
}

fn assert_same(engine: &ResultList, oracle: &ResultList, what: &str) -> Result<(), TestCaseError> {
    prop_assert_eq!(engine.ids(), oracle.ids(), "{}", what);
    for (a, b) in engine.entries.iter().zip(&oracle.entries) {
        prop_assert!(rel_close(a.1, b.1, 1e-9), "{}: {} vs {}", what, a.1, b.1);
    }
    for w in engine.entries.windows(2) {
        prop_assert!(w[0].1 >= w[1].1, "{}: scores increase", what);
    }
    Ok(())
}

fn check_instance(docs: &[Vec<u8>], queries: &[Vec<Vec<u8>>]) -> Result<(), TestCaseError> {
    let indexes: Vec<Index> = Variant::ALL.iter().map(|&v| Index::build(collection_from(docs), v).unwrap()).collect();
    let c = indexes[0].collection();
    for words in queries {
        let query = to_query(c, words);
        let has_phrase = query.elements().iter().any(|e| e.len() > 1);
        for measure in MEASURES {
            let params = MeasureParams::new(measure);
            for mode in MODES {
                for k in KS {
                    let oracle = direct_scan_topk(c, &query, k, mode, &params).unwrap();
                    for idx in &indexes {
                        let variant = idx.variant();
                        if has_phrase && variant == Variant::D1R1 {
                            continue;
                        }
                        for est in Estimator::ALL.into_iter().filter(|e| e.supported_by(variant)) {
                            let cfg = SearchConfig::new(k, mode, params, est);
                            let (res, stats) = top_k(idx, &cfg, &query).unwrap();
                            let what = format!("{words:?} {measure} {mode} k={k} {variant} {est}");
                            assert_same(&res, &oracle, &what)?;
                            prop_assert!(stats.states_processed <= stats.heap_pushes + 1);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn engine_matches_direct_scan(
        docs in docs_strategy(64, 16),
        queries in prop::collection::vec(query_strategy(16), 1..=3),
    ) {
        check_instance(&docs, &queries)?;
    }

    #[test]
    fn skewed_small_vocabulary(
        docs in docs_strategy(24, 3),
        queries in prop::collection::vec(query_strategy(3), 1..=4),
    ) {
        check_instance(&docs, &queries)?;
    }

    #[test]
    fn postings_match_direct_scan(
        docs in docs_strategy(64, 16),
        terms in prop::collection::vec(prop::collection::vec(0u8..18, 1..=4), 1..=4),
    ) {
        let c = collection_from(&docs);
        let inv = build_inverted(&c);
        for words in &terms {
            let ids: Vec<u32> = words.iter().map(|&w| word_id(&c, w).unwrap_or(ABSENT)).collect();
            let q = Query::terms(&ids).unwrap();
            for measure in [Measure::Bm25, Measure::TfIdf, Measure::Lmds, Measure::Freq] {
                let p = MeasureParams::new(measure);
                for mode in MODES {
                    prop_assert_eq!(daat_topk(&inv, &q, 10, mode, &p).unwrap(), direct_scan_topk(&c, &q, 10, mode, &p).unwrap());
                }
            }
        }
    }

    #[test]
    fn restricted_variant_matches_full(
        docs in docs_strategy(64, 16),
        words in prop::collection::vec(0u8..16, 1..=3),
        k in 1usize..20,
    ) {
        let dr = Index::build(collection_from(&docs), Variant::DR).unwrap();
        let d1 = Index::build(collection_from(&docs), Variant::D1R1).unwrap();
        let ids: Vec<u32> = words.iter().map(|&w| word_id(dr.collection(), w).unwrap_or(ABSENT)).collect();
        let q = Query::terms(&ids).unwrap();
        for measure in MEASURES {
            for mode in MODES {
                for est in Estimator::ALL {
                    let cfg = SearchConfig::new(k, mode, measure, est);
                    prop_assert_eq!(top_k(&dr, &cfg, &q).unwrap().0, top_k(&d1, &cfg, &q).unwrap().0);
                }
            }
        }
    }

    #[test]
    fn exhaustive_count_dominates(
        docs in docs_strategy(32, 8),
        words in prop::collection::vec(0u8..8, 1..=3),
        k in 1usize..8,
    ) {
        let idx = Index::build(collection_from(&docs), Variant::DR).unwrap();
        let ids: Vec<u32> = words.iter().map(|&w| word_id(idx.collection(), w).unwrap_or(ABSENT)).collect();
        let q = Query::terms(&ids).unwrap();
        for est in Estimator::ALL {
            let cfg = SearchConfig::new(k, Mode::Or, Measure::Bm25, est);
            let all = topk_core::exhaustive_states(&idx, &cfg, &q).unwrap();
            prop_assert!(top_k(&idx, &cfg, &q).unwrap().1.states_processed <= all);
        }
    }
}

#[test]
fn running_example_configurations() {
    let docs = vec![vec![0, 1, 0], vec![1, 0, 0, 0], vec![1, 1, 0]];
    let queries = vec![vec![vec![0]], vec![vec![1]], vec![vec![0], vec![1]], vec![vec![0, 0]], vec![vec![1], vec![7]]];
    check_instance(&docs, &queries).unwrap();
}
