//! Self-index top-k document retrieval over wavelet trees.
//!
//! Documents are concatenated into one token sequence indexed by a suffix
//! array. A wavelet tree over the document array lets a best-first
//! traversal bound the score of whole groups of documents, so only a small
//! part of the tree is visited for a top-k query. Document-frequency and
//! repetition structures tighten those bounds.

pub mod baseline;
pub mod codec;
pub mod corpus;
pub mod docrep;
pub mod engine;
pub mod error;
pub mod index;
pub mod mwe;
pub mod ranking;
pub mod succinct;
pub mod suffixindex;

pub use corpus::{ingest, Collection, CollectionBuilder, CollectionStats, DocId};
pub use engine::{exhaustive_states, plan, top_k, Estimator, Mode, Query, ResultList, SearchConfig, TraversalStats};
pub use error::{Error, Result};
pub use index::{Index, Manifest, Variant};
pub use ranking::{Measure, MeasureParams};
