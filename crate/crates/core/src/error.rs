use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("position {pos} out of bounds for length {len}")]
    OutOfBounds { pos: usize, len: usize },

    #[error("select rank {rank} out of range: only {ones} set bits")]
    SelectOutOfRange { rank: usize, ones: usize },

    #[error("symbol {symbol} at position {pos} exceeds alphabet size {sigma}")]
    SymbolOutOfAlphabet { symbol: u32, pos: usize, sigma: u32 },

    #[error("cannot expand leaf node at level {level}")]
    ExpandLeaf { level: u32 },

    #[error("range [{start}, {end}) exceeds node length {len}")]
    RangeOutOfNode { start: usize, end: usize, len: usize },

    #[error("collection is empty: at least one document is required")]
    EmptyCollection,

    #[error("text must end with a unique sentinel symbol 0")]
    MissingSentinel,

    #[error("query term is absent from the collection")]
    TermAbsent,

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("corrupt index: {0}")]
    Corrupt(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
