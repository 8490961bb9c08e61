//! Rank/select bitvectors and balanced wavelet trees.

mod bits;
mod wavelet;

pub use bits::{BitsBuilder, RankSelectBits};
pub use wavelet::{NodeHandle, NodeRange, WaveletTree};
