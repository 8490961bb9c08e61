//! Similarity measures and their admissible upper bounds.
//!
//! A bound is the ordinary score evaluated with per-term frequency bounds
//! and the shortest document length below a node. Every measure here is
//! non-decreasing in each term frequency and non-increasing in document
//! length, and the arithmetic is arranged so that each floating-point step
//! is itself monotone in those inputs. Larger inputs therefore never round
//! to a smaller bound.

use std::fmt;
use std::str::FromStr;

use crate::corpus::CollectionStats;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Bm25,
    TfIdf,
    Lmds,
    /// Sum of raw term frequencies weighted by query multiplicity.
    Freq,
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bm25" => Ok(Measure::Bm25),
            "tfidf" => Ok(Measure::TfIdf),
            "lmds" => Ok(Measure::Lmds),
            "freq" | "tf" => Ok(Measure::Freq),
            other => Err(Error::InvalidConfig(format!("unknown measure {other:?}"))),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Bm25 => "bm25",
            Measure::TfIdf => "tfidf",
            Measure::Lmds => "lmds",
            Measure::Freq => "freq",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureParams {
    pub measure: Measure,
    pub k1: f64,
    pub b: f64,
    pub mu: f64,
    /// Replacement for non-positive BM25 query weights.
    pub epsilon: f64,
}

impl MeasureParams {
    pub fn new(measure: Measure) -> Self {
        Self { measure, k1: 1.2, b: 0.75, mu: 2500.0, epsilon: 1e-6 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.k1 > 0.0 && (0.0..=1.0).contains(&self.b) && self.mu > 0.0 && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid measure parameters {self:?}")))
        }
    }
}

impl From<Measure> for MeasureParams {
    fn from(measure: Measure) -> Self {
        Self::new(measure)
    }
}

/// `w_{Q,t}` for a term with collection document frequency `df` occurring
/// `query_freq` times in the query.
pub fn query_weight(params: &MeasureParams, stats: &CollectionStats, df: u64, query_freq: u32) -> Result<f64> {
    let n_docs = stats.num_docs as f64;
    let df_f = df as f64;
    match params.measure {
        Measure::Bm25 => {
            let w = query_freq as f64 * ((n_docs - df_f + 0.5) / (df_f + 0.5)).ln();
            Ok(if w > 0.0 { w } else { params.epsilon })
        }
        Measure::TfIdf if df == 0 => Err(Error::TermAbsent),
        Measure::TfIdf => Ok((1.0 + n_docs / df_f).ln()),
        Measure::Lmds if df == 0 => Err(Error::TermAbsent),
        Measure::Lmds | Measure::Freq => Ok(query_freq as f64),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermWeight {
    pub df: u64,
    pub query_freq: u32,
    pub weight: f64,
    // n / (mu * F), the per-occurrence scale inside the LMDS logarithm
    lm_scale: f64,
}

/// Document-independent parts of a query, fixed before traversal.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryWeights {
    terms: Vec<TermWeight>,
    /// Query length counting multiplicity.
    m: u32,
}

impl QueryWeights {
    /// `terms` holds `(F_{C,t}, f_{Q,t})` per distinct query element.
    pub fn new(params: &MeasureParams, stats: &CollectionStats, terms: &[(u64, u32)]) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for &(df, query_freq) in terms {
            let weight = query_weight(params, stats, df, query_freq)?;
            let lm_scale = if df > 0 { stats.len as f64 / (params.mu * df as f64) } else { 0.0 };
            out.push(TermWeight { df, query_freq, weight, lm_scale });
        }
        Ok(Self { m: terms.iter().map(|t| t.1).sum(), terms: out })
    }

    pub fn terms(&self) -> &[TermWeight] {
        &self.terms
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Scores a document with term frequencies `tfs` (aligned with
/// `weights.terms()`) and length `doc_len`. Terms with zero frequency add
/// nothing.
pub fn score(
    params: &MeasureParams,
    stats: &CollectionStats,
    weights: &QueryWeights,
    tfs: &[u64],
    doc_len: u32,
) -> f64 {
    debug_assert_eq!(tfs.len(), weights.terms.len());
    let terms = weights.terms.iter().zip(tfs).filter(|(_, &f)| f > 0);
    match params.measure {
        Measure::Bm25 => {
            let norm = params.k1 * ((1.0 - params.b) + params.b * (doc_len as f64 / stats.avg_len));
            let mut s = 0.0;
            for (t, &f) in terms {
                // (k1 + 1) f / (norm + f), written so every step is monotone
                let wd = (params.k1 + 1.0) / (norm / f as f64 + 1.0);
                s += wd * t.weight;
            }
            s
        }
        Measure::TfIdf => {
            let mut s = 0.0;
            for (t, &f) in terms {
                s += (1.0 + (f as f64).ln()) * t.weight;
            }
            s / doc_len as f64
        }
        Measure::Lmds => {
            let mut s = weights.m as f64 * (params.mu / (doc_len as f64 + params.mu)).ln();
            for (t, &f) in terms {
                s += (f as f64 * t.lm_scale).ln_1p() * t.weight;
            }
            s
        }
        Measure::Freq => terms.map(|(t, &f)| f as f64 * t.weight).sum(),
    }
}

/// Upper bound on every document score below a node, given admissible
/// per-term frequency bounds and the node's minimum document length.
#[inline]
pub fn bound(
    params: &MeasureParams,
    stats: &CollectionStats,
    weights: &QueryWeights,
    f_bounds: &[u64],
    min_len: u32,
) -> f64 {
    score(params, stats, weights, f_bounds, min_len)
}
