//! Query bodies and multi-word expression detection.
//!
//! A query body is a whitespace-separated list of units; a unit is a word
//! or a double-quoted phrase. MWE parsing greedily fuses adjacent units
//! whose joint occurrence count is far above what independence predicts.

use crate::error::{Error, Result};
use crate::index::Index;

pub const DEFAULT_THRESHOLD: f64 = 10.0;

/// Splits a query body into units; quoted phrases become multi-word units.
pub fn parse_units(body: &str) -> Result<Vec<Vec<String>>> {
    let mut units = Vec::new();
    let mut rest = body;
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        if let Some(after) = rest.strip_prefix('"') {
            let end = after.find('"').ok_or_else(|| Error::InvalidQuery(format!("unterminated phrase in {body:?}")))?;
            let words: Vec<String> = after[..end].split_whitespace().map(str::to_owned).collect();
            if !words.is_empty() {
                units.push(words);
            }
            rest = &after[end + 1..];
        } else {
            let end = rest.find(|c: char| c.is_whitespace() || c == '"').unwrap_or(rest.len());
            units.push(vec![rest[..end].to_owned()]);
            rest = &rest[end..];
        }
    }
    Ok(units)
}

/// Inverse of [`parse_units`]: phrases are quoted, words are bare.
pub fn format_units(units: &[Vec<String>]) -> String {
    units
        .iter()
        .map(|u| if u.len() == 1 { u[0].clone() } else { format!("\"{}\"", u.join(" ")) })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Maps unit words to ids; `None` if any word is outside the vocabulary.
pub fn unit_ids(index: &Index, unit: &[String]) -> Option<Vec<u32>> {
    let vocab = index.collection().vocab();
    unit.iter().map(|w| vocab.get(w)).collect()
}

/// `count(ab) * n / (count(a) * count(b))`, zero when any count is zero.
pub fn association(index: &Index, a: &[u32], b: &[u32]) -> f64 {
    let ca = index.count(a);
    let cb = index.count(b);
    if ca == 0 || cb == 0 {
        return 0.0;
    }
    let joint: Vec<u32> = a.iter().chain(b).copied().collect();
    let cab = index.count(&joint);
    cab as f64 * index.collection().len() as f64 / (ca as f64 * cb as f64)
}

/// Repeatedly fuses the adjacent pair of highest association while it is at
/// least `threshold`. Ties go to the leftmost pair.
pub fn mwe_parse(index: &Index, units: Vec<Vec<String>>, threshold: f64) -> Vec<Vec<String>> {
    let mut units = units;
    let mut ids: Vec<Option<Vec<u32>>> = units.iter().map(|u| unit_ids(index, u)).collect();
    loop {
        let mut best: Option<(usize, f64)> = None;
        for i in 1..units.len() {
            let (Some(a), Some(b)) = (&ids[i - 1], &ids[i]) else { continue };
            let score = association(index, a, b);
            if score >= threshold && best.is_none_or(|(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        let Some((i, _)) = best else { break };
        let right = units.remove(i);
        units[i - 1].extend(right);
        let right_ids = ids.remove(i);
        if let (Some(left), Some(right)) = (&mut ids[i - 1], right_ids) {
            left.extend(right);
        }
    }
    units
}
