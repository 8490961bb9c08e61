//! Query files: one `qid<TAB>body` per line.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use topk_core::mwe::{mwe_parse, parse_units, unit_ids};
use topk_core::{Index, Query};

/// Stands in for words missing from the vocabulary; never occurs in a text.
pub const ABSENT_ID: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryLine {
    pub qid: String,
    pub units: Vec<Vec<String>>,
}

pub fn parse_query_file(text: &str) -> anyhow::Result<Vec<QueryLine>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let Some((qid, body)) = line.split_once('\t') else {
            bail!("line {}: expected qid<TAB>body", no + 1);
        };
        let qid = qid.trim().to_owned();
        if qid.is_empty() || qid.contains(char::is_whitespace) {
            bail!("line {}: bad qid {qid:?}", no + 1);
        }
        if !seen.insert(qid.clone()) {
            bail!("line {}: duplicate qid {qid}", no + 1);
        }
        let units = parse_units(body).with_context(|| format!("line {}", no + 1))?;
        if units.is_empty() {
            bail!("line {}: empty query", no + 1);
        }
        out.push(QueryLine { qid, units });
    }
    Ok(out)
}

pub fn read_query_file(path: &Path) -> anyhow::Result<Vec<QueryLine>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_query_file(&text)
}

/// Resolves words to ids; unknown words become [`ABSENT_ID`].
pub fn to_query(index: &Index, units: &[Vec<String>], mwe_threshold: Option<f64>) -> anyhow::Result<Query> {
    let units = match mwe_threshold {
        Some(t) => mwe_parse(index, units.to_vec(), t),
        None => units.to_vec(),
    };
    let elements = units.iter().map(|u| unit_ids(index, u).unwrap_or_else(|| vec![ABSENT_ID; u.len()])).collect();
    Ok(Query::new(elements)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines() {
        let q = parse_query_file("1\tLA\n\n2\tO \"LA #\"\n").unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q[1].units, vec![vec!["O".to_string()], vec!["LA".to_string(), "#".to_string()]]);
        assert!(parse_query_file("1 LA").is_err());
        assert!(parse_query_file("1\tLA\n1\tO").is_err());
        assert!(parse_query_file("1\t  ").is_err());
    }
}
