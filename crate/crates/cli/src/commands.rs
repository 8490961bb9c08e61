use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context};
use rayon::prelude::*;
use topk_core::engine::check_query;
use topk_core::mwe::{format_units, mwe_parse as parse_mwe, parse_units};
use topk_core::{
    exhaustive_states, ingest, top_k, Collection, CollectionBuilder, Estimator, Index, Manifest, SearchConfig,
};

use crate::queryfile::{read_query_file, to_query};
use crate::{BenchArgs, BuildArgs, MweArgs, QueryArgs, StatsArgs};

pub const RUN_TAG: &str = "surf";
pub const BENCH_HEADER: &str = "qid,k,mode,measure,estimator,states,exhaustive_states,percent,elapsed_us";

/// Reads a file of one document per line, or a directory of one document
/// per file ordered by file name.
pub fn read_collection(path: &Path) -> anyhow::Result<Collection> {
    let meta = fs::metadata(path).with_context(|| format!("reading {}", path.display()))?;
    if meta.is_dir() {
        let mut files = Vec::new();
        for entry in fs::read_dir(path)? {
            let entry = entry?;
            if entry.file_type()?.is_file() {
                files.push(entry.path());
            }
        }
        files.sort();
        let mut b = CollectionBuilder::new();
        for f in &files {
            let body = fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
            let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            b.add_document(name, &body);
        }
        Ok(b.finish()?)
    } else {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(ingest(text.lines())?)
    }
}

pub fn build(a: &BuildArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let collection = read_collection(&a.input)?;
    let index = Index::build(collection, a.variant)?;
    let existed = a.output.exists();
    let manifest = match index.save(&a.output) {
        Ok(m) => m,
        Err(e) => {
            if !existed {
                let _ = fs::remove_dir_all(&a.output);
            }
            return Err(e).with_context(|| format!("writing {}", a.output.display()));
        }
    };
    let stats = index.collection().stats();
    writeln!(
        out,
        "variant={} documents={} tokens={} vocabulary={}",
        a.variant,
        stats.num_docs,
        stats.len,
        stats.sigma + 1
    )?;
    print_components(&manifest, raw_bits(index.collection()), out)
}

/// Bits of the token sequence at a fixed width of `ceil(log2 sigma)`.
fn raw_bits(c: &Collection) -> u64 {
    let symbols = c.stats().sigma as u64 + 1;
    let width = (64 - (symbols - 1).leading_zeros()).max(1) as u64;
    c.len() as u64 * width
}

fn print_components(manifest: &Manifest, raw_bits: u64, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut total = 0;
    for c in &manifest.components {
        let ratio = c.bytes as f64 * 8.0 / raw_bits as f64;
        writeln!(out, "{} {} {} bytes {:.3}x", c.tag, c.file, c.bytes, ratio)?;
        total += c.bytes;
    }
    writeln!(out, "total {} bytes {:.3}x", total, total as f64 * 8.0 / raw_bits as f64)?;
    Ok(())
}

pub fn query(a: &QueryArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let index = Index::load(&a.index).with_context(|| format!("loading {}", a.index.display()))?;
    let config = SearchConfig::new(a.k, a.mode, a.measure, a.estimator);
    config.validate(index.variant())?;
    let lines = read_query_file(&a.queries)?;
    let threshold = a.mwe.then_some(a.mwe_threshold);
    let mut queries = Vec::with_capacity(lines.len());
    for line in &lines {
        let q = to_query(&index, &line.units, threshold)?;
        check_query(index.variant(), &q)?;
        queries.push(q);
    }
    let runs: Vec<anyhow::Result<String>> = lines
        .par_iter()
        .zip(&queries)
        .map(|(line, q)| {
            let (res, _) = top_k(&index, &config, q)?;
            Ok(format_run(&index, &line.qid, &res))
        })
        .collect();
    for run in runs {
        out.write_all(run?.as_bytes())?;
    }
    Ok(())
}

/// TREC run lines `qid Q0 docname rank score surf`.
pub fn format_run(index: &Index, qid: &str, res: &topk_core::ResultList) -> String {
    let mut s = String::new();
    for (rank, &(doc, score)) in res.entries.iter().enumerate() {
        let name = index.collection().doc_name(doc);
        s.push_str(&format!("{qid} Q0 {name} {} {score:.6} {RUN_TAG}\n", rank + 1));
    }
    s
}

fn parse_cutoffs(ks: &[String], num_docs: usize) -> anyhow::Result<Vec<usize>> {
    ks.iter()
        .map(|k| match k.trim() {
            "N" | "n" | "all" => Ok(num_docs),
            v => v.parse::<usize>().with_context(|| format!("bad cutoff {v:?}")),
        })
        .collect()
}

pub fn bench(a: &BenchArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let index = Index::load(&a.index).with_context(|| format!("loading {}", a.index.display()))?;
    let variant = index.variant();
    let cutoffs = parse_cutoffs(&a.k, index.collection().num_docs())?;
    let estimators: Vec<Estimator> = if a.estimator.is_empty() {
        Estimator::ALL.into_iter().filter(|e| e.supported_by(variant)).collect()
    } else {
        a.estimator.clone()
    };
    for &k in &cutoffs {
        for &e in &estimators {
            SearchConfig::new(k, a.mode, a.measure, e).validate(variant)?;
        }
    }
    let lines = read_query_file(&a.queries)?;
    let mut csv: Box<dyn Write + '_> = match &a.csv {
        Some(path) => Box::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(&mut *out),
    };
    writeln!(csv, "{BENCH_HEADER}")?;
    for line in &lines {
        let q = to_query(&index, &line.units, None)?;
        check_query(variant, &q)?;
        for &k in &cutoffs {
            for &e in &estimators {
                let config = SearchConfig::new(k, a.mode, a.measure, e);
                let all = exhaustive_states(&index, &config, &q)?;
                let start = Instant::now();
                let (_, stats) = top_k(&index, &config, &q)?;
                let elapsed = start.elapsed().as_micros();
                let percent = if all == 0 { 0.0 } else { 100.0 * stats.states_processed as f64 / all as f64 };
                writeln!(
                    csv,
                    "{},{k},{},{},{e},{},{all},{percent:.6},{elapsed}",
                    line.qid, a.mode, a.measure, stats.states_processed
                )?;
            }
        }
    }
    csv.flush()?;
    Ok(())
}

pub fn stats(a: &StatsArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let index = Index::load(&a.index).with_context(|| format!("loading {}", a.index.display()))?;
    let manifest = Manifest::read(&a.index)?;
    let c = index.collection();
    let s = c.stats();
    writeln!(out, "variant={}", index.variant())?;
    writeln!(out, "documents={} tokens={} vocabulary={}", s.num_docs, s.len, s.sigma + 1)?;
    writeln!(out, "avg_length={:.3} min_length={} max_length={}", s.avg_len, s.min_len, s.max_len)?;
    let raw = raw_bits(c);
    writeln!(out, "raw_token_bits={raw}")?;
    if let Some(docs) = index.docs() {
        let wt = docs.wt();
        writeln!(
            out,
            "doc_tree bits_stored={} height={} ({} bytes)",
            wt.bits_stored(),
            wt.height(),
            wt.size_in_bytes()
        )?;
    }
    print_components(&manifest, raw, out)
}

pub fn mwe_parse(a: &MweArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let index = Index::load(&a.index).with_context(|| format!("loading {}", a.index.display()))?;
    let units = parse_units(&a.query)?;
    if a.threshold.is_nan() {
        bail!("threshold must be a number");
    }
    writeln!(out, "{}", format_units(&parse_mwe(&index, units, a.threshold)))?;
    Ok(())
}
