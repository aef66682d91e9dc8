//! Readers and writers for the line-oriented metadata files: `is_a` edges
//! (`parent child`), image counts (`synset count`) and names
//! (`synset<TAB>name`).

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::SynsetId;

/// Parsed edge list. `duplicates` counts repeated lines that were dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IsaEdges {
    pub edges: Vec<(SynsetId, SynsetId)>,
    pub duplicates: usize,
}

/// Non-blank lines with their 1-based line numbers. `str::lines` already
/// strips a trailing `\r`.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn two_tokens<'a>(source: &str, line_no: usize, line: &'a str) -> Result<(&'a str, &'a str)> {
    let mut tokens = line.split_whitespace();
    match (tokens.next(), tokens.next(), tokens.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(Error::parse(
            source,
            line_no,
            format!("expected exactly two whitespace-separated fields, got `{line}`"),
        )),
    }
}

fn synset(source: &str, line_no: usize, token: &str) -> Result<SynsetId> {
    SynsetId::new(token).map_err(|e| Error::parse(source, line_no, e.to_string()))
}

/// Parses `parent child` lines. Edges keep file order; repeats are dropped and
/// counted.
pub fn parse_isa_edges(text: &str) -> Result<IsaEdges> {
    let mut seen = HashSet::new();
    let mut out = IsaEdges::default();
    for (line_no, line) in content_lines(text) {
        let (parent, child) = two_tokens("is_a", line_no, line)?;
        let edge = (
            synset("is_a", line_no, parent)?,
            synset("is_a", line_no, child)?,
        );
        if seen.insert(edge.clone()) {
            out.edges.push(edge);
        } else {
            out.duplicates += 1;
        }
    }
    if out.duplicates > 0 {
        log::warn!("is_a: dropped {} duplicate edge(s)", out.duplicates);
    }
    Ok(out)
}

/// Parses `synset count` lines into a map.
pub fn parse_counts(text: &str) -> Result<BTreeMap<SynsetId, u64>> {
    let mut counts = BTreeMap::new();
    for (line_no, line) in content_lines(text) {
        let (id, count) = two_tokens("counts", line_no, line)?;
        let id = synset("counts", line_no, id)?;
        let count: u64 = count.parse().map_err(|_| {
            let why = if count.starts_with('-') {
                "negative count"
            } else {
                "count is not a non-negative integer"
            };
            Error::parse("counts", line_no, format!("{why}: `{count}`"))
        })?;
        if counts.insert(id.clone(), count).is_some() {
            return Err(Error::parse(
                "counts",
                line_no,
                format!("synset `{id}` listed twice"),
            ));
        }
    }
    Ok(counts)
}

/// Parses `synset<TAB>name` lines. Lines without a tab are split at the first
/// run of whitespace instead.
pub fn parse_names(text: &str) -> Result<BTreeMap<SynsetId, String>> {
    let mut names = BTreeMap::new();
    for (line_no, line) in content_lines(text) {
        let line = line.trim_start();
        let (id, name) = match line.split_once('\t') {
            Some(split) => split,
            None => line.split_once(char::is_whitespace).unwrap_or((line, "")),
        };
        let id = synset("words", line_no, id.trim())?;
        names.insert(id, name.trim().to_owned());
    }
    Ok(names)
}

pub fn write_isa_edges(edges: &[(SynsetId, SynsetId)]) -> String {
    let mut out = String::new();
    for (parent, child) in edges {
        let _ = writeln!(out, "{parent} {child}");
    }
    out
}

pub fn write_counts(counts: &BTreeMap<SynsetId, u64>) -> String {
    let mut out = String::new();
    for (id, count) in counts {
        let _ = writeln!(out, "{id}\t{count}");
    }
    out
}

pub fn write_names(names: &BTreeMap<SynsetId, String>) -> String {
    let mut out = String::new();
    for (id, name) in names {
        let _ = writeln!(out, "{id}\t{name}");
    }
    out
}
