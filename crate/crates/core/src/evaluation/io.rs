//! `item_id,score` and `item_id,label` CSV files. A first row whose second
//! field does not parse is taken as a header. Labels are `1` or `0`.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::{EvalResult, Labels, ScoredList};

fn records(source: &str, text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Format(format!("{source}: {e}")))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(Error::parse(source, line, "expected exactly two fields"));
        }
        out.push((line, record[0].to_owned(), record[1].to_owned()));
    }
    Ok(out)
}

pub fn parse_scores(text: &str) -> Result<ScoredList> {
    let mut items = Vec::new();
    for (i, (line, id, score)) in records("scores", text)?.into_iter().enumerate() {
        match score.parse::<f64>() {
            Ok(s) if s.is_finite() => items.push((id, s)),
            Err(_) if i == 0 => continue,
            _ => return Err(Error::parse("scores", line, format!("bad score `{score}`"))),
        }
    }
    ScoredList::new(items).map_err(|e| Error::Format(format!("scores: {e}")))
}

pub fn parse_labels(text: &str) -> Result<Labels> {
    let mut labels = Labels::new();
    for (i, (line, id, label)) in records("labels", text)?.into_iter().enumerate() {
        let positive = match label.as_str() {
            "1" => true,
            "0" => false,
            _ if i == 0 => continue,
            other => {
                return Err(Error::parse(
                    "labels",
                    line,
                    format!("label must be 1 or 0, got `{other}`"),
                ))
            }
        };
        if labels.insert(id.clone(), positive).is_some() {
            return Err(Error::parse(
                "labels",
                line,
                format!("item `{id}` labeled twice"),
            ));
        }
    }
    Ok(labels)
}

pub fn write_scores(list: &ScoredList) -> String {
    let mut out = String::new();
    for (id, score) in list.items() {
        let _ = writeln!(out, "{id},{score}");
    }
    out
}

/// `ap<TAB>event<TAB>value` per event, then `map<TAB>value`.
pub fn write_eval_report(result: &EvalResult) -> String {
    let mut out = String::new();
    for (event, ap) in &result.per_event {
        let _ = writeln!(out, "ap\t{event}\t{ap}");
    }
    let _ = writeln!(out, "map\t{}", result.mean_ap);
    out
}
