//! Ranking evaluation and late fusion.
//!
//! Rankings sort by score descending and break ties by item id ascending, so
//! every metric here is deterministic.

mod fusion;
mod io;

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

pub use fusion::late_fuse;
pub use io::{parse_labels, parse_scores, write_eval_report, write_scores};

/// Scored items with unique ids and finite scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredList {
    items: Vec<(String, f64)>,
}

/// Relevance per item id; ids absent from the map count as negatives.
pub type Labels = HashMap<String, bool>;

impl ScoredList {
    pub fn new(items: Vec<(String, f64)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(items.len());
        for (id, score) in &items {
            if !seen.insert(id.as_str()) {
                return Err(Error::contract(format!("item `{id}` scored twice")));
            }
            if !score.is_finite() {
                return Err(Error::contract(format!("item `{id}` has non-finite score")));
            }
        }
        Ok(ScoredList { items })
    }

    pub fn items(&self) -> &[(String, f64)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Items best first.
    pub fn ranked(&self) -> Vec<&(String, f64)> {
        let mut ranked: Vec<&(String, f64)> = self.items.iter().collect();
        ranked.sort_by(|a, b| rank_order(a, b));
        ranked
    }

    /// Item ids best first.
    pub fn ranking(&self) -> Vec<&str> {
        self.ranked()
            .into_iter()
            .map(|(id, _)| id.as_str())
            .collect()
    }
}

pub(crate) fn rank_order(a: &(String, f64), b: &(String, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

/// Non-interpolated average precision: the mean of precision@k over the ranks
/// k that hold a positive.
pub fn average_precision(scored: &ScoredList, labels: &Labels) -> Result<f64> {
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (k, (id, _)) in scored.ranked().into_iter().enumerate() {
        if labels.get(id).copied().unwrap_or(false) {
            hits += 1;
            sum += hits as f64 / (k + 1) as f64;
        }
    }
    if hits == 0 {
        return Err(Error::contract(
            "average precision needs at least one positive",
        ));
    }
    Ok(sum / hits as f64)
}

/// One event's ranked scores and labels.
#[derive(Debug, Clone)]
pub struct EventRun {
    pub event: String,
    pub scores: ScoredList,
    pub labels: Labels,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub per_event: Vec<(String, f64)>,
    pub mean_ap: f64,
}

pub fn mean_average_precision(runs: &[EventRun]) -> Result<EvalResult> {
    if runs.is_empty() {
        return Err(Error::contract(
            "mean average precision needs at least one event",
        ));
    }
    let per_event = runs
        .iter()
        .map(|r| {
            average_precision(&r.scores, &r.labels)
                .map(|ap| (r.event.clone(), ap))
                .map_err(|e| Error::contract(format!("event `{}`: {e}", r.event)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_ap = per_event.iter().map(|(_, ap)| ap).sum::<f64>() / per_event.len() as f64;
    Ok(EvalResult { per_event, mean_ap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(items: &[(&str, f64)]) -> ScoredList {
        ScoredList::new(items.iter().map(|(i, s)| (i.to_string(), *s)).collect()).unwrap()
    }

    fn labels(pos: &[&str]) -> Labels {
        pos.iter().map(|p| (p.to_string(), true)).collect()
    }

    #[test]
    fn perfect_ranking() {
        let s = list(&[("a", 0.9), ("b", 0.8), ("c", 0.1), ("d", 0.0)]);
        assert_eq!(average_precision(&s, &labels(&["a", "b"])).unwrap(), 1.0);
    }

    #[test]
    fn single_positive_second() {
        let s = list(&[("a", 0.9), ("b", 0.1)]);
        assert_eq!(average_precision(&s, &labels(&["b"])).unwrap(), 0.5);
    }

    #[test]
    fn hand_computed() {
        // Ranking a b c d e, positives at ranks 1, 3, 4: (1 + 2/3 + 3/4) / 3.
        let s = list(&[("a", 5.0), ("b", 4.0), ("c", 3.0), ("d", 2.0), ("e", 1.0)]);
        let ap = average_precision(&s, &labels(&["a", "c", "d"])).unwrap();
        assert!((ap - (1.0 + 2.0 / 3.0 + 0.75) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ties_break_by_id() {
        let s = list(&[("b", 1.0), ("a", 1.0)]);
        assert_eq!(s.ranking(), ["a", "b"]);
        assert_eq!(average_precision(&s, &labels(&["b"])).unwrap(), 0.5);
    }

    #[test]
    fn zero_positives_rejected() {
        let s = list(&[("a", 1.0)]);
        assert!(average_precision(&s, &Labels::new()).is_err());
    }

    #[test]
    fn invalid_lists() {
        assert!(ScoredList::new(vec![("a".into(), 1.0), ("a".into(), 2.0)]).is_err());
        assert!(ScoredList::new(vec![("a".into(), f64::NAN)]).is_err());
    }

    #[test]
    fn map_examples() {
        let run = |event: &str, pos: &[&str]| EventRun {
            event: event.into(),
            scores: list(&[("a", 0.9), ("b", 0.8), ("c", 0.1), ("d", 0.0), ("e", -1.0)]),
            labels: labels(pos),
        };
        let one = mean_average_precision(&[run("e1", &["b"])]).unwrap();
        assert_eq!(one.mean_ap, 0.5);
        // Positive at rank 5 -> 0.2; positives at ranks 1 and 5 -> (1 + 0.4) / 2 = 0.7.
        let two = mean_average_precision(&[run("x", &["e"]), run("y", &["a", "e"])]).unwrap();
        assert_eq!(two.per_event[0].1, 0.2);
        assert!((two.mean_ap - 0.45).abs() < 1e-15);
        assert!(mean_average_precision(&[]).is_err());
        assert!(mean_average_precision(&[run("z", &[])]).is_err());
    }
}
