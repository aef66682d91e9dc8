use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

use super::{rank_order, ScoredList};

/// Maps scores to `[0, 1]` by min-max; a constant list maps to all zeros.
fn min_max(list: &ScoredList) -> HashMap<&str, f64> {
    let (lo, hi) = list
        .items()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, s)| {
            (lo.min(*s), hi.max(*s))
        });
    let span = hi - lo;
    list.items()
        .iter()
        .map(|(id, s)| {
            let v = if span > 0.0 { (s - lo) / span } else { 0.0 };
            (id.as_str(), v)
        })
        .collect()
}

/// Averages per-item scores across lists that cover the same items. With
/// `normalize`, each list is min-max scaled first. The output is ranked.
pub fn late_fuse(lists: &[ScoredList], normalize: bool) -> Result<ScoredList> {
    let first = lists
        .first()
        .ok_or_else(|| Error::contract("late fusion needs at least one score list"))?;
    let ids: HashSet<&str> = first.items().iter().map(|(id, _)| id.as_str()).collect();
    for (i, list) in lists.iter().enumerate().skip(1) {
        let other: HashSet<&str> = list.items().iter().map(|(id, _)| id.as_str()).collect();
        if other != ids {
            return Err(Error::contract(format!(
                "score list {i} covers a different item set than list 0"
            )));
        }
    }

    let scaled: Vec<HashMap<&str, f64>> = lists
        .iter()
        .map(|l| {
            if normalize {
                min_max(l)
            } else {
                l.items().iter().map(|(id, s)| (id.as_str(), *s)).collect()
            }
        })
        .collect();
    let n = lists.len() as f64;
    let mut fused: Vec<(String, f64)> = first
        .items()
        .iter()
        .map(|(id, _)| {
            let sum: f64 = scaled.iter().map(|m| m[id.as_str()]).sum();
            (id.clone(), sum / n)
        })
        .collect();
    fused.sort_by(rank_order);
    ScoredList::new(fused)
}
