//! Seeded per-class caps on training images.
//!
//! A plan only stores how many images each class keeps. Which images are kept
//! is recomputed on demand: a ChaCha8 generator seeded with the plan seed and
//! switched to the stream numbered by the class id draws `target_count`
//! distinct indices out of the class's image list.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::labelmap::LabelMap;
use crate::taxonomy::SynsetId;

pub const SELECTION_RULE: &str = "chacha8-stream-per-class-v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanEntry {
    pub class_id: u32,
    pub assigned_count: u64,
    pub target_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsamplePlan {
    pub entries: Vec<PlanEntry>,
    pub cap: u64,
    pub seed: u64,
}

/// Caps every class of `label_map` at `cap` images.
pub fn subsample_plan(label_map: &LabelMap, cap: u64, seed: u64) -> Result<SubsamplePlan> {
    if cap == 0 {
        return Err(Error::contract("subsample cap must be at least 1"));
    }
    let entries = label_map
        .classes
        .iter()
        .map(|c| PlanEntry {
            class_id: c.id,
            assigned_count: c.assigned_count,
            target_count: c.assigned_count.min(cap),
        })
        .collect();
    Ok(SubsamplePlan { entries, cap, seed })
}

/// Sorted indices of the images `class_id` keeps out of `available`. At most
/// `target` are drawn.
pub fn select_indices(seed: u64, class_id: u32, target: u64, available: u64) -> Vec<u64> {
    let amount = target.min(available);
    if amount == available {
        return (0..available).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(class_id));
    let mut picked: Vec<u64> =
        rand::seq::index::sample(&mut rng, available as usize, amount as usize)
            .into_iter()
            .map(|i| i as u64)
            .collect();
    picked.sort_unstable();
    picked
}

impl SubsamplePlan {
    pub fn entry(&self, class_id: u32) -> Option<&PlanEntry> {
        self.entries.iter().find(|e| e.class_id == class_id)
    }

    pub fn selected_indices(&self, class_id: u32, available: u64) -> Result<Vec<u64>> {
        let entry = self
            .entry(class_id)
            .ok_or_else(|| Error::contract(format!("class {class_id} not in subsample plan")))?;
        Ok(select_indices(
            self.seed,
            class_id,
            entry.target_count,
            available,
        ))
    }

    /// `#subsample` header, then `class_id<TAB>target_count<TAB>seed` rows.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "#subsample\tv1\tt_s={}\trule={SELECTION_RULE}",
            self.cap
        );
        for e in &self.entries {
            let _ = writeln!(out, "{}\t{}\t{}", e.class_id, e.target_count, self.seed);
        }
        out
    }

    /// Reads a plan file. Assigned counts are not stored in the file and come
    /// back as the target counts.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cap = None;
        let mut seed = None;
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if let Some(rest) = line.strip_prefix("#subsample\t") {
                for field in rest.split('\t') {
                    if let Some(v) = field.strip_prefix("t_s=") {
                        cap = v.parse().ok();
                    }
                }
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let bad = || {
                Error::parse(
                    "plan",
                    line_no,
                    "expected `class_id<TAB>target_count<TAB>seed`",
                )
            };
            if f.len() != 3 {
                return Err(bad());
            }
            let class_id: u32 = f[0].parse().map_err(|_| bad())?;
            let target: u64 = f[1].parse().map_err(|_| bad())?;
            let row_seed: u64 = f[2].parse().map_err(|_| bad())?;
            match seed {
                None => seed = Some(row_seed),
                Some(s) if s != row_seed => {
                    return Err(Error::parse("plan", line_no, "rows disagree on the seed"))
                }
                _ => {}
            }
            entries.push(PlanEntry {
                class_id,
                assigned_count: target,
                target_count: target,
            });
        }
        let cap = cap.ok_or_else(|| Error::Format("subsample header missing t_s".into()))?;
        Ok(SubsamplePlan {
            entries,
            cap,
            seed: seed.unwrap_or(0),
        })
    }
}

/// Parses `synset<TAB>image_id` lines into per-synset image lists, in file
/// order.
pub fn parse_image_lists(text: &str) -> Result<BTreeMap<SynsetId, Vec<String>>> {
    let mut lists: BTreeMap<SynsetId, Vec<String>> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(synset), Some(image), None) = (tokens.next(), tokens.next(), tokens.next())
        else {
            return Err(Error::parse(
                "images",
                i + 1,
                "expected `synset<TAB>image_id`",
            ));
        };
        let synset =
            SynsetId::new(synset).map_err(|e| Error::parse("images", i + 1, e.to_string()))?;
        lists.entry(synset).or_default().push(image.to_owned());
    }
    Ok(lists)
}

/// Expands a plan into `(image_id, class_id)` training rows. Each class pools
/// its members' images (members in id order, images in list order) and keeps
/// the plan's selection over that pool.
pub fn expand_train_list(
    label_map: &LabelMap,
    plan: &SubsamplePlan,
    images: &BTreeMap<SynsetId, Vec<String>>,
) -> Result<Vec<(String, u32)>> {
    let mut rows = Vec::new();
    for class in &label_map.classes {
        let pool: Vec<&String> = class
            .members
            .iter()
            .filter_map(|m| images.get(m))
            .flatten()
            .collect();
        if pool.len() as u64 != class.assigned_count {
            log::warn!(
                "class {} ({}): {} listed images, {} counted",
                class.id,
                class.representative,
                pool.len(),
                class.assigned_count
            );
        }
        for idx in plan.selected_indices(class.id, pool.len() as u64)? {
            rows.push((pool[idx as usize].clone(), class.id));
        }
    }
    Ok(rows)
}
