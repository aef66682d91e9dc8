//! Top-down reorganization: walk the tree layer by layer from the root,
//! picking the largest classes (by subtree-inclusive image count) that clear
//! a minimum size, until a class budget is met.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::labelmap::LabelMap;
use crate::taxonomy::{SynsetId, Taxonomy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopDownConfig {
    /// Minimum subtree-inclusive images for a class to be selected.
    pub min_images: u64,
    /// Maximum number of classes to select.
    pub budget: usize,
}

impl TopDownConfig {
    /// 4,000 classes of at least 1,200 images.
    pub const PRESET_4K: TopDownConfig = TopDownConfig {
        min_images: 1_200,
        budget: 4_000,
    };

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::contract("class budget must be at least 1"));
        }
        Ok(())
    }

    pub fn provenance(&self) -> String {
        format!("topdown t_t={} budget={}", self.min_images, self.budget)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectedClass {
    pub id: SynsetId,
    pub depth: usize,
    /// Subtree-inclusive images at selection time.
    pub subtree_count: u64,
    /// Images actually assigned once descendants claim their own.
    pub effective_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionResult {
    /// In selection order.
    pub selected: Vec<SelectedClass>,
    /// Selected classes whose effective count fell under the minimum.
    pub warnings: Vec<(SynsetId, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub label_map: LabelMap,
    /// Effective image count per selected synset, sorted by id.
    pub effective_counts: Vec<(SynsetId, u64)>,
    pub shortfalls: Vec<(SynsetId, u64)>,
}

/// Selection indices in order. The root is layer 0 and is never a candidate.
fn select_indices(taxonomy: &Taxonomy, config: &TopDownConfig) -> Vec<(usize, usize)> {
    let subtree = taxonomy.subtree_counts();
    let mut selected = Vec::new();
    let mut layer = vec![taxonomy.root()];
    let mut depth = 0;
    while selected.len() < config.budget {
        let mut next: Vec<usize> = layer
            .iter()
            .flat_map(|&v| taxonomy.node(v).children.iter().copied())
            .collect();
        if next.is_empty() {
            break;
        }
        depth += 1;
        next.sort_by(|&a, &b| {
            subtree[b]
                .cmp(&subtree[a])
                .then_with(|| taxonomy.node(a).id.cmp(&taxonomy.node(b).id))
        });
        for &v in &next {
            if selected.len() == config.budget {
                break;
            }
            if subtree[v] >= config.min_images {
                selected.push((v, depth));
            }
        }
        layer = next;
    }
    selected
}

/// Breadth-first selection, followed by assignment so each selected class
/// carries its effective count.
pub fn top_down_select(taxonomy: &Taxonomy, config: &TopDownConfig) -> Result<SelectionResult> {
    config.validate()?;
    let picked = select_indices(taxonomy, config);
    let subtree = taxonomy.subtree_counts();
    let ids: Vec<SynsetId> = picked
        .iter()
        .map(|&(v, _)| taxonomy.node(v).id.clone())
        .collect();
    let effective = if ids.is_empty() {
        Vec::new()
    } else {
        effective_counts(taxonomy, &owners(taxonomy, &ids)?)
    };
    let selected: Vec<SelectedClass> = picked
        .iter()
        .map(|&(v, depth)| SelectedClass {
            id: taxonomy.node(v).id.clone(),
            depth,
            subtree_count: subtree[v],
            effective_count: effective[v],
        })
        .collect();
    let warnings = selected
        .iter()
        .filter(|s| s.effective_count < config.min_images)
        .map(|s| (s.id.clone(), s.effective_count))
        .collect();
    Ok(SelectionResult { selected, warnings })
}

/// Nearest selected ancestor-or-self of every node.
fn owners(taxonomy: &Taxonomy, selected: &[SynsetId]) -> Result<Vec<Option<usize>>> {
    let chosen: HashSet<usize> = selected
        .iter()
        .map(|id| taxonomy.index_of(id.as_str()))
        .collect::<Result<_>>()?;
    let mut owner = vec![None; taxonomy.len()];
    for v in taxonomy.bfs_order() {
        owner[v] = if chosen.contains(&v) {
            Some(v)
        } else {
            taxonomy.node(v).parent.and_then(|p| owner[p])
        };
    }
    Ok(owner)
}

fn effective_counts(taxonomy: &Taxonomy, owner: &[Option<usize>]) -> Vec<u64> {
    let mut effective = vec![0u64; taxonomy.len()];
    for (v, o) in owner.iter().enumerate() {
        if let Some(o) = o {
            effective[*o] += taxonomy.node(v).direct_count;
        }
    }
    effective
}

/// Gives every synset's direct images to its nearest selected ancestor (or
/// itself). Synsets above every selected class are left unassigned. Classes
/// left with fewer than `min_images` are reported, not dropped.
pub fn assign_to_selected(
    taxonomy: &Taxonomy,
    selected: &[SynsetId],
    min_images: u64,
    provenance: impl Into<String>,
) -> Result<Assignment> {
    if selected.is_empty() {
        return Err(Error::contract("no classes selected"));
    }
    let owner = owners(taxonomy, selected)?;
    let effective = effective_counts(taxonomy, &owner);

    let mut members: Vec<Vec<SynsetId>> = vec![Vec::new(); taxonomy.len()];
    let mut unassigned = Vec::new();
    for (v, node) in taxonomy.nodes().iter().enumerate() {
        match owner[v] {
            Some(o) => members[o].push(node.id.clone()),
            None => unassigned.push((node.id.clone(), node.direct_count)),
        }
    }

    let mut chosen: Vec<usize> = selected
        .iter()
        .map(|id| taxonomy.index_of(id.as_str()))
        .collect::<Result<_>>()?;
    chosen.sort_by(|&a, &b| taxonomy.node(a).id.cmp(&taxonomy.node(b).id));
    chosen.dedup();

    let classes = chosen
        .iter()
        .map(|&v| {
            (
                taxonomy.node(v).id.clone(),
                std::mem::take(&mut members[v]),
                effective[v],
            )
        })
        .collect();
    let effective_counts: Vec<(SynsetId, u64)> = chosen
        .iter()
        .map(|&v| (taxonomy.node(v).id.clone(), effective[v]))
        .collect();
    let shortfalls: Vec<(SynsetId, u64)> = effective_counts
        .iter()
        .filter(|(_, c)| *c < min_images)
        .cloned()
        .collect();
    for (id, count) in &shortfalls {
        log::warn!("selected class {id} keeps only {count} images (< {min_images})");
    }
    Ok(Assignment {
        label_map: LabelMap::from_classes(provenance, classes, unassigned),
        effective_counts,
        shortfalls,
    })
}

/// Selection plus assignment. When nothing qualifies the label map has no
/// classes and every synset is unassigned.
pub fn top_down_pipeline(
    taxonomy: &Taxonomy,
    config: &TopDownConfig,
) -> Result<(SelectionResult, LabelMap)> {
    let selection = top_down_select(taxonomy, config)?;
    let ids: Vec<SynsetId> = selection.selected.iter().map(|s| s.id.clone()).collect();
    let label_map = if ids.is_empty() {
        let unassigned = taxonomy
            .nodes()
            .iter()
            .map(|n| (n.id.clone(), n.direct_count))
            .collect();
        LabelMap::from_classes(config.provenance(), Vec::new(), unassigned)
    } else {
        assign_to_selected(taxonomy, &ids, config.min_images, config.provenance())?.label_map
    };
    Ok((selection, label_map))
}
