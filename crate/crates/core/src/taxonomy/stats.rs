use std::fmt::Write as _;

use super::{SynsetId, Taxonomy};

/// Largest power-of-two bucket. `[2^MAX, inf)` is the overflow bucket.
pub const HISTOGRAM_MAX_EXPONENT: u32 = 24;

/// Summary of a taxonomy's image distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsReport {
    /// Real synsets (a synthetic root is not counted).
    pub class_count: usize,
    /// Synsets with at least one direct image.
    pub nonempty_class_count: usize,
    pub total_images: u64,
    /// `(bucket lower bound, classes)` for `[0,1), [1,2), [2,4), ...`; the
    /// last bucket is open-ended.
    pub count_histogram: Vec<(u64, usize)>,
    /// Classes per depth, root at index 0.
    pub per_depth_class_counts: Vec<usize>,
    /// Nodes with exactly one child.
    pub single_child_chain_count: usize,
    /// Classes with exactly one image.
    pub singleton_classes: usize,
    pub max_count_class: (SynsetId, u64),
    pub dropped_edges: usize,
    pub synthetic_root: bool,
}

fn bucket_of(count: u64) -> usize {
    if count == 0 {
        0
    } else {
        ((63 - count.leading_zeros()) as usize + 1).min(HISTOGRAM_MAX_EXPONENT as usize + 1)
    }
}

pub fn stats(taxonomy: &Taxonomy) -> StatsReport {
    let skip_root = taxonomy.has_synthetic_root();
    let depth = taxonomy.depths();
    let mut histogram: Vec<(u64, usize)> = std::iter::once(0)
        .chain((0..=HISTOGRAM_MAX_EXPONENT).map(|e| 1u64 << e))
        .map(|lb| (lb, 0))
        .collect();
    let max_depth = depth.iter().copied().max().unwrap_or(0);
    let mut per_depth = vec![0usize; max_depth + 1];

    let mut class_count = 0;
    let mut nonempty = 0;
    let mut singletons = 0;
    let mut single_child = 0;
    let mut max_class: Option<(&SynsetId, u64)> = None;

    for (i, node) in taxonomy.nodes().iter().enumerate() {
        if node.children.len() == 1 {
            single_child += 1;
        }
        if skip_root && i == taxonomy.root() {
            continue;
        }
        class_count += 1;
        per_depth[depth[i]] += 1;
        histogram[bucket_of(node.direct_count)].1 += 1;
        if node.direct_count > 0 {
            nonempty += 1;
        }
        if node.direct_count == 1 {
            singletons += 1;
        }
        let better = match max_class {
            None => true,
            Some((id, c)) => node.direct_count > c || (node.direct_count == c && node.id < *id),
        };
        if better {
            max_class = Some((&node.id, node.direct_count));
        }
    }
    let (max_id, max_count) = max_class
        .map(|(id, c)| (id.clone(), c))
        .unwrap_or_else(|| (taxonomy.root_id().clone(), 0));

    StatsReport {
        class_count,
        nonempty_class_count: nonempty,
        total_images: taxonomy.total_images(),
        count_histogram: histogram,
        per_depth_class_counts: per_depth,
        single_child_chain_count: single_child,
        singleton_classes: singletons,
        max_count_class: (max_id, max_count),
        dropped_edges: taxonomy.dropped_edges().len(),
        synthetic_root: taxonomy.has_synthetic_root(),
    }
}

impl StatsReport {
    /// Tab-separated `key value...` lines; the key set is fixed.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "class_count\t{}", self.class_count);
        let _ = writeln!(out, "nonempty_class_count\t{}", self.nonempty_class_count);
        let _ = writeln!(out, "total_images\t{}", self.total_images);
        let _ = writeln!(out, "singleton_classes\t{}", self.singleton_classes);
        let _ = writeln!(out, "single_child_nodes\t{}", self.single_child_chain_count);
        let _ = writeln!(
            out,
            "max_count_class\t{}\t{}",
            self.max_count_class.0, self.max_count_class.1
        );
        let _ = writeln!(out, "dropped_edges\t{}", self.dropped_edges);
        let _ = writeln!(out, "synthetic_root\t{}", self.synthetic_root);
        for (depth, n) in self.per_depth_class_counts.iter().enumerate() {
            let _ = writeln!(out, "depth_classes\t{depth}\t{n}");
        }
        for (lb, n) in &self.count_histogram {
            let _ = writeln!(out, "histogram\t{lb}\t{n}");
        }
        out
    }
}
