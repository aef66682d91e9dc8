use super::tree::{ClassTree, MergeLog, MergeOp};

/// Collapses single-child links until no class has exactly one child. The
/// upper class of each chain survives.
pub fn roll(tree: &ClassTree) -> (ClassTree, MergeLog) {
    let mut out = tree.clone();
    let mut log = MergeLog::default();
    let mut stack = vec![out.root()];
    while let Some(v) = stack.pop() {
        while out.node(v).children.len() == 1 {
            let only = out.node(v).children[0];
            out.absorb(v, only, MergeOp::Roll, &mut log);
        }
        stack.extend(out.node(v).children.iter().rev());
    }
    (out, log)
}

/// Collapses every maximal internal subtree holding fewer than
/// `bind_threshold` images into its top class. Leaves are left alone.
pub fn bind(tree: &ClassTree, bind_threshold: u64) -> (ClassTree, MergeLog) {
    let mut out = tree.clone();
    let mut log = MergeLog::default();
    let subtree = out.subtree_counts();
    let mut stack = vec![out.root()];
    while let Some(v) = stack.pop() {
        let children = out.node(v).children.clone();
        if children.is_empty() {
            continue;
        }
        if subtree[v] < bind_threshold {
            // Pre-order over the subtree; absorbing a node hands its
            // children to `v`, so keep draining until `v` is a leaf.
            while let Some(&c) = out.node(v).children.first() {
                out.absorb(v, c, MergeOp::Bind, &mut log);
            }
        } else {
            stack.extend(children.into_iter().rev());
        }
    }
    (out, log)
}

/// Moves classes holding fewer than `promote_threshold` images into their
/// parents, deepest classes first. If the root ends up below the threshold
/// its images are dropped from training.
pub fn promote(tree: &ClassTree, promote_threshold: u64) -> (ClassTree, MergeLog) {
    let mut out = tree.clone();
    let mut log = MergeLog::default();
    let depth = out.depths();
    let mut order: Vec<usize> = out.alive().map(|(i, _)| i).collect();
    order.sort_by(|&a, &b| {
        depth[b]
            .cmp(&depth[a])
            .then_with(|| out.node(a).representative.cmp(&out.node(b).representative))
    });
    for v in order {
        if v == out.root() || out.node(v).count >= promote_threshold {
            continue;
        }
        let parent = out.node(v).parent.expect("non-root class has a parent");
        out.absorb(parent, v, MergeOp::Promote, &mut log);
    }
    if out.node(out.root()).count < promote_threshold {
        out.unassign_root();
    }
    (out, log)
}
