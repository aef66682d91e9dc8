use std::fmt::Write as _;

use crate::labelmap::LabelMap;
use crate::taxonomy::{SynsetId, Taxonomy};

/// A synset folded into a class, with its own direct image count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub id: SynsetId,
    pub direct_count: u64,
}

/// A (possibly merged) class in the working tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassNode {
    pub representative: SynsetId,
    pub members: Vec<Member>,
    /// Sum of member direct counts.
    pub count: u64,
    /// Sorted by representative id.
    pub children: Vec<usize>,
    pub parent: Option<usize>,
    pub alive: bool,
}

/// Working tree for the bottom-up operations. Absorbed classes stay in the
/// arena with `alive == false` so indices remain stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTree {
    nodes: Vec<ClassNode>,
    root: usize,
    unassigned: Vec<Member>,
}

impl From<&Taxonomy> for ClassTree {
    fn from(taxonomy: &Taxonomy) -> Self {
        let nodes = taxonomy
            .nodes()
            .iter()
            .map(|n| ClassNode {
                representative: n.id.clone(),
                members: vec![Member {
                    id: n.id.clone(),
                    direct_count: n.direct_count,
                }],
                count: n.direct_count,
                children: n.children.clone(),
                parent: n.parent,
                alive: true,
            })
            .collect();
        ClassTree {
            nodes,
            root: taxonomy.root(),
            unassigned: Vec::new(),
        }
    }
}

/// Which bottom-up operation produced a merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MergeOp {
    Roll,
    Bind,
    Promote,
}

impl MergeOp {
    pub fn name(self) -> &'static str {
        match self {
            MergeOp::Roll => "roll",
            MergeOp::Bind => "bind",
            MergeOp::Promote => "promote",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeRecord {
    pub op: MergeOp,
    pub absorbed: SynsetId,
    pub survivor: SynsetId,
    /// Images the absorbed class held when it was merged.
    pub images: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeLog {
    pub records: Vec<MergeRecord>,
}

impl MergeLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn extend(&mut self, other: MergeLog) {
        self.records.extend(other.records);
    }

    /// `op<TAB>absorbed<TAB>survivor<TAB>images` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                r.op.name(),
                r.absorbed,
                r.survivor,
                r.images
            );
        }
        out
    }
}

impl ClassTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, idx: usize) -> &ClassNode {
        &self.nodes[idx]
    }

    /// Arena size, dead slots included.
    pub fn capacity(&self) -> usize {
        self.nodes.len()
    }

    pub fn alive(&self) -> impl Iterator<Item = (usize, &ClassNode)> {
        self.nodes.iter().enumerate().filter(|(_, n)| n.alive)
    }

    pub fn class_count(&self) -> usize {
        self.alive().filter(|(_, n)| !n.members.is_empty()).count()
    }

    pub fn unassigned(&self) -> &[Member] {
        &self.unassigned
    }

    pub fn total_images(&self) -> u64 {
        self.alive().map(|(_, n)| n.count).sum::<u64>()
            + self.unassigned.iter().map(|m| m.direct_count).sum::<u64>()
    }

    /// Alive nodes, parents before children.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = vec![self.root];
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            order.extend_from_slice(&self.nodes[v].children);
        }
        order
    }

    /// Depth of every alive node; dead slots hold `usize::MAX`.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![usize::MAX; self.nodes.len()];
        depth[self.root] = 0;
        for v in self.bfs_order() {
            for &c in &self.nodes[v].children {
                depth[c] = depth[v] + 1;
            }
        }
        depth
    }

    /// Subtree-inclusive counts; dead slots hold 0.
    pub fn subtree_counts(&self) -> Vec<u64> {
        let mut acc = vec![0u64; self.nodes.len()];
        for v in self.bfs_order().into_iter().rev() {
            acc[v] += self.nodes[v].count;
            if let Some(p) = self.nodes[v].parent {
                acc[p] += acc[v];
            }
        }
        acc
    }

    /// Moves `absorbed`'s images and members into `survivor` and deletes it.
    /// Its children become children of `survivor`.
    pub(crate) fn absorb(
        &mut self,
        survivor: usize,
        absorbed: usize,
        op: MergeOp,
        log: &mut MergeLog,
    ) {
        debug_assert_ne!(survivor, absorbed);
        debug_assert!(self.nodes[absorbed].alive);
        let moved = std::mem::take(&mut self.nodes[absorbed].members);
        let images = self.nodes[absorbed].count;
        let grandchildren = std::mem::take(&mut self.nodes[absorbed].children);
        if let Some(p) = self.nodes[absorbed].parent.take() {
            self.nodes[p].children.retain(|&c| c != absorbed);
        }
        self.nodes[absorbed].alive = false;
        self.nodes[absorbed].count = 0;
        for &g in &grandchildren {
            self.nodes[g].parent = Some(survivor);
        }

        log.records.push(MergeRecord {
            op,
            absorbed: self.nodes[absorbed].representative.clone(),
            survivor: self.nodes[survivor].representative.clone(),
            images,
        });

        let target = &mut self.nodes[survivor];
        target.count += images;
        target.members.extend(moved);
        target.children.extend(grandchildren);
        let mut children = std::mem::take(&mut self.nodes[survivor].children);
        children.sort_by(|&a, &b| {
            self.nodes[a]
                .representative
                .cmp(&self.nodes[b].representative)
        });
        self.nodes[survivor].children = children;
    }

    /// Drops the root's images from training.
    pub(crate) fn unassign_root(&mut self) {
        let root = &mut self.nodes[self.root];
        root.count = 0;
        self.unassigned.append(&mut root.members);
    }

    /// Every alive class with members becomes a label class.
    pub fn to_label_map(&self, provenance: impl Into<String>) -> LabelMap {
        let classes = self
            .alive()
            .filter(|(_, n)| !n.members.is_empty())
            .map(|(_, n)| {
                (
                    n.representative.clone(),
                    n.members.iter().map(|m| m.id.clone()).collect(),
                    n.count,
                )
            })
            .collect();
        let unassigned = self
            .unassigned
            .iter()
            .map(|m| (m.id.clone(), m.direct_count))
            .collect();
        LabelMap::from_classes(provenance, classes, unassigned)
    }
}
