//! Class hierarchy: parsing, canonicalization to a rooted tree, and summary
//! statistics.
//!
//! A [`Taxonomy`] is immutable once built. Nodes live in an arena and refer to
//! each other by index; the public API speaks in [`SynsetId`]s.

mod build;
mod parse;
mod stats;

use std::borrow::Borrow;
use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub use build::build_taxonomy;
pub use parse::{
    parse_counts, parse_isa_edges, parse_names, write_counts, write_isa_edges, write_names,
    IsaEdges,
};
pub use stats::{stats, StatsReport, HISTOGRAM_MAX_EXPONENT};

/// Identifier of a synset, e.g. `n01440764`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId(String);

impl SynsetId {
    /// Wraps an identifier. It must be non-empty and free of whitespace, since
    /// every file format here is whitespace- or tab-delimited.
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::contract("synset id must be non-empty"));
        }
        if id.chars().any(char::is_whitespace) {
            return Err(Error::contract(format!(
                "synset id `{id}` contains whitespace"
            )));
        }
        Ok(SynsetId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for SynsetId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for SynsetId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// One synset in the canonical tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyNode {
    pub id: SynsetId,
    pub name: Option<String>,
    /// Images attached directly to this synset.
    pub direct_count: u64,
    /// Child indices, sorted by synset id.
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

/// A rooted tree of synsets with per-node image counts.
#[derive(Debug)]
pub struct Taxonomy {
    nodes: Vec<TaxonomyNode>,
    index: HashMap<SynsetId, usize>,
    root: usize,
    dropped_edges: Vec<(SynsetId, SynsetId)>,
    synthetic_root: bool,
    attached_orphans: Vec<SynsetId>,
    subtree: OnceLock<Vec<u64>>,
}

impl Clone for Taxonomy {
    fn clone(&self) -> Self {
        Taxonomy {
            nodes: self.nodes.clone(),
            index: self.index.clone(),
            root: self.root,
            dropped_edges: self.dropped_edges.clone(),
            synthetic_root: self.synthetic_root,
            attached_orphans: self.attached_orphans.clone(),
            subtree: OnceLock::new(),
        }
    }
}

impl Taxonomy {
    pub(crate) fn from_parts(
        nodes: Vec<TaxonomyNode>,
        root: usize,
        dropped_edges: Vec<(SynsetId, SynsetId)>,
        synthetic_root: bool,
        attached_orphans: Vec<SynsetId>,
    ) -> Self {
        let index = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), i))
            .collect();
        Taxonomy {
            nodes,
            index,
            root,
            dropped_edges,
            synthetic_root,
            attached_orphans,
            subtree: OnceLock::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn root_id(&self) -> &SynsetId {
        &self.nodes[self.root].id
    }

    pub fn nodes(&self) -> &[TaxonomyNode] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &TaxonomyNode {
        &self.nodes[idx]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownSynset(id.to_owned()))
    }

    pub fn get(&self, id: &str) -> Result<&TaxonomyNode> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    /// Edges removed while turning a multi-parent graph into a tree, as
    /// `(child, parent)` pairs.
    pub fn dropped_edges(&self) -> &[(SynsetId, SynsetId)] {
        &self.dropped_edges
    }

    /// Whether the root was inserted above several parentless synsets.
    pub fn has_synthetic_root(&self) -> bool {
        self.synthetic_root
    }

    /// Synsets that had counts but no edges and were hung under the root.
    pub fn attached_orphans(&self) -> &[SynsetId] {
        &self.attached_orphans
    }

    /// Node indices in breadth-first order from the root.
    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        order.push(self.root);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            order.extend_from_slice(&self.nodes[v].children);
        }
        order
    }

    /// Depth of every node (root = 0), indexed like [`Taxonomy::nodes`].
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.nodes.len()];
        for v in self.bfs_order() {
            for &c in &self.nodes[v].children {
                depth[c] = depth[v] + 1;
            }
        }
        depth
    }

    /// Subtree-inclusive image counts for every node. Computed once and cached.
    pub fn subtree_counts(&self) -> &[u64] {
        self.subtree.get_or_init(|| {
            let mut acc: Vec<u64> = self.nodes.iter().map(|n| n.direct_count).collect();
            for &v in self.bfs_order().iter().rev() {
                if let Some(p) = self.nodes[v].parent {
                    acc[p] += acc[v];
                }
            }
            acc
        })
    }

    /// Images in the subtree rooted at `id`, the node itself included.
    pub fn subtree_count(&self, id: &str) -> Result<u64> {
        let idx = self.index_of(id)?;
        Ok(self.subtree_counts()[idx])
    }

    pub fn total_images(&self) -> u64 {
        self.subtree_counts()[self.root]
    }

    /// Kept `(parent, child)` edges in breadth-first order.
    pub fn tree_edges(&self) -> Vec<(SynsetId, SynsetId)> {
        self.bfs_order()
            .into_iter()
            .flat_map(|v| {
                self.nodes[v]
                    .children
                    .iter()
                    .map(move |&c| (self.nodes[v].id.clone(), self.nodes[c].id.clone()))
            })
            .collect()
    }

    /// Checks the structural invariants: one root, mutually consistent
    /// parent/child links, everything reachable, no cycles.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if self.root >= n || self.nodes[self.root].parent.is_some() {
            return Err(Error::contract("root has a parent"));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if i != self.root && node.parent.is_none() {
                return Err(Error::contract(format!("second root `{}`", node.id)));
            }
            if let Some(p) = node.parent {
                if !self.nodes[p].children.contains(&i) {
                    return Err(Error::contract(format!(
                        "`{}` names parent `{}` which does not list it",
                        node.id, self.nodes[p].id
                    )));
                }
            }
            for &c in &node.children {
                if self.nodes[c].parent != Some(i) {
                    return Err(Error::contract(format!(
                        "child `{}` of `{}` points elsewhere",
                        self.nodes[c].id, node.id
                    )));
                }
            }
        }
        // Consistent links plus a single root: reachable from root <=> acyclic.
        if self.bfs_order().len() != n {
            return Err(Error::contract("not every node is reachable from the root"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synset_id_rejects_empty_and_whitespace() {
        assert!(SynsetId::new("").is_err());
        assert!(SynsetId::new("n1 n2").is_err());
        assert_eq!(SynsetId::new("n01440764").unwrap().as_str(), "n01440764");
    }
}
