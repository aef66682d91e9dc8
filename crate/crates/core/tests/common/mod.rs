//! Random taxonomies and naive reference implementations used by the
//! integration tests. Nothing here calls into the library's reorganization
//! code; the oracles work on plain maps keyed by synset id.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taxonomy_reorg::taxonomy::{build_taxonomy, SynsetId, Taxonomy};

pub fn sid(s: &str) -> SynsetId {
    SynsetId::new(s).unwrap()
}

pub struct RandomMeta {
    /// `(parent, child)`, possibly with extra parents per child.
    pub edges: Vec<(String, String)>,
    pub counts: BTreeMap<String, u64>,
}

impl RandomMeta {
    pub fn build(&self) -> Taxonomy {
        let edges: Vec<_> = self.edges.iter().map(|(p, c)| (sid(p), sid(c))).collect();
        let counts = self.counts.iter().map(|(k, v)| (sid(k), *v)).collect();
        build_taxonomy(&edges, &counts, &BTreeMap::new()).unwrap()
    }
}

/// A random DAG of up to `max_nodes` nodes. Parents always come earlier in
/// generation order so the graph is acyclic. Ids are shuffled relative to
/// that order, there are occasional second roots, extra parents and long
/// single-child chains, and counts are drawn from a skewed mix.
pub fn random_meta(seed: u64, max_nodes: usize) -> RandomMeta {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_nodes);
    let mut names = BTreeSet::new();
    while names.len() < n {
        names.insert(format!("n{:05}", rng.random_range(0..100_000)));
    }
    let mut names: Vec<String> = names.into_iter().collect();
    for i in (1..names.len()).rev() {
        let j = rng.random_range(0..=i);
        names.swap(i, j);
    }

    let chain_bias: f64 = rng.random_range(0.0..0.6);
    let extra_parents: f64 = rng.random_range(0.0..0.15);
    let second_root = rng.random_bool(0.1) && n > 3;
    let mut edges = Vec::new();
    for i in 1..n {
        if second_root && i == 1 {
            continue;
        }
        let p = if rng.random_bool(chain_bias) {
            i - 1
        } else {
            rng.random_range(0..i)
        };
        edges.push((names[p].clone(), names[i].clone()));
        if i >= 2 && rng.random_bool(extra_parents) {
            let q = rng.random_range(0..i);
            if q != p {
                edges.push((names[q].clone(), names[i].clone()));
            }
        }
    }
    if edges.is_empty() {
        edges.push((names[0].clone(), names[1].clone()));
    }

    let mut counts = BTreeMap::new();
    for name in &names {
        let c = match rng.random_range(0..10) {
            0..=2 => 0,
            3..=5 => rng.random_range(1..=100),
            _ => rng.random_range(100..=10_000),
        };
        if rng.random_bool(0.95) {
            counts.insert(name.clone(), c);
        }
    }
    RandomMeta { edges, counts }
}

/// Thresholds drawn for one random case.
#[derive(Debug, Clone, Copy)]
pub struct Thresholds {
    pub tb: u64,
    pub tp: u64,
    pub ts: u64,
    pub tt: u64,
    pub budget: usize,
    pub seed: u64,
}

pub fn random_thresholds(seed: u64) -> Thresholds {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_7e57);
    Thresholds {
        tb: rng.random_range(0..=30_000),
        tp: rng.random_range(0..=6_000),
        ts: rng.random_range(1..=5_000),
        tt: rng.random_range(0..=30_000),
        budget: rng.random_range(1..=60),
        seed: rng.random(),
    }
}

/// The canonical tree as `child -> parent` plus direct counts.
pub struct PlainTree {
    pub parent: BTreeMap<String, Option<String>>,
    pub count: BTreeMap<String, u64>,
}

impl PlainTree {
    pub fn from_taxonomy(t: &Taxonomy) -> Self {
        let mut parent = BTreeMap::new();
        let mut count = BTreeMap::new();
        for node in t.nodes() {
            parent.insert(
                node.id.to_string(),
                node.parent.map(|p| t.node(p).id.to_string()),
            );
            count.insert(node.id.to_string(), node.direct_count);
        }
        PlainTree { parent, count }
    }

    fn root(&self) -> String {
        self.parent
            .iter()
            .find(|(_, p)| p.is_none())
            .unwrap()
            .0
            .clone()
    }

    fn children(&self, v: &str) -> Vec<String> {
        self.parent
            .iter()
            .filter(|(_, p)| p.as_deref() == Some(v))
            .map(|(c, _)| c.clone())
            .collect()
    }

    fn depth(&self, v: &str) -> usize {
        let mut d = 0;
        let mut cur = v.to_owned();
        while let Some(Some(p)) = self.parent.get(&cur) {
            d += 1;
            cur = p.clone();
        }
        d
    }

    fn subtree(&self, v: &str) -> u64 {
        self.count[v]
            + self
                .children(v)
                .iter()
                .map(|c| self.subtree(c))
                .sum::<u64>()
    }

    fn ancestors(&self, v: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = v.to_owned();
        while let Some(Some(p)) = self.parent.get(&cur) {
            out.push(p.clone());
            cur = p.clone();
        }
        out
    }
}

/// Expected canonical parent of every node: the parent on a shortest path
/// from a root, ties to the smallest id. Several roots hang under
/// `synthetic`; synsets known only from counts hang under the root.
pub fn oracle_canonical_parents(
    meta: &RandomMeta,
    synthetic: &str,
) -> BTreeMap<String, Option<String>> {
    let mut nodes: BTreeSet<String> = BTreeSet::new();
    let mut parents: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (p, c) in &meta.edges {
        nodes.insert(p.clone());
        nodes.insert(c.clone());
        parents.entry(c.clone()).or_default().insert(p.clone());
    }
    let roots: Vec<String> = nodes
        .iter()
        .filter(|n| !parents.contains_key(*n))
        .cloned()
        .collect();
    let root = if roots.len() == 1 {
        roots[0].clone()
    } else {
        synthetic.to_owned()
    };
    let mut depth: BTreeMap<String, usize> = BTreeMap::new();
    depth.insert(root.clone(), 0);
    for r in &roots {
        depth.insert(r.clone(), if roots.len() == 1 { 0 } else { 1 });
    }
    loop {
        let mut changed = false;
        for (c, ps) in &parents {
            for p in ps {
                if let Some(&dp) = depth.get(p) {
                    if depth.get(c).is_none_or(|&dc| dp + 1 < dc) {
                        depth.insert(c.clone(), dp + 1);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = BTreeMap::new();
    out.insert(root.clone(), None);
    for r in &roots {
        if *r != root {
            out.insert(r.clone(), Some(root.clone()));
        }
    }
    for (c, ps) in &parents {
        let best = ps
            .iter()
            .filter(|p| depth[*p] + 1 == depth[c])
            .min()
            .unwrap();
        out.insert(c.clone(), Some(best.clone()));
    }
    for s in meta.counts.keys() {
        if !out.contains_key(s) {
            out.insert(s.clone(), Some(root.clone()));
        }
    }
    out
}

/// A class tree keyed by representative id.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTree {
    pub parent: BTreeMap<String, Option<String>>,
    pub members: BTreeMap<String, Vec<(String, u64)>>,
    pub unassigned: Vec<(String, u64)>,
}

impl OracleTree {
    pub fn new(t: &PlainTree) -> Self {
        OracleTree {
            parent: t.parent.clone(),
            members: t
                .count
                .iter()
                .map(|(k, v)| (k.clone(), vec![(k.clone(), *v)]))
                .collect(),
            unassigned: Vec::new(),
        }
    }

    fn children(&self, v: &str) -> Vec<String> {
        self.parent
            .iter()
            .filter(|(_, p)| p.as_deref() == Some(v))
            .map(|(c, _)| c.clone())
            .collect()
    }

    fn count(&self, v: &str) -> u64 {
        self.members[v].iter().map(|m| m.1).sum()
    }

    fn subtree(&self, v: &str) -> u64 {
        self.count(v)
            + self
                .children(v)
                .iter()
                .map(|c| self.subtree(c))
                .sum::<u64>()
    }

    fn depth(&self, v: &str) -> usize {
        let mut d = 0;
        let mut cur = v.to_owned();
        while let Some(Some(p)) = self.parent.get(&cur) {
            d += 1;
            cur = p.clone();
        }
        d
    }

    fn root(&self) -> String {
        self.parent
            .iter()
            .find(|(_, p)| p.is_none())
            .unwrap()
            .0
            .clone()
    }

    fn merge(&mut self, survivor: &str, absorbed: &str) {
        let moved = self.members.remove(absorbed).unwrap();
        self.members.get_mut(survivor).unwrap().extend(moved);
        self.parent.remove(absorbed);
        for p in self.parent.values_mut() {
            if p.as_deref() == Some(absorbed) {
                *p = Some(survivor.to_owned());
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.members.values().flatten().map(|m| m.1).sum::<u64>()
            + self.unassigned.iter().map(|m| m.1).sum::<u64>()
    }
}

/// Merges single children into their parents until none is left.
pub fn oracle_roll(mut t: OracleTree) -> OracleTree {
    loop {
        let target = t.parent.keys().find_map(|v| {
            let ch = t.children(v);
            (ch.len() == 1).then(|| (v.clone(), ch[0].clone()))
        });
        match target {
            Some((v, c)) => t.merge(&v, &c),
            None => return t,
        }
    }
}

/// Collapses each internal node whose subtree is below `tb` and which is not
/// inside a larger such subtree.
pub fn oracle_bind(mut t: OracleTree, tb: u64) -> OracleTree {
    let tops: Vec<String> = t
        .parent
        .keys()
        .filter(|v| !t.children(v).is_empty() && t.subtree(v) < tb)
        .filter(|v| {
            let mut cur = t.parent[*v].clone();
            while let Some(a) = cur {
                if t.subtree(&a) < tb {
                    return false;
                }
                cur = t.parent[&a].clone();
            }
            true
        })
        .cloned()
        .collect();
    for top in tops {
        loop {
            let desc: Vec<String> = t
                .parent
                .keys()
                .filter(|v| {
                    let mut cur = t.parent[*v].clone();
                    while let Some(a) = cur {
                        if a == top {
                            return true;
                        }
                        cur = t.parent[&a].clone();
                    }
                    false
                })
                .cloned()
                .collect();
            match desc.first() {
                Some(d) => t.merge(&top, d),
                None => break,
            }
        }
    }
    t
}

/// Repeatedly promotes the deepest undersized class (depths recomputed after
/// every merge, ties to the smallest id) into its parent. An undersized root
/// is unassigned at the end.
pub fn oracle_promote(mut t: OracleTree, tp: u64) -> OracleTree {
    loop {
        let root = t.root();
        let pick = t
            .parent
            .keys()
            .filter(|v| **v != root && t.count(v) < tp)
            .map(|v| (std::cmp::Reverse(t.depth(v)), v.clone()))
            .min();
        match pick {
            Some((_, v)) => {
                let p = t.parent[&v].clone().unwrap();
                t.merge(&p, &v);
            }
            None => break,
        }
    }
    let root = t.root();
    if t.count(&root) < tp {
        let moved = std::mem::take(t.members.get_mut(&root).unwrap());
        t.unassigned.extend(moved);
    }
    t
}

pub fn bottomup_provenance(th: &Thresholds) -> String {
    format!(
        "bottomup t_b={} t_p={} t_s={} seed={} order=roll,bind,promote,subsample",
        th.tb, th.tp, th.ts, th.seed
    )
}

pub fn topdown_provenance(th: &Thresholds) -> String {
    format!("topdown t_t={} budget={}", th.tt, th.budget)
}

/// Writes a label map the way the library should: classes numbered in
/// representative order, members and unassigned synsets sorted by id.
pub fn render_labelmap(
    provenance: &str,
    classes: &BTreeMap<String, Vec<(String, u64)>>,
    unassigned: &[(String, u64)],
) -> String {
    let mut out = format!("#labelmap\tv1\t{provenance}\n");
    for (i, (rep, members)) in classes.iter().filter(|(_, m)| !m.is_empty()).enumerate() {
        let mut ids: Vec<&str> = members.iter().map(|m| m.0.as_str()).collect();
        ids.sort();
        let count: u64 = members.iter().map(|m| m.1).sum();
        let _ = writeln!(out, "{i}\t{rep}\t{count}\t{}", ids.join(","));
    }
    out.push_str("#UNASSIGNED\n");
    let mut un = unassigned.to_vec();
    un.sort();
    for (id, c) in un {
        let _ = writeln!(out, "{id}\t{c}");
    }
    out
}

pub fn oracle_bottomup_text(tree: &PlainTree, th: &Thresholds) -> String {
    let t = oracle_promote(
        oracle_bind(oracle_roll(OracleTree::new(tree)), th.tb),
        th.tp,
    );
    render_labelmap(&bottomup_provenance(th), &t.members, &t.unassigned)
}

/// Layer-by-layer selection below the root: each layer sorted by subtree
/// images descending then id, qualifying nodes taken until the budget is
/// spent. Every synset then goes to its nearest selected ancestor-or-self.
pub fn oracle_topdown_text(tree: &PlainTree, th: &Thresholds) -> String {
    let max_depth = tree.parent.keys().map(|v| tree.depth(v)).max().unwrap_or(0);
    let mut selected: BTreeSet<String> = BTreeSet::new();
    'layers: for d in 1..=max_depth {
        let mut layer: Vec<(u64, String)> = tree
            .parent
            .keys()
            .filter(|v| tree.depth(v) == d)
            .map(|v| (tree.subtree(v), v.clone()))
            .collect();
        layer.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        for (sub, v) in layer {
            if selected.len() == th.budget {
                break 'layers;
            }
            if sub >= th.tt {
                selected.insert(v);
            }
        }
    }
    let mut classes: BTreeMap<String, Vec<(String, u64)>> =
        selected.iter().map(|s| (s.clone(), Vec::new())).collect();
    let mut unassigned = Vec::new();
    for (v, c) in &tree.count {
        let owner = std::iter::once(v.clone())
            .chain(tree.ancestors(v))
            .find(|a| selected.contains(a));
        match owner {
            Some(o) => classes.get_mut(&o).unwrap().push((v.clone(), *c)),
            None => unassigned.push((v.clone(), *c)),
        }
    }
    render_labelmap(&topdown_provenance(th), &classes, &unassigned)
}
