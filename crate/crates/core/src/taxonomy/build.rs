use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};

use super::{SynsetId, Taxonomy, TaxonomyNode};

const SYNTHETIC_ROOT: &str = "__root__";

/// Builds the canonical tree from `(parent, child)` edges.
///
/// Nodes with several parents keep the one closest to a root (ties go to the
/// lexicographically smallest parent id); every other incoming edge is
/// recorded in [`Taxonomy::dropped_edges`]. Several parentless nodes get a
/// synthetic root with no images above them. Synsets that only appear in
/// `counts` are hung under the root. Missing counts are zero.
pub fn build_taxonomy(
    edges: &[(SynsetId, SynsetId)],
    counts: &BTreeMap<SynsetId, u64>,
    names: &BTreeMap<SynsetId, String>,
) -> Result<Taxonomy> {
    if edges.is_empty() {
        return Err(Error::EmptyEdges);
    }

    let in_edges: BTreeSet<&SynsetId> = edges.iter().flat_map(|(p, c)| [p, c]).collect();
    let mut ids: Vec<SynsetId> = in_edges.iter().map(|&id| id.clone()).collect();
    let orphans: Vec<SynsetId> = counts
        .keys()
        .filter(|id| !in_edges.contains(id))
        .cloned()
        .collect();
    ids.extend(orphans.iter().cloned());
    ids.sort();

    let position: BTreeMap<&SynsetId, usize> =
        ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
    let n = ids.len();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (p, c) in edges {
        let (p, c) = (position[p], position[c]);
        parents[c].push(p);
        children[p].push(c);
    }

    check_acyclic(&ids, &parents, &children)?;

    let edge_nodes: Vec<usize> = (0..n).filter(|&i| in_edges.contains(&ids[i])).collect();
    let roots: Vec<usize> = edge_nodes
        .iter()
        .copied()
        .filter(|&i| parents[i].is_empty())
        .collect();

    // Shortest distance from any root over the full graph.
    let mut depth = vec![usize::MAX; n];
    let mut queue: VecDeque<usize> = roots.iter().copied().collect();
    for &r in &roots {
        depth[r] = 0;
    }
    while let Some(v) = queue.pop_front() {
        for &c in &children[v] {
            if depth[c] == usize::MAX {
                depth[c] = depth[v] + 1;
                queue.push_back(c);
            }
        }
    }

    let mut nodes: Vec<TaxonomyNode> = ids
        .iter()
        .map(|id| TaxonomyNode {
            id: id.clone(),
            name: names.get(id).cloned(),
            direct_count: counts.get(id).copied().unwrap_or(0),
            children: Vec::new(),
            parent: None,
        })
        .collect();

    let mut dropped = Vec::new();
    for v in 0..n {
        let Some(&keep) = parents[v]
            .iter()
            .min_by(|&&a, &&b| depth[a].cmp(&depth[b]).then_with(|| ids[a].cmp(&ids[b])))
        else {
            continue;
        };
        nodes[v].parent = Some(keep);
        nodes[keep].children.push(v);
        for &p in &parents[v] {
            if p != keep {
                dropped.push((ids[v].clone(), ids[p].clone()));
            }
        }
    }
    dropped.sort();
    if !dropped.is_empty() {
        log::warn!(
            "dropped {} edge(s) to resolve multiple parents",
            dropped.len()
        );
    }

    let synthetic = roots.len() > 1;
    let root = if synthetic {
        let mut root_id = SYNTHETIC_ROOT.to_owned();
        while position.contains_key(&SynsetId(root_id.clone())) {
            root_id.push('_');
        }
        log::warn!(
            "{} parentless synsets; inserted synthetic root `{root_id}`",
            roots.len()
        );
        let r = nodes.len();
        nodes.push(TaxonomyNode {
            id: SynsetId(root_id),
            name: None,
            direct_count: 0,
            children: Vec::new(),
            parent: None,
        });
        for &top in &roots {
            nodes[top].parent = Some(r);
            nodes[r].children.push(top);
        }
        r
    } else {
        roots[0]
    };

    if !orphans.is_empty() {
        log::warn!(
            "{} synset(s) have counts but no edges; attached under the root",
            orphans.len()
        );
    }
    for id in &orphans {
        let v = position[id];
        nodes[v].parent = Some(root);
        nodes[root].children.push(v);
    }

    for node in &mut nodes {
        node.children.sort_by(|&a, &b| ids_cmp(&ids, a, b));
    }
    let unknown_names = names.keys().filter(|id| !position.contains_key(id)).count();
    if unknown_names > 0 {
        log::warn!("{unknown_names} name(s) refer to synsets outside the hierarchy");
    }

    Ok(Taxonomy::from_parts(
        nodes, root, dropped, synthetic, orphans,
    ))
}

// Indices past `ids` belong to the synthetic root, which is never a child.
fn ids_cmp(ids: &[SynsetId], a: usize, b: usize) -> std::cmp::Ordering {
    ids[a].cmp(&ids[b])
}

/// Kahn's algorithm over the full multi-parent graph. On failure, walks
/// parent links inside the residual graph until a node repeats and reports an
/// edge of that cycle.
fn check_acyclic(ids: &[SynsetId], parents: &[Vec<usize>], children: &[Vec<usize>]) -> Result<()> {
    let n = ids.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut removed = vec![false; n];
    while let Some(v) = queue.pop_front() {
        removed[v] = true;
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                queue.push_back(c);
            }
        }
    }
    let Some(start) = (0..n).find(|&i| !removed[i]) else {
        return Ok(());
    };
    let mut visited = vec![false; n];
    let mut v = start;
    loop {
        visited[v] = true;
        let p = parents[v]
            .iter()
            .copied()
            .filter(|&p| !removed[p])
            .min()
            .expect("residual node keeps a residual parent");
        if visited[p] {
            return Err(Error::Cycle {
                parent: ids[p].to_string(),
                child: ids[v].to_string(),
            });
        }
        v = p;
    }
}
