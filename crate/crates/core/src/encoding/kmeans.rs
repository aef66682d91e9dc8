//! Seeded k-means for VLAD codebooks: k-means++ seeding, then Lloyd
//! iterations until no centroid moves by `MOVE_TOLERANCE` or
//! `MAX_ITERATIONS` is hit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 100;
pub const MOVE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    /// `k * dim` values, row-major.
    centroids: Vec<f64>,
    k: usize,
    dim: usize,
    pub seed: u64,
}

impl Codebook {
    pub fn new(centroids: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let k = centroids.len();
        let dim = centroids.first().map_or(0, Vec::len);
        if k == 0 || dim == 0 {
            return Err(Error::contract(
                "codebook needs k >= 1 centroids of positive dimension",
            ));
        }
        if centroids.iter().any(|c| c.len() != dim) {
            return Err(Error::contract("centroids differ in dimension"));
        }
        let flat: Vec<f64> = centroids.into_iter().flatten().collect();
        if let Some(i) = flat.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Codebook {
            centroids: flat,
            k,
            dim,
            seed,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn centroid(&self, i: usize) -> &[f64] {
        &self.centroids[i * self.dim..(i + 1) * self.dim]
    }

    pub fn centroids(&self) -> impl Iterator<Item = &[f64]> {
        self.centroids.chunks_exact(self.dim)
    }

    /// Index of the closest centroid; ties go to the lower index.
    pub fn nearest(&self, v: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, c) in self.centroids().enumerate() {
            let d = sq_dist(v, c);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest_in(centroids: &[Vec<f64>], v: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = sq_dist(v, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn seed_centroids(vectors: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = vectors.len();
    let mut centroids = vec![vectors[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = vectors.iter().map(|v| sq_dist(v, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, d) in d2.iter().enumerate() {
                acc += d;
                if *d > 0.0 && acc >= target {
                    chosen = Some(i);
                    break;
                }
            }
            // Rounding can leave `acc` a hair under `target`.
            chosen.unwrap_or_else(|| d2.iter().rposition(|d| *d > 0.0).unwrap())
        } else {
            rng.random_range(0..n)
        };
        let c = vectors[pick].clone();
        for (d, v) in d2.iter_mut().zip(vectors) {
            *d = d.min(sq_dist(v, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Fits `k` centroids. Deterministic in `(vectors, k, seed)`.
pub fn kmeans_fit(vectors: &[Vec<f64>], k: usize, seed: u64) -> Result<Codebook> {
    if k == 0 {
        return Err(Error::contract("k must be at least 1"));
    }
    if vectors.len() < k {
        return Err(Error::contract(format!(
            "k-means needs at least k={k} vectors, got {}",
            vectors.len()
        )));
    }
    let dim = vectors[0].len();
    if dim == 0 || vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::contract(
            "k-means vectors must share a positive dimension",
        ));
    }
    if let Some(i) = vectors.iter().flatten().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(vectors, k, &mut rng);
    let mut assignment = vec![0usize; vectors.len()];
    let mut dist = vec![0.0; vectors.len()];
    let mut previous_objective = f64::INFINITY;

    for _ in 0..MAX_ITERATIONS {
        for (i, v) in vectors.iter().enumerate() {
            let (c, d) = nearest_in(&centroids, v);
            assignment[i] = c;
            dist[i] = d;
        }
        repair_empty(&mut assignment, &mut dist, k);

        let objective: f64 = dist.iter().sum();
        debug_assert!(
            objective <= previous_objective + 1e-9 * previous_objective.abs().max(1.0),
            "k-means objective rose from {previous_objective} to {objective}"
        );
        previous_objective = objective;

        let mut sums = vec![vec![0.0; dim]; k];
        let mut sizes = vec![0usize; k];
        for (v, &c) in vectors.iter().zip(&assignment) {
            sizes[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(v) {
                *s += x;
            }
        }
        let mut max_move: f64 = 0.0;
        for c in 0..k {
            let mean: Vec<f64> = sums[c].iter().map(|s| s / sizes[c] as f64).collect();
            max_move = max_move.max(sq_dist(&mean, &centroids[c]).sqrt());
            centroids[c] = mean;
        }
        if max_move < MOVE_TOLERANCE {
            break;
        }
    }
    Codebook::new(centroids, seed)
}

/// Hands each empty cluster the point farthest from its centroid, taken from
/// a cluster that keeps at least one other point.
fn repair_empty(assignment: &mut [usize], dist: &mut [f64], k: usize) {
    let mut sizes = vec![0usize; k];
    for &c in assignment.iter() {
        sizes[c] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let donor = (0..assignment.len())
            .filter(|&i| sizes[assignment[i]] > 1)
            .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)))
            .expect("n >= k leaves a cluster with two points");
        sizes[assignment[donor]] -= 1;
        assignment[donor] = empty;
        dist[donor] = 0.0;
        sizes[empty] = 1;
    }
}
