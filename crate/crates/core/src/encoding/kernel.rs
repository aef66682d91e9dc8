//! Exponential chi-squared kernel for non-negative histogram features:
//! `K(x, y) = exp(-gamma * sum_m (x_m - y_m)^2 / (x_m + y_m + epsilon))`.

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub gamma: f64,
    pub epsilon: f64,
}

impl KernelConfig {
    pub fn new(gamma: f64, epsilon: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::contract(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::contract(format!(
                "epsilon must be non-negative, got {epsilon}"
            )));
        }
        Ok(KernelConfig { gamma, epsilon })
    }
}

/// Chi-squared distance. Terms with a zero numerator contribute nothing, so
/// `epsilon = 0` is safe where both components vanish.
pub fn chi2_distance(x: &[f64], y: &[f64], epsilon: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let diff = a - b;
            if diff == 0.0 {
                0.0
            } else {
                diff * diff / (a + b + epsilon)
            }
        })
        .sum()
}

fn check_inputs(sets: &[&[Vec<f64>]]) -> Result<usize> {
    let dim = sets
        .iter()
        .flat_map(|s| s.first())
        .map(Vec::len)
        .next()
        .unwrap_or(0);
    for set in sets {
        for (i, v) in set.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::contract(format!(
                    "vector {i} has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            if let Some(m) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite(m));
            }
            if let Some(x) = v.iter().find(|x| **x < 0.0) {
                return Err(Error::contract(format!(
                    "chi-squared kernel needs non-negative components, vector {i} has {x}"
                )));
            }
        }
    }
    Ok(dim)
}

/// `rows x cols` kernel matrix. Rows are computed in parallel; each entry is
/// reduced serially, so the result does not depend on the thread count.
pub fn chi2_kernel(
    rows: &[Vec<f64>],
    cols: &[Vec<f64>],
    config: &KernelConfig,
) -> Result<Vec<Vec<f64>>> {
    check_inputs(&[rows, cols])?;
    Ok(rows
        .par_iter()
        .map(|x| {
            cols.iter()
                .map(|y| (-config.gamma * chi2_distance(x, y, config.epsilon)).exp())
                .collect()
        })
        .collect())
}

/// `1 / mean chi-squared distance` over distinct training pairs; `1.0` when
/// there is no pair or every pair coincides.
pub fn default_gamma(train: &[Vec<f64>], epsilon: f64) -> Result<f64> {
    check_inputs(&[train])?;
    let n = train.len();
    if n < 2 {
        return Ok(1.0);
    }
    let row_sums: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .map(|j| chi2_distance(&train[i], &train[j], epsilon))
                .sum()
        })
        .collect();
    let mean = row_sums.iter().sum::<f64>() / (n * (n - 1) / 2) as f64;
    Ok(if mean > 0.0 { 1.0 / mean } else { 1.0 })
}
