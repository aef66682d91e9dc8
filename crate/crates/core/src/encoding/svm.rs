//! Soft-margin kernel SVM on a precomputed Gram matrix.
//!
//! Solves the dual
//!
//! ```text
//! min  1/2 a'Qa - e'a   s.t.  0 <= a_i <= C,  y'a = 0,   Q_ij = y_i y_j K_ij
//! ```
//!
//! by sequential minimal optimization: each step picks the maximal violating
//! pair (second-order choice of the second index) and solves the two-variable
//! subproblem in closed form.

use rayon::prelude::*;

use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    /// Stop once the maximal KKT violation drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl SvmParams {
    pub fn new(c: f64) -> Self {
        SvmParams {
            c,
            tolerance: 1e-3,
            max_iterations: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub alphas: Vec<f64>,
    /// `+1.0` or `-1.0` per training item.
    pub labels: Vec<f64>,
    pub bias: f64,
    pub c: f64,
    /// Maximal KKT violation when the solver stopped.
    pub kkt_violation: f64,
    pub iterations: usize,
}

impl SvmModel {
    /// `alpha_i * y_i` per training item.
    pub fn coefficients(&self) -> Vec<f64> {
        self.alphas
            .iter()
            .zip(&self.labels)
            .map(|(a, y)| a * y)
            .collect()
    }

    pub fn support_count(&self) -> usize {
        self.alphas.iter().filter(|a| **a > 0.0).count()
    }

    /// `|sum alpha_i y_i|`.
    pub fn equality_residual(&self) -> f64 {
        self.coefficients().iter().sum::<f64>().abs()
    }
}

fn check_gram(gram: &[Vec<f64>]) -> Result<()> {
    let n = gram.len();
    for (i, row) in gram.iter().enumerate() {
        if row.len() != n {
            return Err(Error::contract(format!(
                "gram row {i} has {} columns, expected {n}",
                row.len()
            )));
        }
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::contract(format!("gram[{i}][{j}] is not finite")));
            }
            let w = gram[j][i];
            if (v - w).abs() > 1e-9 * v.abs().max(w.abs()).max(1.0) {
                return Err(Error::contract(format!(
                    "gram is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

pub fn train_kernel_svm(gram: &[Vec<f64>], labels: &[f64], c: f64) -> Result<SvmModel> {
    train_kernel_svm_with(gram, labels, &SvmParams::new(c))
}

pub fn train_kernel_svm_with(
    gram: &[Vec<f64>],
    labels: &[f64],
    params: &SvmParams,
) -> Result<SvmModel> {
    let n = gram.len();
    if labels.len() != n {
        return Err(Error::contract(format!(
            "{} labels for a {n}x{n} gram",
            labels.len()
        )));
    }
    if labels.iter().any(|y| *y != 1.0 && *y != -1.0) {
        return Err(Error::contract("labels must be +1 or -1"));
    }
    if !labels.contains(&1.0) || !labels.contains(&-1.0) {
        return Err(Error::contract(
            "training needs at least one positive and one negative",
        ));
    }
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(Error::contract(format!(
            "C must be positive, got {}",
            params.c
        )));
    }
    check_gram(gram)?;

    let c = params.c;
    let y = labels;
    let q = |i: usize, j: usize| y[i] * y[j] * gram[i][j];
    let mut alpha = vec![0.0; n];
    // Gradient of the dual objective: Qa - e.
    let mut grad = vec![-1.0; n];
    let in_up = |a: f64, y: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
    let in_low = |a: f64, y: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);

    let mut iterations = 0;
    let mut violation;
    loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(alpha[t], y[t]) && -y[t] * grad[t] >= gmax {
                gmax = -y[t] * grad[t];
                i_sel = Some(t);
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut best_gain = f64::INFINITY;
        if let Some(i) = i_sel {
            for t in 0..n {
                if !in_low(alpha[t], y[t]) {
                    continue;
                }
                gmax2 = gmax2.max(y[t] * grad[t]);
                let b = gmax + y[t] * grad[t];
                if b > 0.0 {
                    let mut a = gram[i][i] + gram[t][t] - 2.0 * gram[i][t];
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let gain = -(b * b) / a;
                    if gain <= best_gain {
                        best_gain = gain;
                        j_sel = Some(t);
                    }
                }
            }
        }
        violation = gmax + gmax2;
        let (Some(i), Some(j)) = (i_sel, j_sel) else {
            break;
        };
        if violation < params.tolerance || iterations >= params.max_iterations {
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
    }
    if violation >= params.tolerance {
        log::warn!("svm: stopped after {iterations} iterations with KKT violation {violation}");
    }

    Ok(SvmModel {
        bias: -offset(&alpha, y, &grad, c),
        alphas: alpha,
        labels: y.to_vec(),
        c,
        kkt_violation: violation.max(0.0),
        iterations,
    })
}

/// Decision offset: mean of `y_i * grad_i` over free variables, or the
/// midpoint of the feasible interval when none is free.
fn offset(alpha: &[f64], y: &[f64], grad: &[f64], c: f64) -> f64 {
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else {
        (upper + lower) / 2.0
    }
}

/// Decision values for test items; `gram_rows[j][i] = K(test_j, train_i)`.
pub fn svm_score(model: &SvmModel, gram_rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = model.alphas.len();
    if let Some((j, row)) = gram_rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::contract(format!(
            "score row {j} has {} columns, model has {n} training items",
            row.len()
        )));
    }
    let coef = model.coefficients();
    Ok(gram_rows
        .par_iter()
        .map(|row| coef.iter().zip(row).map(|(a, k)| a * k).sum::<f64>() + model.bias)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_linear() {
        // Points at -1 and +1 on a line, linear kernel.
        let gram = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        let m = train_kernel_svm(&gram, &[-1.0, 1.0], 100.0).unwrap();
        assert!(m.alphas.iter().all(|a| *a > 0.0));
        assert!((m.alphas[0] - 0.5).abs() < 1e-12);
        assert!(m.bias.abs() < 1e-12);
        // Midpoint x = 0 has zero kernel with both points.
        let s = svm_score(&m, &[vec![0.0, 0.0], gram[0].clone(), gram[1].clone()]).unwrap();
        assert!(s[0].abs() < 1e-12);
        assert!((s[1] + 1.0).abs() < 1e-9);
        assert!((s[2] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let gram = vec![vec![1.0, 0.5], vec![0.5, 1.0]];
        assert!(train_kernel_svm(&gram, &[1.0, 1.0], 1.0).is_err());
        assert!(train_kernel_svm(&gram, &[1.0, 0.0], 1.0).is_err());
        assert!(train_kernel_svm(&gram, &[1.0], 1.0).is_err());
        assert!(train_kernel_svm(&gram, &[1.0, -1.0], 0.0).is_err());
        let skew = vec![vec![1.0, 0.5], vec![0.4, 1.0]];
        assert!(train_kernel_svm(&skew, &[1.0, -1.0], 1.0).is_err());
    }

    #[test]
    fn zero_model_scores_bias() {
        let m = SvmModel {
            alphas: vec![0.0; 3],
            labels: vec![1.0, -1.0, 1.0],
            bias: 0.25,
            c: 1.0,
            kkt_violation: 0.0,
            iterations: 0,
        };
        let s = svm_score(&m, &[vec![0.3, 0.2, 0.9], vec![1.0, 1.0, 1.0]]).unwrap();
        assert_eq!(s, vec![0.25, 0.25]);
        assert!(svm_score(&m, &[vec![1.0]]).is_err());
    }

    #[test]
    fn box_constraint_binds_with_small_c() {
        // Overlapping classes force some alphas to C.
        let xs: [f64; 6] = [0.0, 1.0, 2.0, 3.0, 1.5, 2.5];
        let ys = [-1.0, -1.0, 1.0, 1.0, 1.0, -1.0];
        let gram: Vec<Vec<f64>> = xs
            .iter()
            .map(|a| xs.iter().map(|b| (-(a - b) * (a - b)).exp()).collect())
            .collect();
        let m = train_kernel_svm(&gram, &ys, 0.5).unwrap();
        assert!(m.alphas.iter().all(|a| (0.0..=0.5).contains(a)));
        assert!(m.alphas.contains(&0.5));
        assert!(m.equality_residual() < 1e-9);
        assert!(m.kkt_violation < 1e-3);
    }
}
