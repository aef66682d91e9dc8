use crate::error::{Error, Result};

use super::FrameMatrix;

/// A normalized vector. `degenerate` is set when the input had zero norm and
/// was passed through unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub values: Vec<f64>,
    pub degenerate: bool,
}

/// Divides by the sum of absolute values. The zero vector is returned as is,
/// flagged degenerate.
pub fn l1_normalize(v: &[f64]) -> Result<Normalized> {
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let norm: f64 = v.iter().map(|x| x.abs()).sum();
    if norm == 0.0 {
        log::warn!("l1_normalize: zero vector left unnormalized");
        return Ok(Normalized {
            values: v.to_vec(),
            degenerate: true,
        });
    }
    Ok(Normalized {
        values: v.iter().map(|x| x / norm).collect(),
        degenerate: false,
    })
}

/// Componentwise mean of the frames followed by l1 normalization.
pub fn average_pool(frames: &FrameMatrix) -> Result<Normalized> {
    let mut sum = vec![0.0; frames.dim()];
    for i in frames.canonical_order() {
        for (s, x) in sum.iter_mut().zip(frames.row(i)) {
            *s += x;
        }
    }
    let n = frames.len() as f64;
    for s in &mut sum {
        *s /= n;
    }
    l1_normalize(&sum)
}
