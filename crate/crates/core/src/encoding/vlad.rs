use crate::error::{Error, Result};

use super::{Codebook, FrameMatrix, Normalized};

/// VLAD: per-centroid sums of residuals to the nearest centroid, concatenated
/// into a `k * dim` vector, then signed square root and l2 normalization.
pub fn vlad_encode(frames: &FrameMatrix, codebook: &Codebook) -> Result<Normalized> {
    let dim = codebook.dim();
    if frames.dim() != dim {
        return Err(Error::contract(format!(
            "frame dimension {} does not match codebook dimension {dim}",
            frames.dim()
        )));
    }
    let mut acc = vec![0.0; codebook.k() * dim];
    for i in frames.canonical_order() {
        let frame = frames.row(i);
        let (c, _) = codebook.nearest(frame);
        let block = &mut acc[c * dim..(c + 1) * dim];
        for ((a, x), m) in block.iter_mut().zip(frame).zip(codebook.centroid(c)) {
            *a += x - m;
        }
    }
    for a in &mut acc {
        *a = a.signum() * a.abs().sqrt();
    }
    let norm = acc.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm == 0.0 {
        log::warn!("vlad_encode: all residuals are zero");
        // signum(0.0) * 0 can leave -0.0 behind; report plain zeros.
        return Ok(Normalized {
            values: vec![0.0; acc.len()],
            degenerate: true,
        });
    }
    for a in &mut acc {
        *a /= norm;
    }
    Ok(Normalized {
        values: acc,
        degenerate: false,
    })
}
