//! Per-video frame features.
//!
//! Two on-disk layouts are accepted: CSV with one frame per line, and a
//! little-endian binary layout `u32 frame_count, u32 dim, f32[frame_count * dim]`
//! in row-major order.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Non-empty list of equal-length, finite frame vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    data: Vec<f64>,
    dim: usize,
}

impl FrameMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::contract("frame matrix needs at least one frame"))?;
        if dim == 0 {
            return Err(Error::contract("frame dimension must be positive"));
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::contract(format!(
                    "frame {i} has dimension {}, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(data, dim)
    }

    pub fn from_flat(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::contract(
                "frame data must hold a positive number of full rows",
            ));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(FrameMatrix { data, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Row indices in lexicographic order of the rows. Reductions that follow
    /// this order give bit-identical results for any permutation of frames.
    pub(crate) fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.row(a)
                .iter()
                .zip(self.row(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        });
        order
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Format(format!("frames csv: {e}")))?;
            let line = record.position().map_or(i + 1, |p| p.line() as usize);
            let row = record
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::parse("frames", line, format!("not a number: `{f}`")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Format("frames csv holds no frames".into()));
        }
        FrameMatrix::new(rows).map_err(|e| Error::Format(format!("frames csv: {e}")))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_bin(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::Format("frames bin: truncated header".into()));
        }
        let count = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
        let dim = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let expected = 8 + count * dim * 4;
        if bytes.len() != expected {
            return Err(Error::Format(format!(
                "frames bin: {count}x{dim} needs {expected} bytes, got {}",
                bytes.len()
            )));
        }
        let data = bytes[8..]
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap())))
            .collect();
        FrameMatrix::from_flat(data, dim).map_err(|e| Error::Format(format!("frames bin: {e}")))
    }

    /// Values are narrowed to `f32`.
    pub fn to_bin(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.data.len() * 4);
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(FrameMatrix::new(vec![]).is_err());
        assert!(FrameMatrix::new(vec![vec![]]).is_err());
        assert!(FrameMatrix::new(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(matches!(
            FrameMatrix::new(vec![vec![1.0, f64::NAN]]),
            Err(Error::NonFinite(1))
        ));
    }

    #[test]
    fn csv_roundtrip() {
        let m = FrameMatrix::from_csv("# video 1\n0.5, 1\n2,3.25\n").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.row(1), &[2.0, 3.25]);
        assert_eq!(FrameMatrix::from_csv(&m.to_csv()).unwrap(), m);
        assert!(FrameMatrix::from_csv("1,x\n").is_err());
        assert!(FrameMatrix::from_csv("1,2\n3\n").is_err());
    }

    #[test]
    fn bin_layout() {
        let m = FrameMatrix::new(vec![vec![1.0, -2.5], vec![0.25, 4.0], vec![3.0, 0.0]]).unwrap();
        let bytes = m.to_bin();
        assert_eq!(&bytes[0..4], &3u32.to_le_bytes());
        assert_eq!(&bytes[4..8], &2u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &1.0f32.to_le_bytes());
        assert_eq!(bytes.len(), 8 + 6 * 4);
        assert_eq!(FrameMatrix::from_bin(&bytes).unwrap(), m);
        assert!(FrameMatrix::from_bin(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn canonical_order_sorts_rows() {
        let m = FrameMatrix::new(vec![vec![2.0, 0.0], vec![1.0, 5.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(m.canonical_order(), vec![2, 1, 0]);
    }
}
