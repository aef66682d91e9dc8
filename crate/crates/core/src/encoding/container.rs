//! Binary container for codebooks and SVM models.
//!
//! ```text
//! magic "TXRG" | version u8 | kind u8 | provenance: u32 len + UTF-8 | payload
//! ```
//!
//! All integers and floats are little-endian; floats are `f64`.
//!
//! * codebook (kind 1): `u64 seed, u32 k, u32 dim, f64[k * dim]`
//! * svm model (kind 2): `f64 C, f64 bias, f64 kkt_violation, u64 iterations,
//!   u32 n, n x (f64 alpha, f64 label), n x (u32 len + UTF-8 training id)`

use crate::error::{Error, Result};

use super::{Codebook, SvmModel};

pub const MAGIC: &[u8; 4] = b"TXRG";
pub const FORMAT_VERSION: u8 = 1;

const KIND_CODEBOOK: u8 = 1;
const KIND_SVM: u8 = 2;

/// An SVM model together with the training ids its columns refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredModel {
    pub model: SvmModel,
    pub train_ids: Vec<String>,
}

struct Writer(Vec<u8>);

impl Writer {
    fn new(kind: u8, provenance: &str) -> Self {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.0.push(FORMAT_VERSION);
        w.0.push(kind);
        w.str(provenance);
        w
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.0.extend_from_slice(s.as_bytes());
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn open(bytes: &'a [u8], kind: u8) -> Result<(Self, String)> {
        if bytes.len() < 6 || &bytes[..4] != MAGIC {
            return Err(Error::Format("not a container file (bad magic)".into()));
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported container version {}",
                bytes[4]
            )));
        }
        if bytes[5] != kind {
            return Err(Error::Format(format!(
                "container holds kind {}, expected {kind}",
                bytes[5]
            )));
        }
        let mut r = Reader { bytes, pos: 6 };
        let provenance = r.str()?;
        Ok((r, provenance))
    }
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("container truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn str(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| Error::Format("container string is not UTF-8".into()))
    }
    fn finish(self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Format(
                "trailing bytes after container payload".into(),
            ));
        }
        Ok(())
    }
}

pub fn encode_codebook(codebook: &Codebook, provenance: &str) -> Vec<u8> {
    let mut w = Writer::new(KIND_CODEBOOK, provenance);
    w.u64(codebook.seed);
    w.u32(codebook.k() as u32);
    w.u32(codebook.dim() as u32);
    for c in codebook.centroids() {
        for v in c {
            w.f64(*v);
        }
    }
    w.0
}

pub fn decode_codebook(bytes: &[u8]) -> Result<(Codebook, String)> {
    let (mut r, provenance) = Reader::open(bytes, KIND_CODEBOOK)?;
    let seed = r.u64()?;
    let k = r.u32()? as usize;
    let dim = r.u32()? as usize;
    let mut centroids = Vec::with_capacity(k);
    for _ in 0..k {
        centroids.push((0..dim).map(|_| r.f64()).collect::<Result<Vec<f64>>>()?);
    }
    r.finish()?;
    let codebook = Codebook::new(centroids, seed).map_err(|e| Error::Format(e.to_string()))?;
    Ok((codebook, provenance))
}

pub fn encode_model(stored: &StoredModel, provenance: &str) -> Vec<u8> {
    let m = &stored.model;
    let mut w = Writer::new(KIND_SVM, provenance);
    w.f64(m.c);
    w.f64(m.bias);
    w.f64(m.kkt_violation);
    w.u64(m.iterations as u64);
    w.u32(m.alphas.len() as u32);
    for (a, y) in m.alphas.iter().zip(&m.labels) {
        w.f64(*a);
        w.f64(*y);
    }
    for id in &stored.train_ids {
        w.str(id);
    }
    w.0
}

pub fn decode_model(bytes: &[u8]) -> Result<(StoredModel, String)> {
    let (mut r, provenance) = Reader::open(bytes, KIND_SVM)?;
    let c = r.f64()?;
    let bias = r.f64()?;
    let kkt_violation = r.f64()?;
    let iterations = r.u64()? as usize;
    let n = r.u32()? as usize;
    let mut alphas = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        alphas.push(r.f64()?);
        labels.push(r.f64()?);
    }
    let train_ids = (0..n).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    let model = SvmModel {
        alphas,
        labels,
        bias,
        c,
        kkt_violation,
        iterations,
    };
    Ok((StoredModel { model, train_ids }, provenance))
}
