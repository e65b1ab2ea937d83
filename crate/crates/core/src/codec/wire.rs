//! Compact seed-based wire form of coded-symbol headers.
//!
//! A frame is the 4-byte magic `RCS1`, a little-endian `u32` record count,
//! then fixed 20-byte records:
//!
//! | bytes | field                          |
//! |-------|--------------------------------|
//! | 0..2  | origin user (`u16`)            |
//! | 2..6  | time frame (`u32`)             |
//! | 6..8  | degree (`u16`)                 |
//! | 8..12 | encoding union length (`u32`)  |
//! | 12..20| neighbour seed (`u64`)         |
//!
//! Neighbours are not transmitted; the receiver regenerates them with
//! [`SymbolHeader::expand`] from the seed and the sender's union.

use super::{encode::neighbor_positions, CodedSymbol, DegreeDistribution};

pub const MAGIC: &[u8; 4] = b"RCS1";
pub const RECORD_LEN: usize = 20;
/// Upper bound on records per frame, to bound allocation on hostile input.
pub const MAX_RECORDS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WireError {
    #[error("frame shorter than its header")]
    Truncated,
    #[error("bad magic")]
    BadMagic,
    #[error("frame declares {declared} records but carries {actual} bytes of records")]
    LengthMismatch { declared: usize, actual: usize },
    #[error("frame declares {0} records, above the limit")]
    TooManyRecords(usize),
    #[error("record {index}: {message}")]
    BadRecord { index: usize, message: &'static str },
    #[error("union has {actual} symbols, header expects {expected}")]
    UnionMismatch { expected: u32, actual: usize },
    #[error("regenerated degree {regenerated} differs from header degree {declared}")]
    DegreeMismatch { declared: u16, regenerated: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolHeader {
    pub origin: u16,
    pub frame: u32,
    pub degree: u16,
    pub union_len: u32,
    pub seed: u64,
}

impl SymbolHeader {
    pub fn from_symbol(sym: &CodedSymbol, union_len: usize) -> Self {
        Self {
            origin: sym.origin as u16,
            frame: sym.frame,
            degree: sym.neighbors.len() as u16,
            union_len: union_len as u32,
            seed: sym.seed,
        }
    }

    /// Regenerates the neighbour set against the sender's union.
    pub fn expand(&self, union: &[u32], dist: &DegreeDistribution) -> Result<Vec<u32>, WireError> {
        if union.len() != self.union_len as usize {
            return Err(WireError::UnionMismatch { expected: self.union_len, actual: union.len() });
        }
        let positions = neighbor_positions(self.seed, union.len(), dist);
        if positions.len() != self.degree as usize {
            return Err(WireError::DegreeMismatch {
                declared: self.degree,
                regenerated: positions.len(),
            });
        }
        Ok(positions.into_iter().map(|p| union[p]).collect())
    }

    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.origin.to_le_bytes());
        out.extend_from_slice(&self.frame.to_le_bytes());
        out.extend_from_slice(&self.degree.to_le_bytes());
        out.extend_from_slice(&self.union_len.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
    }

    fn read(rec: &[u8; RECORD_LEN], index: usize) -> Result<Self, WireError> {
        let header = Self {
            origin: u16::from_le_bytes([rec[0], rec[1]]),
            frame: u32::from_le_bytes(rec[2..6].try_into().unwrap()),
            degree: u16::from_le_bytes([rec[6], rec[7]]),
            union_len: u32::from_le_bytes(rec[8..12].try_into().unwrap()),
            seed: u64::from_le_bytes(rec[12..20].try_into().unwrap()),
        };
        if header.degree == 0 {
            return Err(WireError::BadRecord { index, message: "degree is zero" });
        }
        if u32::from(header.degree) > header.union_len {
            return Err(WireError::BadRecord { index, message: "degree exceeds union length" });
        }
        Ok(header)
    }
}

pub fn encode_frame(headers: &[SymbolHeader]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + headers.len() * RECORD_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(headers.len() as u32).to_le_bytes());
    for h in headers {
        h.write(&mut out);
    }
    out
}

pub fn decode_frame(bytes: &[u8]) -> Result<Vec<SymbolHeader>, WireError> {
    if bytes.len() < 8 {
        return Err(WireError::Truncated);
    }
    if &bytes[..4] != MAGIC {
        return Err(WireError::BadMagic);
    }
    let declared = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if declared > MAX_RECORDS {
        return Err(WireError::TooManyRecords(declared));
    }
    let body = &bytes[8..];
    if body.len() != declared * RECORD_LEN {
        return Err(WireError::LengthMismatch { declared, actual: body.len() });
    }
    body.chunks_exact(RECORD_LEN)
        .enumerate()
        .map(|(i, rec)| SymbolHeader::read(rec.try_into().unwrap(), i))
        .collect()
}
