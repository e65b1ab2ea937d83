//! LT encoding over arbitrary unions of source symbols.

use rand::{seq::index, Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CodecError, DegreeDistribution};

/// A `T`-bit packet. Bits beyond `T` in the last byte are always zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Packet(Vec<u8>);

impl Packet {
    pub fn zeros(bits: usize) -> Self {
        Packet(vec![0; bits.div_ceil(8)])
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Packet(bytes)
    }

    pub fn random<R: Rng + ?Sized>(bits: usize, rng: &mut R) -> Self {
        let mut bytes = vec![0u8; bits.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        if bits % 8 != 0 {
            if let Some(last) = bytes.last_mut() {
                *last &= (1u8 << (bits % 8)) - 1;
            }
        }
        Packet(bytes)
    }

    pub fn xor_assign(&mut self, other: &Packet) {
        debug_assert_eq!(self.0.len(), other.0.len());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// Who sent a coded symbol and when.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SymbolTag {
    pub origin: usize,
    pub frame: u32,
}

/// One LT-coded packet: the XOR of the source symbols in `neighbors`.
///
/// Source symbols are named by global index (`user * k + index`).
#[derive(Debug, Clone, PartialEq)]
pub struct CodedSymbol {
    pub origin: usize,
    pub frame: u32,
    pub neighbors: Vec<u32>,
    pub payload: Option<Packet>,
    /// Per-symbol seed that regenerates `neighbors` from the encoding union.
    pub seed: u64,
}

impl CodedSymbol {
    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }
}

/// Regenerates the neighbour positions (indices into the union) of a symbol
/// from its seed. The sampled degree is clamped to the union size.
pub fn neighbor_positions(seed: u64, union_len: usize, dist: &DegreeDistribution) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degree = dist.sample(&mut rng).min(union_len);
    index::sample(&mut rng, union_len, degree).into_vec()
}

/// Draws `count` coded symbols over `union` with degrees from `dist`.
///
/// Each symbol's neighbours are `min(d, |union|)` distinct members of
/// `union` chosen uniformly without replacement. Output is a pure function
/// of the RNG state.
pub fn lt_encode<R: RngCore + ?Sized>(
    union: &[u32],
    dist: &DegreeDistribution,
    count: usize,
    tag: SymbolTag,
    rng: &mut R,
) -> Result<Vec<CodedSymbol>, CodecError> {
    if union.is_empty() {
        return Err(CodecError::NoSourceSymbols);
    }
    Ok((0..count)
        .map(|_| {
            let seed = rng.next_u64();
            let neighbors = neighbor_positions(seed, union.len(), dist)
                .into_iter()
                .map(|pos| union[pos])
                .collect();
            CodedSymbol { origin: tag.origin, frame: tag.frame, neighbors, payload: None, seed }
        })
        .collect())
}

/// [`lt_encode`] followed by filling in payloads from `source`.
pub fn lt_encode_payload<'a, R: RngCore + ?Sized>(
    union: &[u32],
    dist: &DegreeDistribution,
    count: usize,
    tag: SymbolTag,
    rng: &mut R,
    packet_bits: usize,
    source: impl Fn(u32) -> &'a Packet,
) -> Result<Vec<CodedSymbol>, CodecError> {
    let mut symbols = lt_encode(union, dist, count, tag, rng)?;
    for sym in &mut symbols {
        let mut acc = Packet::zeros(packet_bits);
        for &n in &sym.neighbors {
            acc.xor_assign(source(n));
        }
        sym.payload = Some(acc);
    }
    Ok(symbols)
}
