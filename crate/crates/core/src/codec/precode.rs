//! High-rate systematic precode.
//!
//! The `k` intermediate symbols are the `n` message symbols followed by
//! `k − n` parity symbols. Parity `j` is the XOR of `check_degree` message
//! symbols chosen by a random left-regular socket permutation. Decoding
//! feeds the parity equations to the same peeling decoder used for LT
//! symbols, treating unrecovered intermediates as erasures.

use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CodecError, Packet, PeelingDecoder};

/// Check degree calibrated so that rate-0.95 codes at `k = 10000` repair a
/// uniformly random 0.5% erasure of intermediates in ≥ 99% of trials.
pub const DEFAULT_CHECK_DEGREE: usize = 57;
pub const DEFAULT_RATE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PrecodeSpec {
    None,
    RegularBipartite { rate: f64, check_degree: usize },
}

impl Default for PrecodeSpec {
    fn default() -> Self {
        PrecodeSpec::RegularBipartite { rate: DEFAULT_RATE, check_degree: DEFAULT_CHECK_DEGREE }
    }
}

impl PrecodeSpec {
    pub fn rate(&self) -> f64 {
        match self {
            PrecodeSpec::None => 1.0,
            PrecodeSpec::RegularBipartite { rate, .. } => *rate,
        }
    }

    /// Number of intermediate symbols for `n` message symbols, rounded up.
    pub fn intermediate_len(&self, n: usize) -> usize {
        // the epsilon keeps 9500 / 0.95 at 10000 despite float rounding
        ((n as f64 / self.rate()) - 1e-9).ceil().max(n as f64) as usize
    }

    /// Largest message length whose intermediate length does not exceed `k`.
    pub fn message_len(&self, k: usize) -> usize {
        let mut n = ((k as f64) * self.rate()).floor() as usize;
        while n > 0 && self.intermediate_len(n) > k {
            n -= 1;
        }
        n
    }

    pub fn validate(&self) -> Result<(), CodecError> {
        match *self {
            PrecodeSpec::None => Ok(()),
            PrecodeSpec::RegularBipartite { rate, check_degree } => {
                if !(rate > 0.0 && rate <= 1.0) {
                    return Err(CodecError::InvalidPrecode(format!("rate {rate} outside (0, 1]")));
                }
                if check_degree == 0 {
                    return Err(CodecError::InvalidPrecode("check degree must be positive".into()));
                }
                Ok(())
            }
        }
    }
}

/// A concrete precode instance: the parity check neighbourhoods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precode {
    n: usize,
    k: usize,
    checks: Vec<Vec<u32>>,
}

impl Precode {
    /// Builds the code for `n` message symbols. The check structure is a
    /// pure function of `seed`.
    pub fn new(spec: &PrecodeSpec, n: usize, seed: u64) -> Result<Self, CodecError> {
        spec.validate()?;
        if n == 0 {
            return Err(CodecError::NoSourceSymbols);
        }
        let k = spec.intermediate_len(n);
        let checks = match *spec {
            PrecodeSpec::None => Vec::new(),
            PrecodeSpec::RegularBipartite { check_degree, .. } => {
                let parity = k - n;
                let mut sockets: Vec<u32> =
                    (0..parity * check_degree).map(|s| (s % n) as u32).collect();
                sockets.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                sockets
                    .chunks(check_degree.max(1))
                    .map(|chunk| {
                        // repeated members cancel under XOR
                        let mut c = chunk.to_vec();
                        c.sort_unstable();
                        let mut out: Vec<u32> = Vec::with_capacity(c.len());
                        for v in c {
                            if out.last() == Some(&v) {
                                out.pop();
                            } else {
                                out.push(v);
                            }
                        }
                        out
                    })
                    .collect()
            }
        };
        Ok(Self { n, k, checks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Message-symbol neighbourhood of each parity symbol.
    pub fn checks(&self) -> &[Vec<u32>] {
        &self.checks
    }

    /// Parity equations over intermediate indices offset by `base`: each
    /// lists the message neighbours plus the parity symbol itself, and XORs
    /// to zero.
    pub fn constraints(&self, base: u32) -> impl Iterator<Item = Vec<u32>> + '_ {
        self.checks.iter().enumerate().map(move |(j, c)| {
            let mut eq: Vec<u32> = c.iter().map(|&m| base + m).collect();
            eq.push(base + (self.n + j) as u32);
            eq
        })
    }

    pub fn encode(&self, message: &[Packet]) -> Result<Vec<Packet>, CodecError> {
        if message.len() != self.n {
            return Err(CodecError::InvalidPrecode(format!(
                "expected {} message packets, got {}",
                self.n,
                message.len()
            )));
        }
        let bits = message[0].as_bytes().len() * 8;
        let mut out = message.to_vec();
        for check in &self.checks {
            let mut acc = Packet::zeros(bits);
            for &m in check {
                acc.xor_assign(&message[m as usize]);
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Recovers message packets from a subset of intermediates.
    pub fn decode(&self, intermediates: &[Option<Packet>]) -> PrecodeOutcome {
        let mut dec = PeelingDecoder::with_payloads(self.k);
        let bits = intermediates.iter().flatten().next().map_or(0, |p| p.as_bytes().len() * 8);
        for eq in self.constraints(0) {
            dec.add_symbol(&eq, Some(Packet::zeros(bits)));
        }
        for (i, p) in intermediates.iter().enumerate().take(self.k) {
            if let Some(p) = p {
                dec.learn(i as u32, Some(p.clone()));
            }
        }
        dec.process();
        let message: Vec<Option<Packet>> =
            (0..self.n as u32).map(|i| dec.value(i).cloned()).collect();
        let complete = message.iter().all(Option::is_some);
        PrecodeOutcome { message, complete }
    }

    /// Structural decode: which message symbols are recoverable from the
    /// `known` intermediates.
    pub fn decode_structural(&self, known: &[bool]) -> (Vec<bool>, bool) {
        let mut dec = PeelingDecoder::new(self.k);
        for eq in self.constraints(0) {
            dec.add_symbol(&eq, None);
        }
        for (i, &b) in known.iter().enumerate().take(self.k) {
            if b {
                dec.learn(i as u32, None);
            }
        }
        dec.process();
        let message = dec.known_mask()[..self.n].to_vec();
        let complete = message.iter().all(|&b| b);
        (message, complete)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecodeOutcome {
    pub message: Vec<Option<Packet>>,
    pub complete: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn message(n: usize, seed: u64) -> Vec<Packet> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Packet::random(64, &mut rng)).collect()
    }

    #[test]
    fn lengths_round_up() {
        let spec = PrecodeSpec::default();
        assert_eq!(spec.intermediate_len(9500), 10000);
        assert_eq!(spec.intermediate_len(950), 1000);
        assert_eq!(spec.intermediate_len(951), 1002);
        assert_eq!(spec.message_len(10000), 9500);
        assert_eq!(spec.message_len(2000), 1900);
        assert_eq!(PrecodeSpec::None.intermediate_len(37), 37);
    }

    #[test]
    fn none_is_identity() {
        let msg = message(20, 1);
        let code = Precode::new(&PrecodeSpec::None, 20, 0).unwrap();
        let inter = code.encode(&msg).unwrap();
        assert_eq!(inter, msg);
        let out = code.decode(&inter.into_iter().map(Some).collect::<Vec<_>>());
        assert!(out.complete);
        assert_eq!(out.message.into_iter().map(Option::unwrap).collect::<Vec<_>>(), msg);
    }

    #[test]
    fn nothing_erased_recovers_everything() {
        let msg = message(950, 2);
        let code = Precode::new(&PrecodeSpec::default(), 950, 7).unwrap();
        let inter = code.encode(&msg).unwrap();
        assert_eq!(inter.len(), 1000);
        let out = code.decode(&inter.iter().cloned().map(Some).collect::<Vec<_>>());
        assert!(out.complete);
        assert!(out.message.iter().zip(&msg).all(|(a, b)| a.as_ref() == Some(b)));
    }

    #[test]
    fn repairs_a_few_erasures_bit_exactly() {
        let msg = message(950, 3);
        let code = Precode::new(&PrecodeSpec::default(), 950, 11).unwrap();
        let inter = code.encode(&msg).unwrap();
        let mut received: Vec<_> = inter.iter().cloned().map(Some).collect();
        for i in [3, 100, 517, 960] {
            received[i] = None;
        }
        let out = code.decode(&received);
        assert!(out.complete);
        assert!(out.message.iter().zip(&msg).all(|(a, b)| a.as_ref() == Some(b)));
    }

    #[test]
    fn hopeless_erasure_is_flagged() {
        let code = Precode::new(&PrecodeSpec::default(), 950, 11).unwrap();
        let known = vec![false; code.k()];
        let (msg, complete) = code.decode_structural(&known);
        assert!(!complete);
        assert!(msg.iter().all(|&b| !b));
    }

    #[test]
    fn rejects_bad_specs() {
        let bad = PrecodeSpec::RegularBipartite { rate: 1.5, check_degree: 3 };
        assert!(Precode::new(&bad, 10, 0).is_err());
        let bad = PrecodeSpec::RegularBipartite { rate: 0.9, check_degree: 0 };
        assert!(Precode::new(&bad, 10, 0).is_err());
    }
}
