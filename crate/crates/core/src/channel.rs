//! Memoryless packet-erasure channels and keyed random streams.
//!
//! Every random draw in a simulation comes from a stream keyed by
//! `(master_seed, trial, frame, link)`. The key is hashed with SHA-256 into
//! a ChaCha8 seed, so streams are reproducible, independent of evaluation
//! order, and safe to create from parallel workers.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error("erasure probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("inter-user matrix is {rows}x{cols}, expected {users}x{users}")]
    BadShape { rows: usize, cols: usize, users: usize },
    #[error("inter-user matrix not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("stream {0:?} registered twice")]
    DuplicateStream(StreamLabel),
}

/// Erasure probabilities of every link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErasureMatrix {
    user_to_dest: Vec<f64>,
    inter_user: Vec<Vec<f64>>,
}

impl ErasureMatrix {
    /// Builds the matrix; the diagonal of `inter_user` is ignored.
    pub fn new(user_to_dest: Vec<f64>, inter_user: Vec<Vec<f64>>) -> Result<Self, ChannelError> {
        let users = user_to_dest.len();
        for &e in &user_to_dest {
            check_probability(e)?;
        }
        if inter_user.len() != users {
            return Err(ChannelError::BadShape { rows: inter_user.len(), cols: users, users });
        }
        for (i, row) in inter_user.iter().enumerate() {
            if row.len() != users {
                return Err(ChannelError::BadShape { rows: users, cols: row.len(), users });
            }
            for (j, &e) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                check_probability(e)?;
                if e != inter_user[j][i] {
                    return Err(ChannelError::Asymmetric { i, j });
                }
            }
        }
        Ok(Self { user_to_dest, inter_user })
    }

    /// Every inter-user link has erasure probability `inter`.
    pub fn uniform(user_to_dest: Vec<f64>, inter: f64) -> Result<Self, ChannelError> {
        let users = user_to_dest.len();
        let matrix = (0..users)
            .map(|i| (0..users).map(|j| if i == j { 0.0 } else { inter }).collect())
            .collect();
        Self::new(user_to_dest, matrix)
    }

    pub fn users(&self) -> usize {
        self.user_to_dest.len()
    }

    pub fn to_dest(&self, user: usize) -> f64 {
        self.user_to_dest[user]
    }

    pub fn between(&self, i: usize, j: usize) -> f64 {
        self.inter_user[i][j]
    }

    pub fn user_to_dest(&self) -> &[f64] {
        &self.user_to_dest
    }
}

fn check_probability(e: f64) -> Result<(), ChannelError> {
    if (0.0..=1.0).contains(&e) {
        Ok(())
    } else {
        Err(ChannelError::BadProbability(e))
    }
}

/// True when a packet survives a channel with erasure probability `e`.
/// Exactly one draw per call, so stream positions do not depend on `e`.
pub fn survives<R: Rng + ?Sized>(e: f64, rng: &mut R) -> bool {
    rng.gen::<f64>() >= e
}

/// Drops each item independently with probability `e`, preserving order.
pub fn transmit<T, R: Rng + ?Sized>(symbols: Vec<T>, e: f64, rng: &mut R) -> Vec<T> {
    symbols.into_iter().filter(|_| survives(e, rng)).collect()
}

/// What a stream is used for inside one trial and frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    /// Degree and neighbour draws of a sender.
    Encode { user: u16 },
    /// Erasures from a user to the destination.
    ToDestination { user: u16 },
    /// Erasures from one user to another.
    Between { from: u16, to: u16 },
    /// Source packet contents of a user.
    Source { user: u16 },
    /// Precode structure of a user.
    Precode { user: u16 },
    /// Free-form label for tests and tools.
    Custom(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamLabel {
    pub trial: u64,
    pub frame: u64,
    pub link: Link,
}

impl StreamLabel {
    pub fn new(trial: u64, frame: u64, link: Link) -> Self {
        Self { trial, frame, link }
    }

    fn encode(&self) -> [u8; 25] {
        let (tag, a, b): (u8, u64, u64) = match self.link {
            Link::Encode { user } => (1, user.into(), 0),
            Link::ToDestination { user } => (2, user.into(), 0),
            Link::Between { from, to } => (3, from.into(), to.into()),
            Link::Source { user } => (4, user.into(), 0),
            Link::Precode { user } => (5, user.into(), 0),
            Link::Custom(x) => (6, x, 0),
        };
        let mut out = [0u8; 25];
        out[0] = tag;
        out[1..9].copy_from_slice(&self.trial.to_le_bytes());
        out[9..17].copy_from_slice(&self.frame.to_le_bytes());
        // `a` and `b` never both exceed 16 bits except for Custom, where b = 0
        out[17..25].copy_from_slice(&(a ^ (b << 16)).to_le_bytes());
        out
    }
}

/// The random stream for `label` under `master_seed`.
pub fn rng_stream(master_seed: u64, label: StreamLabel) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(b"rcoop-stream-v1");
    hasher.update(master_seed.to_le_bytes());
    hasher.update(label.encode());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Hands out streams and refuses to hand out the same label twice, which
/// would silently correlate two parts of a simulation.
#[derive(Debug, Default)]
pub struct StreamRegistry {
    master_seed: u64,
    issued: HashSet<StreamLabel>,
}

impl StreamRegistry {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed, issued: HashSet::new() }
    }

    pub fn stream(&mut self, label: StreamLabel) -> Result<ChaCha8Rng, ChannelError> {
        if !self.issued.insert(label) {
            return Err(ChannelError::DuplicateStream(label));
        }
        Ok(rng_stream(self.master_seed, label))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn extremes_are_exact() {
        let mut rng = rng_stream(1, StreamLabel::new(0, 0, Link::Custom(0)));
        let items: Vec<u32> = (0..1000).collect();
        assert_eq!(transmit(items.clone(), 0.0, &mut rng), items);
        assert!(transmit(items, 1.0, &mut rng).is_empty());
    }

    #[test]
    fn same_label_same_stream() {
        let label = StreamLabel::new(3, 7, Link::Between { from: 0, to: 1 });
        let a: Vec<u64> = (0..1000).map({
            let mut r = rng_stream(42, label);
            move |_| r.next_u64()
        }).collect();
        let b: Vec<u64> = (0..1000).map({
            let mut r = rng_stream(42, label);
            move |_| r.next_u64()
        }).collect();
        assert_eq!(a, b);
        let mut other = rng_stream(43, label);
        assert_ne!(a[0], other.next_u64());
    }

    #[test]
    fn duplicate_registration_is_rejected() {
        let mut reg = StreamRegistry::new(0);
        let label = StreamLabel::new(0, 1, Link::Encode { user: 0 });
        assert!(reg.stream(label).is_ok());
        assert_eq!(reg.stream(label).unwrap_err(), ChannelError::DuplicateStream(label));
        assert!(reg.stream(StreamLabel::new(0, 2, Link::Encode { user: 0 })).is_ok());
    }

    #[test]
    fn matrix_validation() {
        assert!(ErasureMatrix::uniform(vec![0.2, 0.6], 0.3).is_ok());
        assert!(ErasureMatrix::uniform(vec![0.2, 1.6], 0.3).is_err());
        assert!(ErasureMatrix::new(vec![0.1, 0.1], vec![vec![0.0, 0.2], vec![0.3, 0.0]]).is_err());
        assert!(ErasureMatrix::new(vec![0.1, 0.1], vec![vec![0.0, 0.2]]).is_err());
    }

    #[test]
    fn labels_do_not_alias() {
        let labels = [
            Link::Encode { user: 1 },
            Link::ToDestination { user: 1 },
            Link::Between { from: 1, to: 0 },
            Link::Between { from: 0, to: 1 },
            Link::Source { user: 1 },
            Link::Precode { user: 1 },
            Link::Custom(1),
        ];
        let firsts: HashSet<u64> = labels
            .iter()
            .map(|&l| rng_stream(5, StreamLabel::new(0, 0, l)).next_u64())
            .collect();
        assert_eq!(firsts.len(), labels.len());
    }
}
