//! Degree distributions, LT encoding, peeling decoders and the precode.

pub mod distribution;
pub mod encode;
pub mod hypergeom;
pub mod peel;
pub mod precode;
pub mod presets;
pub mod textfmt;
pub mod wire;

pub use distribution::{ConditionalDistribution, DegreeDistribution};
pub use encode::{lt_encode, lt_encode_payload, CodedSymbol, Packet, SymbolTag};
pub use hypergeom::{conditional_distribution, conditional_distribution_real};
pub use peel::{PeelingDecoder, RecoveryState, SymbolGraph};
pub use precode::{Precode, PrecodeOutcome, PrecodeSpec};
pub use textfmt::{parse_distribution, write_distribution};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodecError {
    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),
    #[error("known count {known} must be below total {total}")]
    KnownExceedsTotal { known: u64, total: u64 },
    #[error("no source symbols")]
    NoSourceSymbols,
    #[error("unknown preset: {0}")]
    UnknownPreset(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("checksum mismatch: file says {declared}, content hashes to {actual}")]
    ChecksumMismatch { declared: String, actual: String },
    #[error("invalid precode: {0}")]
    InvalidPrecode(String),
}
