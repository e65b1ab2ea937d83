//! Rateless coded cooperation for multi-user cooperative multiple access over
//! packet-erasure channels.
//!
//! * [`codec`] — degree distributions, LT encoding, peeling decoders, precode.
//! * [`channel`] — erasure channels and keyed random streams.
//! * [`protocol`] — TDMA simulation of the cooperation schemes.
//! * [`analysis`] — AND-OR tree evaluation and throughput bounds.
//! * [`optimizer`] — LP degree design.
//! * [`harness`] — configs, sweeps and CSV output behind the CLI.

pub mod codec;
pub mod channel;
pub mod protocol;
pub mod analysis;
pub mod optimizer;
pub mod harness;
