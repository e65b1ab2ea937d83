//! TDMA cooperation protocols: FCC, PCC, no cooperation, perfect cooperation.

mod config;
mod sim;
mod stats;

use rayon::prelude::*;

pub use config::{
    load_distribution, ConfigError, DistSpec, ErasureSpec, Fidelity, InterUser, Scenario,
    ScenarioConfig, Scheme,
};
pub use sim::{run_fcc, run_nocoop, run_pcc, run_perfect, run_trial};
pub use stats::{mean_ci, Aggregate, TranscriptStats};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("scenario is configured for {found}, not {expected}")]
    SchemeMismatch { expected: Scheme, found: Scheme },
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Fraction of the message length spent on PCC recovery headers when users
/// decode every `period` frames: `(M−1)·k / (T·N·F)` with `T` in bits.
pub fn control_overhead(
    users: usize,
    k: usize,
    packet_bits: usize,
    symbols_per_slot: usize,
    period: usize,
) -> f64 {
    (users.saturating_sub(1) * k) as f64 / (packet_bits * symbols_per_slot * period) as f64
}

/// Runs `sc.config.trials` trials on a pool of `workers` threads (all
/// cores if `None`). Results are in trial order whatever the completion
/// order.
pub fn run_trials(sc: &Scenario, workers: Option<usize>) -> Result<Vec<TranscriptStats>, ProtocolError> {
    let trials = sc.config.trials as u64;
    let work = || (0..trials).into_par_iter().map(|t| run_trial(sc, t)).collect();
    match workers {
        None => Ok(work()),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| ProtocolError::Pool(e.to_string()))
            .map(|pool| pool.install(work)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overhead_matches_formula() {
        assert!((control_overhead(2, 10000, 1024, 1000, 1) - 0.009765625).abs() < 1e-15);
        assert!((control_overhead(2, 10000, 1024, 1000, 2) - 0.0048828125).abs() < 1e-15);
        assert_eq!(control_overhead(1, 10000, 1024, 1000, 1), 0.0);
    }
}
