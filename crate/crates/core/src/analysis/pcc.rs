//! Partially coded cooperation: user-side recovery per time frame, and the
//! destination model over message parts.

use super::andor::{and_or_iterate, AnalysisError, AndOrModel, Stream, DEFAULT_ITERS, DEFAULT_TOL};
use crate::codec::{conditional_distribution_real, ConditionalDistribution, DegreeDistribution};
use crate::protocol::TranscriptStats;

/// Default cap on the number of part types in a destination model.
pub const DEFAULT_PART_CAP: usize = 12;

/// Expected partner recovery after each time frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PccUserTrajectory {
    /// `s^(i)`: symbols of one partner recovered by the end of frame `i`
    /// (index `i − 1`). Real-valued.
    pub s: Vec<f64>,
    /// Iterates `p^(i)_l`, `l = 0, 1, ...`, of the recursion in frame `i`.
    pub p: Vec<Vec<f64>>,
    /// Poisson rate of the recursion in each frame.
    pub alpha: Vec<f64>,
    /// Every frame's recursion reached the tolerance.
    pub converged: bool,
}

/// Runs the user-side recursion for `frames` frames with `users` users,
/// `n_slot` symbols per slot and inter-user erasure probability `e`.
///
/// In frame `i` a user has heard `i·N(1−e)` symbols from each partner. The
/// symbols sent in frame `j` were drawn over `k + (M−1)s^(j−1)` symbols, of
/// which the `(M−1)s^(j−1)` partner symbols are treated as known; the
/// received degree law is the uniform mixture over `j ≤ i`.
pub fn pcc_user_recursion(
    omega: &DegreeDistribution,
    k: usize,
    n_slot: usize,
    users: usize,
    e: f64,
    frames: usize,
) -> Result<PccUserTrajectory, AnalysisError> {
    if users < 2 || k == 0 || !(0.0..=1.0).contains(&e) {
        return Err(AnalysisError::Invalid(format!("users {users}, k {k}, e {e}")));
    }
    let kf = k as f64;
    let others = (users - 1) as f64;
    let mut out = PccUserTrajectory { s: Vec::new(), p: Vec::new(), alpha: Vec::new(), converged: true };
    let mut laws: Vec<ConditionalDistribution> = Vec::new();
    let mut s_prev = 0.0;
    for i in 1..=frames {
        let known = others * s_prev;
        let law = conditional_distribution_real(omega, kf + known, known)
            .map_err(|e| AnalysisError::Invalid(e.to_string()))?;
        laws.push(law);
        let delta = ConditionalDistribution::average(&laws).expect("at least one frame");
        let slope = delta.derivative(1.0);
        let alpha = i as f64 * n_slot as f64 * (1.0 - e) * slope / kf;
        let mut traj = vec![1.0];
        let mut p = 1.0f64;
        let mut converged = false;
        for _ in 0..DEFAULT_ITERS {
            let next = if alpha > 0.0 { (-alpha * delta.derivative(1.0 - p) / slope).exp() } else { 1.0 };
            let change = (next - p).abs();
            p = next;
            traj.push(p);
            if change < DEFAULT_TOL {
                converged = true;
                break;
            }
        }
        out.converged &= converged;
        // never credit more than the block, nor less than before
        let s = (kf * (1.0 - p)).clamp(s_prev, kf - 1e-9);
        out.s.push(s);
        out.p.push(traj);
        out.alpha.push(alpha);
        s_prev = s;
    }
    Ok(out)
}

/// How each user's block splits into parts by the frame in which partners
/// recovered them.
#[derive(Debug, Clone, PartialEq)]
pub struct PartsLayout {
    pub k: usize,
    /// `increments[t][i]`: symbols of user `t` first recovered by its
    /// partners during frame `i + 1`.
    pub increments: Vec<Vec<f64>>,
}

impl PartsLayout {
    pub fn new(k: usize, increments: Vec<Vec<f64>>) -> Result<Self, AnalysisError> {
        for (t, inc) in increments.iter().enumerate() {
            let total: f64 = inc.iter().sum();
            if inc.iter().any(|v| !(*v >= 0.0)) || total > k as f64 + 1e-9 {
                return Err(AnalysisError::Invalid(format!("user {t} parts sum to {total} of {k}")));
            }
        }
        Ok(Self { k, increments })
    }

    /// No partner recovery: one part per user.
    pub fn single(users: usize, k: usize) -> Self {
        Self { k, increments: vec![Vec::new(); users] }
    }

    /// Every user's parts follow the same cumulative recovery `s`, rounded
    /// to whole symbols.
    pub fn symmetric(users: usize, k: usize, s: &[f64]) -> Self {
        let inc = increments_from_cumulative(s, k);
        Self { k, increments: vec![inc; users] }
    }

    /// Parts from a transcript's per-frame recovery counts, averaged over
    /// the observing partners and rounded to whole symbols.
    pub fn from_transcript(stats: &TranscriptStats, k: usize) -> Self {
        let m = stats.users();
        let increments = (0..m)
            .map(|t| {
                let cumulative: Vec<f64> = stats
                    .per_tf_recovery
                    .iter()
                    .map(|row| {
                        let seen: usize = (0..m).filter(|&i| i != t).map(|i| row[i * m + t]).sum();
                        seen as f64 / (m - 1).max(1) as f64
                    })
                    .collect();
                increments_from_cumulative(&cumulative, k)
            })
            .collect();
        Self { k, increments }
    }

    pub fn users(&self) -> usize {
        self.increments.len()
    }

    /// Symbols of user `t` that no partner recovered.
    pub fn remainder(&self, t: usize) -> f64 {
        (self.k as f64 - self.increments[t].iter().sum::<f64>()).max(0.0)
    }
}

fn increments_from_cumulative(s: &[f64], k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(s.len());
    let mut prev = 0.0;
    for &v in s {
        let r = v.round().clamp(prev, k as f64);
        out.push(r - prev);
        prev = r;
    }
    while out.last() == Some(&0.0) {
        out.pop();
    }
    out
}

/// Destination model over message parts, with the OR type ids of each
/// user's parts (the last one being the never-shared remainder).
#[derive(Debug, Clone, PartialEq)]
pub struct PccDestinationModel {
    pub model: AndOrModel,
    pub types: Vec<Vec<usize>>,
    /// Frames (1-based) merged into each shared part type, per user.
    pub groups: Vec<Vec<std::ops::Range<usize>>>,
}

impl PccDestinationModel {
    /// Unrecovered fraction of user `t`'s block after iterating.
    pub fn unrecovered(&self, p: &[f64], t: usize) -> f64 {
        let pops = &self.model.populations;
        let ids = &self.types[t];
        let total: f64 = ids.iter().map(|&i| pops[i]).sum();
        ids.iter().map(|&i| pops[i] * p[i]).sum::<f64>() / total
    }

    /// Iterates the model and returns the unrecovered fraction per user.
    pub fn evaluate(&self) -> Vec<f64> {
        let r = and_or_iterate(&self.model, DEFAULT_ITERS, DEFAULT_TOL);
        (0..self.types.len()).map(|t| self.unrecovered(&r.p, t)).collect()
    }
}

/// Builds the destination model. `received[τ][u]` is the number of symbols
/// from user `u` the destination got in frame `τ + 1`; each was drawn with
/// `omega` over `u`'s block plus the partner parts recovered before that
/// frame. When parts exceed `cap`, adjacent frames are merged into one part
/// type; a merged part enters a union with only its already-recovered
/// share.
pub fn pcc_destination_model(
    omega: &DegreeDistribution,
    layout: &PartsLayout,
    received: &[Vec<f64>],
    cap: usize,
) -> Result<PccDestinationModel, AnalysisError> {
    let m = layout.users();
    let groups: Vec<Vec<std::ops::Range<usize>>> = {
        let raw: usize = layout.increments.iter().map(|inc| inc.len() + 1).sum();
        let per_user = if raw <= cap { usize::MAX } else { cap / m };
        if per_user < 2 {
            return Err(AnalysisError::TooManyParts { parts: raw, cap });
        }
        layout
            .increments
            .iter()
            .map(|inc| split_frames(inc.len(), per_user.saturating_sub(1)))
            .collect()
    };
    let mut populations = Vec::new();
    let mut types = Vec::new();
    for (t, gs) in groups.iter().enumerate() {
        let mut ids = Vec::new();
        for g in gs {
            ids.push(populations.len());
            populations.push(layout.increments[t][g.start - 1..g.end - 1].iter().sum::<f64>());
        }
        ids.push(populations.len());
        populations.push(layout.remainder(t));
        types.push(ids);
    }
    // drop empty parts from the populations by giving them a token size;
    // they never enter a union, so they stay at p = 1 with no weight
    let empty: Vec<bool> = populations.iter().map(|&p| p <= 0.0).collect();
    let pops: Vec<f64> = populations.iter().map(|&p| p.max(1e-12)).collect();

    let mut streams = Vec::new();
    for (tau0, row) in received.iter().enumerate() {
        let tau = tau0 + 1;
        for (u, &count) in row.iter().enumerate().take(m) {
            if count <= 0.0 {
                continue;
            }
            let mut members: Vec<(usize, f64)> = types[u]
                .iter()
                .filter(|&&id| !empty[id])
                .map(|&id| (id, populations[id]))
                .collect();
            for t in (0..m).filter(|&t| t != u) {
                for (g, &id) in groups[t].iter().zip(&types[t]) {
                    // frames of this part that ended before frame tau
                    let upto = g.end.min(tau);
                    if upto <= g.start {
                        continue;
                    }
                    let share: f64 = layout.increments[t][g.start - 1..upto - 1].iter().sum();
                    if share > 0.0 {
                        members.push((id, share));
                    }
                }
            }
            streams.push(Stream { count, dist: omega.clone(), members });
        }
    }
    let model = AndOrModel::from_streams(pops, &streams)?;
    Ok(PccDestinationModel { model, types, groups })
}

/// Splits frames `1..=frames` into at most `parts` contiguous ranges of
/// near-equal length.
fn split_frames(frames: usize, parts: usize) -> Vec<std::ops::Range<usize>> {
    if frames == 0 {
        return Vec::new();
    }
    let parts = parts.clamp(1, frames);
    (0..parts)
        .map(|g| (1 + g * frames / parts)..(1 + (g + 1) * frames / parts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::presets;

    #[test]
    fn erased_links_recover_nothing() {
        let omega = presets::partial_recovery_example();
        let r = pcc_user_recursion(&omega, 1000, 100, 2, 1.0, 8).unwrap();
        assert!(r.s.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn recovery_grows_with_frames() {
        let omega = presets::partial_recovery_example();
        let r = pcc_user_recursion(&omega, 1000, 100, 2, 0.0, 12).unwrap();
        assert!(r.s.windows(2).all(|w| w[1] >= w[0]));
        assert!(r.s[11] > 900.0, "{:?}", r.s);
    }

    #[test]
    fn frame_split_covers_everything() {
        assert_eq!(split_frames(7, 3), vec![1..3, 3..5, 5..8]);
        assert_eq!(split_frames(2, 5), vec![1..2, 2..3]);
        assert!(split_frames(0, 5).is_empty());
    }

    #[test]
    fn cumulative_rounding() {
        assert_eq!(increments_from_cumulative(&[1.4, 1.6, 5.0, 5.0], 10), vec![1.0, 1.0, 3.0]);
    }
}
