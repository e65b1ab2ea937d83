//! Throughput upper bounds for the two-user cooperative MAC.

/// Upper bound on fully coded cooperation throughput with inter-user
/// erasure `e` and destination erasures `e1`, `e2`.
pub fn fcc_throughput_bound(e: f64, e1: f64, e2: f64) -> f64 {
    let (lo, hi) = (e1.min(e2), e1.max(e2));
    if e <= lo {
        (2.0 - e1 - e2) / 2.0
    } else if e >= hi {
        1.0 - hi
    } else {
        (1.0 - e) * (2.0 - e1 - e2) / (2.0 - e - lo)
    }
}

/// Frames cap when searching for `L`.
pub const MAX_BOUND_FRAMES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PccBound {
    /// Frames the destination needs for user 1 and user 2 (`None` when the
    /// condition is never met).
    pub l1: Option<usize>,
    pub l2: Option<usize>,
    /// `k/((L+1)N)`, or 0 when either frame count is missing.
    pub bound: f64,
    /// `k/(L·N)`, the looser form reached at the end of the proof.
    pub bound_loose: f64,
}

impl PccBound {
    pub fn reached(&self) -> bool {
        self.l1.is_some() && self.l2.is_some()
    }
}

/// Upper bound on partially coded cooperation throughput, where `s[i−1]` is
/// the number of partner symbols each user has recovered in frame `i`.
/// Frames past the end of `s` reuse its last value.
pub fn pcc_throughput_bound(e1: f64, e2: f64, n_slot: usize, k: usize, s: &[f64]) -> PccBound {
    let l1 = frames_needed(e1, e2, n_slot, k, s);
    let l2 = frames_needed(e2, e1, n_slot, k, s);
    let (bound, bound_loose) = match (l1, l2) {
        (Some(a), Some(b)) => {
            let l = a.max(b) as f64;
            let (kf, nf) = (k as f64, n_slot as f64);
            (kf / ((l + 1.0) * nf), kf / (l * nf))
        }
        _ => (0.0, 0.0),
    };
    PccBound { l1, l2, bound, bound_loose }
}

/// Smallest `M` with `N(1−a)(1 + Σ_{i=2}^M (k−s_i)/k) + N(1−b) Σ_{i=1}^M s_i/k ≥ k`.
fn frames_needed(a: f64, b: f64, n_slot: usize, k: usize, s: &[f64]) -> Option<usize> {
    let (kf, nf) = (k as f64, n_slot as f64);
    let s_at = |i: usize| -> f64 { s.get(i - 1).or(s.last()).copied().unwrap_or(0.0).clamp(0.0, kf) };
    let mut own = 1.0;
    let mut helped = 0.0;
    for m in 1..=MAX_BOUND_FRAMES {
        if m >= 2 {
            own += (kf - s_at(m)) / kf;
        }
        helped += s_at(m) / kf;
        if nf * (1.0 - a) * own + nf * (1.0 - b) * helped >= kf - 1e-9 {
            return Some(m);
        }
    }
    None
}
