//! Per-run transcripts and their aggregation.

use super::Scheme;

/// What one run measured.
#[derive(Debug, Clone, PartialEq)]
pub struct TranscriptStats {
    pub scheme: Scheme,
    /// Run ended with an acknowledgement (not at `max_frames`).
    pub complete: bool,
    pub frames_used: usize,
    pub slots_used: usize,
    pub symbols_sent: Vec<usize>,
    /// `M·n / Σ symbols_sent` for complete runs.
    pub throughput: Option<f64>,
    /// After each completed frame, for cooperative schemes: row-major
    /// `M × M` counts of intermediates of user `j` known at user `i`.
    pub per_tf_recovery: Vec<Vec<usize>>,
    /// After each completed frame: intermediates of each user known at the
    /// destination.
    pub dest_known_per_tf: Vec<Vec<usize>>,
    /// 1-based slot after which the destination knew each user's message.
    pub dest_decode_slot: Vec<Option<usize>>,
    /// FCC: first frame in which each user used each upgraded distribution.
    pub phase_switch_tf: Vec<Vec<usize>>,
    /// Payload mode: every message packet at the destination matched.
    pub payload_verified: Option<bool>,
}

impl TranscriptStats {
    pub fn new(scheme: Scheme, users: usize) -> Self {
        Self {
            scheme,
            complete: false,
            frames_used: 0,
            slots_used: 0,
            symbols_sent: vec![0; users],
            throughput: None,
            per_tf_recovery: Vec::new(),
            dest_known_per_tf: Vec::new(),
            dest_decode_slot: vec![None; users],
            phase_switch_tf: vec![Vec::new(); users],
            payload_verified: None,
        }
    }

    pub fn users(&self) -> usize {
        self.symbols_sent.len()
    }

    /// Mean over observers and partners of recovered partner symbols after
    /// frame `tf` (1-based).
    pub fn mean_partner_recovery(&self, tf: usize) -> Option<f64> {
        let m = self.users();
        let row = self.per_tf_recovery.get(tf.checked_sub(1)?)?;
        if m < 2 {
            return Some(0.0);
        }
        let mut sum = 0usize;
        for i in 0..m {
            for j in (0..m).filter(|&j| j != i) {
                sum += row[i * m + j];
            }
        }
        Some(sum as f64 / (m * (m - 1)) as f64)
    }
}

/// Mean and spread over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub scheme: Scheme,
    pub trials: usize,
    pub completed: usize,
    pub incomplete: usize,
    /// Over completed runs; NaN if none completed.
    pub mean_throughput: f64,
    /// Half-width of the normal 95% interval of the mean.
    pub ci95: f64,
    pub mean_frames: f64,
}

impl Aggregate {
    /// Order-insensitive reduction (sums are taken in trial order by the
    /// caller, which keeps results bit-identical across worker counts).
    pub fn from_runs(scheme: Scheme, runs: &[TranscriptStats]) -> Self {
        let values: Vec<f64> = runs.iter().filter_map(|r| r.throughput).collect();
        let frames: Vec<f64> =
            runs.iter().filter(|r| r.complete).map(|r| r.frames_used as f64).collect();
        let (mean, ci95) = mean_ci(&values);
        Self {
            scheme,
            trials: runs.len(),
            completed: values.len(),
            incomplete: runs.len() - values.len(),
            mean_throughput: mean,
            ci95,
            mean_frames: mean_ci(&frames).0,
        }
    }
}

/// Sample mean and 1.96·s/√n.
pub fn mean_ci(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_counts_incomplete_separately() {
        let mut a = TranscriptStats::new(Scheme::Nocoop, 2);
        a.complete = true;
        a.frames_used = 10;
        a.throughput = Some(0.5);
        let mut b = a.clone();
        b.throughput = Some(0.7);
        b.frames_used = 12;
        let c = TranscriptStats::new(Scheme::Nocoop, 2);
        let agg = Aggregate::from_runs(Scheme::Nocoop, &[a, b, c]);
        assert_eq!((agg.trials, agg.completed, agg.incomplete), (3, 2, 1));
        assert!((agg.mean_throughput - 0.6).abs() < 1e-12);
        assert!((agg.mean_frames - 11.0).abs() < 1e-12);
        assert!(agg.ci95 > 0.0);
    }
}
