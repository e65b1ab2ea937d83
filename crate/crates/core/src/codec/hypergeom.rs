//! Log-space binomials and the "known edges removed" degree transform.

use super::{CodecError, ConditionalDistribution, DegreeDistribution};

/// Terms below this are dropped from hypergeometric sums.
pub const TERM_CUTOFF: f64 = 1e-14;

/// `ln C(n, r)` for real `n >= r >= 0`.
pub fn ln_choose(n: f64, r: f64) -> f64 {
    if r < 0.0 || r > n {
        return f64::NEG_INFINITY;
    }
    libm::lgamma(n + 1.0) - libm::lgamma(r + 1.0) - libm::lgamma(n - r + 1.0)
}

/// Probability that `drawn` uniform picks without replacement from `total`
/// items, `marked` of them marked, contain exactly `hits` marked items.
pub fn hypergeometric_pmf(total: f64, marked: f64, drawn: f64, hits: f64) -> f64 {
    let unmarked = total - marked;
    if hits > marked || drawn - hits > unmarked || hits < 0.0 || drawn > total {
        return 0.0;
    }
    (ln_choose(marked, hits) + ln_choose(unmarked, drawn - hits) - ln_choose(total, drawn)).exp()
}

/// Degree law of coded symbols after every edge into a known source symbol
/// is removed, when `known` of the `total` symbols in the encoding union are
/// known to the observer.
///
/// `Δ_d = Σ_w Ω_{d+w} · C(known, w) C(total-known, d) / C(total, d+w)`,
/// for `d = 0..=D`.
pub fn conditional_distribution(
    dist: &DegreeDistribution,
    total: u64,
    known: u64,
) -> Result<ConditionalDistribution, CodecError> {
    if known >= total {
        return Err(CodecError::KnownExceedsTotal { known, total });
    }
    conditional_distribution_real(dist, total as f64, known as f64)
}

/// Real-valued variant of [`conditional_distribution`] for analytical
/// recursions whose recovered counts are expectations.
///
/// Each source degree's hypergeometric split is renormalised, so the output
/// mass is exactly that of the input even for fractional arguments.
pub fn conditional_distribution_real(
    dist: &DegreeDistribution,
    total: f64,
    known: f64,
) -> Result<ConditionalDistribution, CodecError> {
    if !(known >= 0.0 && known < total) {
        return Err(CodecError::KnownExceedsTotal { known: known as u64, total: total as u64 });
    }
    let unknown = total - known;
    let mut out = vec![0.0; dist.max_degree() + 1];
    for (j, omega) in dist.support() {
        let drawn = (j as f64).min(total);
        // w = edges landing on known symbols
        let w_lo = (drawn - unknown).max(0.0).ceil() as usize;
        let w_hi = drawn.min(known).floor() as usize;
        let mut split = Vec::with_capacity(w_hi.saturating_sub(w_lo) + 1);
        for w in w_lo..=w_hi {
            let h = hypergeometric_pmf(total, known, drawn, w as f64);
            if h >= TERM_CUTOFF {
                split.push((drawn as usize - w, h));
            }
        }
        let mass: f64 = split.iter().map(|(_, h)| h).sum();
        if mass <= 0.0 {
            continue;
        }
        for (d, h) in split {
            out[d] += omega * h / mass;
        }
    }
    ConditionalDistribution::from_dense(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_choose_small_values() {
        assert!((ln_choose(4.0, 2.0).exp() - 6.0).abs() < 1e-12);
        assert!((ln_choose(20000.0, 3.0) - (20000.0f64 * 19999.0 * 19998.0 / 6.0).ln()).abs() < 1e-9);
        assert_eq!(ln_choose(3.0, 4.0), f64::NEG_INFINITY);
    }

    #[test]
    fn known_zero_is_identity() {
        let dist = DegreeDistribution::from_pairs(4, [(1, 0.2), (2, 0.3), (4, 0.5)]).unwrap();
        let cond = conditional_distribution(&dist, 100, 0).unwrap();
        assert_eq!(cond.prob(0), 0.0);
        for d in 1..=4 {
            assert!((cond.prob(d) - dist.prob(d)).abs() < 1e-15);
        }
    }

    #[test]
    fn two_of_four_known_degree_two() {
        // enumerate the six neighbour pairs of {0,1,2,3} with {0,1} known
        let mut counts = [0usize; 3];
        for a in 0..4 {
            for b in a + 1..4 {
                let unknown = [a, b].iter().filter(|&&x| x >= 2).count();
                counts[unknown] += 1;
            }
        }
        let expected: Vec<f64> = counts.iter().map(|&c| c as f64 / 6.0).collect();
        let dist = DegreeDistribution::point(2).unwrap();
        let cond = conditional_distribution(&dist, 4, 2).unwrap();
        for d in 0..3 {
            assert!((cond.prob(d) - expected[d]).abs() < 1e-12, "d={d}");
        }
        assert!((expected[0] - 1.0 / 6.0).abs() < 1e-15);
        assert!((expected[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn known_must_be_below_total() {
        let dist = DegreeDistribution::point(2).unwrap();
        assert!(matches!(
            conditional_distribution(&dist, 4, 4),
            Err(CodecError::KnownExceedsTotal { .. })
        ));
    }
}
