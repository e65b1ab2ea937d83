//! Degree distributions over coded-symbol degrees.

use rand::Rng;

use super::CodecError;

/// Tolerance on the total probability mass of a [`DegreeDistribution`].
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Tolerance on the total probability mass of a [`ConditionalDistribution`].
pub const CONDITIONAL_MASS_TOLERANCE: f64 = 1e-10;

/// A probability vector `Ω_1..Ω_D` over coded-symbol degrees.
///
/// Stored densely; index 0 is always zero. The cumulative table used for
/// sampling is built once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DegreeDistribution {
    /// Builds a distribution from `(degree, probability)` pairs.
    ///
    /// Degrees must be in `1..=max_degree`, probabilities finite and
    /// non-negative, and the mass must be 1 within [`MASS_TOLERANCE`].
    /// Repeated degrees accumulate.
    pub fn from_pairs(
        max_degree: usize,
        pairs: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Self, CodecError> {
        let probs = Self::collect(max_degree, pairs)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(CodecError::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self::from_dense_unchecked(probs))
    }

    /// Like [`from_pairs`](Self::from_pairs) but rescales the mass to 1.
    ///
    /// Used for published tables whose four-digit entries do not add up
    /// exactly, and for solver output.
    pub fn normalized(
        max_degree: usize,
        pairs: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Self, CodecError> {
        let mut probs = Self::collect(max_degree, pairs)?;
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(CodecError::InvalidDistribution("zero total mass".into()));
        }
        // already-normalised input is kept bit-exact so text round trips are stable
        if (total - 1.0).abs() > MASS_TOLERANCE {
            probs.iter_mut().for_each(|p| *p /= total);
        }
        Ok(Self::from_dense_unchecked(probs))
    }

    /// Point mass on a single degree.
    pub fn point(degree: usize) -> Result<Self, CodecError> {
        Self::from_pairs(degree, [(degree, 1.0)])
    }

    fn collect(
        max_degree: usize,
        pairs: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Vec<f64>, CodecError> {
        if max_degree == 0 {
            return Err(CodecError::InvalidDistribution("max degree must be positive".into()));
        }
        let mut probs = vec![0.0; max_degree + 1];
        for (d, p) in pairs {
            if d == 0 || d > max_degree {
                return Err(CodecError::InvalidDistribution(format!(
                    "degree {d} outside 1..={max_degree}"
                )));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(CodecError::InvalidDistribution(format!(
                    "probability {p} for degree {d} is not a finite non-negative number"
                )));
            }
            probs[d] += p;
        }
        Ok(probs)
    }

    fn from_dense_unchecked(mut probs: Vec<f64>) -> Self {
        // trailing zeros would make max_degree lie about the support
        while probs.len() > 2 && *probs.last().unwrap() == 0.0 {
            probs.pop();
        }
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { probs, cumulative }
    }

    /// Largest degree with non-zero probability.
    pub fn max_degree(&self) -> usize {
        self.probs.len() - 1
    }

    /// `Ω_d`, zero outside the support.
    pub fn prob(&self, degree: usize) -> f64 {
        self.probs.get(degree).copied().unwrap_or(0.0)
    }

    /// Dense probabilities indexed by degree (index 0 is zero).
    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    /// Non-zero `(degree, probability)` entries in increasing degree order.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().copied().enumerate().filter(|&(_, p)| p > 0.0)
    }

    /// Average degree `Ω'(1)`.
    pub fn mean(&self) -> f64 {
        self.support().map(|(d, p)| d as f64 * p).sum()
    }

    /// `Ω(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.probs, x)
    }

    /// `Ω'(x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        derivative(&self.probs, x)
    }

    /// Draws a degree by inverting the cumulative table.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.gen::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        // the last non-zero degree absorbs rounding at the top end
        idx.clamp(1, self.max_degree())
    }

    /// Edge-perspective law: entry `d` is the probability that a uniformly
    /// chosen edge belongs to a symbol with `d` *other* edges, i.e.
    /// `(d+1) Ω_{d+1} / μ`.
    pub fn edge_perspective(&self) -> Vec<f64> {
        let mu = self.mean();
        (0..self.max_degree())
            .map(|d| (d + 1) as f64 * self.prob(d + 1) / mu)
            .collect()
    }

    /// Total variation distance to another distribution.
    pub fn tv_distance(&self, other: &DegreeDistribution) -> f64 {
        tv(&self.probs, &other.probs)
    }
}

/// Degree law that allows degree 0: symbols whose neighbours are all known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution {
    probs: Vec<f64>,
}

impl ConditionalDistribution {
    pub(crate) fn from_dense(probs: Vec<f64>) -> Result<Self, CodecError> {
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(CodecError::InvalidDistribution("negative or non-finite mass".into()));
        }
        if (total - 1.0).abs() > CONDITIONAL_MASS_TOLERANCE {
            return Err(CodecError::InvalidDistribution(format!(
                "conditional mass {total}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn prob(&self, degree: usize) -> f64 {
        self.probs.get(degree).copied().unwrap_or(0.0)
    }

    /// Dense probabilities indexed by degree, starting at degree 0.
    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn max_degree(&self) -> usize {
        self.probs.len().saturating_sub(1)
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(d, p)| d as f64 * p).sum()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        derivative(&self.probs, x)
    }

    pub fn tv_distance(&self, other: &ConditionalDistribution) -> f64 {
        tv(&self.probs, &other.probs)
    }

    /// Pointwise average of several laws (mixing across frames).
    pub fn average(parts: &[ConditionalDistribution]) -> Option<ConditionalDistribution> {
        let len = parts.iter().map(|p| p.probs.len()).max()?;
        let mut probs = vec![0.0; len];
        for part in parts {
            for (acc, p) in probs.iter_mut().zip(&part.probs) {
                *acc += p;
            }
        }
        let n = parts.len() as f64;
        probs.iter_mut().for_each(|p| *p /= n);
        Some(Self { probs })
    }
}

impl From<&DegreeDistribution> for ConditionalDistribution {
    fn from(dist: &DegreeDistribution) -> Self {
        Self { probs: dist.probs.clone() }
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn derivative(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (d, c)| acc * x + d as f64 * c)
}

fn tv(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    0.5 * (0..len)
        .map(|i| (a.get(i).unwrap_or(&0.0) - b.get(i).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn point_mass_always_samples_its_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [1, 2] {
            let dist = DegreeDistribution::point(d).unwrap();
            assert!((0..1000).all(|_| dist.sample(&mut rng) == d));
        }
    }

    #[test]
    fn rejects_bad_mass_and_degrees() {
        assert!(DegreeDistribution::from_pairs(3, [(1, 0.5), (2, 0.4)]).is_err());
        assert!(DegreeDistribution::from_pairs(3, [(0, 1.0)]).is_err());
        assert!(DegreeDistribution::from_pairs(3, [(4, 1.0)]).is_err());
        assert!(DegreeDistribution::from_pairs(3, [(1, -0.5), (2, 1.5)]).is_err());
    }

    #[test]
    fn polynomial_helpers() {
        let dist = DegreeDistribution::from_pairs(3, [(1, 0.5), (3, 0.5)]).unwrap();
        assert!((dist.mean() - 2.0).abs() < 1e-15);
        assert!((dist.eval(0.5) - (0.25 + 0.0625)).abs() < 1e-15);
        assert!((dist.derivative(0.5) - (0.5 + 1.5 * 0.25)).abs() < 1e-15);
        let edge = dist.edge_perspective();
        assert!((edge.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((edge[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn trailing_zero_support_is_trimmed() {
        let dist = DegreeDistribution::from_pairs(50, [(2, 1.0)]).unwrap();
        assert_eq!(dist.max_degree(), 2);
    }
}
