//! AND-OR models of the destination under fully coded cooperation.
//!
//! OR type `j` is user `j`'s block of `k` symbols. Coded symbols are grouped
//! by the set `Y` of users whose blocks they were generated over; a group
//! of `N_Y` symbols uses `Φ^(|Y|)`.

use std::collections::BTreeMap;

use super::andor::{AnalysisError, AndOrModel, Kernel, Stream, Term};
use crate::codec::hypergeom::ln_choose;
use crate::codec::DegreeDistribution;

/// Largest user count for which the `2^M − 1` subset types are enumerated.
pub const MAX_USERS: usize = 6;

/// Bit set of users.
pub type UserSet = u32;

pub fn set_size(set: UserSet) -> usize {
    set.count_ones() as usize
}

/// Destination model for two users: `n1`, `n2` broadcast symbols with
/// `phi1` and `n3` cooperative symbols over both blocks with `phi2`.
pub fn fcc_2user_model(
    n1: f64,
    n2: f64,
    n3: f64,
    phi1: &DegreeDistribution,
    phi2: &DegreeDistribution,
    k: usize,
) -> Result<AndOrModel, AnalysisError> {
    let counts = BTreeMap::from([(0b01, n1), (0b10, n2), (0b11, n3)]);
    fcc_muser_model(&counts, &[phi1.clone(), phi2.clone()], k, 2)
}

/// Destination model for `users` users from per-subset symbol counts.
pub fn fcc_muser_model(
    counts: &BTreeMap<UserSet, f64>,
    phis: &[DegreeDistribution],
    k: usize,
    users: usize,
) -> Result<AndOrModel, AnalysisError> {
    if users > MAX_USERS {
        return Err(AnalysisError::ExponentialTypeSpace { users, cap: MAX_USERS });
    }
    if phis.len() < users {
        return Err(AnalysisError::Invalid(format!(
            "{} distributions for {users} users",
            phis.len()
        )));
    }
    let streams = counts
        .iter()
        .map(|(&set, &count)| {
            if set == 0 || set >> users != 0 {
                return Err(AnalysisError::Invalid(format!("user set {set:#b} out of range")));
            }
            Ok(Stream {
                count,
                dist: phis[set_size(set) - 1].clone(),
                members: (0..users).filter(|u| set >> u & 1 == 1).map(|u| (u, k as f64)).collect(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    AndOrModel::from_streams(vec![k as f64; users], &streams)
}

/// Expected number of coded symbols whose neighbours cover exactly the
/// users in `v` (the lemma's `T_V`), by inclusion–exclusion over subsets.
pub fn type_counts(
    counts: &BTreeMap<UserSet, f64>,
    phis: &[DegreeDistribution],
    k: usize,
) -> BTreeMap<UserSet, f64> {
    let mut out = BTreeMap::new();
    for (&y, &count) in counts {
        let dist = &phis[set_size(y) - 1];
        let total = (set_size(y) * k) as f64;
        let mut v = y;
        // iterate non-empty subsets v of y
        while v != 0 {
            let mut p_exact = 0.0;
            let mut w = v;
            loop {
                let sign = if (set_size(v) - set_size(w)) % 2 == 0 { 1.0 } else { -1.0 };
                let inside = (set_size(w) * k) as f64;
                let mut p_inside = 0.0;
                for (d, pd) in dist.support() {
                    let d = (d as f64).min(total);
                    if d <= inside {
                        p_inside += pd * (ln_choose(inside, d) - ln_choose(total, d)).exp();
                    }
                }
                p_exact += sign * p_inside;
                if w == 0 {
                    break;
                }
                w = (w - 1) & v;
            }
            *out.entry(v).or_insert(0.0) += count * p_exact.max(0.0);
            v = (v - 1) & y;
        }
    }
    out
}

/// Splits every term of a (small) model into explicit per-AND-type tables:
/// returns `(root, V, α_{root,V}, β_{V,·})` with β normalised.
pub fn split_by_type(model: &AndOrModel) -> Vec<(usize, UserSet, f64, Vec<(Vec<u32>, f64)>)> {
    let mut grouped: BTreeMap<(usize, UserSet), (f64, BTreeMap<Vec<u32>, f64>)> = BTreeMap::new();
    for t in &model.expanded_terms() {
        for (counts, prob) in t.kernel.to_table() {
            let mut v: UserSet = 1 << t.root;
            for (w, &c) in counts.iter().enumerate() {
                if c > 0 {
                    v |= 1 << w;
                }
            }
            let entry = grouped.entry((t.root, v)).or_default();
            entry.0 += t.alpha * prob;
            *entry.1.entry(counts).or_insert(0.0) += t.alpha * prob;
        }
    }
    grouped
        .into_iter()
        .filter(|(_, (alpha, _))| *alpha > 0.0)
        .map(|((root, v), (alpha, table))| {
            let beta = table.into_iter().map(|(c, w)| (c, w / alpha)).collect();
            (root, v, alpha, beta)
        })
        .collect()
}

/// The two-user model with the printed closed-form parameters: cooperative
/// symbols confined to one block are counted as `N_3 Φ^(2)(1/2)` per user
/// with the unconditioned cooperative degree law, and mixed symbols use the
/// printed binomial weights, renormalised over `i ≥ 1` other-user children.
pub fn fcc_2user_model_printed(
    n1: f64,
    n2: f64,
    n3: f64,
    phi1: &DegreeDistribution,
    phi2: &DegreeDistribution,
    k: usize,
) -> AndOrModel {
    let mu1 = phi1.mean();
    let mu2 = phi2.mean();
    let half = phi2.eval(0.5);
    let kf = k as f64;
    let edge1 = phi1.edge_perspective();
    let edge2 = phi2.edge_perspective();
    let d_max = phi1.max_degree().max(phi2.max_degree());
    let mut model = AndOrModel::new(vec![kf, kf]);
    for (j, nj) in [(0usize, n1), (1, n2)] {
        let coop = n3 * half;
        let (wb, wc) = if nj + coop > 0.0 { (nj / (nj + coop), coop / (nj + coop)) } else { (0.0, 0.0) };
        let mut single = Vec::new();
        for d in 0..d_max {
            let p = wb * edge1.get(d).copied().unwrap_or(0.0) + wc * edge2.get(d).copied().unwrap_or(0.0);
            if p > 0.0 {
                let mut counts = vec![0u32; 2];
                counts[j] = d as u32;
                single.push((counts, p));
            }
        }
        model.terms.push(Term {
            root: j,
            alpha: (nj * mu1 + coop * mu2) / kf,
            kernel: Kernel::Table(single),
        });

        let mut mixed = Vec::new();
        for d in 1..phi2.max_degree() {
            for i in 1..=d {
                let same = (d - i) as f64;
                let ln = ln_choose(kf, same) + ln_choose(kf, i as f64)
                    - ln_choose(2.0 * kf, (d + 1) as f64);
                let p = edge2.get(d).copied().unwrap_or(0.0) * ln.exp();
                if p > 0.0 {
                    let mut counts = vec![0u32; 2];
                    counts[j] = (d - i) as u32;
                    counts[1 - j] = i as u32;
                    mixed.push((counts, p));
                }
            }
        }
        let mass: f64 = mixed.iter().map(|(_, p)| p).sum();
        if mass > 0.0 {
            for e in &mut mixed {
                e.1 /= mass;
            }
            model.terms.push(Term {
                root: j,
                alpha: n3 * (1.0 - 2.0 * half) * mu2 / (2.0 * kf),
                kernel: Kernel::Table(mixed),
            });
        }
    }
    model
}
