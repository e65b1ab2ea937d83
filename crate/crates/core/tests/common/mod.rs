//! Independent oracles shared by the integration tests and the acceptance
//! run. Nothing here calls into the library's decoders or analysis.
#![allow(dead_code)]

use rand::seq::index::sample;
use rand::Rng;

/// Equations over `k ≤ 16` unknowns as bitmasks.
pub type Equation = u16;

pub fn random_equations<R: Rng>(rng: &mut R, k: usize, count: usize, max_degree: usize) -> Vec<Vec<u32>> {
    (0..count)
        .map(|_| {
            let d = rng.gen_range(1..=max_degree.min(k));
            let mut ids: Vec<u32> = sample(rng, k, d).into_iter().map(|i| i as u32).collect();
            ids.sort_unstable();
            ids
        })
        .collect()
}

fn mask(ids: &[u32]) -> Equation {
    ids.iter().fold(0, |m, &i| m | 1 << i)
}

/// Repeatedly resolves any equation with exactly one unknown left.
pub fn degree_one_closure(k: usize, equations: &[Vec<u32>]) -> Vec<bool> {
    let mut known: Equation = 0;
    loop {
        let before = known;
        for eq in equations {
            let rest = mask(eq) & !known;
            if rest.count_ones() == 1 {
                known |= rest;
            }
        }
        if known == before {
            break;
        }
    }
    (0..k).map(|i| known >> i & 1 == 1).collect()
}

/// Symbols determined by the equations over GF(2): `e_i` lies in the row
/// space.
pub fn gf2_recoverable(k: usize, equations: &[Vec<u32>]) -> Vec<bool> {
    // reduced row echelon form
    let mut rows: Vec<Equation> = Vec::new();
    for eq in equations {
        let mut r = mask(eq);
        for &b in &rows {
            if r & (1 << b.trailing_zeros()) != 0 {
                r ^= b;
            }
        }
        if r != 0 {
            let pivot = 1 << r.trailing_zeros();
            for b in rows.iter_mut() {
                if *b & pivot != 0 {
                    *b ^= r;
                }
            }
            rows.push(r);
        }
    }
    (0..k).map(|i| rows.iter().any(|&r| r == 1 << i)).collect()
}

/// Monte Carlo degree law after stripping: draw `d ~ probs`, pick `d`
/// distinct symbols of `total`, count those outside the first `known`.
pub fn stripped_degree_histogram<R: Rng>(
    rng: &mut R,
    probs: &[f64],
    total: usize,
    known: usize,
    samples: usize,
) -> Vec<f64> {
    let cdf: Vec<f64> = probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let mut hist = vec![0.0; probs.len()];
    for _ in 0..samples {
        let u: f64 = rng.gen::<f64>() * cdf[cdf.len() - 1];
        let d = cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1);
        let d_eff = d.min(total);
        let left = sample(rng, total, d_eff).into_iter().filter(|&i| i >= known).count();
        hist[left] += 1.0;
    }
    hist.iter_mut().for_each(|h| *h /= samples as f64);
    hist
}

pub fn tv(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n).map(|i| (a.get(i).unwrap_or(&0.0) - b.get(i).unwrap_or(&0.0)).abs()).sum::<f64>() / 2.0
}

/// Two-sided 0.1% critical values of χ² for 1..=10 degrees of freedom.
pub const CHI2_999: [f64; 10] = [10.83, 13.82, 16.27, 18.47, 20.52, 22.46, 24.32, 26.12, 27.88, 29.59];

pub fn chi2(observed: &[f64], expected: &[f64]) -> f64 {
    observed.iter().zip(expected).filter(|(_, &e)| e > 0.0).map(|(o, e)| (o - e).powi(2) / e).sum()
}
