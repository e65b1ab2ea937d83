mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rateless_coop::codec::{
    conditional_distribution, lt_encode, presets, CodedSymbol, PeelingDecoder, RecoveryState, SymbolGraph,
    SymbolTag,
};

use common::{chi2, degree_one_closure, gf2_recoverable, random_equations, stripped_degree_histogram, tv, CHI2_999};

fn incremental(k: usize, eqs: &[Vec<u32>]) -> Vec<bool> {
    let mut d = PeelingDecoder::new(k);
    for e in eqs {
        d.add_symbol(e, None);
    }
    d.process();
    d.known_mask().to_vec()
}

fn batch(k: usize, eqs: &[Vec<u32>]) -> Vec<bool> {
    let coded = eqs
        .iter()
        .map(|n| CodedSymbol { origin: 0, frame: 0, neighbors: n.clone(), payload: None, seed: 0 })
        .collect();
    let mut g = SymbolGraph::new(coded, RecoveryState::new(1, k));
    g.peel_decode(usize::MAX);
    (0..k as u32).map(|i| g.known.is_known(i)).collect()
}

#[test]
fn peeling_equals_closure_and_stays_inside_gf2_span() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let k = rand::Rng::gen_range(&mut rng, 1..=12);
        let count = rand::Rng::gen_range(&mut rng, 0..=2 * k);
        let eqs = random_equations(&mut rng, k, count, 4);
        let closure = degree_one_closure(k, &eqs);
        let span = gf2_recoverable(k, &eqs);
        for peeled in [incremental(k, &eqs), batch(k, &eqs)] {
            assert_eq!(peeled, closure, "{eqs:?}");
            assert!(peeled.iter().zip(&span).all(|(p, s)| !p || *s));
        }
    }
}

#[test]
fn gf2_can_beat_peeling() {
    // x0+x1, x1+x2, x0+x2+x3 with no degree-1 symbol: Gaussian elimination
    // recovers x3, peeling nothing
    let eqs = vec![vec![0, 1], vec![1, 2], vec![0, 2, 3]];
    assert_eq!(incremental(4, &eqs), vec![false; 4]);
    assert_eq!(gf2_recoverable(4, &eqs), vec![false, false, false, true]);
}

proptest! {
    #[test]
    fn peeling_is_order_independent(seed in any::<u64>(), k in 1usize..40, extra in 0usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut eqs = random_equations(&mut rng, k.min(16), k + extra, 5);
        let k = k.min(16);
        let reference = incremental(k, &eqs);
        eqs.shuffle(&mut rng);
        let mut d = PeelingDecoder::new(k);
        for e in &eqs {
            d.add_symbol(e, None);
            d.process();
        }
        prop_assert_eq!(d.known_mask(), &reference[..]);
    }
}

#[test]
fn stripped_degree_law_matches_edge_stripping() {
    // two users of k = 100, the partner's block known
    let dist = presets::fcc_table(2).unwrap();
    let law = conditional_distribution(&dist, 200, 100).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mc = stripped_degree_histogram(&mut rng, dist.as_slice(), 200, 100, 100_000);
    let d = tv(law.as_slice(), &mc);
    assert!(d < 0.01, "TV {d}");
}

#[test]
fn table_one_single_user_mean_degree() {
    // mean degree printed for the single-user column: 5.5442
    let dist = presets::fcc_table(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 1_000_000;
    let mean = (0..n).map(|_| dist.sample(&mut rng) as f64).sum::<f64>() / n as f64;
    assert!((mean - 5.5442).abs() < 0.05, "{mean}");
}

#[test]
fn sampled_degrees_follow_the_distribution() {
    let dist = presets::partial_recovery_example();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 100_000;
    let mut counts = vec![0.0; dist.max_degree() + 1];
    for _ in 0..n {
        counts[dist.sample(&mut rng)] += 1.0;
    }
    let support: Vec<usize> = dist.support().map(|(d, _)| d).collect();
    let obs: Vec<f64> = support.iter().map(|&d| counts[d]).collect();
    let exp: Vec<f64> = support.iter().map(|&d| dist.prob(d) * n as f64).collect();
    assert_eq!(obs.iter().sum::<f64>(), n as f64, "mass outside the support");
    let stat = chi2(&obs, &exp);
    assert!(stat < CHI2_999[support.len() - 2], "χ² {stat}");
}

#[test]
fn neighbours_are_uniform_over_the_union() {
    let dist = presets::partial_recovery_example();
    let union: Vec<u32> = (100..110).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let syms = lt_encode(&union, &dist, 20_000, SymbolTag { origin: 0, frame: 1 }, &mut rng).unwrap();
    let mut counts = [0.0; 10];
    let mut edges = 0.0;
    for s in &syms {
        for &n in &s.neighbors {
            counts[(n - 100) as usize] += 1.0;
            edges += 1.0;
        }
    }
    let stat = chi2(&counts, &[edges / 10.0; 10]);
    assert!(stat < CHI2_999[8], "χ² {stat}");
}
