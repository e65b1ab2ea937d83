use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rateless_coop::codec::DegreeDistribution;
use rateless_coop::optimizer::{design_fcc, lp_solve, DesignParams, LpProblem, Relation};

/// Solves a square system by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            combinations(last, k - 1).into_iter().map(move |mut c| {
                c.push(last);
                c
            })
        })
        .collect()
}

/// Best vertex of `{x : A x ≤ b, 0 ≤ x ≤ 10}` by enumeration.
fn brute_force(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let n = c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = -1.0;
        rows.push((e.clone(), 0.0));
        e[i] = 1.0;
        rows.push((e, 10.0));
    }
    combinations(rows.len(), n)
        .into_iter()
        .filter_map(|idx| {
            let x = solve(idx.iter().map(|&i| rows[i].0.clone()).collect(), idx.iter().map(|&i| rows[i].1).collect())?;
            rows.iter()
                .all(|(r, rhs)| r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= rhs + 1e-9)
                .then(|| c.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>())
        })
        .max_by(f64::total_cmp)
}

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..200 {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(1..=4);
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..2.0)).collect();
        let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.0..2.0)).collect()).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..5.0)).collect();
        let mut p = LpProblem::new(c.clone());
        p.bounds = vec![(0.0, 10.0); n];
        for (row, &rhs) in a.iter().zip(&b) {
            p.push(row.clone(), Relation::Le, rhs);
        }
        match (brute_force(&c, &a, &b), lp_solve(&p)) {
            (Some(best), Ok(sol)) => assert!((best - sol.objective).abs() < 1e-7, "{best} vs {}", sol.objective),
            (None, Err(_)) => {}
            (want, got) => panic!("enumeration {want:?}, solver {got:?}"),
        }
    }
}

fn ln_choose(n: f64, r: usize) -> f64 {
    (0..r).map(|i| (n - i as f64).ln() - ((r - i) as f64).ln()).sum()
}

/// Smallest left side of the admissibility condition over the grid,
/// computed from scratch.
fn min_condition(dist: &DegreeDistribution, r: &[f64], users: usize, k: usize, c: f64, grid: &[f64]) -> f64 {
    let total = (users * k) as f64;
    let mut worst = f64::INFINITY;
    for (m, &rm) in r.iter().enumerate() {
        let unknown = ((users - m) * k) as f64;
        let known = total - unknown;
        for &x in grid {
            let arg = 1.0 - x - c * ((1.0 - x) / unknown).sqrt();
            if arg <= 0.0 {
                continue;
            }
            let mut lhs = 0.0;
            for (j, pj) in dist.support() {
                for d in 1..=j {
                    if (j - d) as f64 > known {
                        continue;
                    }
                    let h = (ln_choose(unknown, d) + ln_choose(known, j - d) - ln_choose(total, j)).exp();
                    lhs += pj * d as f64 * x.powi(d as i32 - 1) * h;
                }
            }
            worst = worst.min(lhs + rm * arg.ln());
        }
    }
    worst
}

#[test]
fn fcc_designs_satisfy_the_condition_everywhere() {
    // mean degrees printed for the designed distributions: 5.5442, 7.0752
    for (users, printed) in [(1, 5.5442), (2, 7.0752)] {
        let params = DesignParams::fcc(users, 10_000);
        let d = design_fcc(&params).unwrap();
        // r can exceed 1: the condition only covers x ≤ 1 − δ, and recovering
        // a (1 − δ) fraction can take fewer than k symbols
        assert!(d.r.iter().all(|&r| r > 0.0), "{:?}", d.r);
        let worst = min_condition(&d.dist, &d.r, users, params.k, params.c, &params.grid());
        assert!(worst >= -1e-9, "M={users}: {worst}");
        let mu = d.dist.mean();
        assert!((mu - printed).abs() <= 0.2 * printed, "M={users}: μ {mu}");
    }
}

#[test]
fn invalid_design_parameters_are_rejected() {
    for text in [
        "kind = \"fcc\"\nM = 0\nk = 100\n",
        "kind = \"pcc\"\nM = 2\nk = 100\n",
        "kind = \"fcc\"\nM = 2\nk = 100\ngrid_step = 0.0\n",
        "kind = \"fcc\"\nM = 2\nk = 100\nbogus = 1\n",
    ] {
        assert!(DesignParams::from_toml(text).is_err(), "{text}");
    }
}
