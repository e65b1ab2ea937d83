//! Degree-distribution design LPs.
//!
//! A distribution is admissible for a stage when the law of its unknown
//! neighbours `Δ` satisfies `Δ′(x) + r·ln(1 − x − c√((1−x)/U)) ≥ 0` on a grid
//! of `x ∈ [0, 1−δ]`, where `U` is the number of unknown symbols. The LP
//! maximises the sum of the stage rates `r`.

use serde::{Deserialize, Serialize};

use super::lp::{lp_solve, LpError, LpProblem, Relation};
use crate::analysis::{pcc_user_recursion, AnalysisError};
use crate::codec::hypergeom::hypergeometric_pmf;
use crate::codec::{conditional_distribution_real, DegreeDistribution};

/// Coefficients below this are dropped from constraint rows.
/// Finest accepted grid spacing (a million constraint rows per stage).
pub const MIN_GRID_STEP: f64 = 1e-6;

pub const COEFF_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignKind {
    Fcc,
    Pcc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignParams {
    pub kind: DesignKind,
    #[serde(rename = "M")]
    pub users: usize,
    pub k: usize,
    #[serde(rename = "D", default = "default_max_degree")]
    pub max_degree: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_step")]
    pub grid_step: f64,
    /// Symbols per slot; PCC only.
    #[serde(rename = "N", default)]
    pub symbols_per_slot: Option<usize>,
    /// Inter-user erasure probability used when predicting recovery; PCC only.
    #[serde(default)]
    pub inter_erasure: f64,
    #[serde(default = "default_max_outer")]
    pub max_outer: usize,
    /// Cap on the number of parts `L`; PCC only.
    #[serde(default = "default_part_cap")]
    pub part_cap: usize,
}

fn default_max_degree() -> usize {
    50
}
fn default_delta() -> f64 {
    0.01
}
fn default_c() -> f64 {
    0.1
}
fn default_step() -> f64 {
    0.005
}
fn default_max_outer() -> usize {
    10
}
fn default_part_cap() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DesignError {
    #[error("invalid design parameter `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
    #[error("LP failed: {source}; minimum residual {min_residual:e}")]
    Lp { source: LpError, min_residual: f64 },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl DesignParams {
    pub fn fcc(users: usize, k: usize) -> Self {
        Self {
            kind: DesignKind::Fcc,
            users,
            k,
            max_degree: default_max_degree(),
            delta: default_delta(),
            c: default_c(),
            grid_step: default_step(),
            symbols_per_slot: None,
            inter_erasure: 0.0,
            max_outer: default_max_outer(),
            part_cap: default_part_cap(),
        }
    }

    pub fn pcc(users: usize, k: usize, n_slot: usize) -> Self {
        Self { kind: DesignKind::Pcc, symbols_per_slot: Some(n_slot), ..Self::fcc(users, k) }
    }

    pub fn from_toml(text: &str) -> Result<Self, DesignError> {
        let p: Self = toml::from_str(text)
            .map_err(|e| DesignError::Invalid { key: "params", message: e.to_string() })?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DesignError> {
        let bad = |key, message: &str| Err(DesignError::Invalid { key, message: message.into() });
        if self.users == 0 {
            return bad("M", "must be at least 1");
        }
        if self.k == 0 {
            return bad("k", "must be positive");
        }
        if self.max_degree == 0 || self.max_degree > self.k {
            return bad("D", "must be in 1..=k");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta", "must be in (0, 1)");
        }
        if !(self.c >= 0.0) {
            return bad("c", "must be non-negative");
        }
        if !(self.grid_step >= MIN_GRID_STEP && self.grid_step < 1.0) {
            return bad("grid_step", "must be in [1e-6, 1)");
        }
        if !(0.0..=1.0).contains(&self.inter_erasure) {
            return bad("inter_erasure", "must be in [0, 1]");
        }
        if self.max_outer == 0 {
            return bad("max_outer", "must be at least 1");
        }
        if self.kind == DesignKind::Pcc {
            if self.users < 2 {
                return bad("M", "PCC needs at least two users");
            }
            match self.symbols_per_slot {
                Some(n) if n > 0 => {}
                _ => return bad("N", "PCC designs need a positive N"),
            }
            if self.part_cap == 0 {
                return bad("part_cap", "must be at least 1");
            }
        }
        Ok(())
    }

    /// Grid points `0, step, 2·step, ... ≤ 1 − δ`.
    pub fn grid(&self) -> Vec<f64> {
        let last = 1.0 - self.delta;
        (0..)
            .map(|i| i as f64 * self.grid_step)
            .take_while(|&x| x <= last + 1e-12)
            .map(|x| x.min(last))
            .collect()
    }
}

/// One admissibility condition: `unknown` of `total` union symbols are
/// unknown to the decoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub total: f64,
    pub unknown: f64,
}

impl Stage {
    fn ln_term(&self, x: f64, c: f64) -> Option<f64> {
        let arg = 1.0 - x - c * ((1.0 - x) / self.unknown).sqrt();
        (arg > 0.0).then(|| arg.ln())
    }
}

/// LP over `(Ω_1..Ω_D, r_1..r_S)` with one rate per stage.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignLp {
    pub problem: LpProblem,
    pub stages: Vec<Stage>,
    pub max_degree: usize,
    /// `(stage, x)` of every constraint row, in order after the simplex row.
    pub rows: Vec<(usize, f64)>,
    /// Grid points dropped because the logarithm's argument was not positive.
    pub dropped: Vec<(usize, f64)>,
}

fn build_lp(stages: Vec<Stage>, params: &DesignParams) -> DesignLp {
    let d_max = params.max_degree;
    let n_vars = d_max + stages.len();
    let mut objective = vec![0.0; n_vars];
    objective[d_max..].iter_mut().for_each(|v| *v = 1.0);
    let mut problem = LpProblem::new(objective);
    for b in &mut problem.bounds[..d_max] {
        *b = (0.0, 1.0);
    }
    let mut simplex = vec![0.0; n_vars];
    simplex[..d_max].iter_mut().for_each(|v| *v = 1.0);
    problem.push(simplex, Relation::Eq, 1.0);

    let grid = params.grid();
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for (si, stage) in stages.iter().enumerate() {
        let known = stage.total - stage.unknown;
        // h[j][d] = P(d of j draws unknown)
        let h: Vec<Vec<f64>> = (1..=d_max)
            .map(|j| {
                let drawn = (j as f64).min(stage.total);
                (0..=j)
                    .map(|d| {
                        let d = d as f64;
                        if d > drawn || drawn - d > known {
                            return 0.0;
                        }
                        let v = hypergeometric_pmf(stage.total, stage.unknown, drawn, d);
                        if v < COEFF_CUTOFF {
                            0.0
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        for &x in &grid {
            let Some(ln) = stage.ln_term(x, params.c) else {
                dropped.push((si, x));
                continue;
            };
            let mut coeffs = vec![0.0; n_vars];
            for j in 1..=d_max {
                let mut acc = 0.0;
                let mut xp = 1.0;
                for d in 1..=j {
                    acc += d as f64 * xp * h[j - 1][d];
                    xp *= x;
                }
                coeffs[j - 1] = if acc.abs() < COEFF_CUTOFF { 0.0 } else { acc };
            }
            coeffs[d_max + si] = ln;
            problem.push(coeffs, Relation::Ge, 0.0);
            rows.push((si, x));
        }
    }
    DesignLp { problem, stages, max_degree: d_max, rows, dropped }
}

/// Stage `m = 0..M−1`: the blocks of `m` users are known out of `M·k`.
pub fn build_fcc_lp(params: &DesignParams) -> DesignLp {
    let kf = params.k as f64;
    let m_all = params.users as f64;
    let stages = (0..params.users)
        .map(|m| Stage { total: m_all * kf, unknown: (m_all - m as f64) * kf })
        .collect();
    build_lp(stages, params)
}

/// Part `j`: `M·s^(j)` of `M·k` symbols are known.
pub fn build_pcc_lp(params: &DesignParams, s: &[f64]) -> Result<DesignLp, DesignError> {
    let kf = params.k as f64;
    if s.windows(2).any(|w| w[1] < w[0]) || s.iter().any(|&v| !(v >= 0.0 && v < kf)) {
        return Err(DesignError::Invalid { key: "s", message: "must be non-decreasing in [0, k)".into() });
    }
    let m_all = params.users as f64;
    let stages = s.iter().map(|&sj| Stage { total: m_all * kf, unknown: m_all * (kf - sj) }).collect();
    Ok(build_lp(stages, params))
}

/// A solved design.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub dist: DegreeDistribution,
    /// Rate per stage, `r = 1/(1+ε)`.
    pub r: Vec<f64>,
    pub objective: f64,
    /// Smallest residual of the LP rows at the returned point.
    pub min_residual: f64,
    /// Smallest residual when the condition is re-evaluated directly from
    /// the distribution.
    pub verified_min_residual: f64,
    pub dropped_points: usize,
}

impl Design {
    /// Overheads `ε = 1/r − 1`.
    pub fn overheads(&self) -> Vec<f64> {
        self.r.iter().map(|r| if *r > 0.0 { 1.0 / r - 1.0 } else { f64::INFINITY }).collect()
    }
}

/// Solves a design LP, then polishes: negative solver noise in `Ω` is
/// clipped, the mass renormalised, and each `r` lowered to the largest value
/// the polished `Ω` satisfies on every retained grid point.
pub fn solve_design(lp: &DesignLp, params: &DesignParams) -> Result<Design, DesignError> {
    let d_max = lp.max_degree;
    let sol = lp_solve(&lp.problem).map_err(|source| DesignError::Lp {
        source,
        min_residual: f64::NAN,
    })?;
    let pairs: Vec<(usize, f64)> =
        sol.x[..d_max].iter().enumerate().map(|(i, &v)| (i + 1, v.max(0.0))).collect();
    let dist = DegreeDistribution::normalized(d_max, pairs)
        .map_err(|e| DesignError::Invalid { key: "solution", message: e.to_string() })?;
    let mut r = vec![f64::INFINITY; lp.stages.len()];
    for (row, &(si, _)) in lp.problem.constraints[1..].iter().zip(&lp.rows) {
        let lhs: f64 = row.coeffs[..d_max].iter().zip(dist.as_slice()[1..].iter()).map(|(a, b)| a * b).sum();
        let ln = row.coeffs[d_max + si];
        if ln < 0.0 {
            r[si] = r[si].min((lhs / -ln).max(0.0) * (1.0 - 1e-12));
        }
    }
    for v in &mut r {
        if !v.is_finite() {
            *v = 0.0;
        }
    }
    let mut x = dist.as_slice()[1..].to_vec();
    x.resize(d_max, 0.0);
    x.extend(&r);
    let min_residual = lp.problem.residuals(&x).into_iter().fold(f64::INFINITY, f64::min);
    let verified_min_residual = verify(&dist, &r, &lp.stages, params);
    let objective = r.iter().sum();
    Ok(Design { dist, r, objective, min_residual, verified_min_residual, dropped_points: lp.dropped.len() })
}

/// Re-evaluates the admissibility condition through the conditional degree
/// law, independently of the LP rows.
pub fn verify(dist: &DegreeDistribution, r: &[f64], stages: &[Stage], params: &DesignParams) -> f64 {
    let mut worst = f64::INFINITY;
    for (stage, &rate) in stages.iter().zip(r) {
        let known = stage.total - stage.unknown;
        let Ok(delta) = conditional_distribution_real(dist, stage.total, known) else {
            return f64::NEG_INFINITY;
        };
        for x in params.grid() {
            if let Some(ln) = stage.ln_term(x, params.c) {
                worst = worst.min(delta.derivative(x) + rate * ln);
            }
        }
    }
    worst
}

/// Result of the PCC design loop.
#[derive(Debug, Clone, PartialEq)]
pub struct PccDesign {
    pub design: Design,
    /// The `s` the final LP was built from.
    pub s: Vec<f64>,
    /// Outer iterations used.
    pub iterations: usize,
    pub converged: bool,
    /// Total-variation distance between the last two `Ω` iterates.
    pub last_tv: f64,
}

/// Alternates LP design and user-side recovery prediction until the
/// predicted `s` moves by less than `0.001·k`.
pub fn pcc_design_fixed_point(params: &DesignParams) -> Result<PccDesign, DesignError> {
    params.validate()?;
    let n_slot = params.symbols_per_slot.expect("validated");
    let k = params.k;
    let parts = k.div_ceil(n_slot).min(params.part_cap);
    let mut s: Vec<f64> = (1..=parts).map(|i| ((i * n_slot) as f64).min(k as f64 - 1.0)).collect();
    let mut prev: Option<DegreeDistribution> = None;
    let mut last_tv = f64::INFINITY;
    for iteration in 1..=params.max_outer {
        let lp = build_pcc_lp(params, &s)?;
        let design = solve_design(&lp, params)?;
        if let Some(p) = &prev {
            last_tv = p.tv_distance(&design.dist);
        }
        let traj = pcc_user_recursion(&design.dist, k, n_slot, params.users, params.inter_erasure, parts)?;
        let mut next = Vec::with_capacity(parts);
        let mut floor = 0.0;
        for v in traj.s {
            let v = v.clamp(floor, k as f64 - 1.0);
            next.push(v);
            floor = v;
        }
        let shift = s.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let converged = shift < 0.001 * k as f64;
        if converged || iteration == params.max_outer {
            return Ok(PccDesign { design, s, iterations: iteration, converged, last_tv });
        }
        prev = Some(design.dist.clone());
        s = next;
    }
    unreachable!("max_outer is at least 1")
}

/// Solves the FCC design.
pub fn design_fcc(params: &DesignParams) -> Result<Design, DesignError> {
    params.validate()?;
    solve_design(&build_fcc_lp(params), params)
}
