//! Generalised AND-OR tree evaluation.
//!
//! OR nodes are source symbols, partitioned into types; AND nodes are coded
//! symbols. For a type-`j` OR node the model lists *terms*: each term is a
//! Poisson-distributed population of AND children (rate `α`) together with
//! a kernel giving the law of that AND node's other children. One step of
//! the recursion is
//!
//! `p_j ← Π_{terms t rooted at j} exp(−α_t · K_t(1 − p))`
//!
//! where `K_t(x) = E[Π_w x_w^{c_w}]` over the other-children counts `c`.
//! This is the lemma's `Π_V δ_{j,V}(1 − Σ_I β_{V,I} Π_w (1 − p_w)^{i_w})`
//! with `δ(x) = e^{α(x−1)}`, except that a single term may mix several AND
//! types when its kernel is hypergeometric.

use crate::codec::hypergeom::ln_choose;
use crate::codec::DegreeDistribution;

/// Tolerance on the mass of explicit child-count tables.
pub const BETA_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_ITERS: usize = 1000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("model has {0} OR types, above the cap")]
    TooManyTypes(usize),
    #[error("type space over {users} users is exponential; cap is {cap}")]
    ExponentialTypeSpace { users: usize, cap: usize },
    #[error("layout has {parts} parts, above the cap of {cap}; merge adjacent frames")]
    TooManyParts { parts: usize, cap: usize },
    #[error("invalid model: {0}")]
    Invalid(String),
}

/// Law of the other children of an AND node reached from a root edge.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    /// Explicit `(child counts per OR type, probability)` entries.
    Table(Vec<(Vec<u32>, f64)>),
    /// Degree of the AND node minus one is `others[c]`; the `c` other
    /// children are drawn without replacement from `sizes[w]` symbols of
    /// each type `w` (real sizes allowed).
    Hypergeometric { others: Vec<f64>, sizes: Vec<f64> },
}

impl Kernel {
    /// `E[Π_w x_w^{c_w}]`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Kernel::Table(entries) => entries
                .iter()
                .map(|(counts, prob)| {
                    prob * counts
                        .iter()
                        .zip(x)
                        .map(|(&c, &xv)| xv.powi(c as i32))
                        .product::<f64>()
                })
                .sum(),
            Kernel::Hypergeometric { others, sizes } => hypergeometric_eval(others, sizes, x),
        }
    }

    pub fn mass(&self) -> f64 {
        match self {
            Kernel::Table(entries) => entries.iter().map(|(_, p)| p).sum(),
            Kernel::Hypergeometric { others, .. } => others.iter().sum(),
        }
    }

    /// Explicit table of child-count vectors; hypergeometric kernels are
    /// enumerated, which is only sensible for a few types and small degrees.
    pub fn to_table(&self) -> Vec<(Vec<u32>, f64)> {
        match self {
            Kernel::Table(entries) => entries.clone(),
            Kernel::Hypergeometric { others, sizes } => {
                let total: f64 = sizes.iter().sum();
                let mut out = Vec::new();
                for (c, &w) in others.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let norm = ln_choose(total, c as f64);
                    for counts in compositions(c as u32, sizes.len()) {
                        let ln: f64 = counts
                            .iter()
                            .zip(sizes)
                            .map(|(&i, &s)| ln_choose(s, i as f64))
                            .sum::<f64>();
                        let prob = (ln - norm).exp();
                        if prob > 0.0 && prob.is_finite() {
                            out.push((counts, w * prob));
                        }
                    }
                }
                out
            }
        }
    }
}

/// All vectors of `parts` non-negative integers summing to `total`.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, slot: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == cur.len() {
            cur[slot] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[slot] = v;
            rec(left - v, slot + 1, cur, out);
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, 0, &mut vec![0; parts], &mut out);
    out
}

/// `Σ_c others[c] · [t^c] Π_w (1 + x_w t)^{S_w} / C(U, c)`.
///
/// The generating function is expanded with `t` scaled by `1/U` so the
/// coefficients stay representable. Each degree's coefficient is divided by
/// the same coefficient at `x = 1`, which equals `C(U, c)/U^c` for integer
/// sizes and keeps the mass at one when fractional parts are smaller than
/// the degree.
fn hypergeometric_eval(others: &[f64], sizes: &[f64], x: &[f64]) -> f64 {
    let max_c = others.iter().rposition(|&w| w > 0.0).unwrap_or(0);
    let total: f64 = sizes.iter().sum();
    if total <= 0.0 {
        return others.first().copied().unwrap_or(0.0);
    }
    let at_x = expand(sizes, total, max_c, &|w| x[w]);
    let at_one = expand(sizes, total, max_c, &|_| 1.0);
    ratio_sum(others, &at_x, &at_one)
}

fn expand(sizes: &[f64], total: f64, max_c: usize, x: &dyn Fn(usize) -> f64) -> Vec<f64> {
    let mut poly = vec![0.0; max_c + 1];
    poly[0] = 1.0;
    let mut term = vec![0.0; max_c + 1];
    let mut next = vec![0.0; max_c + 1];
    for (w, &s) in sizes.iter().enumerate() {
        if s <= 0.0 {
            continue;
        }
        let xv = x(w);
        // term[i] = C(s, i) (x/U)^i, via the ratio recurrence
        term[0] = 1.0;
        for i in 1..=max_c {
            let f = (s - (i as f64 - 1.0)).max(0.0) / i as f64;
            term[i] = term[i - 1] * f * xv / total;
        }
        next.iter_mut().for_each(|v| *v = 0.0);
        for (a, &pa) in poly.iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            for (b, &tb) in term.iter().enumerate().take(max_c + 1 - a) {
                next[a + b] += pa * tb;
            }
        }
        std::mem::swap(&mut poly, &mut next);
    }
    poly
}

/// Removes one factor `(1 + a t)` from a truncated power series.
fn divide_linear(poly: &[f64], a: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(poly.len());
    let mut prev = 0.0;
    for &p in poly {
        prev = p - a * prev;
        out.push(prev);
    }
    out
}

fn ratio_sum(others: &[f64], at_x: &[f64], at_one: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut mass = 0.0;
    for (c, &w) in others.iter().enumerate() {
        if w == 0.0 || at_one[c] <= 0.0 {
            continue;
        }
        acc += w * at_x[c] / at_one[c];
        mass += w;
    }
    if mass > 0.0 {
        acc * others.iter().sum::<f64>() / mass
    } else {
        0.0
    }
}

/// One Poisson population of AND children hanging off type-`root` OR nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub root: usize,
    pub alpha: f64,
    pub kernel: Kernel,
}

/// A stream of coded symbols: `count` symbols with degree law `dist`, each
/// over a union made of `members` (OR type, number of that type's symbols
/// in the union).
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    pub count: f64,
    pub dist: DegreeDistribution,
    pub members: Vec<(usize, f64)>,
}

/// An AND-OR tree model.
#[derive(Debug, Clone, PartialEq)]
pub struct AndOrModel {
    /// Number of source symbols of each OR type.
    pub populations: Vec<f64>,
    /// Initial unrecovered probability per OR type.
    pub p0: Vec<f64>,
    /// Explicit terms.
    pub terms: Vec<Term>,
    /// Stream terms, evaluated jointly for all roots.
    pub streams: Vec<StreamTerm>,
    /// Outer-code checks over groups of OR types.
    pub precodes: Vec<PrecodeGroup>,
}

/// Checks of a high-rate outer code spread uniformly over the symbols of
/// `members`. Every check covers `check_degree` message symbols and one
/// parity symbol; message symbols sit in `message_degree` checks on
/// average, parity symbols in one.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecodeGroup {
    pub members: Vec<usize>,
    pub message_fraction: f64,
    pub check_degree: usize,
    pub message_degree: f64,
}

impl PrecodeGroup {
    /// Probability that no check recovers a symbol when a fraction `known`
    /// of the group's symbols is known.
    fn miss(&self, known: f64) -> f64 {
        let solved = known.powi(self.check_degree as i32);
        let lo = self.message_degree.floor();
        let frac = self.message_degree - lo;
        let msg = (1.0 - frac) * (1.0 - solved).powi(lo as i32)
            + frac * (1.0 - solved).powi(lo as i32 + 1);
        self.message_fraction * msg + (1.0 - self.message_fraction) * (1.0 - solved)
    }
}

/// All the terms one stream contributes: the kernel of root `r` is
/// hypergeometric over `sizes` with one type-`r` symbol removed.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamTerm {
    pub others: Vec<f64>,
    pub sizes: Vec<f64>,
    /// `α` per OR type (zero when the type is not in the union).
    pub alphas: Vec<f64>,
    total: f64,
    max_c: usize,
    /// Per root: the expansion at `x = 1` with the root symbol removed.
    at_one: Vec<Vec<f64>>,
}

impl StreamTerm {
    fn new(others: Vec<f64>, sizes: Vec<f64>, alphas: Vec<f64>) -> Self {
        let total: f64 = sizes.iter().sum();
        let max_c = others.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        let full = expand(&sizes, total, max_c, &|_| 1.0);
        let at_one = (0..sizes.len())
            .map(|r| {
                if sizes[r] >= 1.0 {
                    divide_linear(&full, 1.0 / total)
                } else {
                    full.clone()
                }
            })
            .collect();
        Self { others, sizes, alphas, total, max_c, at_one }
    }

    /// The kernel seen from a type-`root` OR node, as a standalone term.
    pub fn kernel(&self, root: usize) -> Kernel {
        let mut sizes = self.sizes.clone();
        sizes[root] = (sizes[root] - 1.0).max(0.0);
        Kernel::Hypergeometric { others: self.others.clone(), sizes }
    }

    /// `K_r(x)` for every root at once.
    fn eval_all(&self, x: &[f64]) -> Vec<f64> {
        let full = expand(&self.sizes, self.total, self.max_c, &|w| x[w]);
        (0..self.sizes.len())
            .map(|r| {
                if self.alphas[r] <= 0.0 {
                    return 0.0;
                }
                if self.sizes[r] >= 1.0 {
                    let q = divide_linear(&full, x[r] / self.total);
                    ratio_sum(&self.others, &q, &self.at_one[r])
                } else {
                    ratio_sum(&self.others, &full, &self.at_one[r])
                }
            })
            .collect()
    }
}

impl AndOrModel {
    pub fn new(populations: Vec<f64>) -> Self {
        let p0 = vec![1.0; populations.len()];
        Self { populations, p0, terms: Vec::new(), streams: Vec::new(), precodes: Vec::new() }
    }

    pub fn n_or_types(&self) -> usize {
        self.populations.len()
    }

    /// Exact model of LT streams: degrees are clamped to the union, the
    /// root edge is size-biased, and other children are hypergeometric.
    pub fn from_streams(populations: Vec<f64>, streams: &[Stream]) -> Result<Self, AnalysisError> {
        let mut model = Self::new(populations);
        for s in streams {
            model.add_stream(s)?;
        }
        Ok(model)
    }

    pub fn add_stream(&mut self, s: &Stream) -> Result<(), AnalysisError> {
        let types = self.n_or_types();
        let mut sizes = vec![0.0; types];
        for &(t, size) in &s.members {
            if t >= types || !(size >= 0.0) {
                return Err(AnalysisError::Invalid(format!("bad stream member ({t}, {size})")));
            }
            sizes[t] += size;
        }
        let union: f64 = sizes.iter().sum();
        if s.count <= 0.0 || union <= 0.0 {
            return Ok(());
        }
        // degree law after clamping to the union
        let cap = union.floor().max(1.0) as usize;
        let mut clamped = vec![0.0; s.dist.max_degree().min(cap) + 1];
        for (d, p) in s.dist.support() {
            clamped[d.min(cap)] += p;
        }
        let mean: f64 = clamped.iter().enumerate().map(|(d, p)| d as f64 * p).sum();
        let others: Vec<f64> =
            (1..clamped.len()).map(|d| d as f64 * clamped[d] / mean).collect();
        // edges per type-`root` symbol: stream edges landing in the type's
        // share, spread over the whole type population
        let alphas: Vec<f64> = (0..types)
            .map(|r| {
                if sizes[r] > 0.0 {
                    s.count * mean * (sizes[r] / union) / self.populations[r]
                } else {
                    0.0
                }
            })
            .collect();
        if let Some(existing) =
            self.streams.iter_mut().find(|t| t.sizes == sizes && t.others == others)
        {
            for (a, b) in existing.alphas.iter_mut().zip(&alphas) {
                *a += b;
            }
        } else {
            self.streams.push(StreamTerm::new(others, sizes, alphas));
        }
        Ok(())
    }

    /// Every term with its own kernel, stream terms split per root.
    pub fn expanded_terms(&self) -> Vec<Term> {
        let mut out = self.terms.clone();
        for st in &self.streams {
            for (root, &alpha) in st.alphas.iter().enumerate() {
                if alpha > 0.0 {
                    out.push(Term { root, alpha, kernel: st.kernel(root) });
                }
            }
        }
        out
    }

    /// Total Poisson rate of AND children per OR type.
    pub fn alpha(&self, root: usize) -> f64 {
        self.terms.iter().filter(|t| t.root == root).map(|t| t.alpha).sum::<f64>()
            + self.streams.iter().map(|s| s.alphas[root]).sum::<f64>()
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        for t in &self.expanded_terms() {
            if t.root >= self.n_or_types() || !(t.alpha >= 0.0) {
                return Err(AnalysisError::Invalid(format!("bad term rooted at {}", t.root)));
            }
            let mass = t.kernel.mass();
            if (mass - 1.0).abs() > BETA_TOLERANCE {
                return Err(AnalysisError::Invalid(format!("kernel mass {mass}")));
            }
        }
        Ok(())
    }

    /// One recursion step.
    pub fn step(&self, p: &[f64]) -> Vec<f64> {
        let x: Vec<f64> = p.iter().map(|v| 1.0 - v).collect();
        let mut log_next = vec![0.0; p.len()];
        for t in &self.terms {
            if t.alpha > 0.0 {
                log_next[t.root] -= t.alpha * t.kernel.eval(&x);
            }
        }
        for st in &self.streams {
            for (r, k) in st.eval_all(&x).into_iter().enumerate() {
                log_next[r] -= st.alphas[r] * k;
            }
        }
        let mut next: Vec<f64> = log_next.into_iter().map(f64::exp).collect();
        for g in &self.precodes {
            let pop: f64 = g.members.iter().map(|&w| self.populations[w]).sum();
            if pop <= 0.0 {
                continue;
            }
            let known = g.members.iter().map(|&w| self.populations[w] * x[w]).sum::<f64>() / pop;
            let miss = g.miss(known);
            for &w in &g.members {
                next[w] *= miss;
            }
        }
        next
    }
}

/// Outcome of [`and_or_iterate`].
#[derive(Debug, Clone, PartialEq)]
pub struct AndOrResult {
    /// Final unrecovered probability per OR type.
    pub p: Vec<f64>,
    /// Every iterate, starting from `p0`.
    pub trajectory: Vec<Vec<f64>>,
    pub converged: bool,
    /// Every type's sequence was non-increasing.
    pub monotone: bool,
}

impl AndOrResult {
    pub fn iterations(&self) -> usize {
        self.trajectory.len() - 1
    }

    /// Population-weighted unrecovered fraction over `types`.
    pub fn unrecovered(&self, model: &AndOrModel, types: &[usize]) -> f64 {
        let pop: f64 = types.iter().map(|&t| model.populations[t]).sum();
        types.iter().map(|&t| model.populations[t] * self.p[t]).sum::<f64>() / pop
    }
}

/// Iterates the recursion from `p0` until `max |Δp| < tol` or `iters`.
pub fn and_or_iterate(model: &AndOrModel, iters: usize, tol: f64) -> AndOrResult {
    let mut p = model.p0.clone();
    let mut trajectory = vec![p.clone()];
    let mut converged = false;
    let mut monotone = true;
    for _ in 0..iters {
        let next = model.step(&p);
        let delta = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        monotone &= next.iter().zip(&p).all(|(a, b)| *a <= b + 1e-15);
        p = next;
        trajectory.push(p.clone());
        if delta < tol {
            converged = true;
            break;
        }
    }
    AndOrResult { p, trajectory, converged, monotone }
}
