//! Dense linear programs and their solution.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpConstraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective·x` subject to the constraints and per-variable
/// bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<LpConstraint>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("problem is infeasible")]
    Infeasible,
    #[error("problem is unbounded")]
    Unbounded,
    #[error("malformed problem: {0}")]
    Malformed(String),
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self { objective, constraints: Vec::new(), bounds: vec![(0.0, f64::INFINITY); n] }
    }

    pub fn dim(&self) -> usize {
        self.objective.len()
    }

    pub fn push(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(LpConstraint { coeffs, relation, rhs });
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.dim();
        if self.bounds.len() != n {
            return Err(LpError::Malformed(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        if let Some((i, _)) = self.bounds.iter().enumerate().find(|(_, (lo, hi))| !(lo <= hi)) {
            return Err(LpError::Malformed(format!("variable {i} has inconsistent bounds")));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Malformed(format!("constraint {i} has {} coefficients", c.coeffs.len())));
            }
            if c.coeffs.iter().any(|v| !v.is_finite()) || !c.rhs.is_finite() {
                return Err(LpError::Malformed(format!("constraint {i} is not finite")));
            }
        }
        Ok(())
    }

    /// `lhs − rhs` per constraint, signed so that feasible means `≥ 0`
    /// (equalities report `−|lhs − rhs|`).
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| {
                let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
                match c.relation {
                    Relation::Ge => lhs - c.rhs,
                    Relation::Le => c.rhs - lhs,
                    Relation::Eq => -(lhs - c.rhs).abs(),
                }
            })
            .collect()
    }
}

/// Solves with the simplex implementation of `minilp`.
pub fn lp_solve(p: &LpProblem) -> Result<LpSolution, LpError> {
    p.validate()?;
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> =
        p.objective.iter().zip(&p.bounds).map(|(&c, &b)| problem.add_var(c, b)).collect();
    for c in &p.constraints {
        let expr: Vec<_> = vars
            .iter()
            .zip(&c.coeffs)
            .filter(|(_, &a)| a != 0.0)
            .map(|(&v, &a)| (v, a))
            .collect();
        let op = match c.relation {
            Relation::Ge => ComparisonOp::Ge,
            Relation::Le => ComparisonOp::Le,
            Relation::Eq => ComparisonOp::Eq,
        };
        problem.add_constraint(&expr[..], op, c.rhs);
    }
    let solution = problem.solve().map_err(|e| match e {
        minilp::Error::Infeasible => LpError::Infeasible,
        minilp::Error::Unbounded => LpError::Unbounded,
    })?;
    let x: Vec<f64> = vars.iter().map(|&v| solution[v]).collect();
    // minilp can report a variable parked at an infinite bound as optimal
    if x.iter().any(|v| !v.is_finite()) {
        return Err(LpError::Unbounded);
    }
    let objective = x.iter().zip(&p.objective).map(|(a, b)| a * b).sum();
    Ok(LpSolution { x, objective })
}
