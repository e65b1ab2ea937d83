//! LP-based degree-distribution design.

pub mod design;
pub mod lp;

pub use design::{
    build_fcc_lp, build_pcc_lp, design_fcc, pcc_design_fixed_point, solve_design, verify, Design,
    DesignError, DesignKind, DesignLp, DesignParams, PccDesign, Stage,
};
pub use lp::{lp_solve, LpConstraint, LpError, LpProblem, LpSolution, Relation};
