//! Linear programs and a bounded-variable revised simplex solver.
//!
//! Programs are stored as sparse constraint rows with per-variable bounds.
//! [`solve_lp`] returns both primal and dual solutions; the dual vector holds
//! one multiplier per constraint row, with the convention that for an
//! equality-form minimization `min { q'y : Wy = h, y >= 0 }` the reported
//! multiplier vector `pi` satisfies `q'y* = pi'h` (strong duality) and
//! `W'pi <= q` (dual feasibility).
//!
//! [`enumerate_vertices`] is an independent brute-force oracle for small
//! bounded programs: it solves every n-subset of constraint/bound hyperplanes
//! and keeps the feasible intersection points.

mod format;
mod lu;
mod simplex;
mod vertex;

pub use format::{read_lp, read_lp_str, write_lp, write_lp_string};
pub(crate) use format::{
    parse_program_str as format_parse_program, write_program_string as format_write_program,
};
pub use vertex::enumerate_vertices;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default primal feasibility tolerance (absolute, per constraint).
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Default optimality (dual feasibility) tolerance.
pub const OPTIMALITY_TOL: f64 = 1e-6;

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    /// `<=`
    Le,
    /// `=`
    Eq,
    /// `>=`
    Ge,
}

/// Objective direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjSense {
    Minimize,
    Maximize,
}

/// A sparse constraint row `sum coeff_j * x_j  <sense>  rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    /// `(variable index, coefficient)` pairs; indices must be unique.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Self {
        Self { coeffs, sense, rhs }
    }

    /// Evaluate the row's left-hand side at `x`.
    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Signed violation of the row at `x` (positive means infeasible).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.lhs(x);
        match self.sense {
            Sense::Le => lhs - self.rhs,
            Sense::Ge => self.rhs - lhs,
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A linear program over `n_vars` variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub n_vars: usize,
    /// One objective coefficient per variable.
    pub objective: Vec<f64>,
    /// Constant added to the objective value (used by surrogate embeddings
    /// to fold target denormalization into the program).
    #[serde(default)]
    pub objective_offset: f64,
    pub sense: ObjSense,
    pub constraints: Vec<Constraint>,
    /// Per-variable `[lower, upper]`; infinities allowed.
    pub var_bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// A minimization program with all variables in `[0, +inf)`.
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            n_vars: n,
            objective,
            objective_offset: 0.0,
            sense: ObjSense::Minimize,
            constraints: Vec::new(),
            var_bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        self.var_bounds = bounds;
        self
    }

    pub fn push_constraint(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint::new(coeffs, sense, rhs));
    }

    /// Check the type invariants: index ranges, bound ordering, finite data.
    pub fn validate(&self) -> Result<(), LpError> {
        if self.objective.len() != self.n_vars {
            return Err(LpError::Invalid(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                self.n_vars
            )));
        }
        if self.var_bounds.len() != self.n_vars {
            return Err(LpError::Invalid(format!(
                "{} bounds for {} variables",
                self.var_bounds.len(),
                self.n_vars
            )));
        }
        for (j, &(lo, hi)) in self.var_bounds.iter().enumerate() {
            if lo > hi {
                return Err(LpError::Invalid(format!(
                    "variable {j} has lower bound {lo} > upper bound {hi}"
                )));
            }
            if lo.is_nan() || hi.is_nan() {
                return Err(LpError::Invalid(format!("variable {j} has NaN bound")));
            }
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::Invalid(format!("row {i} has non-finite rhs")));
            }
            let mut seen = vec![false; self.n_vars];
            for &(j, a) in &row.coeffs {
                if j >= self.n_vars {
                    return Err(LpError::Invalid(format!(
                        "row {i} references variable {j} out of {}",
                        self.n_vars
                    )));
                }
                if seen[j] {
                    return Err(LpError::Invalid(format!(
                        "row {i} references variable {j} twice"
                    )));
                }
                seen[j] = true;
                if !a.is_finite() {
                    return Err(LpError::Invalid(format!(
                        "row {i} has non-finite coefficient on variable {j}"
                    )));
                }
            }
        }
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(LpError::Invalid(format!(
                    "objective coefficient {j} is non-finite"
                )));
            }
        }
        Ok(())
    }

    /// Objective value `c'x + offset` (sign as stated, regardless of sense).
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        let mut v = self.objective_offset;
        for (c, xi) in self.objective.iter().zip(x) {
            v += c * xi;
        }
        v
    }

    /// Largest constraint violation and bound violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.constraints {
            worst = worst.max(row.violation(x));
        }
        for (&(lo, hi), &xj) in self.var_bounds.iter().zip(x) {
            worst = worst.max(lo - xj).max(xj - hi);
        }
        worst
    }
}

/// Solver status for a linear program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_lp`]. On non-`Optimal` statuses `primal`/`dual` are
/// empty and `objective` is NaN.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One multiplier per constraint row.
    pub dual: Vec<f64>,
    pub objective: f64,
    /// Objective of the dual solution; equals `objective` at optimality up to
    /// the solver tolerance. NaN when not optimal.
    pub dual_objective: f64,
}

impl LpSolution {
    pub(crate) fn status_only(status: LpStatus) -> Self {
        Self {
            status,
            primal: Vec::new(),
            dual: Vec::new(),
            objective: f64::NAN,
            dual_objective: f64::NAN,
        }
    }
}

/// Errors from LP construction and solving.
#[derive(Debug, Error)]
pub enum LpError {
    #[error("invalid program: {0}")]
    Invalid(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("vertex enumeration limited to 12 variables, got {0}")]
    TooLarge(usize),
    #[error("feasible region has a recession direction")]
    UnboundedRegion,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Solve a linear program with the revised simplex method.
///
/// `tol` is the optimality (dual feasibility) tolerance; primal feasibility
/// is held to [`FEASIBILITY_TOL`]. Deterministic for a fixed input: Dantzig
/// pricing with index tie-breaks, falling back to Bland's rule after
/// `50 * rows` degenerate pivots.
pub fn solve_lp(lp: &LinearProgram, tol: f64) -> Result<LpSolution, LpError> {
    lp.validate()?;
    if !(tol > 0.0) {
        return Err(LpError::Invalid(format!("tolerance must be > 0, got {tol}")));
    }
    simplex::solve(lp, tol)
}

#[cfg(test)]
mod tests;
