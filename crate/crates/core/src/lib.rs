//! Two-stage stochastic programming toolkit (under construction).

pub(crate) mod dense;
pub mod lp;
pub mod stream;

pub use lp::{Constraint, LinearProgram, LpError, LpSolution, LpStatus, ObjSense, Sense};
