//! Mixed-integer linear programs solved by LP-based branch and bound.
//!
//! The search uses best-bound node selection (ties broken last-in-first-out
//! for determinism) and branches on the most fractional integer variable,
//! ties to the lowest index. No cutting planes and no primal heuristics, so
//! results are driven purely by the formulation. Each node solves its LP
//! relaxation from scratch with the revised simplex of the [`crate::lp`]
//! module.

use crate::lp::{self, LinearProgram, LpError, LpStatus};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::collections::BinaryHeap;
use std::path::Path;
use std::rc::Rc;
use std::time::Instant;
use thiserror::Error;

/// Integer feasibility tolerance: a value within this distance of an integer
/// counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// A linear program plus integrality marks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedIntegerProgram {
    pub base: LinearProgram,
    pub integer_vars: BTreeSet<usize>,
    /// Integer variables whose bounds are exactly `[0, 1]`; derived by
    /// [`MixedIntegerProgram::new`].
    pub binary_vars: BTreeSet<usize>,
}

impl MixedIntegerProgram {
    pub fn new(base: LinearProgram, integer_vars: BTreeSet<usize>) -> Self {
        let binary_vars = integer_vars
            .iter()
            .copied()
            .filter(|&j| base.var_bounds.get(j).is_some_and(|&b| b == (0.0, 1.0)))
            .collect();
        Self {
            base,
            integer_vars,
            binary_vars,
        }
    }

    pub fn validate(&self) -> Result<(), MilpError> {
        self.base.validate().map_err(MilpError::Lp)?;
        for &j in &self.integer_vars {
            if j >= self.base.n_vars {
                return Err(MilpError::Invalid(format!(
                    "integer variable {j} out of {}",
                    self.base.n_vars
                )));
            }
        }
        for &j in &self.binary_vars {
            if !self.integer_vars.contains(&j) {
                return Err(MilpError::Invalid(format!(
                    "binary variable {j} not declared integer"
                )));
            }
            if self.base.var_bounds[j] != (0.0, 1.0) {
                return Err(MilpError::Invalid(format!(
                    "binary variable {j} has bounds {:?}",
                    self.base.var_bounds[j]
                )));
            }
        }
        Ok(())
    }
}

/// Drop all integrality marks, keeping bounds.
pub fn lp_relaxation(mip: &MixedIntegerProgram) -> LinearProgram {
    mip.base.clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MilpStatus {
    /// Proven optimal within the gap tolerance.
    Optimal,
    /// Incumbent found but the node limit stopped the proof.
    Feasible,
    Infeasible,
    /// Time limit hit with an incumbent.
    TimeLimit,
}

/// One line of the branch-and-bound node log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeRecord {
    pub node_id: u64,
    pub bound: f64,
    pub incumbent: Option<f64>,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub incumbent: Vec<f64>,
    pub objective: f64,
    /// Proven bound: lower bound for minimization, upper for maximization.
    pub bound: f64,
    /// Relative gap `|objective - bound| / max(|objective|, 1e-10)`.
    pub gap: f64,
    pub node_count: u64,
    /// Populated when [`MilpConfig::log_nodes`] is set.
    pub node_log: Vec<NodeRecord>,
}

impl MilpSolution {
    /// Write the node log as CSV (`node_id,bound,incumbent,elapsed_s`).
    pub fn write_node_log(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let mut out = String::from("node_id,bound,incumbent,elapsed_s\n");
        for rec in &self.node_log {
            let inc = rec
                .incumbent
                .map(|v| format!("{v:?}"))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{:?},{},{:?}\n",
                rec.node_id, rec.bound, inc, rec.elapsed_s
            ));
        }
        std::fs::write(path, out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MilpConfig {
    /// Relative optimality gap at which the search stops.
    pub gap_tol: f64,
    pub node_limit: u64,
    pub time_limit_s: f64,
    /// Record a [`NodeRecord`] per processed node.
    pub log_nodes: bool,
}

impl Default for MilpConfig {
    fn default() -> Self {
        Self {
            gap_tol: 1e-6,
            node_limit: 10_000_000,
            time_limit_s: f64::INFINITY,
            log_nodes: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("lp error: {0}")]
    Lp(#[from] LpError),
    #[error("invalid program: {0}")]
    Invalid(String),
    #[error("no integer-feasible point before {0}")]
    NoIncumbentAtLimit(String),
}

/// Bound changes along a branch, stored as a parent chain.
struct BranchDelta {
    var: usize,
    lower: f64,
    upper: f64,
    parent: Option<Rc<BranchDelta>>,
}

struct OpenNode {
    id: u64,
    bound: f64,
    delta: Option<Rc<BranchDelta>>,
}

/// Best-bound ordering for a min-heap via `Reverse`-style manual Ord:
/// smaller bound wins; equal bounds pop the newest node first.
impl PartialEq for OpenNode {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for OpenNode {}
impl PartialOrd for OpenNode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OpenNode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap pops the maximum: invert the bound comparison, then
        // prefer the larger id (most recently created).
        other
            .bound
            .partial_cmp(&self.bound)
            .expect("bounds are never NaN")
            .then(self.id.cmp(&other.id))
    }
}

/// Solve by branch and bound. Deterministic for a fixed input and config as
/// long as the time limit does not bind.
pub fn solve_milp(mip: &MixedIntegerProgram, config: &MilpConfig) -> Result<MilpSolution, MilpError> {
    mip.validate()?;
    if config.gap_tol < 0.0 {
        return Err(MilpError::Invalid(format!(
            "gap_tol must be >= 0, got {}",
            config.gap_tol
        )));
    }
    let minimize = matches!(mip.base.sense, crate::lp::ObjSense::Minimize);
    if minimize {
        return solve_min(mip, config);
    }
    // Normalize to minimization, flip results back.
    let mut flipped = mip.clone();
    flipped.base.sense = crate::lp::ObjSense::Minimize;
    flipped.base.objective.iter_mut().for_each(|c| *c = -*c);
    flipped.base.objective_offset = -flipped.base.objective_offset;
    let mut sol = solve_min(&flipped, config)?;
    sol.objective = -sol.objective;
    sol.bound = -sol.bound;
    for rec in &mut sol.node_log {
        rec.bound = -rec.bound;
        if let Some(i) = &mut rec.incumbent {
            *i = -*i;
        }
    }
    Ok(sol)
}

fn rel_gap(objective: f64, bound: f64) -> f64 {
    if objective.is_finite() {
        (objective - bound).abs() / objective.abs().max(1e-10)
    } else {
        f64::INFINITY
    }
}

fn solve_min(mip: &MixedIntegerProgram, config: &MilpConfig) -> Result<MilpSolution, MilpError> {
    let started = Instant::now();
    let int_vars: Vec<usize> = mip.integer_vars.iter().copied().collect();
    let mut lp = mip.base.clone();

    let mut heap: BinaryHeap<OpenNode> = BinaryHeap::new();
    heap.push(OpenNode {
        id: 0,
        bound: f64::NEG_INFINITY,
        delta: None,
    });
    let mut next_id: u64 = 1;
    let mut node_count: u64 = 0;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut node_log: Vec<NodeRecord> = Vec::new();
    let mut limit_hit: Option<&'static str> = None;

    while let Some(node) = heap.pop() {
        let inc_obj = incumbent.as_ref().map(|(o, _)| *o).unwrap_or(f64::INFINITY);
        // The frontier is bound-sorted: stop once the best open bound proves
        // the incumbent within tolerance.
        if rel_gap(inc_obj, node.bound) <= config.gap_tol {
            heap.push(node);
            break;
        }
        if node_count >= config.node_limit {
            heap.push(node);
            limit_hit = Some("node limit");
            break;
        }
        if started.elapsed().as_secs_f64() > config.time_limit_s {
            heap.push(node);
            limit_hit = Some("time limit");
            break;
        }

        // Materialize this node's bounds.
        lp.var_bounds.copy_from_slice(&mip.base.var_bounds);
        let mut delta = node.delta.clone();
        while let Some(d) = delta {
            let (lo, hi) = lp.var_bounds[d.var];
            lp.var_bounds[d.var] = (lo.max(d.lower), hi.min(d.upper));
            delta = d.parent.clone();
        }
        node_count += 1;

        let sol = lp::solve_lp(&lp, 1e-7).map_err(MilpError::Lp)?;
        let lp_obj = match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Err(MilpError::Invalid(
                    "LP relaxation is unbounded; bound the integer variables".into(),
                ))
            }
            LpStatus::Optimal => sol.objective,
        };
        if lp_obj >= inc_obj - 1e-9 {
            continue; // cannot improve
        }

        // Most fractional integer variable, ties to the lowest index.
        let mut branch: Option<(usize, f64, f64)> = None; // (var, value, dist to 0.5)
        for &j in &int_vars {
            let v = sol.primal[j];
            let frac = v - v.floor();
            if frac > INTEGRALITY_TOL && frac < 1.0 - INTEGRALITY_TOL {
                let dist = (frac - 0.5).abs();
                if branch.map_or(true, |(_, _, best)| dist < best - 1e-12) {
                    branch = Some((j, v, dist));
                }
            }
        }

        match branch {
            None => {
                // Integer feasible; candidate incumbent.
                if lp_obj < inc_obj {
                    incumbent = Some((lp_obj, sol.primal.clone()));
                    if config.log_nodes {
                        node_log.push(NodeRecord {
                            node_id: node.id,
                            bound: lp_obj,
                            incumbent: Some(lp_obj),
                            elapsed_s: started.elapsed().as_secs_f64(),
                        });
                    }
                }
            }
            Some((j, v, _)) => {
                if config.log_nodes {
                    node_log.push(NodeRecord {
                        node_id: node.id,
                        bound: lp_obj,
                        incumbent: incumbent.as_ref().map(|(o, _)| *o),
                        elapsed_s: started.elapsed().as_secs_f64(),
                    });
                }
                let down = BranchDelta {
                    var: j,
                    lower: f64::NEG_INFINITY,
                    upper: v.floor(),
                    parent: node.delta.clone(),
                };
                let up = BranchDelta {
                    var: j,
                    lower: v.ceil(),
                    upper: f64::INFINITY,
                    parent: node.delta.clone(),
                };
                for d in [down, up] {
                    heap.push(OpenNode {
                        id: next_id,
                        bound: lp_obj,
                        delta: Some(Rc::new(d)),
                    });
                    next_id += 1;
                }
            }
        }
    }

    let open_bound = heap
        .iter()
        .map(|n| n.bound)
        .fold(f64::INFINITY, f64::min);

    match incumbent {
        Some((objective, x)) => {
            let bound = open_bound.min(objective);
            let gap = rel_gap(objective, bound);
            let status = if gap <= config.gap_tol {
                MilpStatus::Optimal
            } else if limit_hit == Some("time limit") {
                MilpStatus::TimeLimit
            } else {
                MilpStatus::Feasible
            };
            Ok(MilpSolution {
                status,
                incumbent: x,
                objective,
                bound,
                gap,
                node_count,
                node_log,
            })
        }
        None => {
            if let Some(which) = limit_hit {
                return Err(MilpError::NoIncumbentAtLimit(which.into()));
            }
            Ok(MilpSolution {
                status: MilpStatus::Infeasible,
                incumbent: Vec::new(),
                objective: f64::NAN,
                bound: f64::NAN,
                gap: f64::NAN,
                node_count,
                node_log,
            })
        }
    }
}

/// Serialize to the interchange format with an `integers:` section.
pub fn write_mip_string(mip: &MixedIntegerProgram) -> String {
    super::lp::format_write_program(&mip.base, Some(&mip.integer_vars))
}

/// Write a mixed-integer program to a file.
pub fn write_mip(path: impl AsRef<Path>, mip: &MixedIntegerProgram) -> Result<(), LpError> {
    std::fs::write(path, write_mip_string(mip))?;
    Ok(())
}

/// Parse the interchange format; pure LPs come back with no integer marks.
pub fn read_mip_str(text: &str) -> Result<MixedIntegerProgram, LpError> {
    let (lp, ints) = super::lp::format_parse_program(text)?;
    Ok(MixedIntegerProgram::new(lp, ints))
}

/// Read a mixed-integer program from a file.
pub fn read_mip(path: impl AsRef<Path>) -> Result<MixedIntegerProgram, LpError> {
    read_mip_str(&std::fs::read_to_string(path)?)
}
