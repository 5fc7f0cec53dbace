//! Bounded-variable revised simplex with a product-form basis.
//!
//! The program is brought to computational form `A x + s = b` with one slack
//! per row (slack bounds encode the row sense) and solved in two phases:
//! artificial variables absorb the initial bound violations, phase 1
//! minimizes their sum, phase 2 optimizes the true objective. The basis is
//! held as a sparse LU factorization plus an eta file, refactorized every
//! [`REFACTOR_EVERY`] pivots.
//!
//! Pricing is Dantzig (most negative reduced cost, lowest index on ties)
//! with Bland's rule as anti-cycling fallback after `50 * rows` degenerate
//! pivots. Free variables are handled natively as nonbasic-at-zero columns
//! that may enter in either direction.

use super::lu::LuFactors;
use super::{LinearProgram, LpError, LpSolution, LpStatus, ObjSense, Sense, FEASIBILITY_TOL};

const REFACTOR_EVERY: usize = 100;
/// Minimum pivot magnitude accepted in the ratio test.
const RATIO_PIVOT_TOL: f64 = 1e-9;
/// Step below which a pivot counts as degenerate.
const DEGENERATE_STEP: f64 = 1e-10;

#[derive(Debug)]
enum PhaseOutcome {
    Optimal,
    Unbounded,
}

struct Eta {
    /// Basis position replaced by the pivot.
    r: usize,
    /// Off-pivot entries of `w = B^-1 a_q`, by basis position.
    col: Vec<(usize, f64)>,
    /// Pivot entry `w_r`.
    diag: f64,
}

struct Worker {
    m: usize,
    n_struct: usize,
    /// Total columns: structural + slacks + artificials.
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    b: Vec<f64>,
    /// Phase-2 objective over all columns (zeros on slacks/artificials).
    obj: Vec<f64>,

    basis: Vec<usize>,
    /// Column -> basis position, or `usize::MAX` when nonbasic.
    pos_of: Vec<usize>,
    /// Nonbasic-at-upper flag (meaningful for nonbasic columns only).
    at_upper: Vec<bool>,
    x: Vec<f64>,

    lu: Option<LuFactors>,
    etas: Vec<Eta>,
    pivots_since_refactor: usize,

    degenerate_pivots: usize,
    bland: bool,
    tol: f64,

    // Scratch buffers.
    work_m1: Vec<f64>,
    work_m2: Vec<f64>,
    work_m3: Vec<f64>,
}

const NONBASIC: usize = usize::MAX;

impl Worker {
    fn new(lp: &LinearProgram, tol: f64) -> Self {
        let m = lp.constraints.len();
        let n_struct = lp.n_vars;
        let n = n_struct + m;
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, row) in lp.constraints.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                if a != 0.0 {
                    cols[j].push((i, a));
                }
            }
        }
        for c in cols.iter_mut().take(n_struct) {
            c.sort_unstable_by_key(|&(i, _)| i);
        }
        let mut lower = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        let mut obj = Vec::with_capacity(n);
        for j in 0..n_struct {
            lower.push(lp.var_bounds[j].0);
            upper.push(lp.var_bounds[j].1);
            obj.push(match lp.sense {
                ObjSense::Minimize => lp.objective[j],
                ObjSense::Maximize => -lp.objective[j],
            });
        }
        let mut b = Vec::with_capacity(m);
        for (i, row) in lp.constraints.iter().enumerate() {
            cols[n_struct + i].push((i, 1.0));
            let (lo, hi) = match row.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Eq => (0.0, 0.0),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
            };
            lower.push(lo);
            upper.push(hi);
            obj.push(0.0);
            b.push(row.rhs);
        }
        Self {
            m,
            n_struct,
            n,
            cols,
            lower,
            upper,
            b,
            obj,
            basis: Vec::new(),
            pos_of: vec![NONBASIC; n],
            at_upper: vec![false; n],
            x: vec![0.0; n],
            lu: None,
            etas: Vec::new(),
            pivots_since_refactor: 0,
            degenerate_pivots: 0,
            bland: false,
            tol,
            work_m1: vec![0.0; m],
            work_m2: vec![0.0; m],
            work_m3: vec![0.0; m],
        }
    }

    /// Initial value for a nonbasic column: the finite bound nearest zero,
    /// or zero for a free column.
    fn rest_value(&self, j: usize) -> (f64, bool) {
        let (lo, hi) = (self.lower[j], self.upper[j]);
        if lo.is_finite() {
            (lo, false)
        } else if hi.is_finite() {
            (hi, true)
        } else {
            (0.0, false)
        }
    }

    /// Set up the slack basis, adding artificial columns for rows whose
    /// slack cannot absorb the residual. Returns whether phase 1 is needed.
    fn install_initial_basis(&mut self) -> bool {
        for j in 0..self.n_struct {
            let (v, up) = self.rest_value(j);
            self.x[j] = v;
            self.at_upper[j] = up;
        }
        // Row residuals with structural columns at rest.
        let mut resid = self.b.clone();
        for j in 0..self.n_struct {
            let xj = self.x[j];
            if xj != 0.0 {
                for &(i, a) in &self.cols[j] {
                    resid[i] -= a * xj;
                }
            }
        }
        self.basis.clear();
        let mut need_phase1 = false;
        for i in 0..self.m {
            let s = self.n_struct + i;
            let (lo, hi) = (self.lower[s], self.upper[s]);
            let r = resid[i];
            if r >= lo - FEASIBILITY_TOL && r <= hi + FEASIBILITY_TOL {
                self.basis.push(s);
                self.pos_of[s] = i;
                self.x[s] = r;
            } else {
                need_phase1 = true;
                let clamp = r.clamp(lo, hi);
                self.x[s] = clamp;
                self.at_upper[s] = r > hi;
                let g = if r - clamp > 0.0 { 1.0 } else { -1.0 };
                let a = self.n;
                self.cols.push(vec![(i, g)]);
                self.lower.push(0.0);
                self.upper.push(f64::INFINITY);
                self.obj.push(0.0);
                self.pos_of.push(i);
                self.at_upper.push(false);
                self.x.push((r - clamp) * g);
                self.basis.push(a);
                self.n += 1;
            }
        }
        need_phase1
    }

    fn refactorize(&mut self) -> Result<(), LpError> {
        let col_refs: Vec<&[(usize, f64)]> =
            self.basis.iter().map(|&j| self.cols[j].as_slice()).collect();
        let lu = LuFactors::factorize(self.m, &col_refs)
            .map_err(LpError::NumericalBreakdown)?;
        self.lu = Some(lu);
        self.etas.clear();
        self.pivots_since_refactor = 0;
        self.recompute_basics();
        Ok(())
    }

    /// Recompute basic values from scratch: `x_B = B^-1 (b - A_N x_N)`.
    fn recompute_basics(&mut self) {
        let mut rhs = self.b.clone();
        for j in 0..self.n {
            if self.pos_of[j] == NONBASIC {
                let xj = self.x[j];
                if xj != 0.0 {
                    for &(i, a) in &self.cols[j] {
                        rhs[i] -= a * xj;
                    }
                }
            }
        }
        let lu = self.lu.as_ref().expect("factorized");
        lu.ftran(&rhs, &mut self.work_m1);
        for p in 0..self.m {
            self.x[self.basis[p]] = self.work_m1[p];
        }
    }

    /// `out = B^-1 a_q` (by basis position).
    fn ftran_col(&self, q: usize, out: &mut [f64]) {
        let mut dense = vec![0.0; self.m];
        for &(i, a) in &self.cols[q] {
            dense[i] = a;
        }
        self.lu.as_ref().unwrap().ftran(&dense, out);
        for eta in &self.etas {
            let zr = out[eta.r] / eta.diag;
            out[eta.r] = zr;
            if zr != 0.0 {
                for &(i, w) in &eta.col {
                    out[i] -= w * zr;
                }
            }
        }
    }

    /// Solve `B' y = c_B`; `c` indexed by basis position, `y` by row.
    fn btran_costs(&mut self, c: &mut [f64], y: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut v = c[eta.r];
            for &(i, w) in &eta.col {
                v -= w * c[i];
            }
            c[eta.r] = v / eta.diag;
        }
        self.lu.as_ref().unwrap().btran(c, y, &mut self.work_m3);
    }

    fn reduced_cost(&self, j: usize, costs: &[f64], y: &[f64]) -> f64 {
        let mut d = costs[j];
        for &(i, a) in &self.cols[j] {
            d -= a * y[i];
        }
        d
    }

    /// One simplex phase on the given cost vector.
    fn optimize(&mut self, costs: &[f64]) -> Result<PhaseOutcome, LpError> {
        if self.m == 0 {
            return self.optimize_unconstrained(costs);
        }
        if self.lu.is_none() {
            self.refactorize()?;
        }
        let max_iter = 20_000 + 20 * (self.m + self.n);
        for _iter in 0..max_iter {
            // Duals for the current basis.
            let mut cb = vec![0.0; self.m];
            for p in 0..self.m {
                cb[p] = costs[self.basis[p]];
            }
            let mut y = std::mem::take(&mut self.work_m2);
            self.btran_costs(&mut cb, &mut y);

            // Pricing.
            let mut entering: Option<(usize, f64, i8)> = None;
            let mut best_score = self.tol;
            for j in 0..self.n {
                if self.pos_of[j] != NONBASIC || self.lower[j] == self.upper[j] {
                    continue;
                }
                let d = self.reduced_cost(j, costs, &y);
                let free = self.lower[j] == f64::NEG_INFINITY && self.upper[j] == f64::INFINITY;
                let dir: i8 = if free {
                    if d < -self.tol {
                        1
                    } else if d > self.tol {
                        -1
                    } else {
                        continue;
                    }
                } else if self.at_upper[j] {
                    if d > self.tol {
                        -1
                    } else {
                        continue;
                    }
                } else if d < -self.tol {
                    1
                } else {
                    continue;
                };
                if self.bland {
                    entering = Some((j, d, dir));
                    break;
                }
                if d.abs() > best_score {
                    best_score = d.abs();
                    entering = Some((j, d, dir));
                }
            }
            self.work_m2 = y;

            let (q, _dq, dir) = match entering {
                Some(e) => e,
                None => return Ok(PhaseOutcome::Optimal),
            };
            let dir = dir as f64;

            let mut w = std::mem::take(&mut self.work_m1);
            self.ftran_col(q, &mut w);

            // Ratio test. Basic i changes at rate -dir*w_i per unit step.
            let mut t_block = f64::INFINITY;
            let mut leaving: Option<(usize, f64)> = None; // (position, |w|)
            for p in 0..self.m {
                let wp = w[p];
                if wp.abs() <= RATIO_PIVOT_TOL {
                    continue;
                }
                let jb = self.basis[p];
                let delta = dir * wp; // basic decreases when delta > 0
                let limit = if delta > 0.0 {
                    let lo = self.lower[jb];
                    if lo == f64::NEG_INFINITY {
                        continue;
                    }
                    (self.x[jb] - lo) / delta
                } else {
                    let hi = self.upper[jb];
                    if hi == f64::INFINITY {
                        continue;
                    }
                    (self.x[jb] - hi) / delta
                };
                let limit = limit.max(0.0);
                let improves = match &leaving {
                    None => limit < t_block,
                    Some((_, wbest)) => {
                        limit < t_block - 1e-12
                            || (limit <= t_block + 1e-12 && wp.abs() > *wbest)
                    }
                };
                if improves {
                    t_block = t_block.min(limit);
                    leaving = Some((p, wp.abs()));
                }
            }
            let t_bound = self.upper[q] - self.lower[q]; // may be inf

            if t_bound <= t_block {
                if t_bound == f64::INFINITY {
                    self.work_m1 = w;
                    return Ok(PhaseOutcome::Unbounded);
                }
                // Bound flip: entering moves to its opposite bound.
                let t = t_bound;
                if t <= DEGENERATE_STEP {
                    self.note_degenerate();
                }
                self.x[q] += dir * t;
                self.at_upper[q] = !self.at_upper[q];
                for p in 0..self.m {
                    if w[p] != 0.0 {
                        self.x[self.basis[p]] -= dir * t * w[p];
                    }
                }
                self.work_m1 = w;
                continue;
            }

            let (r, _) = leaving.expect("bounded step has a blocking variable");
            let t = t_block;
            if t <= DEGENERATE_STEP {
                self.note_degenerate();
            }

            // Update values.
            self.x[q] += dir * t;
            for p in 0..self.m {
                if w[p] != 0.0 {
                    self.x[self.basis[p]] -= dir * t * w[p];
                }
            }
            let jb = self.basis[r];
            // Pin the leaving variable to the bound it hit.
            let leaves_at_upper = dir * w[r] < 0.0;
            self.x[jb] = if leaves_at_upper {
                self.upper[jb]
            } else {
                self.lower[jb]
            };
            self.at_upper[jb] = leaves_at_upper;
            self.pos_of[jb] = NONBASIC;
            self.basis[r] = q;
            self.pos_of[q] = r;

            // Record the eta for this pivot.
            let diag = w[r];
            if diag.abs() < 1e-12 {
                return Err(LpError::NumericalBreakdown(format!(
                    "pivot magnitude {diag:.3e} below 1e-12"
                )));
            }
            let mut col = Vec::new();
            for p in 0..self.m {
                if p != r && w[p] != 0.0 {
                    col.push((p, w[p]));
                }
            }
            self.etas.push(Eta { r, col, diag });
            self.work_m1 = w;

            self.pivots_since_refactor += 1;
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactorize()?;
            }
        }
        Err(LpError::NumericalBreakdown(format!(
            "iteration limit reached ({} rows, {} columns)",
            self.m, self.n
        )))
    }

    /// Degenerate-pivot bookkeeping; switches to Bland's rule past the cap.
    fn note_degenerate(&mut self) {
        self.degenerate_pivots += 1;
        if self.degenerate_pivots > 50 * self.m.max(1) {
            self.bland = true;
        }
    }

    /// Rowless programs: each variable independently moves to its best bound.
    fn optimize_unconstrained(&mut self, costs: &[f64]) -> Result<PhaseOutcome, LpError> {
        for j in 0..self.n {
            let c = costs[j];
            if c > 0.0 {
                if self.lower[j] == f64::NEG_INFINITY {
                    return Ok(PhaseOutcome::Unbounded);
                }
                self.x[j] = self.lower[j];
                self.at_upper[j] = false;
            } else if c < 0.0 {
                if self.upper[j] == f64::INFINITY {
                    return Ok(PhaseOutcome::Unbounded);
                }
                self.x[j] = self.upper[j];
                self.at_upper[j] = true;
            }
        }
        Ok(PhaseOutcome::Optimal)
    }

    fn phase1_infeasibility(&self) -> f64 {
        (self.n_struct + self.m..self.n).map(|j| self.x[j]).sum()
    }
}

pub(crate) fn solve(lp: &LinearProgram, tol: f64) -> Result<LpSolution, LpError> {
    let mut w = Worker::new(lp, tol);
    let need_phase1 = w.install_initial_basis();

    if need_phase1 {
        let mut phase1_costs = vec![0.0; w.n];
        for c in phase1_costs.iter_mut().skip(w.n_struct + w.m) {
            *c = 1.0;
        }
        match w.optimize(&phase1_costs)? {
            PhaseOutcome::Optimal => {}
            PhaseOutcome::Unbounded => {
                return Err(LpError::NumericalBreakdown(
                    "phase 1 reported unbounded".into(),
                ))
            }
        }
        let b_scale = w.b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        if w.phase1_infeasibility() > FEASIBILITY_TOL * b_scale * 10.0 {
            return Ok(LpSolution::status_only(LpStatus::Infeasible));
        }
        // Freeze artificials at zero for phase 2.
        for j in w.n_struct + w.m..w.n {
            w.lower[j] = 0.0;
            w.upper[j] = 0.0;
            if w.pos_of[j] == NONBASIC {
                w.x[j] = 0.0;
            }
        }
    }

    let costs = w.obj.clone();
    let status = match w.optimize(&costs)? {
        PhaseOutcome::Optimal => LpStatus::Optimal,
        PhaseOutcome::Unbounded => return Ok(LpSolution::status_only(LpStatus::Unbounded)),
    };
    debug_assert_eq!(status, LpStatus::Optimal);

    // Polish: refactorize and recompute basics before reporting.
    if w.m > 0 {
        w.refactorize()?;
    }

    let primal: Vec<f64> = w.x[..w.n_struct].to_vec();
    let mut dual = vec![0.0; w.m];
    if w.m > 0 {
        let mut cb = vec![0.0; w.m];
        for p in 0..w.m {
            cb[p] = w.obj[w.basis[p]];
        }
        let mut y = vec![0.0; w.m];
        w.btran_costs(&mut cb, &mut y);
        dual = y;
    }

    // Internal (minimized) objective and its dual counterpart.
    let mut obj_min = 0.0;
    for j in 0..w.n_struct {
        obj_min += w.obj[j] * w.x[j];
    }
    let mut dual_obj_min = 0.0;
    for i in 0..w.m {
        dual_obj_min += dual[i] * w.b[i];
    }
    for j in 0..w.n {
        if w.pos_of[j] == NONBASIC && w.x[j] != 0.0 {
            let d = w.reduced_cost(j, &w.obj, &dual);
            dual_obj_min += d * w.x[j];
        }
    }

    // Verify primal feasibility on the original program.
    let viol = lp.max_violation(&primal);
    let scale = 1.0 + lp.constraints.iter().fold(0.0f64, |a, r| a.max(r.rhs.abs()));
    if viol > FEASIBILITY_TOL * scale * 10.0 {
        return Err(LpError::NumericalBreakdown(format!(
            "optimal basis violates feasibility by {viol:.3e}"
        )));
    }

    let (objective, dual_objective, dual) = match lp.sense {
        ObjSense::Minimize => (obj_min, dual_obj_min, dual),
        ObjSense::Maximize => (
            -obj_min,
            -dual_obj_min,
            dual.into_iter().map(|v| -v).collect(),
        ),
    };

    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        dual,
        objective: objective + lp.objective_offset,
        dual_objective: dual_objective + lp.objective_offset,
    })
}
