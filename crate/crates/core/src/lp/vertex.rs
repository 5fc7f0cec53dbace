//! Brute-force vertex enumeration for small bounded programs.
//!
//! Every n-subset of constraint/bound hyperplanes is solved as an n x n
//! system and the intersection point kept when it is feasible. The result is
//! the full list of basic feasible solutions, deduplicated within 1e-9 and
//! sorted lexicographically. This is the independent oracle used to
//! cross-check the simplex solver.

use super::{LinearProgram, LpError, FEASIBILITY_TOL};
use crate::dense::solve_in_place;

/// Hard cap on the variable count; the subset enumeration is combinatorial.
pub const MAX_VERTEX_VARS: usize = 12;

/// Enumerate all vertices of the feasible region together with their
/// objective values (`c'x + offset`, sign as stated regardless of sense).
///
/// Errors with [`LpError::TooLarge`] beyond [`MAX_VERTEX_VARS`] variables and
/// [`LpError::UnboundedRegion`] when the constraint cone admits a nonzero
/// recession direction.
pub fn enumerate_vertices(lp: &LinearProgram) -> Result<Vec<(Vec<f64>, f64)>, LpError> {
    lp.validate()?;
    let n = lp.n_vars;
    if n > MAX_VERTEX_VARS {
        return Err(LpError::TooLarge(n));
    }
    if n == 0 {
        return Ok(vec![(Vec::new(), lp.objective_offset)]);
    }

    if lp.var_bounds.iter().any(|&(lo, hi)| !lo.is_finite() || !hi.is_finite()) {
        check_recession(lp)?;
    }

    // Hyperplanes: every row as an equality face, plus finite bound faces.
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &lp.constraints {
        let mut coeffs = vec![0.0; n];
        for &(j, a) in &row.coeffs {
            coeffs[j] = a;
        }
        planes.push((coeffs, row.rhs));
    }
    for (j, &(lo, hi)) in lp.var_bounds.iter().enumerate() {
        if lo.is_finite() {
            let mut coeffs = vec![0.0; n];
            coeffs[j] = 1.0;
            planes.push((coeffs, lo));
        }
        if hi.is_finite() && hi != lo {
            let mut coeffs = vec![0.0; n];
            coeffs[j] = 1.0;
            planes.push((coeffs, hi));
        }
    }

    let mut vertices: Vec<(Vec<f64>, f64)> = Vec::new();
    if planes.len() >= n {
        let mut combo: Vec<usize> = (0..n).collect();
        let mut mat = vec![0.0; n * n];
        let mut rhs = vec![0.0; n];
        loop {
            for (k, &pi) in combo.iter().enumerate() {
                mat[k * n..(k + 1) * n].copy_from_slice(&planes[pi].0);
                rhs[k] = planes[pi].1;
            }
            if solve_in_place(&mut mat, &mut rhs, n) {
                let scale = 1.0 + rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                if lp.max_violation(&rhs) <= FEASIBILITY_TOL * scale * 10.0 {
                    let dup = vertices
                        .iter()
                        .any(|(v, _)| v.iter().zip(&rhs).all(|(a, b)| (a - b).abs() <= 1e-9));
                    if !dup {
                        let obj = lp.objective_value(&rhs);
                        vertices.push((rhs.clone(), obj));
                    }
                }
            }
            if !next_combination(&mut combo, planes.len()) {
                break;
            }
        }
    }

    vertices.sort_by(|(a, _), (b, _)| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.partial_cmp(y).unwrap())
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(vertices)
}

/// Advance `combo` to the next k-combination of `0..total` in lexicographic
/// order; returns false when exhausted.
fn next_combination(combo: &mut [usize], total: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < total - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Detect a nonzero recession direction of the constraint set by enumerating
/// the vertices of the recession cone intersected with the unit box. The
/// cone program has all-finite bounds, so this recurses at most once.
fn check_recession(lp: &LinearProgram) -> Result<(), LpError> {
    let n = lp.n_vars;
    let mut cone = LinearProgram::minimize(vec![0.0; n]);
    for row in &lp.constraints {
        let sense = row.sense;
        cone.push_constraint(row.coeffs.clone(), sense, 0.0);
    }
    cone.var_bounds = lp
        .var_bounds
        .iter()
        .map(|&(lo, hi)| {
            let dlo = if lo.is_finite() { 0.0 } else { -1.0 };
            let dhi = if hi.is_finite() { 0.0 } else { 1.0 };
            (dlo, dhi)
        })
        .collect();
    for (v, _) in enumerate_vertices(&cone)? {
        if v.iter().any(|d| d.abs() > 1e-7) {
            return Err(LpError::UnboundedRegion);
        }
    }
    Ok(())
}
