//! Plain-text interchange format for linear and mixed-integer programs.
//!
//! ```text
//! # comments start with '#'
//! min: 3*x0 + -2.5*x1 + 7          objective (or `max:`); bare term = constant
//! c0: 1*x0 + 2*x1 <= 10            one line per constraint: coef*var ... <sense> rhs
//! 1*x0 + -1*x1 = 2                 the `name:` prefix is optional
//! bounds:
//! x0 in [0, 5]
//! x1 in [-inf, inf]
//! integers: x0                     optional; marks a mixed-integer program
//! ```
//!
//! Variables are named `x<index>`. Numbers are written in Rust's shortest
//! round-trip form, so write/read round-trips are bit-exact. Variables
//! missing from the bounds section default to `[0, inf)`.

use super::{Constraint, LinearProgram, LpError, ObjSense, Sense};
use std::collections::BTreeSet;
use std::path::Path;

pub(crate) fn write_program_string(
    lp: &LinearProgram,
    integers: Option<&BTreeSet<usize>>,
) -> String {
    let mut out = String::new();
    let head = match lp.sense {
        ObjSense::Minimize => "min: ",
        ObjSense::Maximize => "max: ",
    };
    out.push_str(head);
    out.push_str(&linear_expr(
        lp.objective
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(j, &c)| (j, c)),
        lp.objective_offset,
    ));
    out.push('\n');
    for (i, row) in lp.constraints.iter().enumerate() {
        let sense = match row.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        };
        out.push_str(&format!(
            "c{}: {} {} {:?}\n",
            i,
            linear_expr(row.coeffs.iter().copied(), 0.0),
            sense,
            row.rhs
        ));
    }
    out.push_str("bounds:\n");
    for (j, &(lo, hi)) in lp.var_bounds.iter().enumerate() {
        out.push_str(&format!("x{} in [{}, {}]\n", j, fmt_bound(lo), fmt_bound(hi)));
    }
    if let Some(ints) = integers {
        if !ints.is_empty() {
            out.push_str("integers:");
            for j in ints {
                out.push_str(&format!(" x{j}"));
            }
            out.push('\n');
        }
    }
    out
}

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

fn linear_expr(terms: impl Iterator<Item = (usize, f64)>, constant: f64) -> String {
    let mut parts: Vec<String> = terms.map(|(j, c)| format!("{c:?}*x{j}")).collect();
    if constant != 0.0 {
        parts.push(format!("{constant:?}"));
    }
    if parts.is_empty() {
        parts.push("0".into());
    }
    parts.join(" + ")
}

pub(crate) fn parse_program_str(text: &str) -> Result<(LinearProgram, BTreeSet<usize>), LpError> {
    let mut sense = None;
    let mut objective: Vec<(usize, f64)> = Vec::new();
    let mut offset = 0.0;
    let mut rows: Vec<Constraint> = Vec::new();
    let mut bounds: Vec<(usize, f64, f64)> = Vec::new();
    let mut integers = BTreeSet::new();
    let mut max_var = 0usize;
    let mut in_bounds = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| LpError::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };

        if let Some(rest) = line.strip_prefix("min:") {
            sense = Some(ObjSense::Minimize);
            let (terms, c) = parse_expr(rest, lineno + 1)?;
            objective = terms;
            offset = c;
            continue;
        }
        if let Some(rest) = line.strip_prefix("max:") {
            sense = Some(ObjSense::Maximize);
            let (terms, c) = parse_expr(rest, lineno + 1)?;
            objective = terms;
            offset = c;
            continue;
        }
        if line == "bounds:" {
            in_bounds = true;
            continue;
        }
        if let Some(rest) = line.strip_prefix("integers:") {
            for tok in rest.split_whitespace() {
                integers.insert(parse_var(tok, lineno + 1)?);
            }
            continue;
        }
        if in_bounds && line.contains(" in ") {
            let (var, range) = line.split_once(" in ").unwrap();
            let j = parse_var(var.trim(), lineno + 1)?;
            let range = range.trim();
            if !(range.starts_with('[') && range.ends_with(']')) {
                return Err(err("expected `x<j> in [lo, hi]`"));
            }
            let inner = &range[1..range.len() - 1];
            let (lo, hi) = inner
                .split_once(',')
                .ok_or_else(|| err("expected two comma-separated bounds"))?;
            bounds.push((j, parse_num(lo.trim(), lineno + 1)?, parse_num(hi.trim(), lineno + 1)?));
            max_var = max_var.max(j + 1);
            continue;
        }
        // Constraint row; strip an optional `name:` prefix.
        let body = match line.split_once(':') {
            Some((_, rest)) => rest.trim(),
            None => line,
        };
        let (sense_str, sense_val) = if body.contains("<=") {
            ("<=", Sense::Le)
        } else if body.contains(">=") {
            (">=", Sense::Ge)
        } else if body.contains('=') {
            ("=", Sense::Eq)
        } else {
            return Err(err("constraint line has no sense"));
        };
        let (lhs, rhs) = body.split_once(sense_str).unwrap();
        let (terms, c) = parse_expr(lhs, lineno + 1)?;
        let rhs_val = parse_num(rhs.trim(), lineno + 1)? - c;
        rows.push(Constraint::new(terms, sense_val, rhs_val));
    }

    for t in objective.iter().chain(rows.iter().flat_map(|r| r.coeffs.iter())) {
        max_var = max_var.max(t.0 + 1);
    }
    for &j in &integers {
        max_var = max_var.max(j + 1);
    }

    let mut var_bounds = vec![(0.0, f64::INFINITY); max_var];
    for (j, lo, hi) in bounds {
        var_bounds[j] = (lo, hi);
    }
    let mut obj = vec![0.0; max_var];
    for (j, c) in objective {
        obj[j] = c;
    }
    let lp = LinearProgram {
        n_vars: max_var,
        objective: obj,
        objective_offset: offset,
        sense: sense.ok_or(LpError::Parse {
            line: 0,
            msg: "missing objective line (`min:` or `max:`)".into(),
        })?,
        constraints: rows,
        var_bounds,
    };
    lp.validate()?;
    Ok((lp, integers))
}

fn parse_expr(text: &str, line: usize) -> Result<(Vec<(usize, f64)>, f64), LpError> {
    let mut terms = Vec::new();
    let mut constant = 0.0;
    for part in text.split('+') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((coef, var)) = part.split_once('*') {
            let j = parse_var(var.trim(), line)?;
            let c = parse_num(coef.trim(), line)?;
            terms.push((j, c));
        } else if part == "0" {
            continue;
        } else {
            constant += parse_num(part, line)?;
        }
    }
    Ok((terms, constant))
}

fn parse_var(tok: &str, line: usize) -> Result<usize, LpError> {
    tok.strip_prefix('x')
        .and_then(|s| s.parse().ok())
        .ok_or(LpError::Parse {
            line,
            msg: format!("expected variable `x<index>`, got `{tok}`"),
        })
}

fn parse_num(tok: &str, line: usize) -> Result<f64, LpError> {
    match tok {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => tok.parse().map_err(|_| LpError::Parse {
            line,
            msg: format!("expected number, got `{tok}`"),
        }),
    }
}

/// Serialize a linear program to the interchange format.
pub fn write_lp_string(lp: &LinearProgram) -> String {
    write_program_string(lp, None)
}

/// Write a linear program to a file.
pub fn write_lp(path: impl AsRef<Path>, lp: &LinearProgram) -> Result<(), LpError> {
    std::fs::write(path, write_lp_string(lp))?;
    Ok(())
}

/// Parse a linear program; errors when an `integers:` section is present.
pub fn read_lp_str(text: &str) -> Result<LinearProgram, LpError> {
    let (lp, ints) = parse_program_str(text)?;
    if !ints.is_empty() {
        return Err(LpError::Invalid(
            "program declares integers; use the mixed-integer reader".into(),
        ));
    }
    Ok(lp)
}

/// Read a linear program from a file.
pub fn read_lp(path: impl AsRef<Path>) -> Result<LinearProgram, LpError> {
    read_lp_str(&std::fs::read_to_string(path)?)
}
