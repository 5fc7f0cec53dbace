//! Sparse LU factorization of the simplex basis.
//!
//! Left-looking factorization with partial pivoting, column by column in
//! basis order. Factors are stored column-wise; `L` has a unit diagonal and
//! its row indices are remapped to pivot order once the factorization
//! completes, so the triangular solves run directly in permuted space.

/// Column-wise LU factors of a square basis matrix, `P B = L U`.
pub(crate) struct LuFactors {
    m: usize,
    /// Strictly-lower entries of column `p`, `(pivot position > p, value)`.
    l_cols: Vec<Vec<(usize, f64)>>,
    /// Strictly-upper entries of column `p`, `(pivot position < p, value)`.
    u_cols: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
    /// Pivot position -> original row.
    row_of_pivot: Vec<usize>,
}

impl LuFactors {
    /// Factorize the matrix whose `j`-th column is `cols[j]` (original row
    /// indices). Returns an error message naming the deficient column when a
    /// pivot below `1e-12` is the best available.
    pub fn factorize(m: usize, cols: &[&[(usize, f64)]]) -> Result<Self, String> {
        assert_eq!(cols.len(), m);
        const UNSET: usize = usize::MAX;
        let mut pivot_of_row = vec![UNSET; m];
        let mut row_of_pivot = vec![0usize; m];
        let mut l_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        let mut u_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        let mut u_diag = vec![0.0; m];
        let mut work = vec![0.0f64; m];

        for j in 0..m {
            for &(i, v) in cols[j] {
                work[i] = v;
            }
            // Forward-eliminate with the columns already factorized.
            for p in 0..j {
                let xp = work[row_of_pivot[p]];
                if xp != 0.0 {
                    for &(ip, lv) in &l_cols[p] {
                        // l row indices are still original here; remapped below.
                        work[ip] -= lv * xp;
                    }
                }
            }
            // Partial pivot: largest magnitude among rows without a pivot.
            let mut pivot_row = UNSET;
            let mut pivot_abs = 0.0;
            for i in 0..m {
                if pivot_of_row[i] == UNSET {
                    let a = work[i].abs();
                    if a > pivot_abs {
                        pivot_abs = a;
                        pivot_row = i;
                    }
                }
            }
            if pivot_row == UNSET || pivot_abs < 1e-12 {
                return Err(format!("singular basis at column {j} (pivot {pivot_abs:.3e})"));
            }
            let pivot = work[pivot_row];
            let mut lcol = Vec::new();
            let mut ucol = Vec::new();
            for i in 0..m {
                let v = work[i];
                if v == 0.0 {
                    continue;
                }
                let p = pivot_of_row[i];
                if p != UNSET {
                    ucol.push((p, v));
                } else if i != pivot_row {
                    let mult = v / pivot;
                    if mult != 0.0 {
                        lcol.push((i, mult)); // original row index for now
                    }
                }
            }
            pivot_of_row[pivot_row] = j;
            row_of_pivot[j] = pivot_row;
            u_diag[j] = pivot;
            l_cols.push(lcol);
            u_cols.push(ucol);
            for v in work.iter_mut() {
                *v = 0.0;
            }
        }

        // Remap L's row indices to pivot order.
        for col in l_cols.iter_mut() {
            for entry in col.iter_mut() {
                entry.0 = pivot_of_row[entry.0];
            }
        }

        Ok(Self {
            m,
            l_cols,
            u_cols,
            u_diag,
            row_of_pivot,
        })
    }

    /// Solve `B w = b`. `b` is indexed by original row, the result by basis
    /// position (column order of the factorized matrix).
    pub fn ftran(&self, b: &[f64], out: &mut [f64]) {
        debug_assert_eq!(b.len(), self.m);
        debug_assert_eq!(out.len(), self.m);
        for p in 0..self.m {
            out[p] = b[self.row_of_pivot[p]];
        }
        for p in 0..self.m {
            let zp = out[p];
            if zp != 0.0 {
                for &(i, v) in &self.l_cols[p] {
                    out[i] -= v * zp;
                }
            }
        }
        for p in (0..self.m).rev() {
            let xp = out[p] / self.u_diag[p];
            out[p] = xp;
            if xp != 0.0 {
                for &(q, v) in &self.u_cols[p] {
                    out[q] -= v * xp;
                }
            }
        }
    }

    /// Solve `B' y = c`. `c` is indexed by basis position, the result by
    /// original row. `scratch` must have length `m`.
    pub fn btran(&self, c: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        debug_assert_eq!(c.len(), self.m);
        debug_assert_eq!(out.len(), self.m);
        debug_assert_eq!(scratch.len(), self.m);
        // U' v = c, forward over columns.
        for p in 0..self.m {
            let mut v = c[p];
            for &(q, uv) in &self.u_cols[p] {
                v -= uv * scratch[q];
            }
            scratch[p] = v / self.u_diag[p];
        }
        // L' z = v, backward; z overwrites scratch.
        for p in (0..self.m).rev() {
            let mut v = scratch[p];
            for &(i, lv) in &self.l_cols[p] {
                v -= lv * scratch[i];
            }
            scratch[p] = v;
        }
        for p in 0..self.m {
            out[self.row_of_pivot[p]] = scratch[p];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_cols(a: &[&[f64]]) -> Vec<Vec<(usize, f64)>> {
        let m = a.len();
        (0..m)
            .map(|j| {
                (0..m)
                    .filter(|&i| a[i][j] != 0.0)
                    .map(|i| (i, a[i][j]))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn factorize_and_solve() {
        let a: Vec<&[f64]> = vec![&[2.0, 1.0, 0.0], &[4.0, 3.0, 1.0], &[0.0, 1.0, 5.0]];
        let cols = dense_cols(&a);
        let refs: Vec<&[(usize, f64)]> = cols.iter().map(|c| c.as_slice()).collect();
        let lu = LuFactors::factorize(3, &refs).unwrap();

        let b = vec![1.0, 2.0, 3.0];
        let mut w = vec![0.0; 3];
        lu.ftran(&b, &mut w);
        // Check B w = b.
        for i in 0..3 {
            let got: f64 = (0..3).map(|j| a[i][j] * w[j]).sum();
            assert!((got - b[i]).abs() < 1e-10, "row {i}: {got} vs {}", b[i]);
        }

        let c = vec![1.0, -1.0, 0.5];
        let mut y = vec![0.0; 3];
        let mut scratch = vec![0.0; 3];
        lu.btran(&c, &mut y, &mut scratch);
        // Check B' y = c, i.e. per column j: sum_i a[i][j] y[i] = c[j].
        for j in 0..3 {
            let got: f64 = (0..3).map(|i| a[i][j] * y[i]).sum();
            assert!((got - c[j]).abs() < 1e-10, "col {j}: {got} vs {}", c[j]);
        }
    }

    #[test]
    fn rejects_singular() {
        let a: Vec<&[f64]> = vec![&[1.0, 2.0], &[2.0, 4.0]];
        let cols = dense_cols(&a);
        let refs: Vec<&[(usize, f64)]> = cols.iter().map(|c| c.as_slice()).collect();
        assert!(LuFactors::factorize(2, &refs).is_err());
    }
}
