//! Small dense linear solves used by vertex enumeration and the
//! enumeration oracles. Independent of the simplex code.

/// Solves `A x = b` for a consistent, possibly overdetermined system with
/// full column rank. `rows` holds `[a_i | b_i]`. Returns `None` when the
/// columns are rank deficient or the system is inconsistent beyond `tol`.
pub fn solve_consistent(rows: &[Vec<f64>], ncols: usize, tol: f64) -> Option<Vec<f64>> {
    let m = rows.len();
    if m < ncols {
        return None;
    }
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    for col in 0..ncols {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        for i in col + 1..m {
            let f = a[i][col] / a[col][col];
            if f != 0.0 {
                for c in col..=ncols {
                    a[i][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; ncols];
    for i in (0..ncols).rev() {
        let s: f64 = (i + 1..ncols).map(|c| a[i][c] * x[c]).sum();
        x[i] = (a[i][ncols] - s) / a[i][i];
    }
    // Check the original system, not the eliminated one.
    for row in rows {
        let lhs: f64 = row[..ncols].iter().zip(&x).map(|(r, v)| r * v).sum();
        if (lhs - row[ncols]).abs() > tol {
            return None;
        }
    }
    Some(x)
}
