//! Dense two-phase primal simplex for programs with few rows and many
//! columns.
//!
//! Every variable is nonnegative. Rows are either equalities or `≤`
//! inequalities; inequality rows receive a slack column, and rows that
//! cannot start from their slack receive an artificial column for phase
//! one. Pricing is Dantzig's rule with lowest-index tie-breaks, falling back
//! to Bland's rule after `5·(rows + cols)` pivots so that degenerate
//! problems cannot cycle.

use crate::error::{Error, Result};

const REDUCED_COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// `opt c·x` subject to `A_eq x = b_eq`, `A_ub x ≤ b_ub`, `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub sense: Sense,
    pub eq_matrix: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub ub_matrix: Vec<Vec<f64>>,
    pub ub_rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, sense: Sense) -> Self {
        Self {
            objective,
            sense,
            eq_matrix: Vec::new(),
            eq_rhs: Vec::new(),
            ub_matrix: Vec::new(),
            ub_rhs: Vec::new(),
        }
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::new(objective, Sense::Maximize)
    }

    pub fn minimize(objective: Vec<f64>) -> Self {
        Self::new(objective, Sense::Minimize)
    }

    /// Adds the row `row·x = rhs`.
    pub fn eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.eq_matrix.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    /// Adds the row `row·x ≤ rhs`.
    pub fn ub(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.ub_matrix.push(row);
        self.ub_rhs.push(rhs);
        self
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.eq_rhs.len() + self.ub_rhs.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if n == 0 {
            return Err(Error::Solver("program has no variables".into()));
        }
        if self.eq_matrix.len() != self.eq_rhs.len() || self.ub_matrix.len() != self.ub_rhs.len() {
            return Err(Error::Solver("row count does not match right-hand side".into()));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.objective) || !finite(&self.eq_rhs) || !finite(&self.ub_rhs) {
            return Err(Error::Solver("non-finite coefficient".into()));
        }
        for row in self.eq_matrix.iter().chain(&self.ub_matrix) {
            if row.len() != n {
                return Err(Error::Solver(format!(
                    "row has {} coefficients for {n} variables",
                    row.len()
                )));
            }
            if !finite(row) {
                return Err(Error::Solver("non-finite coefficient".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Safety net; Bland's rule terminates, so this indicates numerical
    /// trouble rather than cycling.
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural variable values; zeros unless optimal.
    pub values: Vec<f64>,
    pub objective_value: f64,
    /// Basic column per surviving row. Indices below `n_vars` are structural,
    /// the rest are slacks in inequality-row order.
    pub basis: Vec<usize>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn without_solution(status: LpStatus, n: usize) -> Self {
        Self {
            status,
            values: vec![0.0; n],
            objective_value: f64::NAN,
            basis: Vec::new(),
        }
    }
}

enum Phase {
    Optimal,
    Unbounded,
    Limit,
}

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<f64>>,
    /// Reduced costs; the last entry is minus the current objective.
    obj: Vec<f64>,
    basis: Vec<usize>,
    /// Columns allowed to enter.
    allowed: Vec<bool>,
    iterations: usize,
    dantzig_limit: usize,
    hard_limit: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        *self.rows[r].last().unwrap()
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let width = self.obj.len();
        let p = self.rows[r][j];
        {
            let row = &mut self.rows[r];
            for v in row.iter_mut() {
                *v /= p;
            }
            row[j] = 1.0;
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for k in 0..width {
                    row[k] -= f * pivot_row[k];
                }
                row[j] = 0.0;
            }
        }
        let f = self.obj[j];
        if f != 0.0 {
            for k in 0..width {
                self.obj[k] -= f * pivot_row[k];
            }
            self.obj[j] = 0.0;
        }
        self.rows[r] = pivot_row;
        self.basis[r] = j;
        self.iterations += 1;
    }

    fn entering(&self) -> Option<usize> {
        let ncols = self.obj.len() - 1;
        if self.iterations < self.dantzig_limit {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..ncols {
                let d = self.obj[j];
                if self.allowed[j] && d < -REDUCED_COST_TOL && best.is_none_or(|(_, b)| d < b) {
                    best = Some((j, d));
                }
            }
            best.map(|(j, _)| j)
        } else {
            (0..ncols).find(|&j| self.allowed[j] && self.obj[j] < -REDUCED_COST_TOL)
        }
    }

    fn leaving(&self, j: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            let a = row[j];
            if a > PIVOT_TOL {
                let ratio = self.rhs(r).max(0.0) / a;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, b)) => {
                        let tie = (ratio - b).abs() <= 1e-12 * b.abs().max(1.0);
                        if (tie && self.basis[r] < self.basis[br]) || (!tie && ratio < b) {
                            Some((r, ratio))
                        } else {
                            Some((br, b))
                        }
                    }
                };
            }
        }
        best.map(|(r, _)| r)
    }

    fn run(&mut self) -> Phase {
        loop {
            if self.iterations >= self.hard_limit {
                return Phase::Limit;
            }
            let Some(j) = self.entering() else {
                return Phase::Optimal;
            };
            let Some(r) = self.leaving(j) else {
                return Phase::Unbounded;
            };
            self.pivot(r, j);
        }
    }

    /// Installs reduced costs for `cost` (length = column count) against the
    /// current basis.
    fn set_costs(&mut self, cost: &[f64]) {
        let width = cost.len() + 1;
        self.obj.clear();
        self.obj.extend_from_slice(cost);
        self.obj.push(0.0);
        for (r, row) in self.rows.iter().enumerate() {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                for k in 0..width {
                    self.obj[k] -= cb * row[k];
                }
            }
        }
    }
}

/// Solves `lp`. Malformed input is an error; infeasibility and unboundedness
/// are statuses.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.n_vars();
    let n_eq = lp.eq_rhs.len();
    let n_ub = lp.ub_rhs.len();
    let m = n_eq + n_ub;
    let n_std = n + n_ub;

    // Standard-form rows with nonnegative right-hand sides.
    let mut std_rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut needs_artificial = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![0.0; n_std + 1];
        let (coeffs, rhs) = if i < n_eq {
            (&lp.eq_matrix[i], lp.eq_rhs[i])
        } else {
            let k = i - n_eq;
            row[n + k] = 1.0;
            (&lp.ub_matrix[k], lp.ub_rhs[k])
        };
        row[..n].copy_from_slice(coeffs);
        row[n_std] = rhs;
        let flip = rhs < 0.0;
        if flip {
            row.iter_mut().for_each(|v| *v = -*v);
        }
        needs_artificial.push(i < n_eq || flip);
        std_rows.push(row);
    }

    let n_art = needs_artificial.iter().filter(|&&b| b).count();
    let ncols = n_std + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = n_std;
    for (i, std_row) in std_rows.iter().enumerate() {
        let mut row = vec![0.0; ncols + 1];
        row[..n_std].copy_from_slice(&std_row[..n_std]);
        row[ncols] = std_row[n_std];
        if needs_artificial[i] {
            row[next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(n + (i - n_eq));
        }
        rows.push(row);
    }

    let dantzig_limit = 5 * (m + ncols);
    let mut tab = Tableau {
        rows,
        obj: Vec::with_capacity(ncols + 1),
        basis,
        allowed: vec![true; ncols],
        iterations: 0,
        dantzig_limit,
        hard_limit: dantzig_limit + 50 * (m + ncols) + 1000,
    };

    if n_art > 0 {
        let mut phase1 = vec![0.0; ncols];
        phase1[n_std..].iter_mut().for_each(|c| *c = 1.0);
        tab.set_costs(&phase1);
        if let Phase::Limit = tab.run() {
            return Ok(LpSolution::without_solution(LpStatus::IterationLimit, n));
        }
        let scale = std_rows
            .iter()
            .map(|r| r[n_std].abs())
            .fold(1.0, f64::max);
        let infeasibility: f64 = (0..tab.rows.len())
            .filter(|&r| tab.basis[r] >= n_std)
            .map(|r| tab.rhs(r).max(0.0))
            .sum();
        if infeasibility > FEAS_TOL * scale {
            return Ok(LpSolution::without_solution(LpStatus::Infeasible, n));
        }
        // Drive remaining (zero-valued) artificials out of the basis; rows
        // where that is impossible are redundant and dropped.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= n_std {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..n_std {
                    let a = tab.rows[r][j].abs();
                    if a > 1e-9 && best.is_none_or(|(_, b)| a > b) {
                        best = Some((j, a));
                    }
                }
                match best {
                    Some((j, _)) => tab.pivot(r, j),
                    None => {
                        tab.rows.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        tab.allowed[n_std..].iter_mut().for_each(|a| *a = false);
    }

    let mut cost = vec![0.0; ncols];
    for (c, &o) in cost.iter_mut().zip(&lp.objective) {
        *c = match lp.sense {
            Sense::Minimize => o,
            Sense::Maximize => -o,
        };
    }
    tab.set_costs(&cost);
    match tab.run() {
        Phase::Optimal => {}
        Phase::Unbounded => return Ok(LpSolution::without_solution(LpStatus::Unbounded, n)),
        Phase::Limit => return Ok(LpSolution::without_solution(LpStatus::IterationLimit, n)),
    }

    let mut x_std = vec![0.0; n_std];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n_std {
            x_std[b] = tab.rhs(r).max(0.0);
        }
    }
    refine(&std_rows, &tab, n_std, &mut x_std);

    let values = x_std[..n].to_vec();
    let objective_value = values.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective_value,
        basis: tab.basis.clone(),
    })
}

/// Recomputes basic values from the original rows, undoing round-off
/// accumulated across pivots. Keeps the tableau values if the basis matrix
/// is numerically singular or the refined point is not feasible.
fn refine(std_rows: &[Vec<f64>], tab: &Tableau, n_std: usize, x: &mut [f64]) {
    let m = std_rows.len();
    let k = tab.basis.len();
    if k == 0 || tab.basis.iter().any(|&b| b >= n_std) {
        return;
    }
    // Square basis when no row was dropped; otherwise the normal equations
    // over every original row.
    let mut a = vec![vec![0.0; k + 1]; k];
    if k == m {
        for (i, row) in std_rows.iter().enumerate() {
            for (c, &b) in tab.basis.iter().enumerate() {
                a[i][c] = row[b];
            }
            a[i][k] = row[n_std];
        }
    } else {
        for i in 0..k {
            for c in 0..=k {
                let mut s = 0.0;
                for row in std_rows {
                    let rhs_or_col = if c == k { row[n_std] } else { row[tab.basis[c]] };
                    s += row[tab.basis[i]] * rhs_or_col;
                }
                a[i][c] = s;
            }
        }
    }
    let Some(sol) = gauss_solve(a) else {
        return;
    };
    if sol.iter().any(|v| !v.is_finite() || *v < -FEAS_TOL) {
        return;
    }
    let residual = std_rows
        .iter()
        .map(|row| {
            let lhs: f64 = tab.basis.iter().zip(&sol).map(|(&b, v)| row[b] * v).sum();
            (lhs - row[n_std]).abs()
        })
        .fold(0.0, f64::max);
    if residual > FEAS_TOL {
        return;
    }
    x.iter_mut().for_each(|v| *v = 0.0);
    for (&b, v) in tab.basis.iter().zip(sol) {
        x[b] = v.max(0.0);
    }
}

fn gauss_solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = a.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, piv);
        for i in col + 1..k {
            let f = a[i][col] / a[col][col];
            if f != 0.0 {
                for c in col..=k {
                    a[i][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|c| a[i][c] * x[c]).sum();
        x[i] = (a[i][k] - s) / a[i][i];
    }
    Some(x)
}
