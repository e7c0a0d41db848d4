//! Brute-force references for the efficient, inefficient and max-min
//! programs on tiny instances.
//!
//! The grid oracles never call the simplex solver: they enumerate every
//! candidate basic solution (column subsets of size at most `n + 1`), solve
//! each small linear system directly and keep the best feasible one.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::value_raw;
use crate::grid::PosteriorGrid;
use crate::linalg::solve_consistent;
use crate::maxmin::{channel_inner_cost, maxmin_value, Channel, PriorSet};
use crate::model::{DecisionProblem, InformationMeasure, ARITH_TOL};

/// Largest grid the enumeration oracles accept.
pub const MAX_ORACLE_POINTS: usize = 200;

/// Default channel-grid step for [`oracle_maxmin`].
pub const DEFAULT_MAXMIN_STEP: f64 = 0.01;

const WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    MaxWithCostAtMost,
    MinWithCostAtLeast,
}

struct Columns {
    /// `[1, x_0, …, x_{n−2}]` per point.
    plaus: Vec<Vec<f64>>,
    values: Vec<f64>,
    costs: Vec<f64>,
    rhs: Vec<f64>,
}

fn tabulate(
    problem: &DecisionProblem,
    measure: &InformationMeasure,
    grid: &PosteriorGrid,
) -> Result<Columns> {
    let n = problem.n_states();
    if n > 3 {
        return Err(Error::Unsupported(format!(
            "enumeration oracle supports at most 3 states, got {n}"
        )));
    }
    if grid.len() > MAX_ORACLE_POINTS {
        return Err(Error::Unsupported(format!(
            "enumeration oracle supports at most {MAX_ORACLE_POINTS} grid points, got {}",
            grid.len()
        )));
    }
    if grid.n_states() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: grid.n_states(),
        });
    }
    if measure.reference().max_abs_diff(problem.prior()) > ARITH_TOL {
        return Err(Error::InvalidMeasure(
            "the measure must be anchored at the problem's prior".into(),
        ));
    }
    let mut plaus = Vec::with_capacity(grid.len());
    let mut values = Vec::with_capacity(grid.len());
    let mut costs = Vec::with_capacity(grid.len());
    for x in grid.points() {
        let mut col = vec![1.0];
        col.extend_from_slice(&x.as_slice()[..n - 1]);
        plaus.push(col);
        values.push(value_raw(problem, x.as_slice()));
        costs.push(measure.divergence(x)?);
    }
    let mut rhs = vec![1.0];
    rhs.extend_from_slice(&problem.prior().as_slice()[..n - 1]);
    Ok(Columns {
        plaus,
        values,
        costs,
        rhs,
    })
}

impl Columns {
    /// Best objective among weights on `subset` meeting plausibility, with
    /// the budget either tight or slack.
    fn candidate(&self, subset: &[usize], inner: f64, goal: Goal) -> Option<f64> {
        let k = subset.len();
        let mut best: Option<f64> = None;
        let mut consider = |w: Vec<f64>, tight: bool| {
            if w.iter().any(|&v| v < -WEIGHT_TOL) {
                return;
            }
            let cost: f64 = subset.iter().zip(&w).map(|(&j, v)| self.costs[j] * v).sum();
            let ok = tight
                || match goal {
                    Goal::MaxWithCostAtMost => cost <= inner + 1e-12,
                    Goal::MinWithCostAtLeast => cost >= inner - 1e-12,
                };
            if !ok {
                return;
            }
            let obj: f64 = subset.iter().zip(&w).map(|(&j, v)| self.values[j] * v).sum();
            best = Some(match (best, goal) {
                (None, _) => obj,
                (Some(b), Goal::MaxWithCostAtMost) => b.max(obj),
                (Some(b), Goal::MinWithCostAtLeast) => b.min(obj),
            });
        };
        let r = self.rhs.len();
        // Budget slack: plausibility rows only.
        if k <= r {
            let rows: Vec<Vec<f64>> = (0..r)
                .map(|i| {
                    let mut row: Vec<f64> = subset.iter().map(|&j| self.plaus[j][i]).collect();
                    row.push(self.rhs[i]);
                    row
                })
                .collect();
            if let Some(w) = solve_consistent(&rows, k, 1e-10) {
                consider(w, false);
            }
        }
        // Budget tight: plausibility rows plus the cost row.
        let mut rows: Vec<Vec<f64>> = (0..r)
            .map(|i| {
                let mut row: Vec<f64> = subset.iter().map(|&j| self.plaus[j][i]).collect();
                row.push(self.rhs[i]);
                row
            })
            .collect();
        let mut cost_row: Vec<f64> = subset.iter().map(|&j| self.costs[j]).collect();
        cost_row.push(inner);
        rows.push(cost_row);
        if let Some(w) = solve_consistent(&rows, k, 1e-10) {
            consider(w, true);
        }
        best
    }

    fn search(&self, inner: f64, goal: Goal) -> Option<f64> {
        let m = self.plaus.len();
        let max_k = self.rhs.len() + 1;
        let pick = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => Some(match goal {
                Goal::MaxWithCostAtMost => a.max(b),
                Goal::MinWithCostAtLeast => a.min(b),
            }),
        };
        (0..m)
            .into_par_iter()
            .map(|first| {
                let mut best = None;
                let mut subset = vec![first];
                self.extend(&mut subset, max_k, inner, goal, &mut best, &pick);
                best
            })
            .reduce(|| None, pick)
    }

    fn extend(
        &self,
        subset: &mut Vec<usize>,
        max_k: usize,
        inner: f64,
        goal: Goal,
        best: &mut Option<f64>,
        pick: &impl Fn(Option<f64>, Option<f64>) -> Option<f64>,
    ) {
        *best = pick(*best, self.candidate(subset, inner, goal));
        if subset.len() == max_k {
            return;
        }
        let last = *subset.last().unwrap();
        for next in last + 1..self.plaus.len() {
            subset.push(next);
            self.extend(subset, max_k, inner, goal, best, pick);
            subset.pop();
        }
    }
}

/// Efficient value on `grid` by enumerating basic solutions.
pub fn oracle_efficient(
    problem: &DecisionProblem,
    measure: &InformationMeasure,
    eta: f64,
    grid: &PosteriorGrid,
) -> Result<f64> {
    let cols = tabulate(problem, measure, grid)?;
    let inner = measure.phi_inverse(eta)?;
    cols.search(inner, Goal::MaxWithCostAtMost)
        .ok_or_else(|| Error::Solver("oracle found no feasible distribution".into()))
}

/// Inefficient value on `grid` by enumerating basic solutions.
pub fn oracle_inefficient(
    problem: &DecisionProblem,
    measure: &InformationMeasure,
    eta: f64,
    grid: &PosteriorGrid,
) -> Result<f64> {
    let cols = tabulate(problem, measure, grid)?;
    let inner = measure.phi_inverse(eta)?;
    cols.search(inner, Goal::MinWithCostAtLeast).ok_or(Error::Infeasible {
        eta,
        max_amount: f64::NAN,
    })
}

/// Every two-signal channel on a two-state problem with entries on a grid
/// of the given step, tabulated once as (inner cost, max-min value).
#[derive(Debug, Clone)]
pub struct MaxminOracle {
    entries: Vec<(f64, f64)>,
    measure: InformationMeasure,
}

impl MaxminOracle {
    pub fn new(
        problem: &DecisionProblem,
        priors: &PriorSet,
        measure: &InformationMeasure,
        step: f64,
    ) -> Result<Self> {
        if problem.n_states() != 2 {
            return Err(Error::Unsupported(
                "channel-grid oracle supports 2 states and 2 signals only".into(),
            ));
        }
        if !(step > 0.0 && step <= 0.5) {
            return Err(Error::Unsupported(format!("oracle step {step} outside (0, 0.5]")));
        }
        if measure.reference().max_abs_diff(priors.reference()) > ARITH_TOL {
            return Err(Error::InvalidMeasure(
                "the measure must be anchored at the reference prior".into(),
            ));
        }
        let ticks = (1.0 / step).round() as usize;
        let params: Vec<(usize, usize)> = (0..=ticks)
            .flat_map(|i| (0..=ticks).map(move |j| (i, j)))
            .collect();
        let entries = params
            .par_iter()
            .map(|&(i, j)| {
                let a = (i as f64 / ticks as f64).min(1.0);
                let b = (j as f64 / ticks as f64).min(1.0);
                let pi = Channel::from_matrix(vec![vec![a, 1.0 - a], vec![b, 1.0 - b]])?;
                let cost = channel_inner_cost(&pi, measure)?;
                let value = maxmin_value(problem, priors, &pi)?.value;
                Ok((cost, value))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            entries,
            measure: measure.clone(),
        })
    }

    /// Best tabulated value among channels with `C(π) ≤ η`.
    pub fn best(&self, eta: f64) -> Result<f64> {
        let inner = self.measure.phi_inverse(eta)?;
        Ok(self
            .entries
            .iter()
            .filter(|(c, _)| *c <= inner + 1e-12)
            .map(|&(_, v)| v)
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Max-min value of information by exhaustive search over a two-parameter
/// channel grid (two states, two signals).
pub fn oracle_maxmin(
    problem: &DecisionProblem,
    priors: &PriorSet,
    measure: &InformationMeasure,
    eta: f64,
    step: f64,
) -> Result<f64> {
    MaxminOracle::new(problem, priors, measure, step)?.best(eta)
}
