//! Barycentric posterior lattices and the linear programs posed over them.
//!
//! A distribution over posteriors restricted to grid points is a weight
//! vector `p`; Bayes plausibility, total mass and the information budget are
//! all linear in `p`, so the efficient and inefficient programs become
//! linear programs with `n + 1` rows and one column per grid point.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::value_raw;
use crate::lp::{solve_lp, LinearProgram, LpSolution};
use crate::model::{
    Belief, DecisionProblem, InformationMeasure, PosteriorDistribution, ARITH_TOL,
};

pub const DEFAULT_GRID_CAP: usize = 200_000;

/// Default lattice resolution per state count.
pub fn default_resolution(n_states: usize) -> usize {
    match n_states {
        0..=2 => 1000,
        3 => 120,
        _ => 40,
    }
}

/// `C(k + n − 1, n − 1)`, saturating.
pub fn lattice_size(n: usize, k: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 1..n {
        acc = acc * (k + i) as u128 / i as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// All beliefs whose coordinates are multiples of `1/k`, plus the prior
/// when it is off-lattice, plus any extra points requested.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorGrid {
    resolution: usize,
    points: Vec<Belief>,
    prior_index: usize,
}

impl PosteriorGrid {
    pub fn new(n: usize, k: usize, prior: &Belief) -> Result<Self> {
        Self::with_cap(n, k, prior, DEFAULT_GRID_CAP)
    }

    pub fn with_cap(n: usize, k: usize, prior: &Belief, cap: usize) -> Result<Self> {
        prior.ensure_dim(n)?;
        if k < 2 {
            return Err(Error::Unsupported(format!("grid resolution {k} is below 2")));
        }
        if !(2..=4).contains(&n) {
            return Err(Error::Unsupported(format!(
                "posterior grids support 2 to 4 states, got {n}"
            )));
        }
        let size = lattice_size(n, k);
        if size > cap {
            return Err(Error::GridTooLarge { points: size, cap });
        }
        let mut points = Vec::with_capacity(size + 1);
        let mut counts = vec![0usize; n];
        lattice(&mut counts, 0, k, k, &mut points);
        let prior_index = match points.iter().position(|x| x.max_abs_diff(prior) <= ARITH_TOL) {
            Some(i) => i,
            None => {
                points.push(prior.clone());
                points.len() - 1
            }
        };
        Ok(Self {
            resolution: k,
            points,
            prior_index,
        })
    }

    /// Appends points not already present (at [`ARITH_TOL`]).
    pub fn with_extra_points<'a>(mut self, extra: impl IntoIterator<Item = &'a Belief>) -> Self {
        for x in extra {
            if x.dim() == self.n_states()
                && !self.points.iter().any(|p| p.max_abs_diff(x) <= ARITH_TOL)
            {
                self.points.push(x.clone());
            }
        }
        self
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn points(&self) -> &[Belief] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n_states(&self) -> usize {
        self.points[0].dim()
    }

    pub fn prior_index(&self) -> usize {
        self.prior_index
    }
}

fn lattice(counts: &mut Vec<usize>, pos: usize, remaining: usize, k: usize, out: &mut Vec<Belief>) {
    let n = counts.len();
    if pos == n - 1 {
        counts[pos] = remaining;
        let x = counts.iter().map(|&c| c as f64 / k as f64).collect();
        out.push(Belief::normalized(x).expect("lattice point on the simplex"));
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        lattice(counts, pos + 1, remaining - c, k, out);
    }
}

/// One sample of a value-of-information curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub eta: f64,
    pub value: f64,
    /// Amount of information carried by `solution`.
    pub realized_amount: f64,
    pub support_size: usize,
    pub solution: PosteriorDistribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BudgetSide {
    /// `E_F c ≤ φ⁻¹(η)`.
    AtMost,
    /// `E_F c ≥ φ⁻¹(η)`.
    AtLeast,
}

/// Decision values and divergences tabulated on a grid.
#[derive(Debug, Clone)]
pub(crate) struct GridProgram<'a> {
    pub problem: &'a DecisionProblem,
    pub measure: &'a InformationMeasure,
    pub grid: &'a PosteriorGrid,
    pub values: Vec<f64>,
    pub costs: Vec<f64>,
}

impl<'a> GridProgram<'a> {
    pub fn new(
        problem: &'a DecisionProblem,
        measure: &'a InformationMeasure,
        grid: &'a PosteriorGrid,
    ) -> Result<Self> {
        let n = problem.n_states();
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
        let values = grid
            .points()
            .par_iter()
            .map(|x| value_raw(problem, x.as_slice()))
            .collect();
        let costs = grid
            .points()
            .par_iter()
            .map(|x| measure.divergence(x))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self {
            problem,
            measure,
            grid,
            values,
            costs,
        })
    }

    /// Total-mass row and the first `n − 1` mean rows; the last mean row is
    /// implied by the other two.
    pub fn plausibility_rows(&self, mut lp: LinearProgram) -> LinearProgram {
        let points = self.grid.points();
        lp = lp.eq(vec![1.0; points.len()], 1.0);
        let prior = self.problem.prior();
        for s in 0..self.problem.n_states() - 1 {
            lp = lp.eq(points.iter().map(|x| x[s]).collect(), prior[s]);
        }
        lp
    }

    pub fn budget_program(&self, objective: LinearProgram, side: BudgetSide, inner: f64) -> LinearProgram {
        let lp = self.plausibility_rows(objective);
        match side {
            BudgetSide::AtMost => lp.ub(self.costs.clone(), inner),
            BudgetSide::AtLeast => lp.ub(self.costs.iter().map(|c| -c).collect(), -inner),
        }
    }

    pub fn solve(&self, lp: &LinearProgram) -> Result<LpSolution> {
        solve_lp(lp)
    }

    /// Turns optimal weights into a curve point.
    pub fn curve_point(&self, eta: f64, sol: &LpSolution) -> Result<CurvePoint> {
        let mut support = Vec::new();
        let mut probs = Vec::new();
        for (j, &p) in sol.values.iter().enumerate() {
            if p > 1e-13 {
                support.push(self.grid.points()[j].clone());
                probs.push(p);
            }
        }
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        let solution = PosteriorDistribution::new(support, probs)?;
        solution.check_mean(self.problem.prior())?;
        let realized_amount = self.measure.amount(&solution)?;
        let value = solution.expect(|x| value_raw(self.problem, x.as_slice()));
        Ok(CurvePoint {
            eta,
            value,
            realized_amount,
            support_size: solution.len(),
            solution,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_sizes() {
        let p2 = Belief::uniform(2);
        let g = PosteriorGrid::new(2, 4, &p2).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(lattice_size(2, 4), 5);
        let g = PosteriorGrid::new(3, 2, &Belief::new(vec![0.5, 0.5, 0.0]).unwrap()).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(lattice_size(3, 120), 7381);
        assert_eq!(lattice_size(4, 40), 12341);
    }

    #[test]
    fn prior_on_and_off_lattice() {
        let prior = Belief::new(vec![0.3, 0.7]).unwrap();
        let g = PosteriorGrid::new(2, 10, &prior).unwrap();
        assert_eq!(g.len(), 11);
        assert!(g.points()[g.prior_index()].max_abs_diff(&prior) < 1e-12);

        let prior = Belief::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let g = PosteriorGrid::new(2, 10, &prior).unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!(g.prior_index(), 11);
    }

    #[test]
    fn includes_vertices_and_is_deterministic() {
        let prior = Belief::uniform(3);
        let a = PosteriorGrid::new(3, 6, &prior).unwrap();
        let b = PosteriorGrid::new(3, 6, &prior).unwrap();
        assert_eq!(a, b);
        for s in 0..3 {
            let v = Belief::vertex(3, s);
            assert!(a.points().iter().any(|x| x == &v));
        }
    }

    #[test]
    fn rejects_oversized_and_unsupported_grids() {
        let prior = Belief::uniform(3);
        assert_eq!(
            PosteriorGrid::with_cap(3, 1000, &prior, 1000),
            Err(Error::GridTooLarge {
                points: lattice_size(3, 1000),
                cap: 1000
            })
        );
        assert!(PosteriorGrid::new(3, 1, &prior).is_err());
        assert!(PosteriorGrid::new(5, 4, &Belief::uniform(5)).is_err());
    }

    #[test]
    fn extra_points_are_deduplicated() {
        let prior = Belief::uniform(2);
        let g = PosteriorGrid::new(2, 4, &prior).unwrap();
        let extra = [Belief::new(vec![0.5, 0.5]).unwrap(), Belief::new(vec![0.1, 0.9]).unwrap()];
        let g = g.with_extra_points(&extra);
        assert_eq!(g.len(), 6);
    }
}
