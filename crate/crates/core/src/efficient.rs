//! The efficient value of information
//! `W(η) = max { E_F V : F Bayes-plausible, D(F) ≤ η }` on a posterior grid,
//! together with the checks that the budget binds, that `W` is concave and
//! that its slope at zero is positive.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{undominated_actions, value_raw};
use crate::grid::{BudgetSide, CurvePoint, GridProgram, PosteriorGrid};
use crate::lp::LinearProgram;
use crate::model::{DecisionProblem, InformationMeasure};

/// Default slack for midpoint concavity on grid curves.
pub const DEFAULT_CONCAVITY_SLACK: f64 = 1e-4;

pub fn efficient_value(
    problem: &DecisionProblem,
    measure: &InformationMeasure,
    eta: f64,
    grid: &PosteriorGrid,
) -> Result<CurvePoint> {
    let program = GridProgram::new(problem, measure, grid)?;
    solve_point(&program, eta)
}

fn solve_point(program: &GridProgram<'_>, eta: f64) -> Result<CurvePoint> {
    let inner = program.measure.phi_inverse(eta)?;
    let lp = program.budget_program(
        LinearProgram::maximize(program.values.clone()),
        BudgetSide::AtMost,
        inner,
    );
    let sol = program.solve(&lp)?;
    if !sol.is_optimal() {
        // The point mass at the prior is always feasible.
        return Err(Error::Solver(format!(
            "efficient program at eta = {eta} ended with {:?}",
            sol.status
        )));
    }
    program.curve_point(eta, &sol)
}

/// Smallest amount of information among distributions attaining the
/// full-information value. Budgets must stay below it.
pub fn min_full_info_cost(
    problem: &DecisionProblem,
    measure: &InformationMeasure,
    grid: &PosteriorGrid,
) -> Result<f64> {
    undominated_actions(problem)?;
    let program = GridProgram::new(problem, measure, grid)?;
    let n = problem.n_states();
    let best: Vec<f64> = (0..n).map(|s| problem.best_payoff_in_state(s)).collect();
    // V never exceeds the full-information line; a distribution attains the
    // full-information value iff it puts no mass where the gap is positive.
    let gaps: Vec<f64> = grid
        .points()
        .iter()
        .map(|x| {
            let line: f64 = x.as_slice().iter().zip(&best).map(|(a, b)| a * b).sum();
            let gap = line - value_raw(problem, x.as_slice());
            if gap < 1e-12 {
                0.0
            } else {
                gap
            }
        })
        .collect();
    let lp = program
        .plausibility_rows(LinearProgram::minimize(program.costs.clone()))
        .ub(gaps, 0.0);
    let sol = program.solve(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::Solver(format!(
            "full-information cost program ended with {:?}",
            sol.status
        )));
    }
    Ok(measure.phi_apply(sol.objective_value.max(0.0)))
}

fn validate_etas(etas: &[f64]) -> Result<()> {
    if let Some(&e) = etas.iter().find(|e| e.is_nan() || **e < 0.0) {
        return Err(Error::NegativeEta(e));
    }
    if etas.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidMeasure("budgets must be sorted ascending".into()));
    }
    Ok(())
}

pub(crate) fn sweep<F>(etas: &[f64], f: F) -> Result<Vec<CurvePoint>>
where
    F: Fn(f64) -> Result<CurvePoint> + Sync,
{
    let points: Vec<Result<CurvePoint>> = etas.par_iter().map(|&eta| f(eta)).collect();
    points.into_iter().collect()
}

/// `W` at every budget in `etas` (ascending). Rejects budgets above
/// [`min_full_info_cost`].
pub fn efficient_curve(
    problem: &DecisionProblem,
    measure: &InformationMeasure,
    etas: &[f64],
    grid: &PosteriorGrid,
) -> Result<Vec<CurvePoint>> {
    validate_etas(etas)?;
    let limit = min_full_info_cost(problem, measure, grid)?;
    if let Some(&eta) = etas.iter().find(|&&e| e > limit + 1e-12) {
        return Err(Error::BudgetCap { eta, limit });
    }
    let program = GridProgram::new(problem, measure, grid)?;
    sweep(etas, |eta| solve_point(&program, eta))
}

pub(crate) fn validate_curve_etas(etas: &[f64]) -> Result<()> {
    validate_etas(etas)
}

/// Default binding tolerance `1e-6 · max(1, η)`.
pub fn default_binding_tol(eta: f64) -> f64 {
    1e-6 * eta.max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BindingReport {
    pub eta: f64,
    /// `|realized amount − η|`.
    pub residual: f64,
    /// False when the budget reaches the full-information cap, where the
    /// constraint need not bind.
    pub applicable: bool,
    pub binding: bool,
}

impl BindingReport {
    /// Binding, or skipped as inapplicable.
    pub fn passed(&self) -> bool {
        !self.applicable || self.binding
    }
}

pub fn check_binding(point: &CurvePoint, eta_bar_limit: Option<f64>, tol: f64) -> BindingReport {
    let residual = (point.realized_amount - point.eta).abs();
    let applicable = eta_bar_limit.is_none_or(|limit| point.eta < limit);
    BindingReport {
        eta: point.eta,
        residual,
        applicable,
        binding: residual <= tol,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityReport {
    pub is_concave: bool,
    /// Largest `(v_lo + v_hi)/2 − v_mid` over midpoint triples, floored at 0.
    pub worst_violation: f64,
    /// Smallest `v_mid − (v_lo + v_hi)/2`; `None` without triples.
    pub strictness_margin: Option<f64>,
    /// Largest `v_mid − (v_lo + v_hi)/2`; `None` without triples.
    pub max_margin: Option<f64>,
    pub triples: usize,
}

/// Midpoint concavity over every triple whose middle budget is the average
/// of the outer two.
pub fn check_concavity(curve: &[CurvePoint], slack: f64) -> ConcavityReport {
    let pts: Vec<(f64, f64)> = curve.iter().map(|p| (p.eta, p.value)).collect();
    check_concavity_pairs(&pts, slack)
}

pub fn check_concavity_pairs(pts: &[(f64, f64)], slack: f64) -> ConcavityReport {
    let mut worst: f64 = 0.0;
    let mut min_margin: Option<f64> = None;
    let mut max_margin: Option<f64> = None;
    let mut triples = 0;
    for lo in 0..pts.len() {
        for hi in lo + 2..pts.len() {
            let target = 0.5 * (pts[lo].0 + pts[hi].0);
            let tol = 1e-9 * target.abs().max(1.0);
            for mid in lo + 1..hi {
                if (pts[mid].0 - target).abs() <= tol {
                    let margin = pts[mid].1 - 0.5 * (pts[lo].1 + pts[hi].1);
                    worst = worst.max(-margin);
                    min_margin = Some(min_margin.map_or(margin, |m: f64| m.min(margin)));
                    max_margin = Some(max_margin.map_or(margin, |m: f64| m.max(margin)));
                    triples += 1;
                }
            }
        }
    }
    ConcavityReport {
        is_concave: worst <= slack,
        worst_violation: worst,
        strictness_margin: min_margin,
        max_margin,
        triples,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalReport {
    /// `(W(η₁) − W(0)) / η₁` at the smallest positive `η₁`.
    pub slope: f64,
    pub eta1: f64,
    /// Difference quotients grow as `η₁` shrinks, suggesting an infinite
    /// derivative at zero.
    pub diverging: bool,
}

/// Forward-difference slope at zero. `None` unless the curve has `η = 0`
/// and at least two positive budgets.
pub fn marginal_value_at_zero(curve: &[CurvePoint]) -> Option<MarginalReport> {
    let origin = curve.iter().find(|p| p.eta == 0.0)?;
    let mut positive: Vec<&CurvePoint> = curve.iter().filter(|p| p.eta > 0.0).collect();
    positive.sort_by(|a, b| a.eta.total_cmp(&b.eta));
    if positive.len() < 2 {
        return None;
    }
    let quotient = |p: &CurvePoint| (p.value - origin.value) / p.eta;
    let q1 = quotient(positive[0]);
    let q2 = quotient(positive[1]);
    Some(MarginalReport {
        slope: q1,
        eta1: positive[0].eta,
        diverging: q1 > q2 * (1.0 + 1e-3) && q1 > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Belief, DivergenceKind, Phi};

    fn symmetric(phi: Phi) -> (DecisionProblem, InformationMeasure) {
        let prior = Belief::uniform(2);
        let p = DecisionProblem::from_utility(vec![vec![1.0, 0.0], vec![0.0, 1.0]], prior.clone())
            .unwrap();
        let m = InformationMeasure::new(DivergenceKind::Quadratic, phi, prior).unwrap();
        (p, m)
    }

    fn closed_form(eta: f64) -> f64 {
        0.5 + (eta / 2.0).sqrt()
    }

    #[test]
    fn zero_budget_gives_prior_value() {
        let (p, m) = symmetric(Phi::Identity);
        let g = PosteriorGrid::new(2, 1000, p.prior()).unwrap();
        let pt = efficient_value(&p, &m, 0.0, &g).unwrap();
        assert_eq!(pt.value, 0.5);
        assert_eq!(pt.support_size, 1);
        assert_eq!(pt.realized_amount, 0.0);
    }

    #[test]
    fn symmetric_examples() {
        let (p, m) = symmetric(Phi::Identity);
        let g = PosteriorGrid::new(2, 1000, p.prior()).unwrap();
        let pt = efficient_value(&p, &m, 0.125, &g).unwrap();
        assert!((pt.value - 0.75).abs() < 1e-3);
        assert!(check_binding(&pt, Some(0.5), default_binding_tol(0.125)).binding);
        let pt = efficient_value(&p, &m, 0.5, &g).unwrap();
        assert!((pt.value - 1.0).abs() < 1e-3);
    }

    #[test]
    fn full_info_cost_examples() {
        let (p, m) = symmetric(Phi::Identity);
        let g = PosteriorGrid::new(2, 1000, p.prior()).unwrap();
        assert!((min_full_info_cost(&p, &m, &g).unwrap() - 0.5).abs() < 1e-12);

        let ent = InformationMeasure::new(
            DivergenceKind::EntropyReduction,
            Phi::Identity,
            Belief::uniform(2),
        )
        .unwrap();
        assert!((min_full_info_cost(&p, &ent, &g).unwrap() - 2f64.ln()).abs() < 1e-12);

        let three = DecisionProblem::from_utility(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, 0.6]],
            Belief::uniform(2),
        )
        .unwrap();
        assert!((min_full_info_cost(&three, &m, &g).unwrap() - 0.5).abs() < 1e-12);

        let affine =
            DecisionProblem::from_utility(vec![vec![1.0, 1.0], vec![0.0, 0.0]], Belief::uniform(2))
                .unwrap();
        assert_eq!(min_full_info_cost(&affine, &m, &g), Err(Error::AffineValue));
    }

    #[test]
    fn curve_matches_closed_form_and_is_monotone() {
        let (p, m) = symmetric(Phi::Identity);
        let g = PosteriorGrid::new(2, 1000, p.prior()).unwrap();
        let etas: Vec<f64> = (0..20).map(|i| 0.245 * i as f64 / 19.0).collect();
        let curve = efficient_curve(&p, &m, &etas, &g).unwrap();
        for pt in &curve {
            assert!((pt.value - closed_form(pt.eta)).abs() < 2e-3);
            assert!(pt.support_size <= 3);
            assert!(pt.realized_amount <= pt.eta + 1e-7);
        }
        assert!(curve.windows(2).all(|w| w[1].value >= w[0].value));
        assert_eq!(efficient_curve(&p, &m, &[0.0], &g).unwrap()[0].value, 0.5);
    }

    #[test]
    fn budgets_above_cap_are_rejected() {
        let (p, m) = symmetric(Phi::Identity);
        let g = PosteriorGrid::new(2, 100, p.prior()).unwrap();
        assert!(matches!(
            efficient_curve(&p, &m, &[0.0, 0.6], &g),
            Err(Error::BudgetCap { .. })
        ));
        assert!(efficient_curve(&p, &m, &[0.2, 0.1], &g).is_err());
    }

    #[test]
    fn binding_edge_cases() {
        let (p, m) = symmetric(Phi::Identity);
        let g = PosteriorGrid::new(2, 100, p.prior()).unwrap();
        let zero = efficient_value(&p, &m, 0.0, &g).unwrap();
        assert!(check_binding(&zero, Some(0.5), default_binding_tol(0.0)).binding);
        let over = efficient_value(&p, &m, 0.7, &g).unwrap();
        let report = check_binding(&over, Some(0.5), default_binding_tol(0.7));
        assert!(!report.applicable && !report.binding && report.passed());
    }

    #[test]
    fn concavity_examples() {
        let etas: Vec<f64> = (0..11).map(|i| 0.024 * i as f64).collect();
        let (p, m) = symmetric(Phi::Identity);
        let g = PosteriorGrid::new(2, 1000, p.prior()).unwrap();
        let lin = check_concavity(&efficient_curve(&p, &m, &etas, &g).unwrap(), 1e-4);
        assert!(lin.is_concave && lin.strictness_margin.unwrap() > 0.0);

        let etas2: Vec<f64> = (0..11).map(|i| 0.02 * i as f64).collect();
        let (p2, m2) = symmetric(Phi::Power(2.0));
        let sq = check_concavity(&efficient_curve(&p2, &m2, &etas2, &g).unwrap(), 1e-4);
        assert!(sq.is_concave && sq.strictness_margin.unwrap() > 0.0);
    }

    #[test]
    fn three_action_curve_has_linear_stretch() {
        // Mixing the prior (value 0.6) with posteriors at 0.5 ± 0.2 gains
        // 1.25 per unit of budget up to 0.08.
        let prior = Belief::uniform(2);
        let p = DecisionProblem::from_utility(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, 0.6]],
            prior.clone(),
        )
        .unwrap();
        let m = InformationMeasure::new(DivergenceKind::Quadratic, Phi::Identity, prior).unwrap();
        let g = PosteriorGrid::new(2, 1000, p.prior()).unwrap();
        let etas: Vec<f64> = (0..9).map(|i| 0.01 * i as f64).collect();
        let curve = efficient_curve(&p, &m, &etas, &g).unwrap();
        for pt in &curve {
            assert!((pt.value - (0.6 + 1.25 * pt.eta)).abs() < 1e-9, "{pt:?}");
        }
        let report = check_concavity(&curve, 1e-4);
        assert!(report.is_concave);
        assert!(report.strictness_margin.unwrap().abs() <= 1e-4);
    }

    #[test]
    fn slope_at_zero() {
        let (p, m) = symmetric(Phi::Identity);
        let g = PosteriorGrid::new(2, 1000, p.prior()).unwrap();
        let curve = efficient_curve(&p, &m, &[0.0, 0.005, 0.01, 0.02], &g).unwrap();
        let r = marginal_value_at_zero(&curve).unwrap();
        // Forward difference of 0.5 + sqrt(η/2) from 0 is 1/sqrt(2η) = 10.
        assert!((r.slope - 10.0).abs() < 0.1);
        assert!(r.diverging);

        let (p2, m2) = symmetric(Phi::Power(2.0));
        let curve2 = efficient_curve(&p2, &m2, &[0.0, 0.005, 0.01], &g).unwrap();
        assert!(marginal_value_at_zero(&curve2).unwrap().slope > r.slope);
        assert!(marginal_value_at_zero(&curve[..2]).is_none());
    }
}
