//! The inefficient value of information
//! `U(η) = min { E_F V : F Bayes-plausible, D(F) ≥ η }` and the check that
//! it stays flat near zero at priors interior to a decision region.

use crate::efficient::{sweep, validate_curve_etas};
use crate::error::{Error, Result};
use crate::grid::{BudgetSide, CurvePoint, GridProgram, PosteriorGrid};
use crate::lp::{LinearProgram, LpStatus};

use crate::model::{DecisionProblem, InformationMeasure};

/// Flatness tolerance on `U(η) − U(0)`.
pub const FLATNESS_TOL: f64 = 1e-7;

pub fn inefficient_value(
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
        LinearProgram::minimize(program.values.clone()),
        BudgetSide::AtLeast,
        inner,
    );
    let sol = program.solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => program.curve_point(eta, &sol),
        LpStatus::Infeasible => Err(Error::Infeasible {
            eta,
            max_amount: max_grid_amount(program)?,
        }),
        status => Err(Error::Solver(format!(
            "inefficient program at eta = {eta} ended with {status:?}"
        ))),
    }
}

/// Largest amount of information any Bayes-plausible distribution on the
/// grid carries.
pub fn max_attainable_amount(
    problem: &DecisionProblem,
    measure: &InformationMeasure,
    grid: &PosteriorGrid,
) -> Result<f64> {
    max_grid_amount(&GridProgram::new(problem, measure, grid)?)
}

fn max_grid_amount(program: &GridProgram<'_>) -> Result<f64> {
    let lp = program.plausibility_rows(LinearProgram::maximize(program.costs.clone()));
    let sol = program.solve(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::Solver(format!(
            "maximal-amount program ended with {:?}",
            sol.status
        )));
    }
    Ok(program.measure.phi_apply(sol.objective_value.max(0.0)))
}

/// `U` at every budget in `etas` (ascending). The first infeasible budget
/// is reported as [`Error::Infeasible`].
pub fn inefficient_curve(
    problem: &DecisionProblem,
    measure: &InformationMeasure,
    etas: &[f64],
    grid: &PosteriorGrid,
) -> Result<Vec<CurvePoint>> {
    validate_curve_etas(etas)?;
    let program = GridProgram::new(problem, measure, grid)?;
    sweep(etas, |eta| solve_point(&program, eta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessReport {
    /// False when the prior sits on a region boundary and no flat threshold
    /// exists.
    pub applicable: bool,
    pub flat: bool,
    /// Largest `|U(η) − U(0)|` over samples with `η ≤ eta_hat`.
    pub max_deviation: f64,
    pub samples: usize,
}

impl FlatnessReport {
    pub fn passed(&self) -> bool {
        !self.applicable || self.flat
    }
}

/// Certifies `U(η) = U(0)` within [`FLATNESS_TOL`] for every sample with
/// `η ≤ eta_hat`. Pass `None` when the prior is on a boundary.
pub fn check_flat_at_zero(curve: &[CurvePoint], eta_hat: Option<f64>) -> FlatnessReport {
    let origin = curve.iter().find(|p| p.eta == 0.0);
    let (Some(eta_hat), Some(origin)) = (eta_hat, origin) else {
        return FlatnessReport {
            applicable: false,
            flat: false,
            max_deviation: f64::NAN,
            samples: 0,
        };
    };
    let window: Vec<&CurvePoint> = curve
        .iter()
        .filter(|p| p.eta <= eta_hat * (1.0 + 1e-12))
        .collect();
    let max_deviation = window
        .iter()
        .map(|p| (p.value - origin.value).abs())
        .fold(0.0, f64::max);
    FlatnessReport {
        applicable: true,
        flat: max_deviation <= FLATNESS_TOL,
        max_deviation,
        samples: window.len(),
    }
}
