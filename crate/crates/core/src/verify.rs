//! The property suite behind `voi verify`.
//!
//! Each check produces one line of the report with its measured margin. The
//! report depends only on the problem and the [`VerifyConfig`], so two runs
//! with the same seed render byte-identical text.

use std::fmt::Write as _;

use crate::efficient::{
    check_binding, check_concavity, default_binding_tol, efficient_curve, marginal_value_at_zero,
    min_full_info_cost,
};
use crate::error::{Error, Result};
use crate::geometry::{decision_regions, flat_threshold, locate_region, undominated_actions};
use crate::grid::{default_resolution, CurvePoint, PosteriorGrid};
use crate::inefficient::{check_flat_at_zero, inefficient_curve, inefficient_value};
use crate::maxmin::{
    channel_cost, maxmin_curve, Channel, MaxminCurve, SearchConfig, MAXMIN_BINDING_TOL,
};
use crate::oracle::{oracle_efficient, oracle_inefficient, MaxminOracle};
use crate::problem_file::ProblemSpec;

/// Strictness required of `W` where it must be strictly concave.
pub const STRICTNESS_MARGIN: f64 = 1e-4;
/// Smallest forward-difference slope at zero counted as positive.
pub const MIN_SLOPE: f64 = 1e-3;
/// Agreement between the simplex and the enumeration oracle.
pub const ORACLE_TOL: f64 = 1e-8;
/// Agreement between the max-min search and the channel-grid oracle.
pub const MAXMIN_ORACLE_TOL: f64 = 5e-3;
pub const MAXMIN_ORACLE_STEP: f64 = 0.0025;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub concavity_slack: f64,
    /// Grid resolution; falls back to the file, then to the default.
    pub grid: Option<usize>,
    /// Budgets sampled on `[0, 0.8 · cap]`, including zero.
    pub curve_points: usize,
    pub maxmin_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            concavity_slack: crate::efficient::DEFAULT_CONCAVITY_SLACK,
            grid: None,
            curve_points: 9,
            maxmin_points: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    NotApplicable,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::NotApplicable => "N/A ",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub outcome: Outcome,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, outcome: Outcome, detail: String) -> Self {
        Self {
            name,
            outcome,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub header: Vec<String>,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome != Outcome::Fail)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.header {
            let _ = writeln!(out, "{line}");
        }
        for c in &self.checks {
            let _ = writeln!(out, "[{}] {}: {}", c.outcome.tag(), c.name, c.detail);
        }
        let count = |o| self.checks.iter().filter(|c| c.outcome == o).count();
        let _ = writeln!(
            out,
            "result: {} ({} passed, {} failed, {} not applicable)",
            if self.passed() { "PASS" } else { "FAIL" },
            count(Outcome::Pass),
            count(Outcome::Fail),
            count(Outcome::NotApplicable)
        );
        out
    }
}

fn linspace(hi: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count).map(|i| hi * i as f64 / (count - 1) as f64).collect()
}

fn fmt_e(x: f64) -> String {
    format!("{x:.3e}")
}

/// Runs every check that applies to `spec`.
pub fn verify(spec: &ProblemSpec, config: &VerifyConfig) -> Result<VerifyReport> {
    let problem = &spec.problem;
    let measure = &spec.measure;
    let n = problem.n_states();
    let k = config
        .grid
        .or(spec.grid)
        .unwrap_or_else(|| default_resolution(n));
    let grid = PosteriorGrid::new(n, k, problem.prior())?;
    let mut checks = Vec::new();
    let header = vec![
        format!(
            "problem: {} states, {} actions, divergence {}, phi {}",
            n,
            problem.n_actions(),
            measure.divergence_kind().name(),
            match measure.phi() {
                crate::model::Phi::Identity => "identity".to_string(),
                crate::model::Phi::Power(p) => format!("power({p})"),
            }
        ),
        format!(
            "grid resolution {k} ({} points), seed {}, concavity slack {}",
            grid.len(),
            config.seed,
            fmt_e(config.concavity_slack)
        ),
    ];

    let undominated = match undominated_actions(problem) {
        Ok(u) => u,
        Err(Error::AffineValue) => {
            checks.push(Check::new(
                "efficient",
                Outcome::NotApplicable,
                "value function is affine; information has no value".into(),
            ));
            return Ok(VerifyReport { header, checks });
        }
        Err(e) => return Err(e),
    };

    // Efficient curve on [0, 0.8·cap].
    let cap = min_full_info_cost(problem, measure, &grid)?;
    let etas = linspace(0.8 * cap, config.curve_points);
    let w = efficient_curve(problem, measure, &etas, &grid)?;
    checks.push(binding_check(&w, cap));
    let concavity = check_concavity(&w, config.concavity_slack);
    checks.push(Check::new(
        "efficient-concavity",
        Outcome::from_bool(concavity.is_concave),
        format!(
            "worst midpoint violation {} over {} triples (slack {})",
            fmt_e(concavity.worst_violation),
            concavity.triples,
            fmt_e(config.concavity_slack)
        ),
    ));
    checks.push(strictness_check(
        &concavity,
        undominated.len(),
        measure.phi().is_strictly_convex(),
    ));
    checks.push(match marginal_value_at_zero(&w) {
        Some(m) => Check::new(
            "marginal-value-at-zero",
            Outcome::from_bool(m.slope > MIN_SLOPE),
            format!(
                "forward difference {} at eta {} (needs > {})",
                fmt_e(m.slope),
                fmt_e(m.eta1),
                fmt_e(MIN_SLOPE)
            ),
        ),
        None => Check::new(
            "marginal-value-at-zero",
            Outcome::NotApplicable,
            "fewer than two positive budgets".into(),
        ),
    });

    checks.push(flatness_check(spec, k)?);
    checks.extend(oracle_checks(spec)?);
    if spec.prior_set.is_some() {
        checks.extend(maxmin_checks(spec, config)?);
    }
    Ok(VerifyReport { header, checks })
}

fn binding_check(curve: &[CurvePoint], cap: f64) -> Check {
    let reports: Vec<_> = curve
        .iter()
        .map(|p| check_binding(p, Some(cap), default_binding_tol(p.eta)))
        .collect();
    let worst = reports
        .iter()
        .filter(|r| r.applicable)
        .map(|r| r.residual)
        .fold(0.0, f64::max);
    Check::new(
        "efficient-binding",
        Outcome::from_bool(reports.iter().all(|r| r.passed())),
        format!(
            "max |D(F*) - eta| {} over {} budgets in [0, {}] (tol 1e-6*max(1,eta)), cap {}",
            fmt_e(worst),
            reports.len(),
            fmt_e(curve.last().map_or(0.0, |p| p.eta)),
            fmt_e(cap)
        ),
    )
}

fn strictness_check(
    concavity: &crate::efficient::ConcavityReport,
    undominated: usize,
    strictly_convex_phi: bool,
) -> Check {
    let name = "efficient-strict-concavity";
    let (Some(min), Some(max)) = (concavity.strictness_margin, concavity.max_margin) else {
        return Check::new(name, Outcome::NotApplicable, "no midpoint triples".into());
    };
    if strictly_convex_phi {
        Check::new(
            name,
            Outcome::from_bool(min > STRICTNESS_MARGIN),
            format!(
                "smallest midpoint margin {} on all {} triples (needs > {})",
                fmt_e(min),
                concavity.triples,
                fmt_e(STRICTNESS_MARGIN)
            ),
        )
    } else if undominated == 2 {
        Check::new(
            name,
            Outcome::from_bool(max > STRICTNESS_MARGIN),
            format!(
                "largest midpoint margin {} with two undominated actions (needs > {})",
                fmt_e(max),
                fmt_e(STRICTNESS_MARGIN)
            ),
        )
    } else {
        Check::new(
            name,
            Outcome::NotApplicable,
            format!("{undominated} undominated actions and a linear transform"),
        )
    }
}

fn flatness_check(spec: &ProblemSpec, k: usize) -> Result<Check> {
    let problem = &spec.problem;
    let measure = &spec.measure;
    let name = "inefficient-flat-at-zero";
    let regions = match decision_regions(problem) {
        Ok(r) => r,
        Err(Error::Unsupported(msg)) => return Ok(Check::new(name, Outcome::NotApplicable, msg)),
        Err(e) => return Err(e),
    };
    let eta_hat = match flat_threshold(problem, measure, &regions) {
        Ok(t) => t,
        Err(Error::BoundaryPrior) => {
            return Ok(Check::new(
                name,
                Outcome::NotApplicable,
                "prior lies on a decision-region boundary".into(),
            ))
        }
        Err(Error::Unsupported(msg)) => return Ok(Check::new(name, Outcome::NotApplicable, msg)),
        Err(e) => return Err(e),
    };
    let loc = locate_region(&regions, problem.prior());
    let grid = PosteriorGrid::new(problem.n_states(), k, problem.prior())?
        .with_extra_points(regions[loc.region].vertices.iter().flatten());
    let etas = linspace(eta_hat, 5);
    let u = inefficient_curve(problem, measure, &etas, &grid)?;
    let report = check_flat_at_zero(&u, Some(eta_hat));
    let rise = match inefficient_value(problem, measure, 1.05 * eta_hat, &grid) {
        Ok(p) => Some(p.value - u[0].value),
        Err(Error::Infeasible { .. }) => None,
        Err(e) => return Err(e),
    };
    let rise_ok = rise.is_none_or(|r| r > 1e-6);
    Ok(Check::new(
        name,
        Outcome::from_bool(report.flat && rise_ok),
        format!(
            "flat threshold {}, max |U(eta) - U(0)| {} on {} budgets (tol 1e-7), rise at 1.05x {}",
            fmt_e(eta_hat),
            fmt_e(report.max_deviation),
            report.samples,
            rise.map_or("infeasible on grid".to_string(), fmt_e)
        ),
    ))
}

/// Simplex versus exhaustive enumeration on a coarse grid.
fn oracle_checks(spec: &ProblemSpec) -> Result<Vec<Check>> {
    let problem = &spec.problem;
    let measure = &spec.measure;
    let n = problem.n_states();
    let coarse = match n {
        2 => 40,
        3 => 7,
        _ => {
            return Ok(vec![Check::new(
                "oracle-equivalence",
                Outcome::NotApplicable,
                format!("enumeration oracle covers at most 3 states, problem has {n}"),
            )])
        }
    };
    let grid = PosteriorGrid::new(n, coarse, problem.prior())?;
    let cap = min_full_info_cost(problem, measure, &grid)?;
    let etas = [0.25 * cap, 0.5 * cap, 0.75 * cap];
    let mut worst_w: f64 = 0.0;
    let mut worst_u: f64 = 0.0;
    let mut mismatched_feasibility = 0;
    for &eta in &etas {
        let lp = crate::efficient::efficient_value(problem, measure, eta, &grid)?.value;
        worst_w = worst_w.max((lp - oracle_efficient(problem, measure, eta, &grid)?).abs());
        let lp = inefficient_value(problem, measure, eta, &grid);
        let or = oracle_inefficient(problem, measure, eta, &grid);
        match (lp, or) {
            (Ok(a), Ok(b)) => worst_u = worst_u.max((a.value - b).abs()),
            (Err(Error::Infeasible { .. }), Err(Error::Infeasible { .. })) => {}
            (Err(e), _) if !matches!(e, Error::Infeasible { .. }) => return Err(e),
            _ => mismatched_feasibility += 1,
        }
    }
    Ok(vec![
        Check::new(
            "oracle-equivalence-efficient",
            Outcome::from_bool(worst_w <= ORACLE_TOL),
            format!(
                "max |LP - enumeration| {} at 3 budgets on {} points (tol {})",
                fmt_e(worst_w),
                grid.len(),
                fmt_e(ORACLE_TOL)
            ),
        ),
        Check::new(
            "oracle-equivalence-inefficient",
            Outcome::from_bool(worst_u <= ORACLE_TOL && mismatched_feasibility == 0),
            format!(
                "max |LP - enumeration| {} at 3 budgets on {} points, {} feasibility mismatches (tol {})",
                fmt_e(worst_u),
                grid.len(),
                mismatched_feasibility,
                fmt_e(ORACLE_TOL)
            ),
        ),
    ])
}

fn maxmin_checks(spec: &ProblemSpec, config: &VerifyConfig) -> Result<Vec<Check>> {
    let problem = &spec.problem;
    let priors = spec.prior_set.as_ref().expect("caller checked");
    let measure = spec.maxmin_measure().expect("caller checked");
    let search = SearchConfig {
        signal_count: spec.signal_count,
        seed: config.seed,
        ..SearchConfig::default()
    };
    let full = channel_cost(&Channel::fully_informative(problem.n_states()), priors, &measure)?;
    let (curve, hi) = maxmin_below_cap(spec, &measure, &search, full, config.maxmin_points)?;
    let worst = curve
        .binding
        .iter()
        .map(|b| b.residual)
        .fold(0.0, f64::max);
    let mut checks = vec![
        Check::new(
            "maxmin-binding",
            Outcome::from_bool(curve.binding.iter().all(|b| b.passed())),
            format!(
                "max |C(pi*) - eta| {} over {} budgets in [0, {}] (tol {})",
                fmt_e(worst),
                curve.binding.len(),
                fmt_e(hi),
                fmt_e(MAXMIN_BINDING_TOL)
            ),
        ),
        Check::new(
            "maxmin-concavity",
            Outcome::from_bool(curve.concavity.is_concave),
            format!(
                "worst midpoint violation {} over {} triples (slack {})",
                fmt_e(curve.concavity.worst_violation),
                curve.concavity.triples,
                fmt_e(crate::maxmin::MAXMIN_CONCAVITY_SLACK)
            ),
        ),
    ];
    let signals = spec.signal_count.unwrap_or(problem.n_actions());
    if problem.n_states() == 2 && signals == 2 {
        let table = MaxminOracle::new(problem, priors, &measure, MAXMIN_ORACLE_STEP)?;
        let mut gap: f64 = 0.0;
        for p in &curve.points {
            gap = gap.max((p.point.value - table.best(p.point.eta)?).abs());
        }
        checks.push(Check::new(
            "oracle-equivalence-maxmin",
            Outcome::from_bool(gap <= MAXMIN_ORACLE_TOL),
            format!(
                "max |search - channel grid| {} (step {}, tol {})",
                fmt_e(gap),
                MAXMIN_ORACLE_STEP,
                fmt_e(MAXMIN_ORACLE_TOL)
            ),
        ));
    } else {
        checks.push(Check::new(
            "oracle-equivalence-maxmin",
            Outcome::NotApplicable,
            "channel-grid oracle covers two states and two signals".into(),
        ));
    }
    Ok(checks)
}

/// Max-min curve on `[0, 0.8 · C(full)]`, shrinking the range while the
/// search reports that the full-information value is already attained.
fn maxmin_below_cap(
    spec: &ProblemSpec,
    measure: &crate::model::InformationMeasure,
    search: &SearchConfig,
    full_cost: f64,
    points: usize,
) -> Result<(MaxminCurve, f64)> {
    let priors = spec.prior_set.as_ref().expect("caller checked");
    let mut hi = 0.8 * full_cost;
    for _ in 0..8 {
        match maxmin_curve(&spec.problem, priors, measure, &linspace(hi, points), search) {
            Ok(curve) => return Ok((curve, hi)),
            Err(Error::MaxminCap { .. }) => hi *= 0.7,
            Err(e) => return Err(e),
        }
    }
    Err(Error::MaxminCap {
        eta: hi,
        value: f64::NAN,
    })
}
