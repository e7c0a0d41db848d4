//! The value function `V(x) = max_a E_x u(a, θ)`, undominated actions and
//! the partition of the simplex into decision regions.
//!
//! Each undominated action `i` owns the polytope
//! `C_i = {x ∈ Δ : E_x(u_i − u_j) ≥ 0 for every undominated j}`, on which
//! `V` is affine. For a prior strictly inside some `C_i`, any
//! Bayes-plausible distribution supported on `C_i` leaves the decision
//! value unchanged; [`flat_threshold`] computes the largest amount of
//! information such a distribution can carry.

use crate::error::{Error, Result};
use crate::linalg::solve_consistent;
use crate::lp::{solve_lp, LinearProgram};
use crate::model::{Belief, DecisionProblem, InformationMeasure, ARITH_TOL, FEAS_TOL};

/// Largest state count handled by vertex enumeration.
pub const MAX_ENUMERATION_STATES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct ValueAt {
    pub value: f64,
    /// Every action within [`FEAS_TOL`] of the maximum, ascending.
    pub argmax: Vec<usize>,
}

/// `{x : normal·x ≥ offset}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRegion {
    pub action: usize,
    /// Optimality of `action` against every other undominated action. The
    /// simplex constraints are implicit.
    pub halfspaces: Vec<Halfspace>,
    /// Extreme points sorted lexicographically; `None` when the state count
    /// exceeds [`MAX_ENUMERATION_STATES`].
    pub vertices: Option<Vec<Belief>>,
}

impl DecisionRegion {
    /// Smallest halfspace slack at `x`; nonnegative iff `x` lies in the
    /// region (given `x` is in the simplex).
    pub fn min_slack(&self, x: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.slack(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Vertex average, an interior point of a full-dimensional region.
    pub fn centroid(&self) -> Option<Belief> {
        let vertices = self.vertices.as_ref()?;
        let n = vertices.first()?.dim();
        let mut c = vec![0.0; n];
        for v in vertices {
            for (ci, vi) in c.iter_mut().zip(v.as_slice()) {
                *ci += vi;
            }
        }
        Belief::normalized(c).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionLocation {
    /// Index into the region list.
    pub region: usize,
    pub on_boundary: bool,
}

pub fn value_function(problem: &DecisionProblem, x: &Belief) -> Result<ValueAt> {
    x.ensure_dim(problem.n_states())?;
    let payoffs: Vec<f64> = (0..problem.n_actions())
        .map(|a| problem.expected_payoff(a, x.as_slice()))
        .collect();
    let value = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax = payoffs
        .iter()
        .enumerate()
        .filter(|(_, p)| value - **p <= FEAS_TOL)
        .map(|(a, _)| a)
        .collect();
    Ok(ValueAt { value, argmax })
}

pub(crate) fn value_raw(problem: &DecisionProblem, x: &[f64]) -> f64 {
    (0..problem.n_actions())
        .map(|a| problem.expected_payoff(a, x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest `δ` such that action `i` beats every distinct action by at least
/// `δ` at some belief. Infinite when no other action has distinct payoffs.
pub fn strict_optimality_margin(problem: &DecisionProblem, i: usize) -> Result<f64> {
    let n = problem.n_states();
    let u = problem.utility();
    // Variables: x (n), δ⁺, δ⁻.
    let mut objective = vec![0.0; n + 2];
    objective[n] = 1.0;
    objective[n + 1] = -1.0;
    let mut simplex_row = vec![1.0; n + 2];
    simplex_row[n] = 0.0;
    simplex_row[n + 1] = 0.0;
    let mut lp = LinearProgram::maximize(objective).eq(simplex_row, 1.0);
    let mut rows = 0;
    for (j, uj) in u.iter().enumerate() {
        if j == i || uj == &u[i] {
            continue;
        }
        let mut row: Vec<f64> = uj.iter().zip(&u[i]).map(|(a, b)| a - b).collect();
        row.push(1.0);
        row.push(-1.0);
        lp = lp.ub(row, 0.0);
        rows += 1;
    }
    if rows == 0 {
        return Ok(f64::INFINITY);
    }
    let sol = solve_lp(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::Solver(format!(
            "optimality-margin program ended with {:?}",
            sol.status
        )));
    }
    Ok(sol.objective_value)
}

/// Actions strictly optimal at some belief, ascending. Of several actions
/// with identical payoffs only the first can qualify.
pub fn undominated_actions(problem: &DecisionProblem) -> Result<Vec<usize>> {
    let u = problem.utility();
    let mut out = Vec::new();
    for i in 0..problem.n_actions() {
        if u[..i].iter().any(|row| row == &u[i]) {
            continue;
        }
        if strict_optimality_margin(problem, i)? > FEAS_TOL {
            out.push(i);
        }
    }
    if out.len() < 2 {
        return Err(Error::AffineValue);
    }
    Ok(out)
}

/// One region per undominated action, in ascending action order.
pub fn decision_regions(problem: &DecisionProblem) -> Result<Vec<DecisionRegion>> {
    let actions = undominated_actions(problem)?;
    let n = problem.n_states();
    let u = problem.utility();
    let regions = actions
        .iter()
        .map(|&i| {
            let halfspaces: Vec<Halfspace> = actions
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| Halfspace {
                    normal: u[i].iter().zip(&u[j]).map(|(a, b)| a - b).collect(),
                    offset: 0.0,
                })
                .collect();
            let vertices = (n <= MAX_ENUMERATION_STATES).then(|| enumerate_vertices(n, &halfspaces));
            DecisionRegion {
                action: i,
                halfspaces,
                vertices,
            }
        })
        .collect();
    Ok(regions)
}

/// Extreme points of `{x ∈ Δ : h(x) ≥ 0 ∀ h}` by solving every system that
/// makes `n − 1` constraints tight together with `Σ x = 1`.
fn enumerate_vertices(n: usize, halfspaces: &[Halfspace]) -> Vec<Belief> {
    // Constraint list: region halfspaces, then facets x_θ ≥ 0.
    let mut constraints: Vec<(Vec<f64>, f64)> = halfspaces
        .iter()
        .map(|h| (h.normal.clone(), h.offset))
        .collect();
    for s in 0..n {
        let mut e = vec![0.0; n];
        e[s] = 1.0;
        constraints.push((e, 0.0));
    }
    let k = n - 1;
    let total = constraints.len();
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > total {
        return Vec::new();
    }
    loop {
        let mut rows: Vec<Vec<f64>> = idx
            .iter()
            .map(|&c| {
                let (a, b) = &constraints[c];
                let mut row = a.clone();
                row.push(*b);
                row
            })
            .collect();
        let mut sum_row = vec![1.0; n];
        sum_row.push(1.0);
        rows.push(sum_row);
        if let Some(x) = solve_consistent(&rows, n, 1e-10) {
            let feasible = x.iter().all(|&v| v >= -FEAS_TOL)
                && halfspaces
                    .iter()
                    .all(|h| h.slack(&x) >= -FEAS_TOL * h.normal.iter().map(|v| v.abs()).fold(1.0, f64::max));
            if feasible && !found.iter().any(|f| max_abs_diff(f, &x) <= 1e-8) {
                found.push(x);
            }
        }
        // Next k-combination of `total`.
        let mut i = k;
        loop {
            if i == 0 {
                return finish_vertices(found);
            }
            i -= 1;
            if idx[i] < total - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn finish_vertices(mut found: Vec<Vec<f64>>) -> Vec<Belief> {
    found.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    found
        .into_iter()
        .filter_map(|v| Belief::normalized(v).ok())
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// The first region containing `x`, with a flag for lying on an
/// inter-region boundary. Falls back to the least-violated region when
/// round-off puts `x` just outside every region.
pub fn locate_region(regions: &[DecisionRegion], x: &Belief) -> RegionLocation {
    assert!(!regions.is_empty(), "locate_region needs at least one region");
    let slacks: Vec<f64> = regions.iter().map(|r| r.min_slack(x.as_slice())).collect();
    let region = slacks
        .iter()
        .position(|&s| s >= -FEAS_TOL)
        .unwrap_or_else(|| {
            (0..slacks.len())
                .max_by(|&a, &b| slacks[a].total_cmp(&slacks[b]).then(b.cmp(&a)))
                .unwrap()
        });
    RegionLocation {
        region,
        on_boundary: slacks[region].abs() <= FEAS_TOL,
    }
}

/// Moves `x` toward the centroid of its region until it is off every
/// boundary. Returns `x` unchanged when it is already interior.
pub fn relocate_to_interior(regions: &[DecisionRegion], x: &Belief) -> Option<Belief> {
    let loc = locate_region(regions, x);
    if !loc.on_boundary {
        return Some(x.clone());
    }
    let centroid = regions[loc.region].centroid()?;
    let mut t = 0.5;
    for _ in 0..60 {
        let y: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(centroid.as_slice())
            .map(|(a, c)| (1.0 - t) * a + t * c)
            .collect();
        let y = Belief::normalized(y).ok()?;
        let l = locate_region(regions, &y);
        if !l.on_boundary && l.region == loc.region && y.is_interior() {
            return Some(y);
        }
        t = 0.5 * (1.0 + t);
    }
    None
}

/// Largest amount of information carried by a Bayes-plausible distribution
/// supported on the prior's decision region.
///
/// Solved as a program over weights on the region's vertices: maximize the
/// expected divergence subject to the weights averaging to the prior. Since
/// the divergence is convex, vertex-supported distributions attain the
/// maximum over all distributions supported on the region.
pub fn flat_threshold(
    problem: &DecisionProblem,
    measure: &InformationMeasure,
    regions: &[DecisionRegion],
) -> Result<f64> {
    let prior = problem.prior();
    if measure.reference().max_abs_diff(prior) > ARITH_TOL {
        return Err(Error::InvalidMeasure(
            "flat threshold needs the measure anchored at the prior".into(),
        ));
    }
    let loc = locate_region(regions, prior);
    if loc.on_boundary {
        return Err(Error::BoundaryPrior);
    }
    let vertices = regions[loc.region].vertices.as_ref().ok_or_else(|| {
        Error::Unsupported(format!(
            "vertex enumeration supports at most {MAX_ENUMERATION_STATES} states"
        ))
    })?;
    let costs = vertices
        .iter()
        .map(|v| measure.divergence(v))
        .collect::<Result<Vec<f64>>>()?;
    let n = problem.n_states();
    let mut lp = LinearProgram::maximize(costs).eq(vec![1.0; vertices.len()], 1.0);
    for s in 0..n - 1 {
        lp = lp.eq(vertices.iter().map(|v| v[s]).collect(), prior[s]);
    }
    let sol = solve_lp(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::Solver(format!(
            "flat-threshold program ended with {:?}",
            sol.status
        )));
    }
    Ok(measure.phi_apply(sol.objective_value.max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DivergenceKind, Phi};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b(v: &[f64]) -> Belief {
        Belief::new(v.to_vec()).unwrap()
    }

    fn identity2(prior: &[f64]) -> DecisionProblem {
        DecisionProblem::from_utility(vec![vec![1.0, 0.0], vec![0.0, 1.0]], b(prior)).unwrap()
    }

    fn three_action(u3: f64) -> DecisionProblem {
        DecisionProblem::from_utility(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![u3, u3]],
            b(&[0.5, 0.5]),
        )
        .unwrap()
    }

    fn identity3() -> DecisionProblem {
        DecisionProblem::from_utility(
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            Belief::uniform(3),
        )
        .unwrap()
    }

    fn random_belief(rng: &mut ChaCha8Rng, n: usize) -> Belief {
        let w: Vec<f64> = (0..n).map(|_| -rng.gen_range(1e-12f64..1.0).ln()).collect();
        Belief::normalized(w).unwrap()
    }

    #[test]
    fn value_function_examples() {
        let p = identity2(&[0.5, 0.5]);
        let v = value_function(&p, &b(&[0.7, 0.3])).unwrap();
        assert!((v.value - 0.7).abs() < ARITH_TOL);
        assert_eq!(v.argmax, vec![0]);
        let v = value_function(&p, &b(&[0.0, 1.0])).unwrap();
        assert_eq!(v.value, 1.0);

        let p = three_action(0.6);
        let v = value_function(&p, &b(&[0.5, 0.5])).unwrap();
        assert!((v.value - 0.6).abs() < ARITH_TOL);
        assert_eq!(v.argmax, vec![2]);

        let tie = value_function(&identity2(&[0.5, 0.5]), &b(&[0.5, 0.5])).unwrap();
        assert_eq!(tie.argmax, vec![0, 1]);
        assert!(value_function(&p, &Belief::uniform(3)).is_err());
    }

    #[test]
    fn undominated_examples() {
        assert_eq!(undominated_actions(&identity2(&[0.5, 0.5])).unwrap(), vec![0, 1]);
        // a3 wins at (0.5, 0.5) by 0.1, the largest margin it attains.
        assert!((strict_optimality_margin(&three_action(0.6), 2).unwrap() - 0.1).abs() < 1e-9);
        assert_eq!(undominated_actions(&three_action(0.6)).unwrap(), vec![0, 1, 2]);
        // 0.4 < max(x, 1 − x) everywhere; best margin is −0.1 at the midpoint.
        assert!((strict_optimality_margin(&three_action(0.4), 2).unwrap() + 0.1).abs() < 1e-9);
        assert_eq!(undominated_actions(&three_action(0.4)).unwrap(), vec![0, 1]);
    }

    #[test]
    fn duplicate_and_affine_problems() {
        let dup = DecisionProblem::from_utility(
            vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            b(&[0.5, 0.5]),
        )
        .unwrap();
        assert_eq!(undominated_actions(&dup).unwrap(), vec![0, 2]);
        let affine = DecisionProblem::from_utility(
            vec![vec![1.0, 1.0], vec![0.0, 0.0]],
            b(&[0.5, 0.5]),
        )
        .unwrap();
        assert_eq!(undominated_actions(&affine), Err(Error::AffineValue));
    }

    #[test]
    fn regions_of_identity_2x2() {
        let regions = decision_regions(&identity2(&[0.5, 0.5])).unwrap();
        assert_eq!(regions.len(), 2);
        assert_eq!(
            regions[0].vertices.as_ref().unwrap(),
            &vec![b(&[0.5, 0.5]), b(&[1.0, 0.0])]
        );
        assert_eq!(
            regions[1].vertices.as_ref().unwrap(),
            &vec![b(&[0.0, 1.0]), b(&[0.5, 0.5])]
        );
    }

    #[test]
    fn regions_of_three_action_problem() {
        let regions = decision_regions(&three_action(0.6)).unwrap();
        let v: Vec<Vec<f64>> = regions
            .iter()
            .map(|r| r.vertices.as_ref().unwrap().iter().map(|x| x[1]).collect())
            .collect();
        // Coordinates are x(θ2), listed in lexicographic order of x(θ1).
        let close = |a: &[f64], e: &[f64]| a.iter().zip(e).all(|(x, y)| (x - y).abs() < 1e-12);
        assert!(close(&v[0], &[0.4, 0.0]));
        assert!(close(&v[1], &[1.0, 0.6]));
        assert!(close(&v[2], &[0.6, 0.4]));
    }

    #[test]
    fn regions_of_identity_3x3_meet_at_barycenter() {
        let regions = decision_regions(&identity3()).unwrap();
        assert_eq!(regions.len(), 3);
        let bary = Belief::uniform(3);
        for r in &regions {
            let verts = r.vertices.as_ref().unwrap();
            assert_eq!(verts.len(), 4, "quadrilateral cell");
            assert!(verts.iter().any(|v| v.max_abs_diff(&bary) < 1e-12));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x = random_belief(&mut rng, 3);
            assert!(regions.iter().any(|r| r.min_slack(x.as_slice()) >= -FEAS_TOL));
        }
    }

    #[test]
    fn locate_examples() {
        let regions = decision_regions(&identity2(&[0.5, 0.5])).unwrap();
        assert_eq!(
            locate_region(&regions, &b(&[0.75, 0.25])),
            RegionLocation { region: 0, on_boundary: false }
        );
        assert!(locate_region(&regions, &b(&[0.5, 0.5])).on_boundary);
        let regions = decision_regions(&three_action(0.6)).unwrap();
        let loc = locate_region(&regions, &b(&[0.5, 0.5]));
        assert_eq!(regions[loc.region].action, 2);
        assert!(!loc.on_boundary);
    }

    #[test]
    fn flat_threshold_examples() {
        let m = |mu: &[f64]| {
            InformationMeasure::new(DivergenceKind::Quadratic, Phi::Identity, b(mu)).unwrap()
        };
        let regions = decision_regions(&identity2(&[0.5, 0.5])).unwrap();
        let eta = flat_threshold(&identity2(&[0.25, 0.75]), &m(&[0.25, 0.75]), &regions).unwrap();
        assert!((eta - 0.125).abs() < 1e-9);
        // Weights (0.2, 0.8) on (0.5,0.5) and (0,1): 0.2·0.32 + 0.8·0.02.
        let eta = flat_threshold(&identity2(&[0.1, 0.9]), &m(&[0.1, 0.9]), &regions).unwrap();
        assert!((eta - 0.08).abs() < 1e-9);
        assert_eq!(
            flat_threshold(&identity2(&[0.5, 0.5]), &m(&[0.5, 0.5]), &regions),
            Err(Error::BoundaryPrior)
        );
    }

    #[test]
    fn no_vertices_beyond_four_states() {
        let u: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..5).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let p = DecisionProblem::from_utility(u, Belief::uniform(5)).unwrap();
        let regions = decision_regions(&p).unwrap();
        assert!(regions.iter().all(|r| r.vertices.is_none() && r.halfspaces.len() == 4));
        let mu = Belief::new(vec![0.6, 0.1, 0.1, 0.1, 0.1]).unwrap();
        let p = p.with_prior(mu.clone()).unwrap();
        let m = InformationMeasure::new(DivergenceKind::Quadratic, Phi::Identity, mu).unwrap();
        assert!(matches!(flat_threshold(&p, &m, &regions), Err(Error::Unsupported(_))));
    }

    fn random_problem(rng: &mut ChaCha8Rng) -> DecisionProblem {
        loop {
            let n = rng.gen_range(2..=4);
            let a = rng.gen_range(2..=5);
            let u = (0..a)
                .map(|_| (0..n).map(|_| rng.gen_range(0.0..1.0)).collect())
                .collect();
            let p = DecisionProblem::from_utility(u, Belief::uniform(n)).unwrap();
            if undominated_actions(&p).is_ok() {
                return p;
            }
        }
    }

    #[test]
    fn value_function_is_upper_envelope_of_region_pieces() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let p = random_problem(&mut rng);
            let regions = decision_regions(&p).unwrap();
            for _ in 0..100 {
                let x = random_belief(&mut rng, p.n_states());
                let v = value_function(&p, &x).unwrap().value;
                let envelope = regions
                    .iter()
                    .map(|r| p.expected_payoff(r.action, x.as_slice()))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!((v - envelope).abs() < 1e-10);
                let loc = locate_region(&regions, &x);
                assert!(regions[loc.region].min_slack(x.as_slice()) >= -FEAS_TOL);
            }
            for r in &regions {
                for vert in r.vertices.as_ref().unwrap() {
                    let v = value_function(&p, vert).unwrap().value;
                    assert!((v - p.expected_payoff(r.action, vert.as_slice())).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn flat_threshold_positive_at_interior_priors() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let p = random_problem(&mut rng);
            let regions = decision_regions(&p).unwrap();
            let x = random_belief(&mut rng, p.n_states());
            let Some(mu) = relocate_to_interior(&regions, &x) else { continue };
            let p = p.with_prior(mu.clone()).unwrap();
            let m = InformationMeasure::new(DivergenceKind::Kl, Phi::Identity, mu).unwrap();
            assert!(flat_threshold(&p, &m, &regions).unwrap() > 0.0);
        }
    }
}
