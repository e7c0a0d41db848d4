//! Max-min decision makers facing a convex set of priors.
//!
//! An experiment is a row-stochastic channel `π(s | θ)`. Its value is
//! `T(π) = max_σ min_{μ ∈ M} Σ_θ μ(θ) Σ_s π(s|θ) Σ_a σ(a|s) u(a, θ)`; the
//! inner objective is linear in `μ`, so the minimum over the polytope `M` is
//! attained at one of its vertices and `T` is a single linear program. Its
//! amount of information is the amount of the distribution over posteriors
//! it induces at a fixed reference prior `μ̃`.
//!
//! `W̄(η) = max { T(π) : C(π) ≤ η }` is not convex in `π`; [`maxmin_voi`]
//! runs a seeded multistart pattern search over channels on a fixed
//! alphabet.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::efficient::{
    check_binding, check_concavity, validate_curve_etas, BindingReport, ConcavityReport,
};
use crate::error::{Error, Result};
use crate::grid::CurvePoint;
use crate::lp::{solve_lp, LinearProgram};
use crate::model::{
    Belief, DecisionProblem, InformationMeasure, PosteriorDistribution, ARITH_TOL, OPT_TOL,
};

/// Binding tolerance for heuristic max-min solutions.
pub const MAXMIN_BINDING_TOL: f64 = 1e-3;
/// Midpoint-concavity slack for heuristic max-min curves.
pub const MAXMIN_CONCAVITY_SLACK: f64 = 5e-3;

/// Row-stochastic experiment: rows are states, columns are signals.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    matrix: Vec<Vec<f64>>,
    signal_labels: Vec<String>,
}

impl Channel {
    pub fn new(matrix: Vec<Vec<f64>>, signal_labels: Vec<String>) -> Result<Self> {
        let k = signal_labels.len();
        if matrix.is_empty() || k == 0 {
            return Err(Error::InvalidChannel("need at least one state and one signal".into()));
        }
        for (s, row) in matrix.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidChannel(format!(
                    "row {s} has {} entries for {k} signals",
                    row.len()
                )));
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidChannel(format!("row {s} has a negative entry")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > ARITH_TOL {
                return Err(Error::InvalidChannel(format!("row {s} sums to {total}")));
            }
        }
        Ok(Self {
            matrix,
            signal_labels,
        })
    }

    /// Labels `sig1..sigk`.
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let k = matrix.first().map_or(0, Vec::len);
        Self::new(matrix, (1..=k).map(|i| format!("sig{i}")).collect())
    }

    /// Identical uniform rows.
    pub fn uninformative(n_states: usize, n_signals: usize) -> Self {
        Self::from_matrix(vec![vec![1.0 / n_signals as f64; n_signals]; n_states])
            .expect("uniform rows are stochastic")
    }

    /// Signal `θ` in state `θ`.
    pub fn fully_informative(n_states: usize) -> Self {
        let m = (0..n_states)
            .map(|i| (0..n_states).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_matrix(m).expect("identity is stochastic")
    }

    pub fn n_states(&self) -> usize {
        self.matrix.len()
    }

    pub fn n_signals(&self) -> usize {
        self.signal_labels.len()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn signal_labels(&self) -> &[String] {
        &self.signal_labels
    }

    /// Rows renormalized after arithmetic; fails on negative entries.
    fn from_raw(mut matrix: Vec<Vec<f64>>, signal_labels: Vec<String>) -> Result<Self> {
        for row in matrix.iter_mut() {
            for p in row.iter_mut() {
                if *p < 0.0 && *p > -1e-12 {
                    *p = 0.0;
                }
            }
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= total);
        }
        Self::new(matrix, signal_labels)
    }

    /// `(1 − t)·base + t·self`, entrywise.
    fn toward(&self, base: &Channel, t: f64) -> Channel {
        let m = self
            .matrix
            .iter()
            .zip(&base.matrix)
            .map(|(r, b)| r.iter().zip(b).map(|(x, y)| (1.0 - t) * y + t * x).collect())
            .collect();
        Channel::from_raw(m, self.signal_labels.clone()).unwrap_or_else(|_| base.clone())
    }
}

/// Vertices whose convex hull is the prior set `M`, and the reference prior
/// `μ̃` at which channels are priced.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSet {
    vertices: Vec<Belief>,
    reference: Belief,
}

impl PriorSet {
    pub fn new(vertices: Vec<Belief>, reference: Belief) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidProblem("prior set needs at least one vertex".into()));
        }
        let n = reference.dim();
        for v in &vertices {
            v.ensure_dim(n)?;
        }
        if !reference.is_interior() {
            return Err(Error::InvalidProblem(
                "reference prior must be strictly positive".into(),
            ));
        }
        Ok(Self {
            vertices,
            reference,
        })
    }

    /// `M = {μ}` priced at `μ`.
    pub fn singleton(mu: Belief) -> Result<Self> {
        Self::new(vec![mu.clone()], mu)
    }

    pub fn vertices(&self) -> &[Belief] {
        &self.vertices
    }

    pub fn reference(&self) -> &Belief {
        &self.reference
    }
}

/// Signal-contingent mixed actions: rows are signals, columns are actions.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    matrix: Vec<Vec<f64>>,
}

impl Strategy {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        for (s, row) in matrix.iter().enumerate() {
            let total: f64 = row.iter().sum();
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidChannel(format!(
                    "strategy row {s} is not a distribution"
                )));
            }
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }
}

/// The distribution over posteriors induced by prior `mu` and channel `pi`.
/// Signals with probability at most `1e-15` are dropped.
pub fn bayes_map(mu: &Belief, pi: &Channel) -> Result<PosteriorDistribution> {
    mu.ensure_dim(pi.n_states())?;
    let mut support = Vec::new();
    let mut probs = Vec::new();
    for s in 0..pi.n_signals() {
        let joint: Vec<f64> = (0..pi.n_states()).map(|t| mu[t] * pi.matrix[t][s]).collect();
        let p: f64 = joint.iter().sum();
        if p <= 1e-15 {
            continue;
        }
        support.push(Belief::normalized(joint)?);
        probs.push(p);
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    PosteriorDistribution::new(support, probs)
}

fn check_reference(priors: &PriorSet, measure: &InformationMeasure) -> Result<()> {
    if measure.reference().max_abs_diff(priors.reference()) > ARITH_TOL {
        return Err(Error::InvalidMeasure(
            "the measure must be anchored at the reference prior".into(),
        ));
    }
    Ok(())
}

/// Expected divergence of the posteriors `π` induces at the reference prior,
/// before `φ`.
pub fn channel_inner_cost(pi: &Channel, measure: &InformationMeasure) -> Result<f64> {
    measure.inner_amount(&bayes_map(measure.reference(), pi)?)
}

/// Amount of information `C(π)`.
pub fn channel_cost(pi: &Channel, priors: &PriorSet, measure: &InformationMeasure) -> Result<f64> {
    check_reference(priors, measure)?;
    Ok(measure.phi_apply(channel_inner_cost(pi, measure)?.max(0.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxminValue {
    pub value: f64,
    pub strategy: Strategy,
    /// Vertex of `M` minimizing the payoff under `strategy`, lowest index on
    /// ties.
    pub worst_vertex: usize,
}

/// `T(π)` by linear programming over `σ` and the guaranteed payoff `t`.
pub fn maxmin_value(
    problem: &DecisionProblem,
    priors: &PriorSet,
    pi: &Channel,
) -> Result<MaxminValue> {
    let n = problem.n_states();
    if pi.n_states() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: pi.n_states(),
        });
    }
    let n_sig = pi.n_signals();
    let n_act = problem.n_actions();
    let u = problem.utility();
    let nv = n_sig * n_act;
    // payoff[k][s·A + a] = Σ_θ μ_k(θ) π(s|θ) u(a, θ)
    let payoff: Vec<Vec<f64>> = priors
        .vertices()
        .iter()
        .map(|mu| {
            mu.ensure_dim(n)?;
            let mut row = vec![0.0; nv];
            for s in 0..n_sig {
                for a in 0..n_act {
                    row[s * n_act + a] = (0..n).map(|t| mu[t] * pi.matrix[t][s] * u[a][t]).sum();
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut objective = vec![0.0; nv + 2];
    objective[nv] = 1.0;
    objective[nv + 1] = -1.0;
    let mut lp = LinearProgram::maximize(objective);
    for s in 0..n_sig {
        let mut row = vec![0.0; nv + 2];
        row[s * n_act..(s + 1) * n_act].iter_mut().for_each(|v| *v = 1.0);
        lp = lp.eq(row, 1.0);
    }
    for w in &payoff {
        let mut row: Vec<f64> = w.iter().map(|v| -v).collect();
        row.push(1.0);
        row.push(-1.0);
        lp = lp.ub(row, 0.0);
    }
    let sol = solve_lp(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::Solver(format!("max-min program ended with {:?}", sol.status)));
    }
    let strategy = Strategy::new(
        (0..n_sig)
            .map(|s| {
                let row = &sol.values[s * n_act..(s + 1) * n_act];
                let total: f64 = row.iter().sum();
                row.iter().map(|v| v / total).collect()
            })
            .collect(),
    )?;
    let sigma: Vec<f64> = strategy.matrix.concat();
    let guaranteed: Vec<f64> = payoff
        .iter()
        .map(|w| w.iter().zip(&sigma).map(|(a, b)| a * b).sum())
        .collect();
    let min = guaranteed.iter().copied().fold(f64::INFINITY, f64::min);
    let worst_vertex = guaranteed.iter().position(|&g| g <= min + 1e-9).unwrap_or(0);
    Ok(MaxminValue {
        value: sol.objective_value,
        strategy,
        worst_vertex,
    })
}

/// The experiment that runs `pi1` with probability `lambda` and `pi2`
/// otherwise, revealing which one ran: the alphabet is the disjoint union
/// of both alphabets.
pub fn mix_channels(pi1: &Channel, pi2: &Channel, lambda: f64) -> Result<Channel> {
    if pi1.n_states() != pi2.n_states() {
        return Err(Error::DimensionMismatch {
            expected: pi1.n_states(),
            found: pi2.n_states(),
        });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidChannel(format!("mixing weight {lambda} outside [0, 1]")));
    }
    let matrix = pi1
        .matrix
        .iter()
        .zip(&pi2.matrix)
        .map(|(r1, r2)| {
            r1.iter()
                .map(|p| lambda * p)
                .chain(r2.iter().map(|p| (1.0 - lambda) * p))
                .collect()
        })
        .collect();
    let labels = pi1
        .signal_labels
        .iter()
        .map(|l| format!("1:{l}"))
        .chain(pi2.signal_labels.iter().map(|l| format!("2:{l}")))
        .collect();
    Channel::from_raw(matrix, labels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Alphabet size; defaults to the number of actions.
    pub signal_count: Option<usize>,
    pub starts: usize,
    pub seed: u64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_sweeps: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            signal_count: None,
            starts: 32,
            seed: 0,
            initial_step: 0.25,
            min_step: 1e-5,
            max_sweeps: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxminSolution {
    pub value: f64,
    pub channel: Channel,
    pub strategy: Strategy,
    pub realized_cost: f64,
}

/// Search state shared by one multistart branch.
struct Search<'a> {
    problem: &'a DecisionProblem,
    priors: &'a PriorSet,
    measure: &'a InformationMeasure,
    inner_budget: f64,
    base: Channel,
}

impl Search<'_> {
    fn inner_cost(&self, pi: &Channel) -> f64 {
        channel_inner_cost(pi, self.measure).unwrap_or(f64::INFINITY)
    }

    fn value(&self, pi: &Channel) -> Result<f64> {
        Ok(maxmin_value(self.problem, self.priors, pi)?.value)
    }

    /// Largest `t ∈ [lo, hi]` with the cost of `base + t(pi − base)` within
    /// budget, assuming the cost at `lo` is feasible. Cost is monotone in
    /// `t` because the segment is a garbling path.
    fn bisect(&self, pi: &Channel, mut lo: f64, mut hi: f64) -> Channel {
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.inner_cost(&pi.toward(&self.base, mid)) <= self.inner_budget {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        pi.toward(&self.base, lo)
    }

    /// Pulls an over-budget channel back toward the uninformative one.
    fn project(&self, pi: Channel) -> Channel {
        if self.inner_cost(&pi) <= self.inner_budget {
            pi
        } else {
            self.bisect(&pi, 0.0, 1.0)
        }
    }

    /// Pushes an under-budget channel away from the uninformative one, as far
    /// as stochasticity and the budget allow.
    fn extend(&self, pi: &Channel) -> Option<Channel> {
        let mut t_max = f64::INFINITY;
        for (row, base) in pi.matrix.iter().zip(&self.base.matrix) {
            for (p, b) in row.iter().zip(base) {
                if p < b {
                    t_max = t_max.min(b / (b - p));
                }
            }
        }
        if !t_max.is_finite() || t_max <= 1.0 + 1e-12 {
            return None;
        }
        let far = pi.toward(&self.base, t_max);
        if self.inner_cost(&far) <= self.inner_budget {
            return Some(far);
        }
        // Reparametrize so that t = 1 is `far`, then bisect from `pi`.
        let lo = 1.0 / t_max;
        Some(self.bisect(&far, lo, 1.0))
    }

    fn run(&self, start: Channel, step0: f64, min_step: f64, max_sweeps: usize) -> Result<(f64, Channel)> {
        let mut pi = self.project(start);
        let mut best = self.value(&pi)?;
        let n = pi.n_states();
        let k = pi.n_signals();
        let mut step = step0;
        let mut sweeps = 0;
        while step >= min_step && sweeps < max_sweeps {
            sweeps += 1;
            let mut improved = false;
            if let Some(ext) = self.extend(&pi) {
                let v = self.value(&ext)?;
                if v >= best - 1e-12 {
                    improved = v > best + 1e-12;
                    best = best.max(v);
                    pi = ext;
                }
            }
            for t in 0..n {
                for to in 0..k {
                    for from in 0..k {
                        if from == to {
                            continue;
                        }
                        let amount = step.min(pi.matrix[t][from]);
                        if amount <= 0.0 {
                            continue;
                        }
                        let mut m = pi.matrix.clone();
                        m[t][from] -= amount;
                        m[t][to] += amount;
                        let Ok(candidate) = Channel::from_raw(m, pi.signal_labels.clone()) else {
                            continue;
                        };
                        let candidate = self.project(candidate);
                        let v = self.value(&candidate)?;
                        if v > best + 1e-12 {
                            best = v;
                            pi = candidate;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        Ok((best, pi))
    }
}

fn random_channel(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Channel {
    let m = (0..n)
        .map(|_| {
            let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let total: f64 = w.iter().sum();
            w.into_iter().map(|x| x / total).collect()
        })
        .collect();
    Channel::from_raw(m, (1..=k).map(|i| format!("sig{i}")).collect())
        .expect("dirichlet rows are stochastic")
}

/// Max-min value of information `W̄(η)` by multistart pattern search.
///
/// Fails with [`Error::MaxminCap`] when the best channel found already
/// attains the full-information value, which means `η` is not below the
/// admissible cap.
pub fn maxmin_voi(
    problem: &DecisionProblem,
    priors: &PriorSet,
    measure: &InformationMeasure,
    eta: f64,
    config: &SearchConfig,
) -> Result<MaxminSolution> {
    check_reference(priors, measure)?;
    let n = problem.n_states();
    let k = config.signal_count.unwrap_or(problem.n_actions()).max(1);
    let inner_budget = measure.phi_inverse(eta)?;
    let search = Search {
        problem,
        priors,
        measure,
        inner_budget,
        base: Channel::uninformative(n, k),
    };

    let (value, channel) = if inner_budget <= 0.0 {
        let base = search.base.clone();
        (search.value(&base)?, base)
    } else {
        let results: Vec<Result<(f64, Channel)>> = (0..config.starts.max(1))
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(i as u64);
                let start = random_channel(&mut rng, n, k);
                search.run(start, config.initial_step, config.min_step, config.max_sweeps)
            })
            .collect();
        let mut best: Option<(f64, Channel)> = None;
        for r in results {
            let (v, pi) = r?;
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, pi));
            }
        }
        best.expect("at least one start")
    };

    let full = maxmin_value(problem, priors, &Channel::fully_informative(n))?.value;
    if inner_budget > 0.0 && value >= full - OPT_TOL {
        return Err(Error::MaxminCap { eta, value });
    }
    let strategy = maxmin_value(problem, priors, &channel)?.strategy;
    let realized_cost = channel_cost(&channel, priors, measure)?;
    Ok(MaxminSolution {
        value,
        channel,
        strategy,
        realized_cost,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxminPoint {
    pub point: CurvePoint,
    pub channel: Channel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxminCurve {
    pub points: Vec<MaxminPoint>,
    pub binding: Vec<BindingReport>,
    pub concavity: ConcavityReport,
}

impl MaxminCurve {
    pub fn curve(&self) -> Vec<CurvePoint> {
        self.points.iter().map(|p| p.point.clone()).collect()
    }
}

/// `W̄` at every budget in `etas` with binding (tolerance
/// [`MAXMIN_BINDING_TOL`]) and midpoint-concavity (slack
/// [`MAXMIN_CONCAVITY_SLACK`]) reports.
pub fn maxmin_curve(
    problem: &DecisionProblem,
    priors: &PriorSet,
    measure: &InformationMeasure,
    etas: &[f64],
    config: &SearchConfig,
) -> Result<MaxminCurve> {
    validate_curve_etas(etas)?;
    let solved: Vec<Result<MaxminSolution>> = etas
        .par_iter()
        .map(|&eta| maxmin_voi(problem, priors, measure, eta, config))
        .collect();
    let mut points = Vec::with_capacity(etas.len());
    for (&eta, sol) in etas.iter().zip(solved) {
        let sol = sol?;
        let solution = bayes_map(priors.reference(), &sol.channel)?;
        points.push(MaxminPoint {
            point: CurvePoint {
                eta,
                value: sol.value,
                realized_amount: sol.realized_cost,
                support_size: solution.len(),
                solution,
            },
            channel: sol.channel,
        });
    }
    let binding = points
        .iter()
        .map(|p| check_binding(&p.point, None, MAXMIN_BINDING_TOL))
        .collect();
    let curve: Vec<CurvePoint> = points.iter().map(|p| p.point.clone()).collect();
    let concavity = check_concavity(&curve, MAXMIN_CONCAVITY_SLACK);
    Ok(MaxminCurve {
        points,
        binding,
        concavity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DivergenceKind, Phi};

    fn b(v: &[f64]) -> Belief {
        Belief::new(v.to_vec()).unwrap()
    }

    fn identity2() -> DecisionProblem {
        DecisionProblem::from_utility(vec![vec![1.0, 0.0], vec![0.0, 1.0]], Belief::uniform(2))
            .unwrap()
    }

    fn benchmark_priors() -> PriorSet {
        PriorSet::new(vec![b(&[0.3, 0.7]), b(&[0.7, 0.3])], Belief::uniform(2)).unwrap()
    }

    fn quadratic(mu: Belief) -> InformationMeasure {
        InformationMeasure::new(DivergenceKind::Quadratic, Phi::Identity, mu).unwrap()
    }

    fn channel08() -> Channel {
        Channel::from_matrix(vec![vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap()
    }

    fn random_belief(rng: &mut ChaCha8Rng, n: usize) -> Belief {
        let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        Belief::normalized(w).unwrap()
    }

    #[test]
    fn channel_validation() {
        assert!(Channel::from_matrix(vec![vec![0.5, 0.6]]).is_err());
        assert!(Channel::from_matrix(vec![vec![1.2, -0.2]]).is_err());
        assert!(Channel::from_matrix(vec![vec![0.5, 0.5], vec![1.0]]).is_err());
        assert!(Channel::from_matrix(vec![vec![1.0]]).is_ok());
    }

    #[test]
    fn bayes_map_examples() {
        let mu = b(&[0.3, 0.7]);
        let f = bayes_map(&mu, &Channel::uninformative(2, 3)).unwrap();
        assert!(f.support().iter().all(|x| x.max_abs_diff(&mu) < 1e-12));
        let f = bayes_map(&mu, &Channel::fully_informative(2)).unwrap();
        assert_eq!(f.support(), &[b(&[1.0, 0.0]), b(&[0.0, 1.0])]);
        assert!((f.probs()[0] - 0.3).abs() < 1e-12);
        let f = bayes_map(&Belief::uniform(2), &channel08()).unwrap();
        assert!(f.support()[0].max_abs_diff(&b(&[0.8, 0.2])) < 1e-12);
        assert!(f.support()[1].max_abs_diff(&b(&[0.2, 0.8])) < 1e-12);
        assert!((f.probs()[0] - 0.5).abs() < 1e-12);
        let dropped = Channel::from_matrix(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(bayes_map(&mu, &dropped).unwrap().len(), 1);
    }

    #[test]
    fn channel_cost_examples() {
        let priors = benchmark_priors();
        let m = quadratic(Belief::uniform(2));
        assert_eq!(channel_cost(&Channel::uninformative(2, 2), &priors, &m).unwrap(), 0.0);
        assert!(
            (channel_cost(&Channel::fully_informative(2), &priors, &m).unwrap() - 0.5).abs() < 1e-12
        );
        assert!((channel_cost(&channel08(), &priors, &m).unwrap() - 0.18).abs() < 1e-12);
        let wrong = quadratic(b(&[0.3, 0.7]));
        assert!(channel_cost(&channel08(), &priors, &wrong).is_err());
    }

    #[test]
    fn maxmin_value_examples() {
        let p = identity2();
        let priors = benchmark_priors();
        let t = maxmin_value(&p, &priors, &Channel::uninformative(2, 2)).unwrap();
        assert!((t.value - 0.5).abs() < 1e-12);
        // Signals are uninformative, so only the aggregate mix matters and
        // an even mix is the unique guarantee of 0.5.
        let m = t.strategy.matrix();
        assert!((0.5 * (m[0][0] + m[1][0]) - 0.5).abs() < 1e-9);
        let t = maxmin_value(&p, &priors, &Channel::fully_informative(2)).unwrap();
        assert!((t.value - 1.0).abs() < 1e-12);

        let mu = b(&[0.3, 0.7]);
        let single = PriorSet::singleton(mu.clone()).unwrap();
        let t = maxmin_value(&p, &single, &channel08()).unwrap().value;
        let f = bayes_map(&mu, &channel08()).unwrap();
        let bayes = f.expect(|x| crate::geometry::value_raw(&p, x.as_slice()));
        assert!((t - bayes).abs() < 1e-12);
    }

    #[test]
    fn maxmin_value_ignores_vertex_order_and_interior_points() {
        let p = DecisionProblem::from_utility(
            vec![vec![1.0, 0.0, 0.2], vec![0.0, 1.0, 0.3], vec![0.4, 0.4, 0.9]],
            Belief::uniform(3),
        )
        .unwrap();
        let verts = vec![b(&[0.6, 0.2, 0.2]), b(&[0.2, 0.6, 0.2]), b(&[0.2, 0.2, 0.6])];
        let pi = Channel::from_matrix(vec![
            vec![0.7, 0.2, 0.1],
            vec![0.1, 0.7, 0.2],
            vec![0.3, 0.3, 0.4],
        ])
        .unwrap();
        let base = maxmin_value(&p, &PriorSet::new(verts.clone(), Belief::uniform(3)).unwrap(), &pi)
            .unwrap()
            .value;
        let mut permuted = verts.clone();
        permuted.reverse();
        permuted.push(Belief::uniform(3));
        let other = maxmin_value(&p, &PriorSet::new(permuted, Belief::uniform(3)).unwrap(), &pi)
            .unwrap()
            .value;
        assert!((base - other).abs() < 1e-9);
    }

    #[test]
    fn mix_examples() {
        let mu = b(&[0.4, 0.6]);
        let m = quadratic(mu.clone());
        let pi = channel08();
        let mixed = mix_channels(&pi, &Channel::uninformative(2, 2), 1.0).unwrap();
        assert_eq!(mixed.n_signals(), 4);
        let a = bayes_map(&mu, &pi).unwrap();
        let b_ = bayes_map(&mu, &mixed).unwrap();
        assert_eq!(a, b_);
        let u = Channel::uninformative(2, 2);
        let mixed = mix_channels(&u, &u, 0.5).unwrap();
        assert_eq!(channel_inner_cost(&mixed, &m).unwrap(), 0.0);
        assert!(mix_channels(&u, &Channel::uninformative(3, 2), 0.5).is_err());
        assert!(mix_channels(&u, &u, 1.5).is_err());
    }

    #[test]
    fn martingale_and_sandwich_on_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = identity2();
        let priors = benchmark_priors();
        let lo = maxmin_value(&p, &priors, &Channel::uninformative(2, 2)).unwrap().value;
        let hi = maxmin_value(&p, &priors, &Channel::fully_informative(2)).unwrap().value;
        for _ in 0..500 {
            let n = rng.gen_range(2..=4);
            let k = rng.gen_range(1..=4);
            let mu = random_belief(&mut rng, n);
            let pi = random_channel(&mut rng, n, k);
            let f = bayes_map(&mu, &pi).unwrap();
            let residual = f
                .mean()
                .iter()
                .zip(mu.as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(residual < 1e-12);
        }
        for _ in 0..100 {
            let k = rng.gen_range(1..=3);
            let pi = random_channel(&mut rng, 2, k);
            let t = maxmin_value(&p, &priors, &pi).unwrap().value;
            assert!(lo - 1e-12 <= t && t <= hi + 1e-12);
        }
    }

    #[test]
    fn zero_budget_is_uninformative() {
        let p = identity2();
        let priors = benchmark_priors();
        let m = quadratic(Belief::uniform(2));
        let sol = maxmin_voi(&p, &priors, &m, 0.0, &SearchConfig::default()).unwrap();
        assert!((sol.value - 0.5).abs() < 1e-12);
        assert_eq!(sol.realized_cost, 0.0);
    }

    #[test]
    fn beats_the_worked_channel_and_binds() {
        let p = identity2();
        let priors = benchmark_priors();
        let m = quadratic(Belief::uniform(2));
        let sol = maxmin_voi(&p, &priors, &m, 0.18, &SearchConfig::default()).unwrap();
        let worked = maxmin_value(&p, &priors, &channel08()).unwrap().value;
        assert!(sol.value >= worked - 1e-6, "{} < {worked}", sol.value);
        assert!((sol.realized_cost - 0.18).abs() < MAXMIN_BINDING_TOL);
    }

    #[test]
    fn budget_at_full_information_is_a_cap_error() {
        let p = identity2();
        let priors = benchmark_priors();
        let m = quadratic(Belief::uniform(2));
        assert!(matches!(
            maxmin_voi(&p, &priors, &m, 0.5, &SearchConfig::default()),
            Err(Error::MaxminCap { .. })
        ));
    }

    #[test]
    fn search_is_reproducible() {
        let p = identity2();
        let priors = benchmark_priors();
        let m = quadratic(Belief::uniform(2));
        let cfg = SearchConfig {
            starts: 8,
            seed: 42,
            ..SearchConfig::default()
        };
        let a = maxmin_voi(&p, &priors, &m, 0.1, &cfg).unwrap();
        let b = maxmin_voi(&p, &priors, &m, 0.1, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
