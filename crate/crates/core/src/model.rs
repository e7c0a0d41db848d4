//! Domain types shared by every solver: beliefs, decision problems,
//! distributions over posteriors and the information measure that prices
//! them.
//!
//! The amount of information carried by a distribution `F` over posteriors
//! is `phi(E_F[c(x, mu)])`, where `c` is a strictly convex divergence that
//! vanishes at the reference belief `mu` and `phi` is convex, strictly
//! increasing and zero at zero.

use crate::error::{Error, Result};

/// Arithmetic tolerance: sums, identities and round-trips.
pub const ARITH_TOL: f64 = 1e-12;
/// Feasibility tolerance: constraint residuals, region membership.
pub const FEAS_TOL: f64 = 1e-9;
/// Solver optimality tolerance: binding checks and heuristic convergence.
pub const OPT_TOL: f64 = 1e-6;

/// A probability vector over the states.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief(Vec<f64>);

impl Belief {
    /// Checks nonnegativity and that the weights sum to one within
    /// [`ARITH_TOL`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidBelief("no states".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidBelief(format!(
                "coordinate {i} is {w}, expected a finite nonnegative weight"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > ARITH_TOL {
            return Err(Error::InvalidBelief(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self(weights))
    }

    /// Rescales nonnegative weights onto the simplex. Negative entries no
    /// larger than [`FEAS_TOL`] in magnitude are treated as round-off and
    /// clipped to zero.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        for w in weights.iter_mut() {
            if *w < 0.0 && *w >= -FEAS_TOL {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidBelief(format!(
                "cannot normalize weights summing to {total}"
            )));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(weights)
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// The degenerate belief on state `i`.
    pub fn vertex(n: usize, i: usize) -> Self {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        Self(w)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&w| w > 0.0)
    }

    /// Largest coordinate-wise absolute difference.
    pub fn max_abs_diff(&self, other: &Belief) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn ensure_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for Belief {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A finite decision problem: states, actions, payoffs `u(a, θ)` (one row
/// per action) and a full-support prior.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionProblem {
    state_labels: Vec<String>,
    action_labels: Vec<String>,
    utility: Vec<Vec<f64>>,
    prior: Belief,
}

impl DecisionProblem {
    pub fn new(
        state_labels: Vec<String>,
        action_labels: Vec<String>,
        utility: Vec<Vec<f64>>,
        prior: Belief,
    ) -> Result<Self> {
        let n = state_labels.len();
        if n < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least 2 states, got {n}"
            )));
        }
        if action_labels.len() < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least 2 actions, got {}",
                action_labels.len()
            )));
        }
        if utility.len() != action_labels.len() {
            return Err(Error::InvalidProblem(format!(
                "utility has {} rows for {} actions",
                utility.len(),
                action_labels.len()
            )));
        }
        for (a, row) in utility.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidProblem(format!(
                    "utility row {a} has {} entries for {n} states",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidProblem(format!(
                    "utility row {a} contains a non-finite payoff"
                )));
            }
        }
        prior.ensure_dim(n)?;
        if !prior.is_interior() {
            return Err(Error::InvalidProblem(
                "prior must be strictly positive in every state".into(),
            ));
        }
        Ok(Self {
            state_labels,
            action_labels,
            utility,
            prior,
        })
    }

    /// Convenience constructor with generated labels `s1..`, `a1..`.
    pub fn from_utility(utility: Vec<Vec<f64>>, prior: Belief) -> Result<Self> {
        let n = prior.dim();
        let states = (1..=n).map(|i| format!("s{i}")).collect();
        let actions = (1..=utility.len()).map(|i| format!("a{i}")).collect();
        Self::new(states, actions, utility, prior)
    }

    pub fn n_states(&self) -> usize {
        self.state_labels.len()
    }

    pub fn n_actions(&self) -> usize {
        self.action_labels.len()
    }

    pub fn state_labels(&self) -> &[String] {
        &self.state_labels
    }

    pub fn action_labels(&self) -> &[String] {
        &self.action_labels
    }

    pub fn utility(&self) -> &[Vec<f64>] {
        &self.utility
    }

    pub fn prior(&self) -> &Belief {
        &self.prior
    }

    /// Same payoffs with a different prior.
    pub fn with_prior(&self, prior: Belief) -> Result<Self> {
        Self::new(
            self.state_labels.clone(),
            self.action_labels.clone(),
            self.utility.clone(),
            prior,
        )
    }

    /// Expected payoff of action `a` at belief `x`.
    pub fn expected_payoff(&self, a: usize, x: &[f64]) -> f64 {
        self.utility[a].iter().zip(x).map(|(u, p)| u * p).sum()
    }

    /// Value of full information at the prior: `Σ_θ μ(θ) max_a u(a, θ)`.
    pub fn full_information_value(&self) -> f64 {
        (0..self.n_states())
            .map(|s| self.prior[s] * self.best_payoff_in_state(s))
            .sum()
    }

    pub(crate) fn best_payoff_in_state(&self, s: usize) -> f64 {
        self.utility
            .iter()
            .map(|row| row[s])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A finite-support distribution over posteriors.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDistribution {
    support: Vec<Belief>,
    probs: Vec<f64>,
}

impl PosteriorDistribution {
    pub fn new(support: Vec<Belief>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} support points with {} weights",
                support.len(),
                probs.len()
            )));
        }
        let n = support[0].dim();
        for x in &support {
            x.ensure_dim(n)?;
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { support, probs })
    }

    pub fn point_mass(x: Belief) -> Self {
        Self {
            support: vec![x],
            probs: vec![1.0],
        }
    }

    pub fn support(&self) -> &[Belief] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.support[0].dim()
    }

    /// Barycenter `Σ_j p_j x_j`.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        for (x, p) in self.support.iter().zip(&self.probs) {
            for (mi, xi) in m.iter_mut().zip(x.as_slice()) {
                *mi += p * xi;
            }
        }
        m
    }

    /// Fails with [`Error::NotBayesPlausible`] when the barycenter is farther
    /// than [`FEAS_TOL`] from `mean` in any coordinate.
    pub fn check_mean(&self, mean: &Belief) -> Result<()> {
        mean.ensure_dim(self.dim())?;
        let residual = self
            .mean()
            .iter()
            .zip(mean.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual > FEAS_TOL {
            return Err(Error::NotBayesPlausible { residual });
        }
        Ok(())
    }

    /// Weighted expectation of `f` over the support.
    pub fn expect(&self, mut f: impl FnMut(&Belief) -> f64) -> f64 {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| p * f(x))
            .sum()
    }
}

/// The pairwise divergence `c(x, μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DivergenceKind {
    /// Squared Euclidean distance.
    Quadratic,
    /// Relative entropy `Σ x ln(x/μ)`, natural log.
    Kl,
    /// Entropy drop `H(μ) − H(x)`, natural log. Can be negative pointwise.
    EntropyReduction,
}

impl DivergenceKind {
    pub fn name(&self) -> &'static str {
        match self {
            DivergenceKind::Quadratic => "quadratic",
            DivergenceKind::Kl => "kl",
            DivergenceKind::EntropyReduction => "entropy_reduction",
        }
    }
}

/// The outer transform `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phi {
    Identity,
    /// `t ↦ t^p` on `[0, ∞)`, `p ≥ 1`.
    Power(f64),
}

impl Phi {
    pub fn apply(&self, t: f64) -> f64 {
        match *self {
            Phi::Identity => t,
            Phi::Power(p) => t.max(0.0).powf(p),
        }
    }

    pub fn is_strictly_convex(&self) -> bool {
        matches!(*self, Phi::Power(p) if p > 1.0)
    }
}

/// Shannon entropy with natural log and `0 ln 0 = 0`.
pub fn entropy(x: &[f64]) -> f64 {
    -x.iter().map(|&p| xlnx(p)).sum::<f64>()
}

fn xlnx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// Divergence `c`, transform `φ` and the belief the divergence is
/// anchored to.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationMeasure {
    divergence: DivergenceKind,
    phi: Phi,
    reference: Belief,
}

impl InformationMeasure {
    pub fn new(divergence: DivergenceKind, phi: Phi, reference: Belief) -> Result<Self> {
        if let Phi::Power(p) = phi {
            if !(p.is_finite() && p >= 1.0) {
                return Err(Error::InvalidMeasure(format!(
                    "power transform needs a finite exponent p >= 1, got {p}"
                )));
            }
        }
        Ok(Self {
            divergence,
            phi,
            reference,
        })
    }

    pub fn divergence_kind(&self) -> DivergenceKind {
        self.divergence
    }

    pub fn phi(&self) -> Phi {
        self.phi
    }

    pub fn reference(&self) -> &Belief {
        &self.reference
    }

    /// The same divergence and transform anchored elsewhere.
    pub fn with_reference(&self, reference: Belief) -> Self {
        Self {
            divergence: self.divergence,
            phi: self.phi,
            reference,
        }
    }

    /// `c(x, reference)`.
    pub fn divergence(&self, x: &Belief) -> Result<f64> {
        self.divergence_raw(x.as_slice())
    }

    pub(crate) fn divergence_raw(&self, x: &[f64]) -> Result<f64> {
        let mu = self.reference.as_slice();
        if x.len() != mu.len() {
            return Err(Error::DimensionMismatch {
                expected: mu.len(),
                found: x.len(),
            });
        }
        Ok(match self.divergence {
            DivergenceKind::Quadratic => x.iter().zip(mu).map(|(a, b)| (a - b) * (a - b)).sum(),
            DivergenceKind::Kl => {
                let mut total = 0.0;
                for (i, (&xi, &mi)) in x.iter().zip(mu).enumerate() {
                    if mi <= 0.0 {
                        return Err(Error::ZeroReference(i));
                    }
                    if xi > 0.0 {
                        total += xi * (xi / mi).ln();
                    }
                }
                total
            }
            DivergenceKind::EntropyReduction => entropy(mu) - entropy(x),
        })
    }

    /// `φ` applied to an expected divergence.
    pub fn phi_apply(&self, inner: f64) -> f64 {
        self.phi.apply(inner)
    }

    /// Inverse of `φ`; turns `D(F) ≤ η` into the linear constraint
    /// `E_F c ≤ φ⁻¹(η)`.
    pub fn phi_inverse(&self, eta: f64) -> Result<f64> {
        if eta.is_nan() || eta < 0.0 {
            return Err(Error::NegativeEta(eta));
        }
        Ok(match self.phi {
            Phi::Identity => eta,
            Phi::Power(p) => eta.powf(1.0 / p),
        })
    }

    /// Expected divergence `E_F c(x, reference)` before `φ`. Requires `F`
    /// to be Bayes-plausible with respect to the reference.
    pub fn inner_amount(&self, dist: &PosteriorDistribution) -> Result<f64> {
        dist.check_mean(&self.reference)?;
        let mut total = 0.0;
        for (x, p) in dist.support().iter().zip(dist.probs()) {
            total += p * self.divergence(x)?;
        }
        Ok(total)
    }

    /// Amount of information `D(F) = φ(E_F c)`.
    pub fn amount(&self, dist: &PosteriorDistribution) -> Result<f64> {
        // Jensen makes the inner expectation nonnegative; anything below
        // zero is round-off.
        Ok(self.phi.apply(self.inner_amount(dist)?.max(0.0)))
    }
}

/// A budget `η` together with its admissible cap `η̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaBudget {
    eta: f64,
    eta_bar: f64,
}

impl EtaBudget {
    pub fn new(eta: f64, eta_bar: f64) -> Result<Self> {
        if eta.is_nan() || eta < 0.0 {
            return Err(Error::NegativeEta(eta));
        }
        if eta > eta_bar {
            return Err(Error::BudgetCap {
                eta,
                limit: eta_bar,
            });
        }
        Ok(Self { eta, eta_bar })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn eta_bar(&self) -> f64 {
        self.eta_bar
    }
}
