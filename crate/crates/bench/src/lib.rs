//! Shared fixtures for the criterion benchmarks.

use voi_core::lp::LinearProgram;
use voi_core::{Belief, DecisionProblem, DivergenceKind, InformationMeasure, Phi, PriorSet};

/// Guess-the-state problem with two states and a uniform prior.
pub fn symmetric() -> (DecisionProblem, InformationMeasure) {
    let prior = Belief::uniform(2);
    let problem =
        DecisionProblem::from_utility(vec![vec![1.0, 0.0], vec![0.0, 1.0]], prior.clone()).unwrap();
    let measure = InformationMeasure::new(DivergenceKind::Quadratic, Phi::Identity, prior).unwrap();
    (problem, measure)
}

/// Three states, three actions, KL-priced information.
pub fn three_state() -> (DecisionProblem, InformationMeasure) {
    let prior = Belief::new(vec![0.5, 0.3, 0.2]).unwrap();
    let problem = DecisionProblem::from_utility(
        vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.2, 0.2, 0.9],
        ],
        prior.clone(),
    )
    .unwrap();
    let measure = InformationMeasure::new(DivergenceKind::Kl, Phi::Identity, prior).unwrap();
    (problem, measure)
}

/// The prior set `conv{(0.3, 0.7), (0.7, 0.3)}` priced at the uniform prior.
pub fn benchmark_priors() -> PriorSet {
    PriorSet::new(
        vec![
            Belief::new(vec![0.3, 0.7]).unwrap(),
            Belief::new(vec![0.7, 0.3]).unwrap(),
        ],
        Belief::uniform(2),
    )
    .unwrap()
}

/// A dense feasible program `max c·x, A x ≤ b, x ≥ 0` with a deterministic
/// pseudo-random fill.
pub fn dense_lp(rows: usize, cols: usize) -> LinearProgram {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut lp = LinearProgram::maximize((0..cols).map(|_| next()).collect());
    for _ in 0..rows {
        lp = lp.ub((0..cols).map(|_| next() + 0.1).collect(), 1.0 + next());
    }
    lp
}
