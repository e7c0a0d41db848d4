//! Value-of-information curves for finite Bayesian decision problems whose
//! information is priced by a convex divergence.
//!
//! Three curves are computed over a budget `η` on the amount of
//! information:
//!
//! * the efficient value `W(η)`, the best decision value among
//!   Bayes-plausible posterior distributions carrying at most `η`
//!   ([`efficient`]);
//! * the inefficient value `U(η)`, the worst decision value among
//!   distributions carrying at least `η` ([`inefficient`]);
//! * the max-min value `W̄(η)` for a decision maker facing a set of priors,
//!   optimized over finite-alphabet channels ([`maxmin`]).
//!
//! The `verify` module runs the property checks (binding budgets,
//! concavity, flatness of `U` near zero, oracle agreement) and renders a
//! deterministic report.

pub mod efficient;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod inefficient;
mod linalg;
pub mod lp;
pub mod maxmin;
pub mod model;
pub mod oracle;
pub mod problem_file;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{DecisionRegion, RegionLocation};
pub use grid::{CurvePoint, PosteriorGrid};
pub use maxmin::{Channel, PriorSet, Strategy};
pub use model::{
    Belief, DecisionProblem, DivergenceKind, EtaBudget, InformationMeasure, Phi,
    PosteriorDistribution,
};
