//! JSON problem files.
//!
//! ```json
//! {
//!   "states": ["left", "right"],
//!   "actions": ["go_left", "go_right"],
//!   "utility": [[1, 0], [0, 1]],
//!   "prior": [0.5, 0.5],
//!   "measure": { "divergence": "quadratic", "phi": "identity" },
//!   "prior_set": { "vertices": [[0.3, 0.7], [0.7, 0.3]] },
//!   "signal_count": 2,
//!   "grid": 1000
//! }
//! ```
//!
//! `utility` has one row per action and one column per state. `states`,
//! `actions`, `measure`, `prior_set`, `signal_count` and `grid` are
//! optional. `phi` is `identity` or `power` (with `"p": 2.0`); the
//! divergence is `quadratic`, `kl` or `entropy_reduction`. The prior set's
//! `reference` defaults to `prior`. Every error carries the line and column
//! it refers to.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::maxmin::PriorSet;
use crate::model::{Belief, DecisionProblem, DivergenceKind, InformationMeasure, Phi};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    states: Option<Vec<String>>,
    actions: Option<Vec<String>>,
    utility: Vec<Vec<f64>>,
    prior: Vec<f64>,
    #[serde(default)]
    measure: RawMeasure,
    prior_set: Option<RawPriorSet>,
    signal_count: Option<usize>,
    grid: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    #[serde(default = "default_divergence")]
    divergence: String,
    #[serde(default = "default_phi")]
    phi: String,
    p: Option<f64>,
}

impl Default for RawMeasure {
    fn default() -> Self {
        Self {
            divergence: default_divergence(),
            phi: default_phi(),
            p: None,
        }
    }
}

fn default_divergence() -> String {
    "quadratic".into()
}

fn default_phi() -> String {
    "identity".into()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPriorSet {
    vertices: Vec<Vec<f64>>,
    reference: Option<Vec<f64>>,
}

/// Everything a problem file describes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub problem: DecisionProblem,
    /// Anchored at the problem's prior.
    pub measure: InformationMeasure,
    pub prior_set: Option<PriorSet>,
    pub signal_count: Option<usize>,
    pub grid: Option<usize>,
}

impl ProblemSpec {
    /// The measure re-anchored at the prior set's reference prior.
    pub fn maxmin_measure(&self) -> Option<InformationMeasure> {
        self.prior_set
            .as_ref()
            .map(|m| self.measure.with_reference(m.reference().clone()))
    }
}

/// Parses and validates a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| Error::Malformed {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
    })?;
    let at = |key: &str, err: Error| anchored(text, key, err.to_string());

    let prior = Belief::new(raw.prior).map_err(|e| at("prior", e))?;
    let n = prior.dim();
    let states = raw
        .states
        .unwrap_or_else(|| (1..=n).map(|i| format!("s{i}")).collect());
    if states.len() != n {
        return Err(anchored(
            text,
            "states",
            format!("{} state labels for a prior of dimension {n}", states.len()),
        ));
    }
    let actions = raw
        .actions
        .unwrap_or_else(|| (1..=raw.utility.len()).map(|i| format!("a{i}")).collect());
    if actions.len() != raw.utility.len() {
        return Err(anchored(
            text,
            "actions",
            format!("{} action labels for {} utility rows", actions.len(), raw.utility.len()),
        ));
    }
    let problem =
        DecisionProblem::new(states, actions, raw.utility, prior.clone()).map_err(|e| at("utility", e))?;

    let divergence = match raw.measure.divergence.as_str() {
        "quadratic" => DivergenceKind::Quadratic,
        "kl" => DivergenceKind::Kl,
        "entropy_reduction" => DivergenceKind::EntropyReduction,
        other => {
            return Err(anchored(
                text,
                "divergence",
                format!("unknown divergence `{other}`, expected quadratic, kl or entropy_reduction"),
            ))
        }
    };
    let phi = match (raw.measure.phi.as_str(), raw.measure.p) {
        ("identity", None) => Phi::Identity,
        ("power", Some(p)) => Phi::Power(p),
        ("power", None) => return Err(anchored(text, "phi", "phi `power` needs an exponent `p`".into())),
        ("identity", Some(_)) => {
            return Err(anchored(text, "\"p\"", "exponent `p` is only valid with phi `power`".into()))
        }
        (other, _) => {
            return Err(anchored(
                text,
                "phi",
                format!("unknown phi `{other}`, expected identity or power"),
            ))
        }
    };
    let measure = InformationMeasure::new(divergence, phi, prior.clone()).map_err(|e| at("measure", e))?;

    let prior_set = match raw.prior_set {
        None => None,
        Some(set) => {
            let vertices = set
                .vertices
                .into_iter()
                .map(Belief::new)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| at("vertices", e))?;
            let reference = match set.reference {
                Some(r) => Belief::new(r).map_err(|e| at("reference", e))?,
                None => prior.clone(),
            };
            Some(PriorSet::new(vertices, reference).map_err(|e| at("prior_set", e))?)
        }
    };
    if raw.signal_count == Some(0) {
        return Err(anchored(text, "signal_count", "signal_count must be positive".into()));
    }
    if matches!(raw.grid, Some(k) if k < 2) {
        return Err(anchored(text, "grid", "grid resolution must be at least 2".into()));
    }
    Ok(ProblemSpec {
        problem,
        measure,
        prior_set,
        signal_count: raw.signal_count,
        grid: raw.grid,
    })
}

/// Builds a [`Error::Malformed`] pointing at the first occurrence of `key`
/// (quoted unless it already is), or at line 1 when absent.
fn anchored(text: &str, key: &str, message: String) -> Error {
    let needle = if key.starts_with('"') {
        key.to_string()
    } else {
        format!("\"{key}\"")
    };
    let (line, column) = match text.find(&needle) {
        Some(offset) => {
            let before = &text[..offset];
            let line = before.matches('\n').count() + 1;
            let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            (line, column)
        }
        None => (1, 1),
    };
    Error::Malformed {
        line,
        column,
        message: format!("`{}`: {message}", needle.trim_matches('"')),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYMMETRIC: &str = r#"{
  "utility": [[1, 0], [0, 1]],
  "prior": [0.5, 0.5]
}"#;

    #[test]
    fn minimal_file_uses_defaults() {
        let spec = parse_problem(SYMMETRIC).unwrap();
        assert_eq!(spec.problem.state_labels(), ["s1", "s2"]);
        assert_eq!(spec.problem.action_labels(), ["a1", "a2"]);
        assert_eq!(spec.measure.divergence_kind(), DivergenceKind::Quadratic);
        assert_eq!(spec.measure.phi(), Phi::Identity);
        assert!(spec.prior_set.is_none());
    }

    #[test]
    fn full_file() {
        let text = r#"{
  "states": ["l", "r"],
  "actions": ["L", "R"],
  "utility": [[1, 0], [0, 1]],
  "prior": [0.5, 0.5],
  "measure": {"divergence": "kl", "phi": "power", "p": 2},
  "prior_set": {"vertices": [[0.3, 0.7], [0.7, 0.3]]},
  "signal_count": 3,
  "grid": 200
}"#;
        let spec = parse_problem(text).unwrap();
        assert_eq!(spec.measure.phi(), Phi::Power(2.0));
        assert_eq!(spec.prior_set.as_ref().unwrap().vertices().len(), 2);
        assert_eq!(spec.signal_count, Some(3));
        assert_eq!(spec.grid, Some(200));
        assert_eq!(spec.maxmin_measure().unwrap().reference(), spec.problem.prior());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let text = "{\n  \"utility\": [[1, 0], [0, 1]],\n  \"prior\": [0.5, 0.5,]\n}";
        match parse_problem(text) {
            Err(Error::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invariant_errors_point_at_the_key() {
        let text = "{\n  \"utility\": [[1, 0], [0, 1]],\n\n  \"prior\": [0.5, 0.6]\n}";
        match parse_problem(text) {
            Err(Error::Malformed { line, column, message }) => {
                assert_eq!((line, column), (4, 3));
                assert!(message.contains("prior"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = "{\n  \"utility\": [[1, 0, 2], [0, 1]],\n  \"prior\": [0.5, 0.5]\n}";
        assert!(matches!(parse_problem(text), Err(Error::Malformed { line: 2, .. })));
        let text = "{\n  \"utility\": [[1, 0], [0, 1]],\n  \"prior\": [0.5, 0.5],\n  \"measure\": {\"phi\": \"cubic\"}\n}";
        assert!(matches!(parse_problem(text), Err(Error::Malformed { line: 4, .. })));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "{\n  \"utility\": [[1, 0], [0, 1]],\n  \"prior\": [0.5, 0.5],\n  \"budget\": 3\n}";
        assert!(matches!(parse_problem(text), Err(Error::Malformed { line: 4, .. })));
    }

    #[test]
    fn kl_with_boundary_prior_is_rejected() {
        let text = r#"{"utility": [[1, 0], [0, 1]], "prior": [1.0, 0.0], "measure": {"divergence": "kl"}}"#;
        assert!(matches!(parse_problem(text), Err(Error::Malformed { .. })));
    }
}
