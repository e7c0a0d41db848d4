use proptest::prelude::*;

use voi_core::geometry::value_function;
use voi_core::maxmin::{bayes_map, channel_inner_cost};
use voi_core::model::entropy;
use voi_core::{Belief, Channel, DecisionProblem, DivergenceKind, InformationMeasure, Phi};

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, n).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    })
}

fn channel(n: usize, k: usize) -> impl Strategy<Value = Channel> {
    prop::collection::vec(simplex(k), n).prop_map(|rows| Channel::from_matrix(rows).unwrap())
}

fn prior_and_channel() -> impl Strategy<Value = (Belief, Channel)> {
    (2usize..=4, 2usize..=4).prop_flat_map(|(n, k)| {
        (
            simplex(n).prop_map(|x| Belief::normalized(x).unwrap()),
            channel(n, k),
        )
    })
}

proptest! {
    #[test]
    fn phi_inverse_undoes_phi(eta in 0.0f64..10.0, p in 1.0f64..4.0) {
        let m = InformationMeasure::new(DivergenceKind::Quadratic, Phi::Power(p), Belief::uniform(2)).unwrap();
        let back = m.phi_apply(m.phi_inverse(eta).unwrap());
        prop_assert!((back - eta).abs() <= 1e-12 * eta.max(1.0));
    }

    #[test]
    fn entropy_reduction_is_mutual_information((mu, pi) in prior_and_channel()) {
        let m = InformationMeasure::new(DivergenceKind::EntropyReduction, Phi::Identity, mu.clone()).unwrap();
        let cost = channel_inner_cost(&pi, &m).unwrap();
        // I(S; signal) = H(signal) − H(signal | S), from the joint table.
        let n = pi.n_states();
        let k = pi.n_signals();
        let marginal: Vec<f64> = (0..k).map(|s| (0..n).map(|t| mu[t] * pi.matrix()[t][s]).sum()).collect();
        let conditional: f64 = (0..n).map(|t| mu[t] * entropy(&pi.matrix()[t])).sum();
        let mutual = entropy(&marginal) - conditional;
        prop_assert!((cost - mutual).abs() <= 1e-10, "{cost} vs {mutual}");
    }

    #[test]
    fn bayes_map_averages_to_the_prior((mu, pi) in prior_and_channel()) {
        let dist = bayes_map(&mu, &pi).unwrap();
        prop_assert!(dist.check_mean(&mu).is_ok());
    }

    #[test]
    fn value_function_is_convex(
        (u, x, y) in (2usize..=3).prop_flat_map(|n| (
            prop::collection::vec(prop::collection::vec(-1.0f64..1.0, n), 2..5),
            simplex(n),
            simplex(n),
        )),
        t in 0.0f64..1.0,
    ) {
        let n = x.len();
        let p = DecisionProblem::from_utility(u, Belief::uniform(n)).unwrap();
        let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let v = |w: &[f64]| value_function(&p, &Belief::normalized(w.to_vec()).unwrap()).unwrap().value;
        prop_assert!(v(&z) <= t * v(&x) + (1.0 - t) * v(&y) + 1e-12);
    }

    #[test]
    fn divergences_vanish_only_at_the_reference(mu in simplex(3), x in simplex(3)) {
        let mu = Belief::normalized(mu).unwrap();
        let x = Belief::normalized(x).unwrap();
        for kind in [DivergenceKind::Quadratic, DivergenceKind::Kl, DivergenceKind::EntropyReduction] {
            let m = InformationMeasure::new(kind, Phi::Identity, mu.clone()).unwrap();
            prop_assert!(m.divergence(&mu).unwrap().abs() <= 1e-12);
            if x.max_abs_diff(&mu) > 1e-3 && kind != DivergenceKind::EntropyReduction {
                prop_assert!(m.divergence(&x).unwrap() > 0.0);
            }
        }
    }
}
