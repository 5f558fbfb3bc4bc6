mod support;

use support::truth_table;
use swlab_core::params::{self, ParamSet};

#[test]
fn every_condition_fails_alone() {
    let mut missing = Vec::new();
    for o in truth_table::run() {
        match (&o.witness, o.implied) {
            (Some(_), None) => {}
            (None, Some(_)) => {}
            (None, None) => missing.push(format!("{}: {}", o.theorem, o.condition)),
            (Some(w), Some(_)) => panic!("{}: {} listed as implied but isolated by {w:?}", o.theorem, o.condition),
        }
    }
    assert!(missing.is_empty(), "no isolating perturbation for {missing:?}");
}

#[test]
fn theta_one_reduces_to_stein_weiss() {
    // At θ = 1 the improved hypotheses minus μ > 0 and n ≥ 2 are the
    // Stein-Weiss ones (r finite).
    for n in 2..=4usize {
        for s in [0.5, 1.0, 1.5, 2.5] {
            for p in [1.0, 1.5, 2.0, 3.0] {
                for alpha in [-1.0, 0.0, 0.5, 1.0, 2.0] {
                    for gamma in [-1.5, -0.5, 0.0, 0.25, 1.0] {
                        let base = ParamSet {
                            n: Some(n),
                            s: Some(s),
                            p: Some(p),
                            alpha: Some(alpha),
                            gamma: Some(gamma),
                            ..Default::default()
                        };
                        let Ok(ps) = params::derive(&base, params::Derivable::R) else { continue };
                        let improved = ParamSet {
                            theta: Some(1.0),
                            mu: Some(1.0),
                            ..ps
                        };
                        let sw = params::validate_stein_weiss(&ps).unwrap().passed();
                        let im = params::validate_improved(&improved).unwrap().passed();
                        assert_eq!(sw, im, "{ps:?}");
                    }
                }
            }
        }
    }
}
