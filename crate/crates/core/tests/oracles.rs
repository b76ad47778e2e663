mod common;

use chainscope_core::chain::{chain_class, chain_components, chain_recurrent};
use chainscope_core::shadowing::{shadowing_check, Scope, DEFAULT_STATE_CAP};
use chainscope_core::Dyadic;
use common::*;

#[test]
fn chain_machinery_matches_reachability() {
    let mut rng = TestRng::seed_from_u64(1);
    for trial in 0..200 {
        let n = 1 + trial % 12;
        let sys = random_system(&mut rng, n, trial % 3 == 0);
        let delta = random_scale(&mut rng);
        let reach = closure(&edges(&sys, delta));
        assert_eq!(chain_recurrent(&sys, delta).to_vec(), oracle_recurrent(&reach), "trial {trial}");
        let mut comps: Vec<Vec<usize>> = chain_components(&sys, delta).components.into_iter().map(|c| c.nodes).collect();
        comps.sort();
        assert_eq!(comps, oracle_components(&reach), "trial {trial}");
        for x in 0..n {
            assert_eq!(chain_class(&sys, delta, x).unwrap().to_vec(), oracle_class(&reach, x));
        }
    }
}

#[test]
fn shadowing_matches_enumeration() {
    let mut rng = TestRng::seed_from_u64(2);
    let grid = [Dyadic::new(1, 6), Dyadic::new(3, 6), Dyadic::new(9, 6)];
    for trial in 0..100 {
        let n = 1 + trial % 6;
        let sys = random_system(&mut rng, n, trial % 2 == 0);
        for &eps in &grid {
            for &delta in &grid {
                let v = shadowing_check(&sys, eps, delta, Scope::All, Some(6), DEFAULT_STATE_CAP).unwrap();
                let oracle = oracle_counterexample(&sys, eps, delta, 6);
                assert_eq!(v.holds, oracle.is_none(), "trial {trial} eps {eps} delta {delta}");
                assert_eq!(v.counterexample, oracle, "trial {trial}");
            }
        }
    }
}
