mod common;

use chainscope_core::chain::ChainGraph;
use chainscope_core::constructions::chains::divergent_pair_table;
use chainscope_core::constructions::shift::binary;
use chainscope_core::constructions::{chain_pair_search, separated_family_builder, subshift_factor_builder, PairSearch};
use chainscope_core::{Dyadic, FiniteSystem, NodeSet};
use common::{edges, random_scale, random_system, SeedableRng, TestRng};
use rand::Rng;

fn is_chain(adj: &[Vec<bool>], c: &[usize]) -> bool {
    c.windows(2).all(|w| adj[w[0]][w[1]])
}

fn all_chains(adj: &[Vec<bool>], steps: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..adj.len()).map(|x| vec![x]).collect();
    for _ in 0..steps {
        out = out
            .into_iter()
            .flat_map(|c| {
                let last = *c.last().unwrap();
                (0..adj.len()).filter(move |&j| adj[last][j]).map(move |j| {
                    let mut c = c.clone();
                    c.push(j);
                    c
                })
            })
            .collect();
    }
    out
}

/// Fewest steps of a pair of δ-chains with shared endpoints, pointwise
/// within `eps` and at least `r` apart somewhere.
fn oracle_pair_steps(sys: &FiniteSystem, delta: Dyadic, eps: Dyadic, r: Dyadic, max_steps: usize) -> Option<usize> {
    let adj = edges(sys, delta);
    for k in 1..=max_steps {
        let chains = all_chains(&adj, k);
        for (a, u) in chains.iter().enumerate() {
            for v in &chains[a + 1..] {
                if u[0] != v[0] || u[k] != v[k] {
                    continue;
                }
                let d: Vec<Dyadic> = u.iter().zip(v).map(|(&x, &y)| sys.dist(x, y)).collect();
                if d.iter().all(|&x| x <= eps) && d.iter().any(|&x| x >= r) {
                    return Some(k);
                }
            }
        }
    }
    None
}

#[test]
fn pair_search_matches_enumeration() {
    let mut rng = TestRng::seed_from_u64(17);
    let bound = 4;
    for case in 0..150 {
        let n = rng.gen_range(2..=5);
        let relation = rng.gen_bool(0.5);
        let sys = random_system(&mut rng, n, relation);
        let delta = random_scale(&mut rng);
        let mut eps = random_scale(&mut rng);
        let mut r = random_scale(&mut rng);
        if r > eps {
            core::mem::swap(&mut r, &mut eps);
        }
        if !r.is_positive() {
            r = Dyadic::pow2_neg(6);
            eps = eps.max(r);
        }
        let g = ChainGraph::new(&sys, delta);
        let out = chain_pair_search(&sys, &g, eps, r, bound, 1 << 16).unwrap();
        let want = oracle_pair_steps(&sys, delta, eps, r, bound);
        match &out {
            PairSearch::Found(p) => {
                assert_eq!(Some(p.steps()), want, "case {case}");
                assert!(p.endpoints_equal);
                let adj = edges(&sys, delta);
                assert!(is_chain(&adj, &p.xs) && is_chain(&adj, &p.ys));
                assert!(p.separation >= r && p.separation <= eps);
            }
            _ => assert_eq!(want, None, "case {case}: {out:?}"),
        }
    }
}

#[test]
fn pair_search_on_the_small_shift() {
    let fs = binary(1, 1 << 12).unwrap();
    let sys = &fs.compiled.system;
    for k in 1..=4 {
        let delta = Dyadic::pow2_neg(k);
        let g = ChainGraph::new(sys, delta);
        let (eps, r) = (Dyadic::ONE, Dyadic::new(1, 1));
        let out = chain_pair_search(sys, &g, eps, r, 4, 1 << 16).unwrap();
        let want = oracle_pair_steps(sys, delta, eps, r, 4);
        assert_eq!(out.found().map(|p| p.steps()), want, "delta {delta}");
    }
}

#[test]
fn separated_family_of_sixty_four() {
    let fs = binary(3, 1 << 12).unwrap();
    let sys = &fs.compiled.system;
    let delta = Dyadic::pow2_neg(5);
    let e = Dyadic::new(1, 1);
    let g = ChainGraph::new(sys, delta);
    let all = NodeSet::full(sys.size());
    let table = divergent_pair_table(sys, &g, &all, e).unwrap();
    assert_eq!(table.len(), sys.size());
    let fam = separated_family_builder(sys, &[0], &table, 6, e).unwrap();
    assert_eq!(fam.chains.len(), 64);
    assert_eq!(fam.horizon, 6 * fam.piece_bound);
    assert!((fam.rate_bound - core::f64::consts::LN_2 / fam.piece_bound as f64).abs() < 1e-15);
    let adj = edges(sys, delta);
    let padded = fam.padded(sys, fam.horizon + 1);
    for (a, u) in padded.iter().enumerate() {
        assert_eq!(u.len(), fam.horizon + 1);
        assert!(is_chain(&adj, u));
        for v in &padded[a + 1..] {
            assert!(u.iter().zip(v).any(|(&x, &y)| sys.dist(x, y) > e));
        }
    }
}

#[test]
fn factor_onto_the_two_shift() {
    let fs = binary(3, 1 << 12).unwrap();
    let sys = &fs.compiled.system;
    let delta = Dyadic::pow2_neg(4);
    let (eps, r, gamma) = (Dyadic::ONE, Dyadic::new(1, 1), Dyadic::pow2_neg(3));
    let g = ChainGraph::new(sys, delta);
    let pair = chain_pair_search(sys, &g, eps, r, 32, 1 << 20).unwrap().found().cloned().expect("pair");
    let connector = [pair.xs[0]];
    let cert = subshift_factor_builder(sys, &pair, &connector, eps, r, gamma, 5, 1 << 20).unwrap();
    assert!(cert.holds(), "{cert:?}");
    assert_eq!(cert.shadows.len(), 32);
    assert!(cert.within_three_eps);
    let adj = edges(sys, delta);
    for (p, y) in cert.pseudo_orbits.iter().zip(&cert.shadows) {
        assert_eq!(p.len(), cert.m * 5);
        assert!(is_chain(&adj, p));
        assert!(y.windows(2).all(|w| sys.successors(w[0]).contains(&w[1])));
        assert!(p.iter().zip(y).all(|(&a, &b)| sys.dist(a, b) <= gamma));
    }
    for (a, u) in cert.shadows.iter().enumerate() {
        for v in &cert.shadows[a + 1..] {
            assert!(u.iter().zip(v).any(|(&x, &y)| sys.dist(x, y) > r - gamma - gamma));
        }
    }
}
