#[path = "common/mod.rs"]
mod common;

use chainscope_core::chain::{
    chain_class, chain_components, chain_continuity_check, chain_recurrent, ChainGraph,
};
use chainscope_core::constructions::chains::divergent_pair_table;
use chainscope_core::constructions::shift::binary;
use chainscope_core::constructions::{example41, odometer, separated_family_builder, xor_factor};
use chainscope_core::entropy::{
    chain_separated_count, entropy_estimate, entropy_point_test, h_star, is_separated_family, phi_entropy, phi_set,
    separated_count, CountLimits, CountMode, Horizon, PointClass,
};
use chainscope_core::pairs::{classify_pair, omega_limit, PairClass};
use chainscope_core::shadowing::{lift_shadow, shadowing_check, Scope};
use chainscope_core::symbolic::{compile_symbolic, CompileMode, MapSpec, Sided, SymbolicPoint, SymbolicSystem};
use chainscope_core::{Dyadic, FiniteSystem, NodeSet};
use common::{edges, random_system, shadowed, SeedableRng, TestRng};
use proptest::prelude::*;
use rand::Rng;

fn system(seed: u64, n: usize, relation: bool) -> FiniteSystem {
    random_system(&mut TestRng::seed_from_u64(seed), n, relation)
}

/// Two scales on the grid `2^-6`, ordered.
fn scales() -> impl Strategy<Value = (Dyadic, Dyadic)> {
    (0i64..24, 0i64..24).prop_map(|(a, b)| (Dyadic::new(a.min(b), 6), Dyadic::new(a.max(b), 6)))
}

fn exact() -> CountLimits {
    CountLimits::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recurrence_grows_with_delta(seed: u64, n in 2usize..10, rel: bool, (d0, d1) in scales()) {
        let sys = system(seed, n, rel);
        let (a, b) = (chain_recurrent(&sys, d0), chain_recurrent(&sys, d1));
        prop_assert!(a.iter().all(|x| b.contains(x)));
        // components at the finer scale refine those at the coarser one
        let coarse = chain_components(&sys, d1);
        for c in chain_components(&sys, d0).components {
            let home = coarse.component_of(c.nodes[0]);
            prop_assert!(home.is_some());
            prop_assert!(c.nodes.iter().all(|&x| coarse.component_of(x) == home));
        }
    }

    #[test]
    fn classes_are_invariant(seed: u64, n in 2usize..10, rel: bool, d in 0i64..24) {
        let sys = system(seed, n, rel);
        let delta = Dyadic::new(d, 6);
        let dec = chain_components(&sys, delta);
        for x in 0..n {
            let class = chain_class(&sys, delta, x).unwrap();
            prop_assert!(class.iter().all(|y| class.contains(sys.image(y))));
            let mut inside: Vec<Vec<usize>> = dec
                .components
                .iter()
                .filter(|c| c.nodes.iter().all(|&v| class.contains(v)))
                .map(|c| c.nodes.clone())
                .collect();
            let mut restricted: Vec<Vec<usize>> = dec
                .components
                .iter()
                .map(|c| c.nodes.iter().copied().filter(|&v| class.contains(v)).collect::<Vec<_>>())
                .filter(|c: &Vec<usize>| !c.is_empty())
                .collect();
            inside.sort();
            restricted.sort();
            prop_assert_eq!(inside, restricted);
        }
    }

    #[test]
    fn continuity_is_monotone(seed: u64, n in 2usize..8, (d0, d1) in scales(), (e0, e1) in scales()) {
        let sys = system(seed, n, false);
        let all = NodeSet::full(n);
        if chain_continuity_check(&sys, &all, e0, d1).holds {
            prop_assert!(chain_continuity_check(&sys, &all, e0, d0).holds);
            prop_assert!(chain_continuity_check(&sys, &all, e1, d1).holds);
        }
    }

    #[test]
    fn shadowing_is_monotone_and_sound(seed: u64, n in 2usize..7, rel: bool, (d0, d1) in scales(), (e0, e1) in scales()) {
        let sys = system(seed, n, rel);
        let v = shadowing_check(&sys, e0, d1, Scope::All, None, 1 << 16).unwrap();
        if v.holds {
            prop_assert!(shadowing_check(&sys, e1, d0, Scope::All, None, 1 << 16).unwrap().holds);
        } else {
            let p = v.counterexample.unwrap();
            let adj = edges(&sys, d1);
            prop_assert!(p.windows(2).all(|w| adj[w[0]][w[1]]));
            prop_assert!(!shadowed(&sys, &p, e0));
        }
    }

    #[test]
    fn separated_counts_are_monotone(seed: u64, n in 2usize..8, rel: bool, (r0, r1) in scales(), len in 1usize..5) {
        let sys = system(seed, n, rel);
        let (r0, r1) = (r0.max(Dyadic::new(1, 6)), r1.max(Dyadic::new(1, 6)));
        let all = NodeSet::full(n);
        let half = NodeSet::from_indices(n, 0..n / 2 + 1);
        let c = |k: &NodeSet, m: usize, r: Dyadic| separated_count(&sys, k, m, r, &exact()).unwrap().count;
        prop_assert!(c(&all, len, r0) <= c(&all, len + 1, r0));
        prop_assert!(c(&all, len, r0) >= c(&all, len, r1));
        prop_assert!(c(&half, len, r0) <= c(&all, len, r0));
    }

    #[test]
    fn greedy_families_are_separated(seed: u64, n in 2usize..8, rel: bool, r in 1i64..24, len in 1usize..5) {
        let sys = system(seed, n, rel);
        let r = Dyadic::new(r, 6);
        let all = NodeSet::full(n);
        let greedy = CountLimits { mode: CountMode::Greedy, ..CountLimits::default() };
        let g = separated_count(&sys, &all, len, r, &greedy).unwrap();
        prop_assert!(is_separated_family(&sys, &g.family, r));
        prop_assert_eq!(g.family.len(), g.count);
        prop_assert!(g.count <= separated_count(&sys, &all, len, r, &exact()).unwrap().count);
    }

    #[test]
    fn zero_delta_chains_are_orbits(seed: u64, n in 2usize..8, rel: bool, r in 1i64..24, len in 1usize..5) {
        let sys = system(seed, n, rel);
        let r = Dyadic::new(r, 6);
        let all = NodeSet::full(n);
        // a chain of `len` steps has `len + 1` points
        let chains = chain_separated_count(&sys, len, r, Dyadic::ZERO, None, &exact()).unwrap();
        let orbits = separated_count(&sys, &all, len + 1, r, &exact()).unwrap();
        prop_assert_eq!(chains.count, orbits.count);
    }

    #[test]
    fn tracking_sets_grow_with_eps(seed: u64, n in 2usize..8, (e0, e1) in scales()) {
        let sys = system(seed, n, false);
        let window = [1, 2, 3, 4];
        let r = Dyadic::new(1, 6);
        for x in 0..n {
            let a = phi_set(&sys, x, e0, Horizon::Closure).unwrap();
            let b = phi_set(&sys, x, e1, Horizon::Closure).unwrap();
            prop_assert!(a.points.iter().all(|y| b.points.contains(y)));
            // the counts behind h_star, center by center
            let s0 = phi_entropy(&sys, x, e0, r, &window, &exact()).unwrap();
            let s1 = phi_entropy(&sys, x, e1, r, &window, &exact()).unwrap();
            prop_assert!(s0.exact && s1.exact);
            prop_assert!(s0.counts.iter().zip(&s1.counts).all(|(p, q)| p.count <= q.count));
        }
        // at eps = 0 only x tracks itself
        let lo = h_star(&sys, Dyadic::ZERO, &window, &[r], None, &exact()).unwrap();
        prop_assert_eq!(lo.value, 0.0);
    }

    #[test]
    fn uniform_points_are_positive(seed: u64, n in 2usize..8, rel: bool, b in 0.0f64..1.0) {
        let sys = system(seed, n, rel);
        let balls = [Dyadic::new(8, 6), Dyadic::new(16, 6)];
        let p = entropy_point_test(&sys, 0, Dyadic::new(1, 6), b, &balls, &[1, 2, 3, 4], 0.05, &exact()).unwrap();
        if p.class == PointClass::Uniform {
            prop_assert!(p.evidence.iter().all(|(_, e)| e.positive(0.05)));
        }
    }

    #[test]
    fn pair_classes_are_symmetric_and_shift_invariant(seed: u64, n in 2usize..10) {
        let sys = system(seed, n, false);
        let (lo, hi) = (Dyadic::new(1, 6), Dyadic::new(1, 1));
        for x in 0..n {
            for y in 0..n {
                let v = classify_pair(&sys, x, y, 16, lo, hi).unwrap();
                prop_assert!(v.exact);
                prop_assert_ne!(v.class, PairClass::Undetermined);
                prop_assert_eq!(&classify_pair(&sys, y, x, 16, lo, hi).unwrap().class, &v.class);
                let s = classify_pair(&sys, sys.image(x), sys.image(y), 16, lo, hi).unwrap();
                prop_assert_eq!(s.class, v.class);
                if v.class == PairClass::Asymptotic {
                    prop_assert!(v.class.is_proximal());
                }
                if v.class == PairClass::Distal {
                    prop_assert!(!v.class.is_proximal());
                }
            }
        }
    }

    #[test]
    fn omega_is_the_terminal_cycle(seed: u64, n in 2usize..10) {
        let sys = system(seed, n, false);
        for x in 0..n {
            let w = omega_limit(&sys, x, None).unwrap();
            let set = NodeSet::from_indices(n, w.omega.iter().copied());
            prop_assert!(w.omega.iter().all(|&y| set.contains(sys.image(y))));
            // every omega point returns to itself
            for &y in &w.omega {
                prop_assert!(sys.orbit(sys.image(y), n).contains(&y));
            }
            prop_assert!(w.minimal);
        }
    }

    #[test]
    fn odometers_are_isometric_bijections(steps in proptest::collection::vec(1u64..4, 1..4)) {
        let mut m = vec![1u64];
        for s in &steps {
            let last = *m.last().unwrap();
            m.push(last * (s + 1));
        }
        let sys = odometer(&m[1..]).unwrap();
        prop_assert!(sys.validate().is_empty());
        let n = sys.size();
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(sys.dist(sys.image(x), sys.image(y)), sys.dist(x, y));
            }
        }
        let rep = entropy_estimate(&sys, &NodeSet::full(n), Dyadic::new(1, 6), &[1, 2, 3, 4], &exact()).unwrap();
        prop_assert!(rep.rate.abs() < 1e-12);
    }

    #[test]
    fn xor_lifts_invert_the_factor(left in prop::collection::vec(0u8..2, 1..5),
                                   center in prop::collection::vec(0u8..2, 0..8),
                                   right in prop::collection::vec(0u8..2, 1..5),
                                   offset in -4i64..4) {
        let f = xor_factor();
        let x = SymbolicPoint::two_sided(left, center, offset, right).unwrap();
        let fib = f.fiber(&x).unwrap();
        for y in &fib {
            prop_assert!(f.forward(y).same_point(&x));
            prop_assert!(f.forward(&y.shift()).same_point(&x.shift()));
        }
        prop_assert!((-30..30).all(|k| fib[0].at(k) != fib[1].at(k)));
    }

    #[test]
    fn separated_family_certifies_its_count(levels in 1usize..5) {
        let fs = binary(2, 1 << 12).unwrap();
        let sys = &fs.compiled.system;
        let e = Dyadic::new(1, 1);
        let g = ChainGraph::new(sys, Dyadic::pow2_neg(4));
        let table = divergent_pair_table(sys, &g, &NodeSet::full(sys.size()), e).unwrap();
        let fam = separated_family_builder(sys, &[0], &table, levels, e).unwrap();
        let padded = fam.padded(sys, fam.horizon + 1);
        prop_assert_eq!(padded.len(), 1 << levels);
        prop_assert!(is_separated_family(sys, &padded, e));
    }

    #[test]
    fn lifted_shadows_sit_over_the_base(seed: u64, k in 0usize..4) {
        let mut rng = TestRng::seed_from_u64(seed);
        let t = example41(1, 3, 1 << 12).unwrap();
        let (sys, f) = t.level_system().unwrap();
        let n = sys.size();
        let mut fibers = vec![Vec::new(); n];
        for (u, &x) in f.iter().enumerate() {
            fibers[x].push(u);
        }
        let even: Vec<usize> = (0..n).filter(|&x| !fibers[x].is_empty()).collect();
        let x = even[rng.gen_range(0..even.len())];
        let len = k + 6;
        let orbit = sys.orbit(x, len);
        // arbitrary base points first, then the orbit of x itself
        let xs: Vec<usize> = (0..len).map(|i| if i < k { even[rng.gen_range(0..even.len())] } else { orbit[i] }).collect();
        let w0 = fibers[orbit[k]][rng.gen_range(0..2)];
        let w_orbit = sys.orbit(w0, len - k);
        let zs: Vec<usize> = (0..len).map(|i| if i < k { fibers[xs[i]][rng.gen_range(0..2)] } else { w_orbit[i - k] }).collect();
        let modulus: Vec<Dyadic> = (0..len).map(|i| sys.dist(xs[i], orbit[i])).collect();
        let lift = lift_shadow(&sys, &f, x, &xs, &zs, &modulus).unwrap();
        prop_assert_eq!(f[lift.z], x);
        prop_assert!(lift.start <= k);
        prop_assert!(lift.errors.iter().zip(&lift.bounds).all(|(e, b)| e <= b));
    }
}

#[test]
fn compiled_systems_are_valid_and_close_to_representatives() {
    let space = SymbolicSystem::new(vec![Dyadic::ZERO, Dyadic::ONE, Dyadic::new(1, 1)], Sided::Two, chainscope_core::symbolic::Constraint::FullShift).unwrap();
    let mut rng = TestRng::seed_from_u64(2);
    for mode in [CompileMode::Window, CompileMode::Periodic] {
        let c = compile_symbolic(&space, MapSpec::Shift { power: 1 }, 2, mode, 1 << 12).unwrap();
        assert!(c.system.validate().is_empty());
        let res = Dyadic::pow2_neg(2);
        for _ in 0..100 {
            let i = rng.gen_range(0..c.system.size());
            let j = rng.gen_range(0..c.system.size());
            let exact = space.metric(&c.dictionary[i], &c.dictionary[j]).unwrap();
            let d = c.system.dist(i, j);
            let gap = if d > exact { d - exact } else { exact - d };
            assert!(gap <= res, "{i} {j}: {d} vs {exact}");
        }
    }
}

#[test]
fn double_shift_is_the_shift_squared() {
    let space = SymbolicSystem::binary_full_shift(Sided::Two);
    let one = compile_symbolic(&space, MapSpec::Shift { power: 1 }, 3, CompileMode::Periodic, 1 << 12).unwrap();
    let two = compile_symbolic(&space, MapSpec::Shift { power: 2 }, 3, CompileMode::Periodic, 1 << 12).unwrap();
    assert_eq!(one.words, two.words);
    for i in 0..one.system.size() {
        assert_eq!(two.system.image(i), one.system.image(one.system.image(i)));
    }
}

/// Every property in this file, for drivers that run the suite as one unit.
#[allow(dead_code)]
pub fn all() -> Vec<(&'static str, fn())> {
    vec![
        ("recurrence_grows_with_delta", recurrence_grows_with_delta),
        ("classes_are_invariant", classes_are_invariant),
        ("continuity_is_monotone", continuity_is_monotone),
        ("shadowing_is_monotone_and_sound", shadowing_is_monotone_and_sound),
        ("separated_counts_are_monotone", separated_counts_are_monotone),
        ("greedy_families_are_separated", greedy_families_are_separated),
        ("zero_delta_chains_are_orbits", zero_delta_chains_are_orbits),
        ("tracking_sets_grow_with_eps", tracking_sets_grow_with_eps),
        ("uniform_points_are_positive", uniform_points_are_positive),
        ("pair_classes_are_symmetric_and_shift_invariant", pair_classes_are_symmetric_and_shift_invariant),
        ("omega_is_the_terminal_cycle", omega_is_the_terminal_cycle),
        ("odometers_are_isometric_bijections", odometers_are_isometric_bijections),
        ("xor_lifts_invert_the_factor", xor_lifts_invert_the_factor),
        ("separated_family_certifies_its_count", separated_family_certifies_its_count),
        ("lifted_shadows_sit_over_the_base", lifted_shadows_sit_over_the_base),
        ("compiled_systems_are_valid_and_close_to_representatives", compiled_systems_are_valid_and_close_to_representatives),
        ("double_shift_is_the_shift_squared", double_shift_is_the_shift_squared),
    ]
}
