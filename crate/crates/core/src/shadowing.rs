//! Shadowing verdicts through a subset-tracking safety automaton.
//!
//! A state `(v, C)` pairs the current pseudo-orbit point `v` with the set
//! `C` of positions still reachable by admissible orbits that have tracked
//! the pseudo-orbit so far. The ε-constraint is applied at the current step
//! before moving on: `C' = C ∩ B_eps(v)`, then `C_next = f(C')`. The
//! pseudo-orbit continues along the δ-chain graph. A state with `C' = ∅`
//! is dead; shadowing fails exactly when a dead state is reachable.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{class_in, ChainGraph};
use crate::error::{Error, Result};
use crate::nodeset::NodeSet;
use crate::scalar::Dyadic;
use crate::system::FiniteSystem;

/// Default bound on explored automaton states.
pub const DEFAULT_STATE_CAP: usize = 1 << 21;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scope {
    All,
    FromPoint(usize),
    /// Pseudo-orbits that start in and never leave the set.
    WithinSet(NodeSet),
}

impl Scope {
    pub fn name(&self) -> &'static str {
        match self {
            Scope::All => "all",
            Scope::FromPoint(_) => "from-point",
            Scope::WithinSet(_) => "within-set",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowingVerdict {
    pub eps: Dyadic,
    pub delta: Dyadic,
    pub scope: Scope,
    /// `None` for the infinite-horizon verdict.
    pub horizon: Option<usize>,
    pub holds: bool,
    /// Least failing pseudo-orbit prefix; its last point is where every
    /// candidate shadower has been lost.
    pub counterexample: Option<Vec<usize>>,
    pub states: usize,
}

/// Shared interning of candidate sets.
struct SetTable {
    ids: BTreeMap<NodeSet, usize>,
    sets: Vec<NodeSet>,
}

impl SetTable {
    fn new() -> SetTable {
        SetTable { ids: BTreeMap::new(), sets: Vec::new() }
    }

    fn intern(&mut self, s: NodeSet) -> usize {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let id = self.sets.len();
        self.ids.insert(s.clone(), id);
        self.sets.push(s);
        id
    }
}

struct Automaton<'a> {
    sys: &'a FiniteSystem,
    graph: ChainGraph,
    eps_key: u64,
    balls: Vec<Option<NodeSet>>,
    table: SetTable,
    cap: usize,
}

impl<'a> Automaton<'a> {
    fn new(sys: &'a FiniteSystem, eps: Dyadic, delta: Dyadic, cap: usize) -> Automaton<'a> {
        Automaton {
            sys,
            graph: ChainGraph::new(sys, delta),
            eps_key: sys.threshold(eps),
            balls: vec![None; sys.size()],
            table: SetTable::new(),
            cap,
        }
    }

    fn ball(&mut self, v: usize) -> &NodeSet {
        if self.balls[v].is_none() {
            let t = self.eps_key;
            let sys = self.sys;
            self.balls[v] = Some(NodeSet::from_indices(
                sys.size(),
                (0..sys.size()).filter(|&y| sys.within(v, y, t)),
            ));
        }
        self.balls[v].as_ref().unwrap()
    }

    /// Candidate set after the step at `v`, or `None` when empty.
    fn step(&mut self, v: usize, c: usize) -> Option<usize> {
        let mut cur = self.table.sets[c].clone();
        cur.intersect_with(self.ball(v));
        if cur.is_empty() {
            return None;
        }
        let next = self.sys.successor_set(&cur);
        Some(self.table.intern(next))
    }

    /// Breadth-first search from `starts`; returns the least failing prefix
    /// (if any) and the number of states explored.
    fn search(
        &mut self,
        starts: &[usize],
        within: Option<&NodeSet>,
        horizon: Option<usize>,
    ) -> Result<(Option<Vec<usize>>, usize)> {
        let all = self.table.intern(NodeSet::full(self.sys.size()));
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut nodes: Vec<(usize, usize, usize, usize)> = Vec::new(); // (v, c, parent, depth)
        let mut queue = VecDeque::new();
        for &s in starts {
            if let alloc::collections::btree_map::Entry::Vacant(e) = index.entry((s, all)) {
                e.insert(nodes.len());
                queue.push_back(nodes.len());
                nodes.push((s, all, usize::MAX, 0));
            }
        }
        while let Some(id) = queue.pop_front() {
            let (v, c, _, depth) = nodes[id];
            match self.step(v, c) {
                None => {
                    let mut path = vec![v];
                    let mut cur = nodes[id].2;
                    while cur != usize::MAX {
                        path.push(nodes[cur].0);
                        cur = nodes[cur].2;
                    }
                    path.reverse();
                    return Ok((Some(path), nodes.len()));
                }
                Some(next) => {
                    if horizon.is_some_and(|h| depth + 1 >= h) {
                        continue;
                    }
                    let outs: Vec<usize> = self.graph.next(v).to_vec();
                    for w in outs {
                        if within.is_some_and(|s| !s.contains(w)) {
                            continue;
                        }
                        if let alloc::collections::btree_map::Entry::Vacant(e) = index.entry((w, next)) {
                            if nodes.len() >= self.cap {
                                return Err(Error::CapExceeded {
                                    what: "shadowing automaton states",
                                    size: nodes.len() + 1,
                                    cap: self.cap,
                                });
                            }
                            e.insert(nodes.len());
                            queue.push_back(nodes.len());
                            nodes.push((w, next, id, depth + 1));
                        }
                    }
                }
            }
        }
        Ok((None, nodes.len()))
    }
}

/// Shadowing verdict at `(eps, delta)`. With `horizon = Some(h)` only
/// pseudo-orbit prefixes of `h` points are required to be shadowed.
pub fn shadowing_check(
    sys: &FiniteSystem,
    eps: Dyadic,
    delta: Dyadic,
    scope: Scope,
    horizon: Option<usize>,
    cap: usize,
) -> Result<ShadowingVerdict> {
    let mut auto = Automaton::new(sys, eps, delta, cap);
    let (starts, within): (Vec<usize>, Option<&NodeSet>) = match &scope {
        Scope::All => ((0..sys.size()).collect(), None),
        Scope::FromPoint(x) => {
            sys.check_index(*x)?;
            (vec![*x], None)
        }
        Scope::WithinSet(s) => (s.to_vec(), Some(s)),
    };
    let (counterexample, states) = auto.search(&starts, within, horizon)?;
    Ok(ShadowingVerdict {
        eps,
        delta,
        holds: counterexample.is_none(),
        scope,
        horizon,
        counterexample,
        states,
    })
}

/// `{x : every δ-pseudo-orbit from x is ε-shadowed}` (infinite horizon).
///
/// Builds the automaton reachable from every start once and propagates
/// failure backwards.
pub fn shadowable_points(sys: &FiniteSystem, eps: Dyadic, delta: Dyadic, cap: usize) -> Result<NodeSet> {
    let mut auto = Automaton::new(sys, eps, delta, cap);
    let n = sys.size();
    let all = auto.table.intern(NodeSet::full(n));
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut states: Vec<(usize, usize)> = Vec::new();
    let mut preds: Vec<Vec<usize>> = Vec::new();
    let mut dead = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        index.insert((s, all), states.len());
        states.push((s, all));
        preds.push(Vec::new());
        queue.push_back(s);
    }
    while let Some(id) = queue.pop_front() {
        let (v, c) = states[id];
        match auto.step(v, c) {
            None => dead.push(id),
            Some(next) => {
                let outs: Vec<usize> = auto.graph.next(v).to_vec();
                for w in outs {
                    let target = match index.get(&(w, next)) {
                        Some(&t) => t,
                        None => {
                            if states.len() >= cap {
                                return Err(Error::CapExceeded {
                                    what: "shadowing automaton states",
                                    size: states.len() + 1,
                                    cap,
                                });
                            }
                            let t = states.len();
                            index.insert((w, next), t);
                            states.push((w, next));
                            preds.push(Vec::new());
                            queue.push_back(t);
                            t
                        }
                    };
                    preds[target].push(id);
                }
            }
        }
    }
    let mut failing = vec![false; states.len()];
    let mut stack = dead;
    for &d in &stack {
        failing[d] = true;
    }
    while let Some(s) = stack.pop() {
        for &p in &preds[s] {
            if !failing[p] {
                failing[p] = true;
                stack.push(p);
            }
        }
    }
    Ok(NodeSet::from_indices(n, (0..n).filter(|&x| !failing[x])))
}

/// Admissible orbit segment `y_0, ..., y_{L-1}` with `d(y_i, x_i) <= radius_i`,
/// choosing the least index at the last step and least predecessors
/// backwards. `None` when no orbit tracks the sequence.
pub fn tracking_orbit(sys: &FiniteSystem, points: &[usize], radii: &[Dyadic]) -> Option<Vec<usize>> {
    let n = sys.size();
    if points.is_empty() {
        return Some(Vec::new());
    }
    let ball = |x: usize, r: Dyadic| {
        let t = sys.threshold(r);
        NodeSet::from_indices(n, (0..n).filter(|&y| sys.within(x, y, t)))
    };
    let mut layers = Vec::with_capacity(points.len());
    let mut cur = ball(points[0], radii[0]);
    for i in 0..points.len() {
        if i > 0 {
            let mut next = sys.successor_set(&cur);
            next.intersect_with(&ball(points[i], radii[i]));
            cur = next;
        }
        if cur.is_empty() {
            return None;
        }
        layers.push(cur.clone());
    }
    let mut orbit = vec![0; points.len()];
    orbit[points.len() - 1] = layers[points.len() - 1].first().unwrap();
    for i in (0..points.len() - 1).rev() {
        let target = orbit[i + 1];
        orbit[i] = layers[i]
            .iter()
            .find(|&y| sys.successors(y).contains(&target))
            .expect("backward step exists by construction");
    }
    Some(orbit)
}

/// Shadow of a finite pseudo-orbit at constant radius `eps`.
pub fn shadow_witness(sys: &FiniteSystem, pseudo_orbit: &[usize], eps: Dyadic) -> Option<Vec<usize>> {
    tracking_orbit(sys, pseudo_orbit, &vec![eps; pseudo_orbit.len()])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitShadow {
    pub start: usize,
    pub orbit: Vec<usize>,
    /// Tracking error `d(y_i, x_i)` at each step.
    pub errors: Vec<Dyadic>,
}

/// Finds an orbit whose error at step `i` is at most
/// `min(eps, max(schedule[i], resolution))`.
pub fn limit_shadow_check(
    sys: &FiniteSystem,
    pseudo_orbit: &[usize],
    error_schedule: &[Dyadic],
    eps: Dyadic,
) -> Result<Option<LimitShadow>> {
    if error_schedule.len() < pseudo_orbit.len() {
        return Err(Error::ScheduleTooShort { needed: pseudo_orbit.len(), got: error_schedule.len() });
    }
    if error_schedule.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidParameter("error schedule must be non-increasing".into()));
    }
    for &x in pseudo_orbit {
        sys.check_index(x)?;
    }
    for i in 0..pseudo_orbit.len().saturating_sub(1) {
        let err = sys.successors(pseudo_orbit[i])
            .iter()
            .map(|&e| sys.dist(e, pseudo_orbit[i + 1]))
            .min()
            .unwrap();
        if err > error_schedule[i] {
            return Err(Error::Precondition(format!(
                "step {i} has error {err} above schedule {}",
                error_schedule[i]
            )));
        }
    }
    let res = sys.resolution().unwrap_or(Dyadic::ZERO);
    let radii: Vec<Dyadic> = error_schedule[..pseudo_orbit.len()]
        .iter()
        .map(|&s| eps.min(s.max(res)))
        .collect();
    Ok(tracking_orbit(sys, pseudo_orbit, &radii).map(|orbit| {
        let errors = orbit.iter().zip(pseudo_orbit).map(|(&y, &x)| sys.dist(y, x)).collect();
        LimitShadow { start: orbit[0], orbit, errors }
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma12Row {
    pub eps: Dyadic,
    pub delta: Dyadic,
    pub x: usize,
    /// `x` is (ε, δ)-shadowable.
    pub point: bool,
    /// Every point of `C(x)` is (ε, δ)-shadowable.
    pub class_points: bool,
    /// Shadowing holds on `C(x)` for pseudo-orbits confined to it.
    pub within_class: bool,
}

impl Lemma12Row {
    pub fn agrees(&self) -> bool {
        self.point == self.class_points && self.class_points == self.within_class
    }
}

/// Compares the three shadowing notions attached to each chain class over a
/// grid of `(eps, delta)` cells; `C(x)` is taken at the cell's `delta`.
pub fn lemma12_audit(sys: &FiniteSystem, grid: &[(Dyadic, Dyadic)], cap: usize) -> Result<Vec<Lemma12Row>> {
    let mut rows = Vec::new();
    for &(eps, delta) in grid {
        let sh = shadowable_points(sys, eps, delta, cap)?;
        let g = ChainGraph::new(sys, delta);
        let mut within_cache: BTreeMap<NodeSet, bool> = BTreeMap::new();
        for x in 0..sys.size() {
            let class = class_in(&g, x);
            let class_points = class.is_subset(&sh);
            let within_class = match within_cache.get(&class) {
                Some(&v) => v,
                None => {
                    let v = shadowing_check(sys, eps, delta, Scope::WithinSet(class.clone()), None, cap)?.holds;
                    within_cache.insert(class.clone(), v);
                    v
                }
            };
            rows.push(Lemma12Row { eps, delta, x, point: sh.contains(x), class_points, within_class });
        }
    }
    Ok(rows)
}

/// Output of [`lift_shadow`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    /// Point with `F(z) = x` whose orbit tracks the fiber chain.
    pub z: usize,
    /// Index from which tracking is controlled.
    pub start: usize,
    pub w_start: usize,
    /// `d(z_{N+j}, f^j(w_N))` for each remaining step.
    pub errors: Vec<Dyadic>,
    /// The bounds `r_{N+j}` they are checked against.
    pub bounds: Vec<Dyadic>,
}

/// Lifts a limit-shadowed base pseudo-orbit through a factor map with
/// separated fibers.
///
/// `factor[u]` is `F(u)`; `xs` is the base pseudo-orbit limit-shadowed by
/// `x`; `zs` is a pseudo-orbit with `F(z_i) = x_i`; `modulus[i]` is the
/// open-map radius `r_i` for `delta_i = d(x_i, f^i(x))`. The hypotheses are
/// checked on the instance and reported when they fail.
pub fn lift_shadow(
    sys: &FiniteSystem,
    factor: &[usize],
    x: usize,
    xs: &[usize],
    zs: &[usize],
    modulus: &[Dyadic],
) -> Result<Lift> {
    let n = sys.size();
    let inv = sys.inverse().ok_or(Error::NotInvertible)?;
    if factor.len() != n || factor.iter().any(|&u| u >= n) {
        return Err(Error::InvalidParameter("factor table does not match the system".into()));
    }
    let len = xs.len();
    if zs.len() != len || len == 0 {
        return Err(Error::InvalidParameter("base and fiber sequences differ in length".into()));
    }
    if modulus.len() < len {
        return Err(Error::ScheduleTooShort { needed: len, got: modulus.len() });
    }
    sys.check_index(x)?;
    for i in 0..n {
        if factor[sys.image(i)] != sys.image(factor[i]) {
            return Err(Error::Precondition(format!("F does not commute with f at {i}")));
        }
    }
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, &t) in factor.iter().enumerate() {
        fibers[t].push(u);
    }
    for fib in &fibers {
        for (a, &u) in fib.iter().enumerate() {
            for &v in &fib[a + 1..] {
                if sys.dist(u, v) < Dyadic::ONE {
                    return Err(Error::Precondition(format!(
                        "fiber points {u} and {v} closer than 1"
                    )));
                }
            }
        }
    }
    for (i, (&z, &xi)) in zs.iter().zip(xs).enumerate() {
        if factor[z] != xi {
            return Err(Error::Precondition(format!("F(z_{i}) differs from x_{i}")));
        }
    }
    let orbit_x = sys.orbit(x, len);
    // open-map property at the pairs the construction uses
    for i in 0..len {
        let (s, t) = (xs[i], orbit_x[i]);
        let r = modulus[i];
        for &u in &fibers[s] {
            if !fibers[t].iter().any(|&v| sys.dist(u, v) <= r) {
                return Err(Error::Precondition(format!(
                    "modulus r_{i} = {r} misses the fiber over f^{i}(x)"
                )));
            }
        }
    }
    let quarter = Dyadic::new(1, 2);
    let half = Dyadic::new(1, 1);
    let tail_ok = |i: usize| -> bool {
        let r = modulus[i];
        if r.is_negative() || r >= half {
            return false;
        }
        let rt = sys.threshold(r);
        let qt = sys.threshold(quarter);
        for u in 0..n {
            for v in 0..n {
                if sys.dist_key(u, v) <= rt && sys.dist_key(sys.image(u), sys.image(v)) > qt {
                    return false;
                }
            }
        }
        i + 1 >= len || sys.dist(sys.image(zs[i]), zs[i + 1]) <= quarter
    };
    let mut start = len;
    for i in (0..len).rev() {
        if tail_ok(i) {
            start = i;
        } else {
            break;
        }
    }
    if start == len {
        return Err(Error::Precondition("no index satisfies the tail conditions".into()));
    }
    let target = orbit_x[start];
    let w = *fibers[target]
        .iter()
        .find(|&&v| sys.dist(zs[start], v) <= modulus[start])
        .ok_or_else(|| Error::Inconsistency("no fiber point within r_N of z_N".into()))?;
    let mut errors = Vec::new();
    let mut cur = w;
    for j in 0..len - start {
        let e = sys.dist(zs[start + j], cur);
        if e > modulus[start + j] {
            return Err(Error::Inconsistency(format!("tracking bound fails at step {}", start + j)));
        }
        errors.push(e);
        cur = sys.image(cur);
    }
    let mut z = w;
    for _ in 0..start {
        z = inv[z];
    }
    if factor[z] != x {
        return Err(Error::Inconsistency("lifted point is not over x".into()));
    }
    Ok(Lift { z, start, w_start: w, errors, bounds: modulus[start..len].to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(num: i64, exp: u32) -> Dyadic {
        Dyadic::new(num, exp)
    }

    fn two_points(dist: Dyadic, image: Vec<usize>) -> FiniteSystem {
        FiniteSystem::from_table(&[vec![Dyadic::ZERO, dist], vec![dist, Dyadic::ZERO]], image).unwrap()
    }

    #[test]
    fn two_cycle_holds() {
        let sys = two_points(Dyadic::ONE, vec![1, 0]);
        let v = shadowing_check(&sys, d(2, 3), d(2, 3), Scope::All, None, DEFAULT_STATE_CAP).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn close_fixed_points_fail() {
        let sys = two_points(d(1, 2), vec![0, 1]);
        let v = shadowing_check(&sys, d(1, 3), d(1, 2), Scope::All, None, DEFAULT_STATE_CAP).unwrap();
        assert!(!v.holds);
        assert_eq!(v.counterexample, Some(vec![0, 1]));
        assert!(shadowable_points(&sys, d(1, 3), d(1, 2), DEFAULT_STATE_CAP).unwrap().is_empty());
    }

    #[test]
    fn horizon_one_always_holds() {
        let sys = two_points(d(1, 2), vec![0, 1]);
        let v = shadowing_check(&sys, d(1, 3), d(1, 2), Scope::All, Some(1), DEFAULT_STATE_CAP).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn witness_tracks_true_orbit() {
        let sys = two_points(Dyadic::ONE, vec![1, 0]);
        assert_eq!(shadow_witness(&sys, &[0, 1, 0], Dyadic::ZERO), Some(vec![0, 1, 0]));
        assert_eq!(shadow_witness(&sys, &[0, 0], Dyadic::ZERO), None);
    }

    #[test]
    fn limit_shadow_of_true_orbit() {
        let sys = two_points(Dyadic::ONE, vec![1, 0]);
        let found = limit_shadow_check(&sys, &[1, 0, 1], &[Dyadic::ZERO; 3], Dyadic::ONE).unwrap().unwrap();
        assert_eq!(found.start, 1);
        assert!(limit_shadow_check(&sys, &[1, 0, 1], &[Dyadic::ZERO; 2], Dyadic::ONE).is_err());
    }

    #[test]
    fn lift_over_fixed_point() {
        // two fixed points at distance 1 over a single base point
        let sys = two_points(Dyadic::ONE, vec![0, 1]).with_invertible(true);
        let factor = [0, 0];
        let r = [d(1, 3); 4];
        let lift = lift_shadow(&sys, &factor, 0, &[0; 4], &[1; 4], &r).unwrap();
        assert_eq!(lift.z, 1);
        assert_eq!(lift.start, 0);
    }
}
