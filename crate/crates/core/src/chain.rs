//! δ-chain graphs, chain recurrence and chain components.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::nodeset::NodeSet;
use crate::scalar::Dyadic;
use crate::system::FiniteSystem;

/// Edges `i -> j` iff `d(e, j) <= delta` for some successor `e` of `i`.
#[derive(Clone, Debug)]
pub struct ChainGraph {
    delta: Dyadic,
    adj: Vec<Vec<usize>>,
}

impl ChainGraph {
    pub fn new(sys: &FiniteSystem, delta: Dyadic) -> ChainGraph {
        let n = sys.size();
        let t = sys.threshold(delta);
        let near = sys.neighbourhoods(t);
        let adj = (0..n)
            .map(|i| {
                let mut out: Vec<usize> = sys.successors(i).iter().flat_map(|&e| near[e].iter().copied()).collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect();
        ChainGraph { delta, adj }
    }

    /// Graph over arbitrary states; lists are sorted here.
    pub(crate) fn from_adjacency(delta: Dyadic, mut adj: Vec<Vec<usize>>) -> ChainGraph {
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        ChainGraph { delta, adj }
    }

    pub fn delta(&self) -> Dyadic {
        self.delta
    }

    pub fn size(&self) -> usize {
        self.adj.len()
    }

    /// Out-neighbours in increasing order.
    pub fn next(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&j).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// Nodes reachable from `sources` by paths of length at least 1, never
    /// leaving `within` when given.
    pub fn reach(&self, sources: &NodeSet, within: Option<&NodeSet>) -> NodeSet {
        let n = self.size();
        let mut seen = NodeSet::empty(n);
        let mut queue: VecDeque<usize> = sources.iter().collect();
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if within.is_some_and(|s| !s.contains(w)) {
                    continue;
                }
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn reach_from(&self, x: usize) -> NodeSet {
        self.reach(&NodeSet::from_indices(self.size(), [x]), None)
    }

    /// Shortest path of length at least 1 from some source to `target`.
    pub fn path_to(&self, sources: &NodeSet, target: usize, within: Option<&NodeSet>) -> Option<Vec<usize>> {
        let n = self.size();
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0usize; n];
        let mut queue = VecDeque::new();
        let allowed = |w: usize| within.is_none_or(|set| set.contains(w));
        for s in sources.iter() {
            for &w in &self.adj[s] {
                if allowed(w) && depth[w] == 0 {
                    parent[w] = s;
                    depth[w] = 1;
                    queue.push_back(w);
                }
            }
        }
        while let Some(v) = queue.pop_front() {
            if v == target {
                let mut path = vec![v];
                let mut cur = v;
                for _ in 0..depth[v] {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.adj[v] {
                if allowed(w) && depth[w] == 0 {
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Strongly connected components (Tarjan, iterative), each sorted, in
    /// order of least member.
    pub fn strong_components(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comps = Vec::new();
        let mut counter = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut work: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = work.last_mut() {
                if *pos < self.adj[v].len() {
                    let w = self.adj[v][*pos];
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        work.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    work.pop();
                    if let Some(&(u, _)) = work.last() {
                        low[u] = low[u].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                }
            }
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// Components that carry a cycle: more than one node, or a self-loop.
    pub fn recurrent_components(&self) -> Vec<Vec<usize>> {
        self.strong_components()
            .into_iter()
            .filter(|c| c.len() > 1 || self.has_edge(c[0], c[0]))
            .collect()
    }
}

pub fn chain_graph(sys: &FiniteSystem, delta: Dyadic) -> ChainGraph {
    ChainGraph::new(sys, delta)
}

/// `x ->_delta y`: a δ-chain of length at least 1 from `x` to `y`.
pub fn reaches(sys: &FiniteSystem, delta: Dyadic, x: usize, y: usize) -> Result<bool> {
    sys.check_index(x)?;
    sys.check_index(y)?;
    Ok(ChainGraph::new(sys, delta).reach_from(x).contains(y))
}

pub fn chain_recurrent(sys: &FiniteSystem, delta: Dyadic) -> NodeSet {
    let g = ChainGraph::new(sys, delta);
    recurrent_set(&g)
}

fn recurrent_set(g: &ChainGraph) -> NodeSet {
    NodeSet::from_indices(g.size(), g.recurrent_components().into_iter().flatten())
}

/// `C(x) = {x} ∪ {y : x ->_delta y}`.
pub fn chain_class(sys: &FiniteSystem, delta: Dyadic, x: usize) -> Result<NodeSet> {
    sys.check_index(x)?;
    let g = ChainGraph::new(sys, delta);
    Ok(class_in(&g, x))
}

pub(crate) fn class_in(g: &ChainGraph, x: usize) -> NodeSet {
    let mut c = g.reach_from(x);
    c.insert(x);
    c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentClass {
    /// Chain continuous at every tested `eps`.
    OLike,
    /// Chain continuity failed at `eps` for every tested `delta`.
    NoLike { eps: Dyadic, witness: ContinuityWitness },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub nodes: Vec<usize>,
    pub class: Option<ComponentClass>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDecomposition {
    pub delta: Dyadic,
    pub recurrent: Vec<usize>,
    pub components: Vec<Component>,
}

impl ChainDecomposition {
    pub fn component_of(&self, x: usize) -> Option<usize> {
        self.components.iter().position(|c| c.nodes.binary_search(&x).is_ok())
    }
}

pub fn chain_components(sys: &FiniteSystem, delta: Dyadic) -> ChainDecomposition {
    decomposition_of(&ChainGraph::new(sys, delta))
}

pub(crate) fn decomposition_of(g: &ChainGraph) -> ChainDecomposition {
    let comps = g.recurrent_components();
    let mut recurrent: Vec<usize> = comps.iter().flatten().copied().collect();
    recurrent.sort_unstable();
    ChainDecomposition {
        delta: g.delta(),
        recurrent,
        components: comps.into_iter().map(|nodes| Component { nodes, class: None }).collect(),
    }
}

/// Outcome of a chain-stability test over a schedule of `delta` values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub eps: Dyadic,
    /// First scheduled `delta` whose chains from `S` stay `eps`-close to `S`.
    pub granted: Option<Dyadic>,
    /// For each failing `delta` tried before `granted`: a chain leaving the
    /// `eps`-neighbourhood, starting in `S`.
    pub counterexamples: Vec<(Dyadic, Vec<usize>)>,
}

fn check_schedule(schedule: &[Dyadic]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty schedule".into()));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("schedule must be strictly decreasing".into()));
    }
    Ok(())
}

pub fn chain_stable_check(
    sys: &FiniteSystem,
    set: &NodeSet,
    eps: Dyadic,
    delta_schedule: &[Dyadic],
) -> Result<StabilityVerdict> {
    check_schedule(delta_schedule)?;
    if set.is_empty() {
        return Err(Error::InvalidParameter("set must be nonempty".into()));
    }
    if !sys.is_invariant(set) {
        return Err(Error::NotInvariant);
    }
    let t = sys.threshold(eps);
    let mut counterexamples = Vec::new();
    for &delta in delta_schedule {
        let g = ChainGraph::new(sys, delta);
        let reach = g.reach(set, None);
        let escape = reach.iter().find(|&y| sys.dist_key_to_set(y, set) > t);
        match escape {
            None => {
                return Ok(StabilityVerdict { eps, granted: Some(delta), counterexamples });
            }
            Some(y) => {
                let path = g.path_to(set, y, None).expect("escape node is reachable");
                counterexamples.push((delta, path));
            }
        }
    }
    Ok(StabilityVerdict { eps, granted: None, counterexamples })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointStability {
    pub x: usize,
    pub class: Vec<usize>,
    pub verdict: StabilityVerdict,
}

/// Runs [`chain_stable_check`] on every chain class `C(x)` taken at
/// `class_delta`.
pub fn chain_class_stability_audit(
    sys: &FiniteSystem,
    class_delta: Dyadic,
    delta_schedule: &[Dyadic],
    eps: Dyadic,
) -> Result<Vec<PointStability>> {
    let g = ChainGraph::new(sys, class_delta);
    let mut out = Vec::with_capacity(sys.size());
    for x in 0..sys.size() {
        let class = class_in(&g, x);
        let verdict = chain_stable_check(sys, &class, eps, delta_schedule)?;
        out.push(PointStability { x, class: class.to_vec(), verdict });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitivityVerdict {
    pub holds: bool,
    /// Least ordered pair `(x, y)` with no chain from `x` to `y` inside `S`.
    pub gap: Option<(usize, usize)>,
}

pub fn is_chain_transitive(sys: &FiniteSystem, set: &NodeSet, delta: Dyadic) -> Result<TransitivityVerdict> {
    if set.is_empty() {
        return Err(Error::InvalidParameter("set must be nonempty".into()));
    }
    let g = ChainGraph::new(sys, delta);
    Ok(transitivity_in(&g, set))
}

pub(crate) fn transitivity_in(g: &ChainGraph, set: &NodeSet) -> TransitivityVerdict {
    for x in set.iter() {
        let r = g.reach(&NodeSet::from_indices(g.size(), [x]), Some(set));
        if let Some(y) = set.iter().find(|&y| !r.contains(y)) {
            return TransitivityVerdict { holds: false, gap: Some((x, y)) };
        }
    }
    TransitivityVerdict { holds: true, gap: None }
}

/// Chain transitive on every node with primitive (aperiodic) chain graph.
pub fn is_mixing_at_scale(sys: &FiniteSystem, delta: Dyadic) -> bool {
    let g = ChainGraph::new(sys, delta);
    let n = g.size();
    let comps = g.strong_components();
    if comps.len() != 1 {
        return false;
    }
    // period of a strongly connected graph: gcd of level differences
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    let mut period = 0usize;
    while let Some(v) = queue.pop_front() {
        for &w in g.next(v) {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            } else {
                let diff = (level[v] + 1).abs_diff(level[w]);
                period = gcd(period, diff);
            }
        }
    }
    period == 1
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Failure of chain continuity: starting at `x`, the layer `R_step` holds
/// two points at distance greater than `eps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuityWitness {
    pub x: usize,
    pub step: usize,
    pub pair: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuityVerdict {
    pub holds: bool,
    pub witness: Option<ContinuityWitness>,
}

fn widest_pair(sys: &FiniteSystem, set: &NodeSet, t: u64) -> Option<(usize, usize)> {
    let m = set.to_vec();
    for (a, &i) in m.iter().enumerate() {
        for &j in &m[a + 1..] {
            if sys.dist_key(i, j) > t {
                return Some((i, j));
            }
        }
    }
    None
}

/// Layers `R_0 = {x}`, `R_{i+1} = B_delta(f(R_i)) ∩ S`: δ-pseudo-orbits in
/// `S` sharing their start lie in a common layer at every step.
pub fn chain_continuity_check(
    sys: &FiniteSystem,
    set: &NodeSet,
    eps: Dyadic,
    delta: Dyadic,
) -> ContinuityVerdict {
    let g = ChainGraph::new(sys, delta);
    continuity_in(sys, &g, set, eps)
}

pub(crate) fn continuity_in(
    sys: &FiniteSystem,
    g: &ChainGraph,
    set: &NodeSet,
    eps: Dyadic,
) -> ContinuityVerdict {
    let t = sys.threshold(eps);
    let n = sys.size();
    let mut cleared: BTreeMap<NodeSet, ()> = BTreeMap::new();
    for x in set.iter() {
        let mut layer = NodeSet::from_indices(n, [x]);
        let mut seen: BTreeMap<NodeSet, ()> = BTreeMap::new();
        let mut trail = Vec::new();
        let mut step = 0;
        loop {
            if layer.is_empty() || cleared.contains_key(&layer) || seen.contains_key(&layer) {
                break;
            }
            if let Some(pair) = widest_pair(sys, &layer, t) {
                return ContinuityVerdict {
                    holds: false,
                    witness: Some(ContinuityWitness { x, step, pair }),
                };
            }
            seen.insert(layer.clone(), ());
            trail.push(layer.clone());
            let mut next = g.reach_one(&layer);
            next.intersect_with(set);
            layer = next;
            step += 1;
        }
        for l in trail {
            cleared.insert(l, ());
        }
    }
    ContinuityVerdict { holds: true, witness: None }
}

impl ChainGraph {
    /// One step: union of out-neighbours.
    pub fn reach_one(&self, from: &NodeSet) -> NodeSet {
        let mut out = NodeSet::empty(self.size());
        for v in from.iter() {
            for &w in &self.adj[v] {
                out.insert(w);
            }
        }
        out
    }
}

/// Marks each component O-like when for every `eps` some `delta` makes
/// the component chain continuous, and NO-like otherwise.
pub fn classify_components(
    sys: &FiniteSystem,
    decomposition: &ChainDecomposition,
    eps_schedule: &[Dyadic],
    delta_schedule: &[Dyadic],
) -> Result<ChainDecomposition> {
    check_schedule(eps_schedule)?;
    check_schedule(delta_schedule)?;
    let graphs: Vec<ChainGraph> = delta_schedule.iter().map(|&d| ChainGraph::new(sys, d)).collect();
    let mut out = decomposition.clone();
    for comp in &mut out.components {
        let set = NodeSet::from_indices(sys.size(), comp.nodes.iter().copied());
        let mut class = ComponentClass::OLike;
        'eps: for &eps in eps_schedule {
            let mut last = None;
            for g in &graphs {
                let v = continuity_in(sys, g, &set, eps);
                if v.holds {
                    continue 'eps;
                }
                last = v.witness;
            }
            class = ComponentClass::NoLike { eps, witness: last.expect("failing verdict has a witness") };
            break;
        }
        comp.class = Some(class);
    }
    Ok(out)
}
