//! Pairs of δ-chains, and the constructions built from them: separated
//! chain families, shift factors of a power of the map, and the
//! h-expansiveness probe.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{is_chain_transitive, ChainGraph};
use crate::entropy::{h_star, is_separated_family, CountLimits};
use crate::error::{Error, Result};
use crate::nodeset::NodeSet;
use crate::scalar::Dyadic;
use crate::shadowing::{shadow_witness, shadowing_check, Scope};
use crate::system::FiniteSystem;

/// Two δ-chains of equal length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPair {
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    pub delta: Dyadic,
    /// `max_i d(x_i, y_i)`.
    pub separation: Dyadic,
    /// `(x_0, x_k) = (y_0, y_k)`.
    pub endpoints_equal: bool,
}

impl ChainPair {
    pub fn new(sys: &FiniteSystem, xs: Vec<usize>, ys: Vec<usize>, delta: Dyadic) -> Result<ChainPair> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::InvalidParameter("chain pair needs two nonempty chains of equal length".into()));
        }
        for c in [&xs, &ys] {
            if let Some(i) = chain_break(sys, c, delta) {
                return Err(Error::InvalidParameter(format!("step {i} is not a {delta}-chain step")));
            }
        }
        let separation = xs.iter().zip(&ys).map(|(&a, &b)| sys.dist(a, b)).fold(Dyadic::ZERO, Dyadic::max);
        let endpoints_equal = xs[0] == ys[0] && xs.last() == ys.last();
        Ok(ChainPair { xs, ys, delta, separation, endpoints_equal })
    }

    /// Number of steps `k`.
    pub fn steps(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn side(&self, b: bool) -> &[usize] {
        if b { &self.ys } else { &self.xs }
    }
}

/// First index `i` with `c_i -> c_{i+1}` not a δ-step.
pub(crate) fn chain_break(sys: &FiniteSystem, chain: &[usize], delta: Dyadic) -> Option<usize> {
    let t = sys.threshold(delta);
    chain
        .windows(2)
        .position(|w| !sys.successors(w[0]).iter().any(|&e| sys.within(e, w[1], t)))
}

/// Least key `k` with `k 2^{-scale} >= r`.
fn ceil_key(sys: &FiniteSystem, r: Dyadic) -> u64 {
    let t = sys.threshold(r);
    if sys.key_to_scalar(t) == r { t } else { t + 1 }
}

/// Outcome of [`chain_pair_search`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairSearch {
    Found(ChainPair),
    /// Every reachable pair state was explored: no such pair exists.
    Absent { states: usize },
    /// The length bound or the state cap stopped the search.
    Inconclusive { states: usize, reason: String },
}

impl PairSearch {
    pub fn found(&self) -> Option<&ChainPair> {
        match self {
            PairSearch::Found(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, PairSearch::Absent { .. })
    }
}

/// Shortest pair of δ-chains with common endpoints whose pointwise
/// distances stay at most `eps` and reach `r` somewhere.
///
/// Breadth-first search over `(a, b, reached)` with `d(a, b) <= eps`,
/// started on the diagonal; the first diagonal state with `reached` set
/// closes the pair.
pub fn chain_pair_search(
    sys: &FiniteSystem,
    graph: &ChainGraph,
    eps: Dyadic,
    r: Dyadic,
    length_bound: usize,
    cap: usize,
) -> Result<PairSearch> {
    if !r.is_positive() || r > eps {
        return Err(Error::InvalidParameter("need 0 < r <= eps".into()));
    }
    let n = sys.size();
    let et = sys.threshold(eps);
    let rt = ceil_key(sys, r);
    let mut index: BTreeMap<(usize, usize, bool), usize> = BTreeMap::new();
    let mut states: Vec<(usize, usize, bool)> = Vec::new();
    let mut parent: Vec<usize> = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();
    for x in 0..n {
        index.insert((x, x, false), states.len());
        states.push((x, x, false));
        parent.push(usize::MAX);
        depth.push(0);
        queue.push_back(x);
    }
    let mut truncated = false;
    while let Some(id) = queue.pop_front() {
        let (a, b, flag) = states[id];
        if depth[id] >= length_bound {
            truncated = true;
            continue;
        }
        for &a2 in graph.next(a) {
            for &b2 in graph.next(b) {
                let key = sys.dist_key(a2, b2);
                if key > et {
                    continue;
                }
                let state = (a2, b2, flag || key >= rt);
                if index.contains_key(&state) {
                    continue;
                }
                if states.len() >= cap {
                    return Ok(PairSearch::Inconclusive {
                        states: states.len(),
                        reason: format!("state cap {cap} reached"),
                    });
                }
                let t = states.len();
                index.insert(state, t);
                states.push(state);
                parent.push(id);
                depth.push(depth[id] + 1);
                if state.0 == state.1 && state.2 {
                    let (mut xs, mut ys) = (Vec::new(), Vec::new());
                    let mut cur = t;
                    while cur != usize::MAX {
                        xs.push(states[cur].0);
                        ys.push(states[cur].1);
                        cur = parent[cur];
                    }
                    xs.reverse();
                    ys.reverse();
                    return Ok(PairSearch::Found(ChainPair::new(sys, xs, ys, graph.delta())?));
                }
                queue.push_back(t);
            }
        }
    }
    if truncated {
        Ok(PairSearch::Inconclusive { states: states.len(), reason: format!("length bound {length_bound} reached") })
    } else {
        Ok(PairSearch::Absent { states: states.len() })
    }
}

/// For every `w` in `set`, a shortest pair of δ-chains inside `set`
/// starting at `w` whose endpoints are more than `e` apart.
pub fn divergent_pair_table(
    sys: &FiniteSystem,
    graph: &ChainGraph,
    set: &NodeSet,
    e: Dyadic,
) -> Result<BTreeMap<usize, ChainPair>> {
    let et = sys.threshold(e);
    let mut table = BTreeMap::new();
    for w in set.iter() {
        let mut parent: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        parent.insert((w, w), (usize::MAX, usize::MAX));
        let mut queue = VecDeque::from([(w, w)]);
        let mut goal = None;
        'bfs: while let Some((a, b)) = queue.pop_front() {
            for &a2 in graph.next(a) {
                if !set.contains(a2) {
                    continue;
                }
                for &b2 in graph.next(b) {
                    if !set.contains(b2) || parent.contains_key(&(a2, b2)) {
                        continue;
                    }
                    parent.insert((a2, b2), (a, b));
                    if sys.dist_key(a2, b2) > et {
                        goal = Some((a2, b2));
                        break 'bfs;
                    }
                    queue.push_back((a2, b2));
                }
            }
        }
        let Some(mut cur) = goal else {
            return Err(Error::Precondition(format!("no pair of chains from {w} separates beyond {e}")));
        };
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        while cur.0 != usize::MAX {
            xs.push(cur.0);
            ys.push(cur.1);
            cur = parent[&cur];
        }
        xs.reverse();
        ys.reverse();
        table.insert(w, ChainPair::new(sys, xs, ys, graph.delta())?);
    }
    Ok(table)
}

/// `2^N` δ-chains `α α(s,1) ... α(s,N)` indexed by `s ∈ {a, b}^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatedFamily {
    /// `chains[s]`, with bit `N - 1 - i` of `s` choosing side `b` at piece `i`.
    pub chains: Vec<Vec<usize>>,
    pub levels: usize,
    /// Steps of the connector, `L`.
    pub connector_steps: usize,
    /// Longest piece in the table, `K + M`.
    pub piece_bound: usize,
    pub e: Dyadic,
    /// `L + N (K + M)`.
    pub horizon: usize,
    /// `ln 2 / (K + M)`.
    pub rate_bound: f64,
}

impl SeparatedFamily {
    /// Chains extended along the canonical image to `len` points.
    pub fn padded(&self, sys: &FiniteSystem, len: usize) -> Vec<Vec<usize>> {
        self.chains
            .iter()
            .map(|c| {
                let mut c = c.clone();
                while c.len() < len {
                    c.push(sys.image(*c.last().unwrap()));
                }
                c
            })
            .collect()
    }
}

pub fn separated_family_builder(
    sys: &FiniteSystem,
    connector: &[usize],
    table: &BTreeMap<usize, ChainPair>,
    levels: usize,
    e: Dyadic,
) -> Result<SeparatedFamily> {
    let Some(&q) = connector.last() else {
        return Err(Error::InvalidParameter("empty connector".into()));
    };
    if levels == 0 || levels > 20 {
        return Err(Error::InvalidParameter("N must be in 1..=20".into()));
    }
    let delta = table.values().next().map_or(Dyadic::ZERO, |p| p.delta);
    if let Some(i) = chain_break(sys, connector, delta) {
        return Err(Error::InvalidParameter(format!("connector breaks at step {i}")));
    }
    let et = sys.threshold(e);
    for (&w, p) in table {
        if p.xs[0] != w || p.ys[0] != w || p.delta != delta {
            return Err(Error::InvalidParameter(format!("table entry for {w} does not start at {w}")));
        }
        if sys.dist_key(*p.xs.last().unwrap(), *p.ys.last().unwrap()) <= et {
            return Err(Error::InvalidParameter(format!("table entry for {w} ends within {e}")));
        }
    }
    let piece_bound = table.values().map(ChainPair::steps).max().unwrap_or(0);
    if piece_bound == 0 {
        return Err(Error::InvalidParameter("pair table is empty".into()));
    }
    let mut chains = Vec::with_capacity(1 << levels);
    for s in 0..1usize << levels {
        let mut chain = connector.to_vec();
        let mut landing = q;
        for i in 0..levels {
            let pair = table.get(&landing).ok_or_else(|| {
                Error::Precondition(format!("no pair table entry at landing point {landing}"))
            })?;
            let piece = pair.side((s >> (levels - 1 - i)) & 1 == 1);
            chain.extend_from_slice(&piece[1..]);
            landing = *piece.last().unwrap();
        }
        chains.push(chain);
    }
    for (a, u) in chains.iter().enumerate() {
        for v in &chains[a + 1..] {
            if !u.iter().zip(v).any(|(&x, &y)| sys.dist_key(x, y) > et) {
                return Err(Error::Inconsistency("two family chains are never separated".into()));
            }
        }
    }
    let connector_steps = connector.len() - 1;
    Ok(SeparatedFamily {
        chains,
        levels,
        connector_steps,
        piece_bound,
        e,
        horizon: connector_steps + levels * piece_bound,
        rate_bound: core::f64::consts::LN_2 / piece_bound as f64,
    })
}

/// Evidence that a power of the map factors onto the one-sided 2-shift on
/// prefixes of `N` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorCertificate {
    /// Block length `m = k + l`.
    pub m: usize,
    pub levels: usize,
    pub eps: Dyadic,
    pub r: Dyadic,
    pub gamma: Dyadic,
    /// `pseudo_orbits[s]` is the prefix of `Γ(s)` with `m N` points.
    pub pseudo_orbits: Vec<Vec<usize>>,
    /// Orbit segment γ-shadowing `pseudo_orbits[s]`.
    pub shadows: Vec<Vec<usize>>,
    /// Each shadow tracks exactly one pseudo-orbit, its own.
    pub well_defined: bool,
    pub surjective: bool,
    /// `f^m` of each shadow tracks `Γ(σ s)` over `N - 1` blocks, uniquely.
    pub semiconjugate: bool,
    /// Shadows pairwise `(m N, r - 2γ)`-separated.
    pub separated: bool,
    /// `max_{s, t, i} d(y(s)_i, y(t)_i)`.
    pub diameter: Dyadic,
    pub within_eps: bool,
    pub within_three_eps: bool,
    /// `ln 2^N / N`: growth per application of `f^m` certified by the shadows.
    pub power_rate_bound: f64,
    /// The same bound divided by `m`.
    pub rate_bound: f64,
}

impl FactorCertificate {
    pub fn holds(&self) -> bool {
        self.well_defined && self.surjective && self.semiconjugate && self.separated
    }
}

/// Which block each of the first `blocks` blocks of `walk` tracks within
/// `gamma`. Two matching blocks mean the separation bookkeeping failed.
fn decode(sys: &FiniteSystem, walk: &[usize], block: &[Vec<usize>; 2], blocks: usize, gt: u64) -> Result<Vec<bool>> {
    let m = block[0].len();
    let mut out = Vec::with_capacity(blocks);
    for i in 0..blocks {
        let seg = &walk[i * m..(i + 1) * m];
        let hits: Vec<bool> = block
            .iter()
            .map(|b| seg.iter().zip(b).all(|(&y, &x)| sys.dist_key(y, x) <= gt))
            .collect();
        match (hits[0], hits[1]) {
            (true, false) => out.push(false),
            (false, true) => out.push(true),
            (true, true) => {
                return Err(Error::Inconsistency(format!("block {i} is tracked on both sides")))
            }
            (false, false) => {
                return Err(Error::Inconsistency(format!("block {i} tracks neither side")))
            }
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub fn subshift_factor_builder(
    sys: &FiniteSystem,
    pair: &ChainPair,
    connector: &[usize],
    eps: Dyadic,
    r: Dyadic,
    gamma: Dyadic,
    levels: usize,
    cap: usize,
) -> Result<FactorCertificate> {
    if !pair.endpoints_equal {
        return Err(Error::InvalidParameter("chain pair endpoints differ".into()));
    }
    if pair.separation < r || pair.separation > eps {
        return Err(Error::InvalidParameter("pair separation outside [r, eps]".into()));
    }
    if !(gamma.is_positive() && gamma < eps && gamma + gamma < r) {
        return Err(Error::InvalidParameter("need 0 < gamma < min(eps, r/2)".into()));
    }
    if levels == 0 || levels > 16 {
        return Err(Error::InvalidParameter("N must be in 1..=16".into()));
    }
    let k = pair.steps();
    if connector.first() != pair.xs.last() || connector.last() != pair.xs.first() {
        return Err(Error::InvalidParameter("connector must run from x_k back to x_0".into()));
    }
    if let Some(i) = chain_break(sys, connector, pair.delta) {
        return Err(Error::InvalidParameter(format!("connector breaks at step {i}")));
    }
    let verdict = shadowing_check(sys, gamma, pair.delta, Scope::All, None, cap)?;
    if !verdict.holds {
        return Err(Error::Precondition(format!(
            "no {gamma}-shadowing of {}-pseudo-orbits",
            pair.delta
        )));
    }
    let l = connector.len() - 1;
    let m = k + l;
    let block = |c: bool| -> Vec<usize> {
        let mut b = pair.side(c)[..k].to_vec();
        b.extend_from_slice(&connector[..l]);
        b
    };
    let blocks = [block(false), block(true)];
    let bit = |s: usize, i: usize| (s >> (levels - 1 - i)) & 1 == 1;
    let gt = sys.threshold(gamma);
    let count = 1usize << levels;
    let mut pseudo_orbits = Vec::with_capacity(count);
    let mut shadows = Vec::with_capacity(count);
    let mut well_defined = true;
    let mut semiconjugate = true;
    let mut hit = vec![false; count];
    for s in 0..count {
        let gamma_s: Vec<usize> = (0..levels).flat_map(|i| blocks[bit(s, i) as usize].iter().copied()).collect();
        let y = shadow_witness(sys, &gamma_s, gamma).ok_or_else(|| {
            Error::Inconsistency(format!("pseudo-orbit {s} not shadowed despite the shadowing verdict"))
        })?;
        let code = decode(sys, &y, &blocks, levels, gt)?;
        let decoded = code.iter().fold(0usize, |a, &b| (a << 1) | b as usize);
        well_defined &= decoded == s;
        hit[decoded] = true;
        if levels > 1 {
            let tail = decode(sys, &y[m..], &blocks, levels - 1, gt)?;
            let shifted = tail.iter().fold(0usize, |a, &b| (a << 1) | b as usize);
            semiconjugate &= shifted == s & ((1 << (levels - 1)) - 1);
        }
        pseudo_orbits.push(gamma_s);
        shadows.push(y);
    }
    let surjective = hit.iter().all(|&h| h);
    let separated = is_separated_family(sys, &shadows, r - gamma - gamma);
    let mut diameter = Dyadic::ZERO;
    for (a, u) in shadows.iter().enumerate() {
        for v in &shadows[a + 1..] {
            for (&x, &y) in u.iter().zip(v) {
                diameter = diameter.max(sys.dist(x, y));
            }
        }
    }
    let power_rate_bound = if separated { core::f64::consts::LN_2 } else { 0.0 };
    Ok(FactorCertificate {
        m,
        levels,
        eps,
        r,
        gamma,
        pseudo_orbits,
        shadows,
        well_defined,
        surjective,
        semiconjugate,
        separated,
        diameter,
        within_eps: diameter <= eps,
        within_three_eps: diameter <= eps + eps + eps,
        power_rate_bound,
        rate_bound: power_rate_bound / m as f64,
    })
}

/// Two orbit cycles that meet and separate forever: read cyclically they
/// form a pair with `liminf d = 0 < limsup d <= eps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScrambledWalks {
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
}

/// Searches the graph of orbit pairs staying within `eps` for a cycle
/// through both a diagonal and an off-diagonal pair.
pub fn scrambled_walk_search(sys: &FiniteSystem, eps: Dyadic, cap: usize) -> Result<Option<ScrambledWalks>> {
    let et = sys.threshold(eps);
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut states: Vec<(usize, usize)> = Vec::new();
    let mut adj: Vec<Vec<usize>> = Vec::new();
    for c in 0..sys.size() {
        index.insert((c, c), c);
        states.push((c, c));
        adj.push(Vec::new());
    }
    let mut k = 0;
    while k < states.len() {
        let (a, b) = states[k];
        for &a2 in sys.successors(a) {
            for &b2 in sys.successors(b) {
                if sys.dist_key(a2, b2) > et {
                    continue;
                }
                let t = match index.get(&(a2, b2)) {
                    Some(&t) => t,
                    None => {
                        if states.len() >= cap {
                            return Err(Error::CapExceeded { what: "orbit pair states", size: cap + 1, cap });
                        }
                        let t = states.len();
                        index.insert((a2, b2), t);
                        states.push((a2, b2));
                        adj.push(Vec::new());
                        t
                    }
                };
                adj[k].push(t);
            }
        }
        k += 1;
    }
    let graph = ChainGraph::from_adjacency(eps, adj);
    for comp in graph.strong_components() {
        let diag = comp.iter().copied().find(|&s| states[s].0 == states[s].1);
        let off = comp.iter().copied().find(|&s| states[s].0 != states[s].1);
        let (Some(d), Some(o)) = (diag, off) else { continue };
        let within = NodeSet::from_indices(states.len(), comp.iter().copied());
        let one = |s| NodeSet::from_indices(states.len(), [s]);
        let there = graph.path_to(&one(d), o, Some(&within)).expect("same component");
        let back = graph.path_to(&one(o), d, Some(&within)).expect("same component");
        let cycle: Vec<usize> = there.iter().chain(&back[1..back.len() - 1]).copied().collect();
        return Ok(Some(ScrambledWalks {
            xs: cycle.iter().map(|&s| states[s].0).collect(),
            ys: cycle.iter().map(|&s| states[s].1).collect(),
        }));
    }
    Ok(None)
}

/// Per-`eps` outcome of the probe.
#[derive(Clone, Debug, PartialEq)]
pub enum HexpEvidence {
    /// Some `r` admits a chain pair at every tested δ.
    NotHExpansive { r: Dyadic, pairs: Vec<ChainPair> },
    /// Every tested `r` has a δ at which no chain pair exists; the pairs
    /// `(r, δ)` are listed.
    HExpansive { certificates: Vec<(Dyadic, Dyadic)> },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HexpSearch {
    pub r: Dyadic,
    pub delta: Dyadic,
    pub outcome: PairSearch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HexpRow {
    pub eps: Dyadic,
    pub evidence: HexpEvidence,
    pub searches: Vec<HexpSearch>,
    pub scrambled: Option<ScrambledWalks>,
    pub h_star: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HexpReport {
    /// δ at which chain transitivity was confirmed.
    pub transitive_delta: Dyadic,
    /// `(gamma, δ)` of the confirming shadowing verdict.
    pub shadowing: (Dyadic, Dyadic),
    pub rows: Vec<HexpRow>,
}

/// Optional cross-check of each row against `h*(eps)`.
#[derive(Clone, Debug)]
pub struct HStarCheck<'a> {
    pub window: &'a [usize],
    pub r_schedule: &'a [Dyadic],
    pub centers: Option<&'a [usize]>,
    pub limits: CountLimits,
}

#[derive(Clone, Debug)]
pub struct HexpGrid<'a> {
    pub eps_schedule: &'a [Dyadic],
    pub r_grid: &'a [Dyadic],
    /// Increasing.
    pub delta_schedule: &'a [Dyadic],
    pub length_bound: usize,
    pub cap: usize,
    pub h_star: Option<HStarCheck<'a>>,
}

pub fn hexpansiveness_probe(sys: &FiniteSystem, grid: &HexpGrid) -> Result<HexpReport> {
    let deltas = grid.delta_schedule;
    if deltas.is_empty() || deltas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("δ schedule must be nonempty and increasing".into()));
    }
    if grid.eps_schedule.is_empty() || grid.r_grid.is_empty() {
        return Err(Error::InvalidParameter("eps schedule and r grid must be nonempty".into()));
    }
    let top = *deltas.last().unwrap();
    let all = NodeSet::full(sys.size());
    if !is_chain_transitive(sys, &all, top)?.holds {
        return Err(Error::Precondition(format!("not chain transitive at δ = {top}")));
    }
    let gamma = grid.eps_schedule.iter().copied().fold(grid.eps_schedule[0], Dyadic::min);
    let mut shadowing = None;
    for &d in deltas {
        if shadowing_check(sys, gamma, d, Scope::All, None, grid.cap)?.holds {
            shadowing = Some((gamma, d));
            break;
        }
    }
    let shadowing = shadowing.ok_or_else(|| {
        Error::Precondition(format!("no tested δ gives {gamma}-shadowing"))
    })?;
    let graphs: Vec<ChainGraph> = deltas.iter().map(|&d| ChainGraph::new(sys, d)).collect();
    let mut rows = Vec::new();
    for &eps in grid.eps_schedule {
        let mut searches = Vec::new();
        let mut not_hexp = None;
        let mut certificates = Vec::new();
        let mut all_certified = true;
        for &r in grid.r_grid.iter().filter(|&&r| r.is_positive() && r <= eps) {
            let mut pairs = Vec::new();
            let mut absent_at = None;
            for g in &graphs {
                let outcome = chain_pair_search(sys, g, eps, r, grid.length_bound, grid.cap)?;
                if let Some(p) = outcome.found() {
                    pairs.push(p.clone());
                }
                if outcome.is_absent() && absent_at.is_none() {
                    absent_at = Some(g.delta());
                }
                searches.push(HexpSearch { r, delta: g.delta(), outcome });
            }
            if pairs.len() == graphs.len() && not_hexp.is_none() {
                not_hexp = Some((r, pairs));
            }
            match absent_at {
                Some(d) => certificates.push((r, d)),
                None => all_certified = false,
            }
        }
        let evidence = match not_hexp {
            Some((r, pairs)) => HexpEvidence::NotHExpansive { r, pairs },
            None if all_certified && !certificates.is_empty() => HexpEvidence::HExpansive { certificates },
            None => HexpEvidence::Inconclusive,
        };
        let scrambled = scrambled_walk_search(sys, eps, grid.cap)?;
        let h = match &grid.h_star {
            Some(c) => Some(h_star(sys, eps, c.window, c.r_schedule, c.centers, &c.limits)?.value),
            None => None,
        };
        rows.push(HexpRow { eps, evidence, searches, scrambled, h_star: h });
    }
    Ok(HexpReport { transitive_delta: top, shadowing, rows })
}
