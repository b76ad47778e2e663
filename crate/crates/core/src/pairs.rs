//! ω-limit sets, minimality, sensitivity and pair classification.
//!
//! Orbits of a point follow the canonical image. When a system carries a
//! successor relation, ω(x) is the strongly connected part of that relation
//! holding the cycle the canonical orbit enters, since a class stands for
//! every admissible continuation.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{chain_components, classify_components, ChainGraph, ComponentClass};
use crate::error::{Error, Result};
use crate::nodeset::NodeSet;
use crate::scalar::Dyadic;
use crate::symbolic::{lcm, Sided, SymbolicPoint, SymbolicSystem};
use crate::system::FiniteSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaReport {
    pub x: usize,
    pub omega: Vec<usize>,
    pub minimal: bool,
    /// Index of the chain component holding ω(x), when a scale was given.
    pub component: Option<usize>,
}

/// Successor graph of the system, viewed as a δ = 0 chain graph would be
/// without the metric.
fn successor_scc_of(sys: &FiniteSystem, v: usize) -> Vec<usize> {
    let n = sys.size();
    let forward = reach_by(n, v, |u| sys.successors(u).to_vec());
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..n {
        for &w in sys.successors(u) {
            preds[w].push(u);
        }
    }
    let backward = reach_by(n, v, |u| preds[u].clone());
    (0..n).filter(|&u| forward.contains(u) && backward.contains(u)).collect()
}

fn reach_by(n: usize, v: usize, next: impl Fn(usize) -> Vec<usize>) -> NodeSet {
    let mut seen = NodeSet::from_indices(n, [v]);
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for w in next(u) {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

fn single_cycle(sys: &FiniteSystem, nodes: &[usize]) -> bool {
    nodes.iter().all(|&u| sys.successors(u).len() == 1)
}

pub fn omega_limit(sys: &FiniteSystem, x: usize, delta: Option<Dyadic>) -> Result<OmegaReport> {
    sys.check_index(x)?;
    let (_, cycle) = sys.orbit_tail(x);
    let omega = if sys.is_deterministic() {
        let mut c = cycle;
        c.sort_unstable();
        c
    } else {
        successor_scc_of(sys, cycle[0])
    };
    let minimal = single_cycle(sys, &omega);
    let component = delta.and_then(|d| chain_components(sys, d).component_of(omega[0]));
    Ok(OmegaReport { x, omega, minimal, component })
}

/// A successor-closed set is minimal iff it is a single cycle.
pub fn is_minimal(sys: &FiniteSystem, set: &NodeSet) -> Result<bool> {
    if set.is_empty() || !sys.is_invariant(set) {
        return Err(Error::NotInvariant);
    }
    let nodes = set.to_vec();
    if !single_cycle(sys, &nodes) {
        return Ok(false);
    }
    let start = nodes[0];
    let (_, cycle) = sys.orbit_tail(start);
    Ok(cycle.len() == nodes.len() && cycle.contains(&start))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairClass {
    Asymptotic,
    Distal,
    ProximalNonAsymptotic,
    Scrambled,
    Undetermined,
}

impl PairClass {
    pub fn name(self) -> &'static str {
        match self {
            PairClass::Asymptotic => "asymptotic",
            PairClass::Distal => "distal",
            PairClass::ProximalNonAsymptotic => "proximal-nonasymptotic",
            PairClass::Scrambled => "scrambled",
            PairClass::Undetermined => "undetermined",
        }
    }

    pub fn is_proximal(self) -> bool {
        matches!(self, PairClass::Asymptotic | PairClass::ProximalNonAsymptotic | PairClass::Scrambled)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairVerdict {
    pub horizon: usize,
    pub thresholds: (Dyadic, Dyadic),
    pub liminf: Dyadic,
    pub limsup: Dyadic,
    pub class: PairClass,
    /// Computed over the periodic closure rather than a tail window.
    pub exact: bool,
}

fn exact_class(liminf: Dyadic, limsup: Dyadic) -> PairClass {
    if limsup.is_zero() {
        PairClass::Asymptotic
    } else if liminf.is_zero() {
        PairClass::Scrambled
    } else {
        PairClass::Distal
    }
}

fn check_thresholds(horizon: usize, s_lo: Dyadic, s_hi: Dyadic) -> Result<()> {
    if horizon == 0 || s_lo > s_hi {
        return Err(Error::InvalidParameter("need horizon >= 1 and s_lo <= s_hi".into()));
    }
    Ok(())
}

/// Exact classification over the eventually periodic pair orbit.
pub fn classify_pair(
    sys: &FiniteSystem,
    x: usize,
    y: usize,
    horizon: usize,
    s_lo: Dyadic,
    s_hi: Dyadic,
) -> Result<PairVerdict> {
    sys.check_index(x)?;
    sys.check_index(y)?;
    check_thresholds(horizon, s_lo, s_hi)?;
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut trail = Vec::new();
    let (mut a, mut b) = (x, y);
    while !seen.contains_key(&(a, b)) {
        seen.insert((a, b), trail.len());
        trail.push(sys.dist(a, b));
        a = sys.image(a);
        b = sys.image(b);
    }
    let cycle = &trail[seen[&(a, b)]..];
    let liminf = *cycle.iter().min().unwrap();
    let limsup = *cycle.iter().max().unwrap();
    Ok(PairVerdict {
        horizon,
        thresholds: (s_lo, s_hi),
        liminf,
        limsup,
        class: exact_class(liminf, limsup),
        exact: true,
    })
}

/// Exact classification of eventually periodic symbolic points: the
/// distance sequence converges along each residue of the joint period to
/// the distance between the periodic limits.
pub fn classify_symbolic_pair(
    space: &SymbolicSystem,
    x: &SymbolicPoint,
    y: &SymbolicPoint,
    horizon: usize,
    s_lo: Dyadic,
    s_hi: Dyadic,
) -> Result<PairVerdict> {
    check_thresholds(horizon, s_lo, s_hi)?;
    space.metric(x, y)?;
    let px = periodic_limit(x);
    let py = periodic_limit(y);
    let period = lcm(px.len(), py.len());
    let mut values = Vec::with_capacity(period);
    for j in 0..period {
        let (a, b) = match x.sided() {
            Sided::Two => (SymbolicPoint::periodic(rotate(&px, j))?, SymbolicPoint::periodic(rotate(&py, j))?),
            // one-sided words start at coordinate 1
            Sided::One => (
                SymbolicPoint::one_sided(Vec::new(), rotate(&px, j + 1))?,
                SymbolicPoint::one_sided(Vec::new(), rotate(&py, j + 1))?,
            ),
        };
        values.push(space.metric(&a, &b)?);
    }
    let liminf = *values.iter().min().unwrap();
    let limsup = *values.iter().max().unwrap();
    Ok(PairVerdict {
        horizon,
        thresholds: (s_lo, s_hi),
        liminf,
        limsup,
        class: exact_class(liminf, limsup),
        exact: true,
    })
}

/// Right period indexed by coordinate modulo its length.
fn periodic_limit(x: &SymbolicPoint) -> Vec<u8> {
    let p = x.right_period().len();
    let start = x.periodic_from();
    let mut out = vec![0u8; p];
    for i in 0..p as i64 {
        let pos = start + i;
        out[pos.rem_euclid(p as i64) as usize] = x.at(pos);
    }
    out
}

fn rotate(w: &[u8], j: usize) -> Vec<u8> {
    let p = w.len();
    (0..p).map(|i| w[(i + j) % p]).collect()
}

/// Tail-window classification of an explicit distance sequence over
/// `[T/2, T]`.
pub fn classify_distance_sequence(
    dist: impl Fn(usize) -> Dyadic,
    horizon: usize,
    s_lo: Dyadic,
    s_hi: Dyadic,
) -> Result<PairVerdict> {
    check_thresholds(horizon, s_lo, s_hi)?;
    let tail: Vec<Dyadic> = (horizon / 2..=horizon).map(dist).collect();
    let liminf = *tail.iter().min().unwrap();
    let limsup = *tail.iter().max().unwrap();
    let class = if liminf < s_lo && limsup > s_hi {
        PairClass::Scrambled
    } else if limsup < s_lo {
        PairClass::Asymptotic
    } else if liminf > s_hi {
        PairClass::Distal
    } else if liminf < s_lo && limsup <= s_hi {
        PairClass::ProximalNonAsymptotic
    } else {
        PairClass::Undetermined
    };
    Ok(PairVerdict { horizon, thresholds: (s_lo, s_hi), liminf, limsup, class, exact: false })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sensitivity {
    pub x: usize,
    /// Per η: a partner within η and the pair it separates to, if any.
    pub per_eta: Vec<(Dyadic, Option<(usize, (usize, usize))>)>,
}

impl Sensitivity {
    /// Sensitive at every tested η.
    pub fn sensitive(&self) -> bool {
        self.per_eta.iter().all(|(_, w)| w.is_some())
    }
}

/// Pair search from `(x, y)` along successors inside `set` for a pair more
/// than `e` apart.
fn separating_pair(sys: &FiniteSystem, set: &NodeSet, x: usize, y: usize, e_key: u64) -> Option<(usize, usize)> {
    let mut seen: BTreeMap<(usize, usize), ()> = BTreeMap::new();
    let mut stack = vec![(x, y)];
    seen.insert((x, y), ());
    while let Some((a, b)) = stack.pop() {
        if sys.dist_key(a, b) > e_key {
            return Some((a, b));
        }
        for &a2 in sys.successors(a) {
            if !set.contains(a2) {
                continue;
            }
            for &b2 in sys.successors(b) {
                if set.contains(b2) && seen.insert((a2, b2), ()).is_none() {
                    stack.push((a2, b2));
                }
            }
        }
    }
    None
}

/// `e`-sensitivity of each point of the invariant set `set`, per η.
pub fn sensitive_points(sys: &FiniteSystem, set: &NodeSet, e: Dyadic, eta_schedule: &[Dyadic]) -> Result<Vec<Sensitivity>> {
    if !sys.is_invariant(set) {
        return Err(Error::NotInvariant);
    }
    let ek = sys.threshold(e);
    let mut out = Vec::new();
    for x in set.iter() {
        let mut per_eta = Vec::new();
        for &eta in eta_schedule {
            let t = sys.threshold(eta);
            let hit = set
                .iter()
                .filter(|&y| sys.within(x, y, t))
                .find_map(|y| separating_pair(sys, set, x, y, ek).map(|p| (y, p)));
            per_eta.push((eta, hit));
        }
        out.push(Sensitivity { x, per_eta });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem13Report {
    pub x: usize,
    pub omega: OmegaReport,
    /// (1): ω(x) meets the sensitive points of the chain-recurrent set.
    pub sensitive: bool,
    /// (2): a partner from the pool forms a scrambled pair with `x`.
    pub scrambled_partner: Option<usize>,
    /// (3): ω(x) is not minimal.
    pub non_minimal: bool,
    /// Verdict for the component holding ω(x).
    pub no_like: bool,
    pub consistent: bool,
}

/// Scales for [`theorem13_test`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem13Grid {
    pub delta: Dyadic,
    pub e_grid: Vec<Dyadic>,
    pub eta_schedule: Vec<Dyadic>,
    pub eps_schedule: Vec<Dyadic>,
    pub delta_schedule: Vec<Dyadic>,
    pub horizon: usize,
    pub s_lo: Dyadic,
    pub s_hi: Dyadic,
}

/// The three sufficient conditions for the component holding ω(x) to be
/// NO-like, against that component's verdict.
pub fn theorem13_test(sys: &FiniteSystem, x: usize, pool: &[usize], grid: &Theorem13Grid) -> Result<Theorem13Report> {
    let omega = omega_limit(sys, x, Some(grid.delta))?;
    let g = ChainGraph::new(sys, grid.delta);
    let cr = NodeSet::from_indices(sys.size(), g.recurrent_components().into_iter().flatten());
    // the chain-recurrent set is invariant only up to the scale; restrict
    // sensitivity to its successor closure
    let mut closed = cr.clone();
    loop {
        let mut next = sys.successor_set(&closed);
        next.union_with(&closed);
        if next == closed {
            break;
        }
        closed = next;
    }
    let omega_set = NodeSet::from_indices(sys.size(), omega.omega.iter().copied());
    let mut sensitive = false;
    for &e in &grid.e_grid {
        let sens = sensitive_points(sys, &closed, e, &grid.eta_schedule)?;
        if sens.iter().any(|s| omega_set.contains(s.x) && s.sensitive()) {
            sensitive = true;
            break;
        }
    }
    let mut scrambled_partner = None;
    for &y in pool {
        if classify_pair(sys, x, y, grid.horizon, grid.s_lo, grid.s_hi)?.class == PairClass::Scrambled {
            scrambled_partner = Some(y);
            break;
        }
    }
    let non_minimal = !omega.minimal;
    let dec = chain_components(sys, grid.delta);
    let classified = classify_components(sys, &dec, &grid.eps_schedule, &grid.delta_schedule)?;
    let no_like = match omega.component {
        Some(c) => matches!(classified.components[c].class, Some(ComponentClass::NoLike { .. })),
        None => false,
    };
    let any = sensitive || scrambled_partner.is_some() || non_minimal;
    Ok(Theorem13Report {
        x,
        omega,
        sensitive,
        scrambled_partner,
        non_minimal,
        no_like,
        consistent: !any || no_like,
    })
}
