//! Separated counts, growth rates, tracking sets and entropy points.
//!
//! Counted objects are walks: orbit segments of `n` points in the successor
//! relation (one per start point when the map is deterministic), or
//! δ-chains of `n + 1` points in the chain graph. Two walks conflict when
//! they stay within `r` of each other at every index; a separated family is
//! an independent set of the conflict graph.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{class_in, ChainGraph};
use crate::error::{Error, Result};
use crate::mis::{max_independent_set, DEFAULT_BUDGET};
use crate::nodeset::NodeSet;
use crate::scalar::Dyadic;
use crate::system::FiniteSystem;

/// Rate at or above which entropy counts as positive.
pub const DEFAULT_POSITIVE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountLimits {
    pub mode: CountMode,
    /// Most walks enumerated before failing.
    pub walk_cap: usize,
    /// Most walks handed to the exact solver when the conflict relation is
    /// not an equivalence.
    pub exact_cap: usize,
    pub budget: u64,
}

impl Default for CountLimits {
    fn default() -> Self {
        CountLimits { mode: CountMode::Exact, walk_cap: 1 << 18, exact_cap: 4096, budget: DEFAULT_BUDGET }
    }
}

/// One entry of a counts table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Count {
    pub n: usize,
    pub count: usize,
    /// `true` when `count` is a certified maximum.
    pub exact: bool,
    /// Walks enumerated; `None` when the count came from class signatures.
    pub walks: Option<usize>,
    /// A separated family realising `count`; empty for signature counts.
    pub family: Vec<Vec<usize>>,
}

/// Walks of `len` points, stored flat.
pub(crate) struct Walks {
    pub len: usize,
    pub flat: Vec<usize>,
}

impl Walks {
    pub fn count(&self) -> usize {
        if self.len == 0 { 0 } else { self.flat.len() / self.len }
    }

    pub fn get(&self, k: usize) -> &[usize] {
        &self.flat[k * self.len..(k + 1) * self.len]
    }
}

/// Abstract state graph whose walks project to point sequences.
pub(crate) struct WalkSpace<'a> {
    pub states: usize,
    pub starts: Vec<usize>,
    pub next: &'a dyn Fn(usize) -> Vec<usize>,
    pub point: &'a dyn Fn(usize) -> usize,
}

impl WalkSpace<'_> {
    fn enumerate(&self, len: usize, cap: usize) -> Result<Walks> {
        let mut flat = Vec::new();
        let mut stack: Vec<(usize, usize)> = self.starts.iter().rev().map(|&s| (s, 0)).collect();
        let mut path: Vec<usize> = Vec::with_capacity(len);
        while let Some((s, depth)) = stack.pop() {
            path.truncate(depth);
            path.push((self.point)(s));
            if depth + 1 == len {
                if flat.len() / len >= cap {
                    return Err(Error::CapExceeded { what: "walks", size: flat.len() / len + 1, cap });
                }
                flat.extend_from_slice(&path);
                continue;
            }
            for &t in (self.next)(s).iter().rev() {
                stack.push((t, depth + 1));
            }
        }
        Ok(Walks { len, flat })
    }

    /// Points visited by walks of `len` points.
    fn touched(&self, sys: &FiniteSystem, len: usize) -> NodeSet {
        let mut seen = NodeSet::from_indices(self.states, self.starts.iter().copied());
        let mut frontier = seen.clone();
        for _ in 1..len {
            let mut next = NodeSet::empty(self.states);
            for s in frontier.iter() {
                for t in (self.next)(s) {
                    if seen.insert(t) {
                        next.insert(t);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        NodeSet::from_indices(sys.size(), seen.iter().map(|s| (self.point)(s)))
    }

    /// Number of distinct class sequences along walks, by determinising
    /// the class-labelled state graph.
    fn signatures(&self, len: usize, class: &[u32]) -> usize {
        let mut layer: BTreeMap<NodeSet, usize> = BTreeMap::new();
        let mut groups: BTreeMap<u32, NodeSet> = BTreeMap::new();
        for &s in &self.starts {
            groups.entry(class[(self.point)(s)]).or_insert_with(|| NodeSet::empty(self.states)).insert(s);
        }
        for set in groups.into_values() {
            *layer.entry(set).or_insert(0) += 1;
        }
        for _ in 1..len {
            let mut next_layer: BTreeMap<NodeSet, usize> = BTreeMap::new();
            for (set, mult) in layer {
                let mut groups: BTreeMap<u32, NodeSet> = BTreeMap::new();
                for s in set.iter() {
                    for t in (self.next)(s) {
                        groups.entry(class[(self.point)(t)]).or_insert_with(|| NodeSet::empty(self.states)).insert(t);
                    }
                }
                for part in groups.into_values() {
                    let e = next_layer.entry(part).or_insert(0);
                    *e = e.saturating_add(mult);
                }
            }
            layer = next_layer;
        }
        layer.values().fold(0usize, |a, &m| a.saturating_add(m))
    }

    /// Largest family of walks of `len` points pairwise separated by more
    /// than `r` at some index.
    pub fn count(&self, sys: &FiniteSystem, len: usize, n: usize, r: Dyadic, limits: &CountLimits) -> Result<Count> {
        let touched = self.touched(sys, len);
        if limits.mode == CountMode::Exact {
            if let Some(class) = closeness_classes(sys, &touched, r) {
                return Ok(Count { n, count: self.signatures(len, &class), exact: true, walks: None, family: Vec::new() });
            }
        }
        let walks = self.enumerate(len, limits.walk_cap)?;
        let (fam, exact) = separated_family(sys, &walks, r, limits);
        Ok(Count {
            n,
            count: fam.len(),
            exact,
            walks: Some(walks.count()),
            family: fam.iter().map(|&k| walks.get(k).to_vec()).collect(),
        })
    }
}

/// Class ids when `d <= r` is an equivalence relation on `points`.
fn closeness_classes(sys: &FiniteSystem, points: &NodeSet, r: Dyadic) -> Option<Vec<u32>> {
    let t = sys.threshold(r);
    let mut class = vec![u32::MAX; sys.size()];
    let members = points.to_vec();
    let mut next_id = 0;
    for (a, &p) in members.iter().enumerate() {
        if class[p] != u32::MAX {
            continue;
        }
        for &q in &members[a..] {
            if sys.dist_key(p, q) <= t {
                if class[q] != u32::MAX {
                    return None;
                }
                class[q] = next_id;
            }
        }
        next_id += 1;
    }
    // every close pair must share a class
    for (a, &p) in members.iter().enumerate() {
        for &q in &members[a + 1..] {
            if (sys.dist_key(p, q) <= t) != (class[p] == class[q]) {
                return None;
            }
        }
    }
    Some(class)
}

fn walks_close(sys: &FiniteSystem, a: &[usize], b: &[usize], t: u64) -> bool {
    a.iter().zip(b).all(|(&x, &y)| sys.within(x, y, t))
}

/// `true` iff every two walks of `family` are more than `r` apart at some
/// common index.
pub fn is_separated_family(sys: &FiniteSystem, family: &[Vec<usize>], r: Dyadic) -> bool {
    let t = sys.threshold(r);
    family
        .iter()
        .enumerate()
        .all(|(a, u)| family[a + 1..].iter().all(|v| !walks_close(sys, u, v, t)))
}

/// Maximum `r`-separated family among `walks`.
fn separated_family(sys: &FiniteSystem, walks: &Walks, r: Dyadic, limits: &CountLimits) -> (Vec<usize>, bool) {
    let w = walks.count();
    let t = sys.threshold(r);
    if limits.mode == CountMode::Greedy || w > limits.exact_cap {
        // least-index greedy, checked only against the family so far
        let mut fam: Vec<usize> = Vec::new();
        for k in 0..w {
            if fam.iter().all(|&j| !walks_close(sys, walks.get(j), walks.get(k), t)) {
                fam.push(k);
            }
        }
        return (fam, false);
    }
    let mut conflict = vec![NodeSet::empty(w); w];
    for a in 0..w {
        for b in a + 1..w {
            if walks_close(sys, walks.get(a), walks.get(b), t) {
                conflict[a].insert(b);
                conflict[b].insert(a);
            }
        }
    }
    let out = max_independent_set(&conflict, limits.budget);
    (out.set, out.exact)
}

fn check_nr(n: usize, r: Dyadic) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !r.is_positive() {
        return Err(Error::InvalidParameter("r must be positive".into()));
    }
    Ok(())
}

/// `s_n(f, K, r)`: largest family of orbit segments of `n` points from `K`
/// pairwise separated by more than `r` at some index.
pub fn separated_count(sys: &FiniteSystem, k: &NodeSet, n: usize, r: Dyadic, limits: &CountLimits) -> Result<Count> {
    check_nr(n, r)?;
    let next = |v: usize| sys.successors(v).to_vec();
    let space = WalkSpace { states: sys.size(), starts: k.to_vec(), next: &next, point: &|v| v };
    space.count(sys, n, n, r, limits)
}

/// Largest family of `(n, r)`-separated δ-chains `(x_0, ..., x_n)`,
/// optionally starting in `k`.
pub fn chain_separated_count(
    sys: &FiniteSystem,
    n: usize,
    r: Dyadic,
    delta: Dyadic,
    k: Option<&NodeSet>,
    limits: &CountLimits,
) -> Result<Count> {
    check_nr(n, r)?;
    let g = ChainGraph::new(sys, delta);
    chain_count_in(sys, &g, n, r, k, limits)
}

fn chain_count_in(
    sys: &FiniteSystem,
    g: &ChainGraph,
    n: usize,
    r: Dyadic,
    k: Option<&NodeSet>,
    limits: &CountLimits,
) -> Result<Count> {
    let starts = match k {
        Some(s) => s.to_vec(),
        None => (0..sys.size()).collect(),
    };
    let next = |v: usize| g.next(v).to_vec();
    let space = WalkSpace { states: sys.size(), starts, next: &next, point: &|v| v };
    space.count(sys, n + 1, n, r, limits)
}

/// Least-squares slope of `ln count` against `n`.
pub fn slope(points: &[(usize, usize)]) -> f64 {
    let m = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| libm::log(p.1.max(1) as f64)).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 { 0.0 } else { sxy / sxx }
}

/// Prefix of the counts ending where the final constant run begins, kept
/// at two entries or more.
pub fn unsaturated_prefix(points: &[(usize, usize)]) -> usize {
    let mut start = points.len().saturating_sub(1);
    while start > 0 && points[start - 1].1 == points[start].1 {
        start -= 1;
    }
    (start + 1).max(2).min(points.len())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    pub r: Dyadic,
    pub delta: Option<Dyadic>,
    pub counts: Vec<Count>,
    /// Entries of `counts` used for `rate`.
    pub fitted: usize,
    /// Slope over the unsaturated prefix of the window.
    pub rate: f64,
    /// Slope over the whole window.
    pub window_rate: f64,
    pub exact: bool,
}

impl EntropyReport {
    fn from_counts(r: Dyadic, delta: Option<Dyadic>, counts: Vec<Count>) -> EntropyReport {
        let pts: Vec<(usize, usize)> = counts.iter().map(|c| (c.n, c.count)).collect();
        let fitted = unsaturated_prefix(&pts);
        EntropyReport {
            r,
            delta,
            exact: counts.iter().all(|c| c.exact),
            rate: slope(&pts[..fitted]),
            window_rate: slope(&pts),
            fitted,
            counts,
        }
    }

    pub fn positive(&self, threshold: f64) -> bool {
        self.rate >= threshold
    }
}

/// Separated families survive extension along the image, so an inexact
/// count below its predecessor is replaced by the extended predecessor.
fn carry_forward(sys: &FiniteSystem, counts: &mut [Count]) {
    for i in 1..counts.len() {
        let (done, rest) = counts.split_at_mut(i);
        let (prev, cur) = (&done[i - 1], &mut rest[0]);
        if cur.exact || cur.count >= prev.count {
            continue;
        }
        let extra = cur.n - prev.n;
        cur.count = prev.count;
        cur.family = prev
            .family
            .iter()
            .map(|w| {
                let mut w = w.clone();
                for _ in 0..extra {
                    w.push(sys.image(*w.last().unwrap()));
                }
                w
            })
            .collect();
    }
}

fn check_window(window: &[usize]) -> Result<()> {
    if window.len() < 2 || window.windows(2).any(|w| w[1] <= w[0]) || window[0] == 0 {
        return Err(Error::InvalidParameter("n window needs two or more increasing positive entries".into()));
    }
    Ok(())
}

/// Growth rate of `s_n(f, K, r)` over `window`.
pub fn entropy_estimate(
    sys: &FiniteSystem,
    k: &NodeSet,
    r: Dyadic,
    window: &[usize],
    limits: &CountLimits,
) -> Result<EntropyReport> {
    check_window(window)?;
    let mut counts = window.iter().map(|&n| separated_count(sys, k, n, r, limits)).collect::<Result<Vec<_>>>()?;
    carry_forward(sys, &mut counts);
    Ok(EntropyReport::from_counts(r, None, counts))
}

/// Growth rate of chain-separated counts over `window`.
pub fn chain_entropy_estimate(
    sys: &FiniteSystem,
    k: Option<&NodeSet>,
    r: Dyadic,
    delta: Dyadic,
    window: &[usize],
    limits: &CountLimits,
) -> Result<EntropyReport> {
    check_window(window)?;
    let g = ChainGraph::new(sys, delta);
    let mut counts = window
        .iter()
        .map(|&n| {
            check_nr(n, r)?;
            chain_count_in(sys, &g, n, r, k, limits)
        })
        .collect::<Result<Vec<_>>>()?;
    carry_forward(sys, &mut counts);
    Ok(EntropyReport::from_counts(r, Some(delta), counts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Horizon {
    /// Constraint over `0 <= i <= h` (or `|i| <= h` two-sided).
    Steps(usize),
    /// Exact infinite-horizon set from eventual periodicity.
    Closure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackingSet {
    pub center: usize,
    pub eps: Dyadic,
    pub horizon: Horizon,
    pub points: NodeSet,
}

/// Product of the points with positions along the canonical orbit of a
/// center; `alive[t]` holds the points that can follow the orbit from
/// position `t` on.
struct Tracking {
    next_pos: Vec<Option<usize>>,
    alive: Vec<NodeSet>,
}

impl Tracking {
    fn new(sys: &FiniteSystem, x: usize, eps: Dyadic, horizon: Horizon) -> Tracking {
        let (orbit, next_pos): (Vec<usize>, Vec<Option<usize>>) = match horizon {
            Horizon::Steps(h) => {
                let o = sys.orbit(x, h + 1);
                let np = (0..=h).map(|t| if t < h { Some(t + 1) } else { None }).collect();
                (o, np)
            }
            Horizon::Closure => {
                let (transient, cycle) = sys.orbit_tail(x);
                let p = transient.len() + cycle.len();
                let np = (0..p).map(|t| Some(if t + 1 < p { t + 1 } else { transient.len() })).collect();
                (transient.into_iter().chain(cycle).collect(), np)
            }
        };
        let t = sys.threshold(eps);
        let n = sys.size();
        let mut alive: Vec<NodeSet> = orbit
            .iter()
            .map(|&c| NodeSet::from_indices(n, (0..n).filter(|&y| sys.within(c, y, t))))
            .collect();
        let mut changed = true;
        while changed {
            changed = false;
            for pos in (0..alive.len()).rev() {
                let Some(np) = next_pos[pos] else { continue };
                let dead: Vec<usize> = alive[pos]
                    .iter()
                    .filter(|&y| !sys.successors(y).iter().any(|&z| alive[np].contains(z)))
                    .collect();
                for y in dead {
                    alive[pos].remove(y);
                    changed = true;
                }
            }
        }
        Tracking { next_pos, alive }
    }
}

/// `Φ_eps(x)`: points with an orbit staying within `eps` of the orbit of
/// `x` at every forward step.
pub fn phi_set(sys: &FiniteSystem, x: usize, eps: Dyadic, horizon: Horizon) -> Result<TrackingSet> {
    sys.check_index(x)?;
    let tr = Tracking::new(sys, x, eps, horizon);
    Ok(TrackingSet { center: x, eps, horizon, points: tr.alive[0].clone() })
}

/// `Γ_eps(x)` on an invertible system: two-sided tracking.
pub fn gamma_set(sys: &FiniteSystem, x: usize, eps: Dyadic, horizon: Horizon) -> Result<TrackingSet> {
    sys.check_index(x)?;
    let inv = sys.inverse().ok_or(Error::NotInvertible)?;
    let t = sys.threshold(eps);
    let n = sys.size();
    let keep = |y: usize| -> bool {
        match horizon {
            Horizon::Steps(h) => {
                let (mut a, mut b) = (x, y);
                for _ in 0..=h {
                    if sys.dist_key(a, b) > t {
                        return false;
                    }
                    a = sys.image(a);
                    b = sys.image(b);
                }
                let (mut a, mut b) = (x, y);
                for _ in 0..h {
                    a = inv[a];
                    b = inv[b];
                    if sys.dist_key(a, b) > t {
                        return false;
                    }
                }
                true
            }
            Horizon::Closure => {
                let (mut a, mut b) = (x, y);
                loop {
                    if sys.dist_key(a, b) > t {
                        return false;
                    }
                    a = sys.image(a);
                    b = sys.image(b);
                    if (a, b) == (x, y) {
                        return true;
                    }
                }
            }
        }
    };
    Ok(TrackingSet { center: x, eps, horizon, points: NodeSet::from_indices(n, (0..n).filter(|&y| keep(y))) })
}

/// Growth rate of separated orbit segments of points of `Φ_eps(x)` whose
/// orbits do the tracking.
pub fn phi_entropy(
    sys: &FiniteSystem,
    x: usize,
    eps: Dyadic,
    r: Dyadic,
    window: &[usize],
    limits: &CountLimits,
) -> Result<EntropyReport> {
    sys.check_index(x)?;
    check_window(window)?;
    let tr = Tracking::new(sys, x, eps, Horizon::Closure);
    let n = sys.size();
    let next = |s: usize| -> Vec<usize> {
        let (pos, y) = (s / n, s % n);
        match tr.next_pos[pos] {
            Some(np) => sys.successors(y).iter().filter(|&&z| tr.alive[np].contains(z)).map(|&z| np * n + z).collect(),
            None => Vec::new(),
        }
    };
    let point = |s: usize| s % n;
    let space = WalkSpace { states: n * tr.alive.len(), starts: tr.alive[0].to_vec(), next: &next, point: &point };
    let counts = window
        .iter()
        .map(|&m| {
            check_nr(m, r)?;
            space.count(sys, m, m, r, limits)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyReport::from_counts(r, None, counts))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HStar {
    pub eps: Dyadic,
    /// Per `r`: the largest rate over centers and a center attaining it.
    pub per_r: Vec<(Dyadic, f64, usize)>,
    /// Value at the smallest `r` of the schedule.
    pub value: f64,
}

/// `h*_f(eps) = sup_x h(f, Φ_eps(x))` over `centers` (all points when
/// `None`), with the inner limit in `r` tabulated over `r_schedule`.
pub fn h_star(
    sys: &FiniteSystem,
    eps: Dyadic,
    window: &[usize],
    r_schedule: &[Dyadic],
    centers: Option<&[usize]>,
    limits: &CountLimits,
) -> Result<HStar> {
    if r_schedule.is_empty() || r_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("r schedule must be nonempty and strictly decreasing".into()));
    }
    let all: Vec<usize> = (0..sys.size()).collect();
    let centers = centers.unwrap_or(&all);
    let mut per_r = Vec::new();
    for &r in r_schedule {
        let mut best = (f64::NEG_INFINITY, 0);
        for &x in centers {
            let rate = phi_entropy(sys, x, eps, r, window, limits)?.rate;
            if rate > best.0 {
                best = (rate, x);
            }
        }
        per_r.push((r, best.0.max(0.0), best.1));
    }
    let value = per_r.last().map_or(0.0, |p| p.1);
    Ok(HStar { eps, per_r, value })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    /// `h(f, K, r) >= b` on every tested ball.
    Uniform,
    /// `h(f, K, r)` positive on every tested ball.
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointEntropy {
    pub x: usize,
    pub r: Dyadic,
    pub b: f64,
    pub evidence: Vec<(Dyadic, EntropyReport)>,
    pub class: PointClass,
}

/// Entropy-point classification of `x` at scale `r` over closed balls of
/// the given radii.
#[allow(clippy::too_many_arguments)]
pub fn entropy_point_test(
    sys: &FiniteSystem,
    x: usize,
    r: Dyadic,
    b: f64,
    ball_schedule: &[Dyadic],
    window: &[usize],
    threshold: f64,
    limits: &CountLimits,
) -> Result<PointEntropy> {
    sys.check_index(x)?;
    if ball_schedule.is_empty() {
        return Err(Error::InvalidParameter("empty ball schedule".into()));
    }
    let mut evidence = Vec::new();
    for &rho in ball_schedule {
        let k = sys.ball(x, rho)?;
        evidence.push((rho, entropy_estimate(sys, &k, r, window, limits)?));
    }
    let uniform = evidence.iter().all(|(_, e)| e.rate >= b);
    let positive = evidence.iter().all(|(_, e)| e.positive(threshold));
    let class = if uniform && b >= threshold {
        PointClass::Uniform
    } else if positive {
        PointClass::Positive
    } else {
        PointClass::Negative
    };
    Ok(PointEntropy { x, r, b, evidence, class })
}

/// Scales shared by the chain-class audits.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditGrid {
    /// Scale at which `C(x)` and its components are computed.
    pub class_delta: Dyadic,
    pub eps_schedule: Vec<Dyadic>,
    pub delta_schedule: Vec<Dyadic>,
    pub r_values: Vec<Dyadic>,
    pub b_values: Vec<f64>,
    pub ball_schedule: Vec<Dyadic>,
    pub window: Vec<usize>,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem11Report {
    pub x: usize,
    pub class: Vec<usize>,
    pub components: Vec<crate::chain::Component>,
    pub no_like: bool,
    pub entropy: Vec<PointEntropy>,
    pub entropy_positive: bool,
    pub agrees: bool,
}

fn class_components(sys: &FiniteSystem, x: usize, grid: &AuditGrid) -> Result<(NodeSet, Vec<crate::chain::Component>)> {
    sys.check_index(x)?;
    let g = ChainGraph::new(sys, grid.class_delta);
    let class = class_in(&g, x);
    let dec = crate::chain::decomposition_of(&g);
    let classified = crate::chain::classify_components(sys, &dec, &grid.eps_schedule, &grid.delta_schedule)?;
    let inside = classified
        .components
        .into_iter()
        .filter(|c| c.nodes.iter().all(|&v| class.contains(v)))
        .collect();
    Ok((class, inside))
}

/// Entropy-point verdict of `x` against NO-like components inside `C(x)`.
pub fn theorem11_audit(sys: &FiniteSystem, x: usize, grid: &AuditGrid, limits: &CountLimits) -> Result<Theorem11Report> {
    let (class, components) = class_components(sys, x, grid)?;
    let no_like = components
        .iter()
        .any(|c| matches!(c.class, Some(crate::chain::ComponentClass::NoLike { .. })));
    let entropy = grid
        .r_values
        .iter()
        .map(|&r| entropy_point_test(sys, x, r, f64::INFINITY, &grid.ball_schedule, &grid.window, grid.threshold, limits))
        .collect::<Result<Vec<_>>>()?;
    let entropy_positive = entropy.iter().any(|e| e.class != PointClass::Negative);
    Ok(Theorem11Report {
        x,
        class: class.to_vec(),
        components,
        no_like,
        agrees: no_like == entropy_positive,
        entropy,
        entropy_positive,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem12Report {
    pub x: usize,
    pub class: Vec<usize>,
    /// First `(r, b)` cell where `x` is a uniform entropy point.
    pub uniform: Option<(Dyadic, f64)>,
    /// Chain-separated growth on `C(x)` per `r`, at `class_delta`.
    pub chain_rates: Vec<EntropyReport>,
    pub chain_positive: bool,
    pub agrees: bool,
}

/// Uniform entropy point verdict of `x` against chain-entropy growth on
/// `C(x)`.
pub fn theorem12_audit(sys: &FiniteSystem, x: usize, grid: &AuditGrid, limits: &CountLimits) -> Result<Theorem12Report> {
    sys.check_index(x)?;
    let g = ChainGraph::new(sys, grid.class_delta);
    let class = class_in(&g, x);
    let mut uniform = None;
    'cells: for &r in &grid.r_values {
        for &b in &grid.b_values {
            let t = entropy_point_test(sys, x, r, b, &grid.ball_schedule, &grid.window, grid.threshold, limits)?;
            if t.class == PointClass::Uniform {
                uniform = Some((r, b));
                break 'cells;
            }
        }
    }
    check_window(&grid.window)?;
    let mut chain_rates = Vec::new();
    for &r in &grid.r_values {
        let counts = grid
            .window
            .iter()
            .map(|&n| {
                check_nr(n, r)?;
                chain_count_in(sys, &g, n, r, Some(&class), limits)
            })
            .collect::<Result<Vec<_>>>()?;
        chain_rates.push(EntropyReport::from_counts(r, Some(grid.class_delta), counts));
    }
    let chain_positive = chain_rates.iter().any(|e| e.positive(grid.threshold));
    Ok(Theorem12Report {
        x,
        class: class.to_vec(),
        agrees: uniform.is_some() == chain_positive,
        uniform,
        chain_rates,
        chain_positive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{compile_symbolic, CompileMode, MapSpec, Sided, SymbolicSystem, DEFAULT_CLASS_CAP};

    fn shift(t: u32, mode: CompileMode) -> FiniteSystem {
        let space = SymbolicSystem::binary_full_shift(Sided::Two);
        compile_symbolic(&space, MapSpec::Shift { power: 1 }, t, mode, DEFAULT_CLASS_CAP).unwrap().system
    }

    fn line(n: usize, image: Vec<usize>) -> FiniteSystem {
        let table: Vec<Vec<Dyadic>> = (0..n)
            .map(|i| (0..n).map(|j| Dyadic::from_int(i.abs_diff(j) as i64)).collect())
            .collect();
        FiniteSystem::from_table(&table, image).unwrap()
    }

    #[test]
    fn h_star_on_odometer_and_shift() {
        let odo = crate::constructions::odometer(&[2, 4, 8]).unwrap();
        for k in 0..4 {
            let h = h_star(&odo, Dyadic::pow2_neg(k), &[1, 2, 3, 4], &[Dyadic::new(1, 3)], None, &CountLimits::default())
                .unwrap();
            assert_eq!(h.value, 0.0);
        }
        // everything tracks everything at eps = 1
        let sys = shift(3, CompileMode::Window);
        let h = h_star(&sys, Dyadic::ONE, &[1, 2, 3, 4], &[Dyadic::new(1, 1)], Some(&[0]), &CountLimits::default())
            .unwrap();
        assert!((h.value - core::f64::consts::LN_2).abs() < 0.05, "{h:?}");
    }

    #[test]
    fn identity_counts_are_flat() {
        let sys = line(4, vec![0, 1, 2, 3]);
        let k = NodeSet::full(4);
        let e = entropy_estimate(&sys, &k, Dyadic::new(1, 1), &[1, 2, 3, 4], &CountLimits::default()).unwrap();
        assert!(e.counts.iter().all(|c| c.count == 4));
        assert_eq!(e.rate, 0.0);
    }

    #[test]
    fn full_shift_rate_is_log_two() {
        let sys = shift(3, CompileMode::Window);
        let k = NodeSet::full(sys.size());
        let window: Vec<usize> = (1..=8).collect();
        let e = entropy_estimate(&sys, &k, Dyadic::new(1, 1), &window, &CountLimits::default()).unwrap();
        assert!(e.exact);
        assert_eq!(e.counts[7].count, 256);
        assert!((e.rate - core::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn greedy_family_is_separated() {
        let sys = shift(2, CompileMode::Window);
        let k = NodeSet::full(sys.size());
        let limits = CountLimits { mode: CountMode::Greedy, ..CountLimits::default() };
        let c = separated_count(&sys, &k, 3, Dyadic::new(1, 2), &limits).unwrap();
        assert!(!c.exact);
        assert!(is_separated_family(&sys, &c.family, Dyadic::new(1, 2)));
        let exact = separated_count(&sys, &k, 3, Dyadic::new(1, 2), &CountLimits::default()).unwrap();
        assert!(c.count <= exact.count);
    }

    #[test]
    fn chain_count_below_resolution_matches_orbits() {
        let sys = shift(2, CompileMode::Window);
        let k = NodeSet::full(sys.size());
        let r = Dyadic::new(1, 1);
        for n in 1..5 {
            let chains = chain_separated_count(&sys, n, r, Dyadic::new(1, 6), None, &CountLimits::default()).unwrap();
            let orbits = separated_count(&sys, &k, n + 1, r, &CountLimits::default()).unwrap();
            assert_eq!(chains.count, orbits.count);
        }
    }

    #[test]
    fn tracking_sets() {
        let sys = shift(2, CompileMode::Periodic);
        let all = phi_set(&sys, 3, Dyadic::ONE, Horizon::Closure).unwrap();
        assert_eq!(all.points.count(), sys.size());
        let g = gamma_set(&sys, 3, Dyadic::ZERO, Horizon::Closure).unwrap();
        assert_eq!(g.points.to_vec(), vec![3]);
    }

    #[test]
    fn unsaturated_prefix_cuts_plateau() {
        assert_eq!(unsaturated_prefix(&[(1, 2), (2, 4), (3, 8), (4, 8), (5, 8)]), 3);
        assert_eq!(unsaturated_prefix(&[(1, 5), (2, 5), (3, 5)]), 2);
        assert_eq!(unsaturated_prefix(&[(1, 2), (2, 4)]), 2);
    }
}
