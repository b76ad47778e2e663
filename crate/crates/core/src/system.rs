//! Finite metric dynamical systems.
//!
//! A [`FiniteSystem`] is a finite set of points `0..N` with an exact dyadic
//! metric and a self-map. Distances are stored internally as unsigned
//! fixed-point keys over a common denominator `2^scale`, which makes every
//! `d <= eps` test an integer comparison.
//!
//! Systems compiled from symbolic spaces carry, in addition to the canonical
//! map `image`, a successor relation: the set of classes an admissible orbit
//! may move to next. Orbits are then paths in that relation. Deterministic
//! systems have exactly one successor per point, the image itself.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::nodeset::NodeSet;
use crate::scalar::Dyadic;

/// Point distances as fixed-point keys over `2^scale`.
#[derive(Clone, Debug)]
pub enum Metric {
    Table { keys: Vec<u64> },
    Coordinates(CoordinateMetric),
}

/// Weighted sup metric over per-point coordinate vectors:
/// `d(x, y) = max_s 2^{-w_s} |x_s - y_s|` (or the indicator `x_s != y_s`
/// when `discrete`).
#[derive(Clone, Debug)]
pub struct CoordinateMetric {
    slots: usize,
    shifts: Vec<u32>,
    /// Slots by decreasing shift.
    order: Vec<usize>,
    discrete: bool,
    values: Vec<i64>,
}

impl CoordinateMetric {
    /// `weights[s]` is the exponent `w_s`; coordinate values are integers
    /// over `2^value_exp`.
    pub fn new(weights: &[u32], value_exp: u32, discrete: bool, values: Vec<i64>) -> (Self, u32) {
        let slots = weights.len();
        let top = weights.iter().copied().max().unwrap_or(0);
        let shifts: Vec<u32> = weights.iter().map(|w| top - w).collect();
        let mut order: Vec<usize> = (0..slots).collect();
        order.sort_by_key(|&s| core::cmp::Reverse(shifts[s]));
        let value_exp = if discrete { 0 } else { value_exp };
        (CoordinateMetric { slots, shifts, order, discrete, values }, top + value_exp)
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn coordinates(&self, i: usize) -> &[i64] {
        &self.values[i * self.slots..(i + 1) * self.slots]
    }

    #[inline]
    fn key(&self, i: usize, j: usize) -> u64 {
        let a = self.coordinates(i);
        let b = self.coordinates(j);
        let mut best = 0u64;
        for s in 0..self.slots {
            let diff = if self.discrete {
                (a[s] != b[s]) as u64
            } else {
                a[s].abs_diff(b[s])
            };
            let k = diff << self.shifts[s];
            if k > best {
                best = k;
            }
        }
        best
    }

    #[inline]
    fn within(&self, i: usize, j: usize, t: u64) -> bool {
        let a = self.coordinates(i);
        let b = self.coordinates(j);
        self.order.iter().all(|&s| {
            let diff = if self.discrete { (a[s] != b[s]) as u64 } else { a[s].abs_diff(b[s]) };
            // diff << shift > t, without overflow
            diff == 0 || (self.shifts[s] < 64 && diff <= t >> self.shifts[s])
        })
    }

    /// Slots on which points within key `t` must agree exactly.
    fn rigid_slots(&self, t: u64) -> Vec<usize> {
        (0..self.slots).filter(|&s| self.shifts[s] >= 64 || (1u64 << self.shifts[s]) > t).collect()
    }
}

/// One violated metric or map invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NonzeroSelfDistance(usize),
    Asymmetric(usize, usize),
    Triangle(usize, usize, usize),
    ZeroDistance(usize, usize),
    ImageOutOfRange(usize),
    SuccessorMissingImage(usize),
    NotBijective,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonzeroSelfDistance(i) => write!(f, "nonzero self distance at {i}"),
            Violation::Asymmetric(i, j) => write!(f, "symmetry: d({i},{j}) != d({j},{i})"),
            Violation::Triangle(i, j, k) => {
                write!(f, "triangle inequality: d({i},{j}) > d({i},{k}) + d({k},{j})")
            }
            Violation::ZeroDistance(i, j) => {
                write!(f, "distinct points at distance 0: {i}, {j}")
            }
            Violation::ImageOutOfRange(i) => write!(f, "image of {i} out of range"),
            Violation::SuccessorMissingImage(i) => {
                write!(f, "successor set of {i} does not contain its image")
            }
            Violation::NotBijective => write!(f, "system flagged invertible but map is not bijective"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FiniteSystem {
    size: usize,
    metric: Metric,
    scale: u32,
    image: Vec<usize>,
    successors: Option<Vec<Vec<usize>>>,
    labels: Vec<String>,
    invertible: bool,
    resolution: Option<Dyadic>,
}

impl FiniteSystem {
    /// Builds a system from an explicit distance table. Metric axioms are
    /// not enforced here; see [`FiniteSystem::validate`].
    pub fn from_table(dist: &[Vec<Dyadic>], image: Vec<usize>) -> Result<FiniteSystem> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidSystem("empty system".into()));
        }
        if image.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidSystem(format!(
                "table shapes disagree with size {n}"
            )));
        }
        let mut scale = 0;
        for row in dist {
            for d in row {
                if d.is_negative() {
                    return Err(Error::InvalidSystem(format!("negative distance {d}")));
                }
                scale = scale.max(d.exponent());
            }
        }
        let mut keys = Vec::with_capacity(n * n);
        for row in dist {
            for d in row {
                let k = d.at_exponent(scale).ok_or_else(|| {
                    Error::InvalidSystem(format!("distance {d} not representable"))
                })?;
                keys.push(k as u64);
            }
        }
        FiniteSystem::assemble(n, Metric::Table { keys }, scale, image)
    }

    pub fn from_coordinates(
        metric: CoordinateMetric,
        scale: u32,
        image: Vec<usize>,
    ) -> Result<FiniteSystem> {
        let n = image.len();
        if n == 0 || metric.values.len() != n * metric.slots {
            return Err(Error::InvalidSystem("coordinate table shape mismatch".into()));
        }
        FiniteSystem::assemble(n, Metric::Coordinates(metric), scale, image)
    }

    fn assemble(n: usize, metric: Metric, scale: u32, image: Vec<usize>) -> Result<FiniteSystem> {
        if scale > 62 {
            return Err(Error::InvalidSystem(format!("scale 2^-{scale} too fine")));
        }
        if let Some(i) = image.iter().position(|&j| j >= n) {
            return Err(Error::InvalidSystem(format!("image of {i} out of range")));
        }
        Ok(FiniteSystem {
            size: n,
            metric,
            scale,
            image,
            successors: None,
            labels: Vec::new(),
            invertible: false,
            resolution: None,
        })
    }

    /// Attaches a successor relation. Each list must contain the image.
    pub fn with_successors(mut self, mut succ: Vec<Vec<usize>>) -> Result<FiniteSystem> {
        if succ.len() != self.size {
            return Err(Error::InvalidSystem("successor table size mismatch".into()));
        }
        for (i, s) in succ.iter_mut().enumerate() {
            s.sort_unstable();
            s.dedup();
            if s.iter().any(|&j| j >= self.size) {
                return Err(Error::InvalidSystem(format!("successor of {i} out of range")));
            }
            if s.binary_search(&self.image[i]).is_err() {
                return Err(Error::InvalidSystem(format!(
                    "successors of {i} omit its image"
                )));
            }
        }
        if succ.iter().all(|s| s.len() == 1) {
            self.successors = None;
        } else {
            self.successors = Some(succ);
        }
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> FiniteSystem {
        self.labels = labels;
        self
    }

    pub fn with_invertible(mut self, flag: bool) -> FiniteSystem {
        self.invertible = flag;
        self
    }

    pub fn with_resolution(mut self, resolution: Dyadic) -> FiniteSystem {
        self.resolution = Some(resolution);
        self
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels.get(i).map(String::as_str)
    }

    pub fn invertible(&self) -> bool {
        self.invertible
    }

    pub fn resolution(&self) -> Option<Dyadic> {
        self.resolution
    }

    pub fn image_table(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.image[i]
    }

    /// Admissible next points of an orbit through `i`.
    #[inline]
    pub fn successors(&self, i: usize) -> &[usize] {
        match &self.successors {
            Some(s) => &s[i],
            None => core::slice::from_ref(&self.image[i]),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.successors.is_none()
    }

    pub fn successor_table(&self) -> Option<&[Vec<usize>]> {
        self.successors.as_deref()
    }

    #[inline]
    pub fn dist_key(&self, i: usize, j: usize) -> u64 {
        match &self.metric {
            Metric::Table { keys } => keys[i * self.size + j],
            Metric::Coordinates(c) => c.key(i, j),
        }
    }

    /// `dist_key(i, j) <= t`, stopping at the first coordinate over `t`.
    #[inline]
    pub fn within(&self, i: usize, j: usize, t: u64) -> bool {
        match &self.metric {
            Metric::Table { keys } => keys[i * self.size + j] <= t,
            Metric::Coordinates(c) => c.within(i, j, t),
        }
    }

    /// For each point, the sorted list of points within key `t`.
    pub fn neighbourhoods(&self, t: u64) -> Vec<Vec<usize>> {
        let n = self.size;
        match &self.metric {
            Metric::Table { .. } => (0..n).map(|x| (0..n).filter(|&y| self.within(x, y, t)).collect()).collect(),
            Metric::Coordinates(c) => {
                let rigid = c.rigid_slots(t);
                let mut buckets: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
                for x in 0..n {
                    let coords = c.coordinates(x);
                    buckets.entry(rigid.iter().map(|&s| coords[s]).collect()).or_default().push(x);
                }
                let mut out = vec![Vec::new(); n];
                for members in buckets.values() {
                    for &x in members {
                        out[x] = members.iter().copied().filter(|&y| c.within(x, y, t)).collect();
                    }
                }
                out
            }
        }
    }

    pub fn dist(&self, i: usize, j: usize) -> Dyadic {
        Dyadic::from_key(self.dist_key(i, j), self.scale)
    }

    /// Largest key `k` with `k / 2^scale <= eps`; `dist_key(i, j) <= threshold(eps)`
    /// is exactly `d(i, j) <= eps`.
    #[inline]
    pub fn threshold(&self, eps: Dyadic) -> u64 {
        eps.floor_at_exponent(self.scale)
    }

    pub fn key_to_scalar(&self, key: u64) -> Dyadic {
        Dyadic::from_key(key, self.scale)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.size {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, size: self.size })
        }
    }

    /// Closed ball `{y : d(x, y) <= eps}`.
    pub fn ball(&self, x: usize, eps: Dyadic) -> Result<NodeSet> {
        self.check_index(x)?;
        let t = self.threshold(eps);
        Ok(NodeSet::from_indices(
            self.size,
            (0..self.size).filter(|&y| self.within(x, y, t)),
        ))
    }

    /// Closed `eps`-neighbourhood of a set.
    pub fn fatten(&self, set: &NodeSet, eps: Dyadic) -> NodeSet {
        let t = self.threshold(eps);
        let members = set.to_vec();
        NodeSet::from_indices(
            self.size,
            (0..self.size).filter(|&y| members.iter().any(|&x| self.within(x, y, t))),
        )
    }

    /// `min_{s in set} d(y, s)` as a key; `u64::MAX` for an empty set.
    pub fn dist_key_to_set(&self, y: usize, set: &NodeSet) -> u64 {
        set.iter().map(|s| self.dist_key(y, s)).min().unwrap_or(u64::MAX)
    }

    pub fn diameter(&self) -> Dyadic {
        let mut best = 0;
        for i in 0..self.size {
            for j in i + 1..self.size {
                best = best.max(self.dist_key(i, j));
            }
        }
        self.key_to_scalar(best)
    }

    /// Smallest positive distance; `None` for a one-point system.
    pub fn min_positive_distance(&self) -> Option<Dyadic> {
        let mut best: Option<u64> = None;
        for i in 0..self.size {
            for j in i + 1..self.size {
                let k = self.dist_key(i, j);
                if k > 0 && best.is_none_or(|b| k < b) {
                    best = Some(k);
                }
            }
        }
        best.map(|k| self.key_to_scalar(k))
    }

    /// Union of successor sets over `set`.
    pub fn successor_set(&self, set: &NodeSet) -> NodeSet {
        let mut out = NodeSet::empty(self.size);
        for i in set.iter() {
            for &j in self.successors(i) {
                out.insert(j);
            }
        }
        out
    }

    /// `f(S) subset S` under the successor relation.
    pub fn is_invariant(&self, set: &NodeSet) -> bool {
        set.iter().all(|i| self.successors(i).iter().all(|&j| set.contains(j)))
    }

    /// Inverse map when the system is a deterministic bijection.
    pub fn inverse(&self) -> Option<Vec<usize>> {
        if !self.is_deterministic() {
            return None;
        }
        let mut inv = vec![usize::MAX; self.size];
        for (i, &j) in self.image.iter().enumerate() {
            if inv[j] != usize::MAX {
                return None;
            }
            inv[j] = i;
        }
        Some(inv)
    }

    /// Canonical orbit `x, f(x), ..., f^{len-1}(x)` under `image`.
    pub fn orbit(&self, x: usize, len: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(len);
        let mut cur = x;
        for _ in 0..len {
            out.push(cur);
            cur = self.image[cur];
        }
        out
    }

    /// Canonical orbit split as `(transient, cycle)`.
    pub fn orbit_tail(&self, x: usize) -> (Vec<usize>, Vec<usize>) {
        let mut seen = vec![usize::MAX; self.size];
        let mut path = Vec::new();
        let mut cur = x;
        while seen[cur] == usize::MAX {
            seen[cur] = path.len();
            path.push(cur);
            cur = self.image[cur];
        }
        let start = seen[cur];
        let cycle = path.split_off(start);
        (path, cycle)
    }

    /// All violated invariants; empty iff the system is valid.
    ///
    /// Table metrics get the full `O(N^3)` check. Coordinate metrics are
    /// symmetric and satisfy the triangle inequality by construction, so
    /// only positivity is scanned for them.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.size;
        let mut out = Vec::new();
        let table = matches!(self.metric, Metric::Table { .. });
        for i in 0..n {
            if self.dist_key(i, i) != 0 {
                out.push(Violation::NonzeroSelfDistance(i));
            }
        }
        if table {
            for i in 0..n {
                for j in i + 1..n {
                    if self.dist_key(i, j) != self.dist_key(j, i) {
                        out.push(Violation::Asymmetric(i, j));
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let dij = self.dist_key(i, j) as u128;
                    for k in 0..n {
                        if dij > self.dist_key(i, k) as u128 + self.dist_key(k, j) as u128 {
                            out.push(Violation::Triangle(i, j, k));
                        }
                    }
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    if self.dist_key(i, j) == 0 {
                        out.push(Violation::ZeroDistance(i, j));
                    }
                }
            }
        } else if let Metric::Coordinates(c) = &self.metric {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| c.coordinates(a).cmp(c.coordinates(b)));
            for w in order.windows(2) {
                if c.coordinates(w[0]) == c.coordinates(w[1]) {
                    out.push(Violation::ZeroDistance(w[0].min(w[1]), w[0].max(w[1])));
                }
            }
        }
        for (i, &j) in self.image.iter().enumerate() {
            if j >= n {
                out.push(Violation::ImageOutOfRange(i));
            }
        }
        if let Some(succ) = &self.successors {
            for (i, s) in succ.iter().enumerate() {
                if !s.contains(&self.image[i]) {
                    out.push(Violation::SuccessorMissingImage(i));
                }
            }
        }
        if self.invertible && self.inverse().is_none() {
            out.push(Violation::NotBijective);
        }
        out
    }
}
