//! Finite truncations of the inverse limit of `{0, 1}^Z` under the XOR
//! factor.
//!
//! Points are the compatible tuples `(y_1, ..., y_k)` of periodic words of
//! period `L = 2T`, `y_n = F(y_{n+1})`, so each point is determined by its
//! top word `y_k`. The metric is `D = max_n 2^{-n} d_n` with the two-sided
//! shift metric `d_n` on level `n`, and the map shifts every level.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pairs::{classify_symbolic_pair, PairClass, PairVerdict};
use crate::scalar::Dyadic;
use crate::symbolic::{SymbolicPoint, SymbolicSystem};
use crate::system::{CoordinateMetric, FiniteSystem};

use super::xor::{rotate_down, xor_factor, FactorMapSpec};

#[derive(Clone, Debug)]
pub struct Tower {
    pub depth: usize,
    /// Window half-width `T`; the period is `2T`.
    pub half_window: u32,
    pub factor: FactorMapSpec,
    /// Point `i` is the tuple whose top word has bit pattern `i`.
    pub system: FiniteSystem,
}

/// Builds the depth-`k` tower over words of period `2T`.
pub fn example41(depth: usize, half_window: u32, cap: usize) -> Result<Tower> {
    if depth == 0 || half_window == 0 {
        return Err(Error::InvalidParameter("tower needs depth >= 1 and T >= 1".into()));
    }
    let period = 2 * half_window;
    if period > 30 || (1usize << period) > cap {
        return Err(Error::CapExceeded {
            what: "tower points",
            size: if period >= 64 { usize::MAX } else { 1usize << period.min(62) },
            cap,
        });
    }
    let size = 1usize << period;
    let t = half_window as i64;
    let mut weights = Vec::new();
    for n in 1..=depth as u32 {
        for j in -t..t {
            weights.push(n + j.unsigned_abs() as u32);
        }
    }
    let factor = xor_factor();
    let mut values = Vec::with_capacity(size * weights.len());
    let mut image = Vec::with_capacity(size);
    for top in 0..size as u64 {
        let mut levels = Vec::with_capacity(depth);
        let mut w = top;
        for _ in 0..depth {
            levels.push(w);
            w = factor.forward_bits(w, period);
        }
        levels.reverse();
        for &lw in &levels {
            for j in -t..t {
                values.push(((lw >> j.rem_euclid(period as i64)) & 1) as i64);
            }
        }
        image.push(rotate_down(top, period) as usize);
    }
    let (metric, scale) = CoordinateMetric::new(&weights, 0, false, values);
    let system = FiniteSystem::from_coordinates(metric, scale, image)?
        .with_invertible(true)
        .with_resolution(Dyadic::pow2_neg(depth as u32))
        .with_labels((0..size).map(|i| format!("{i:0w$b}", w = period as usize)).collect());
    Ok(Tower { depth, half_window, factor, system })
}

impl Tower {
    pub fn period(&self) -> u32 {
        2 * self.half_window
    }

    pub fn size(&self) -> usize {
        self.system.size()
    }

    /// Declared resolution `2^{-depth}`: the finest tower scale at which
    /// the top level is still seen.
    pub fn resolution(&self) -> Dyadic {
        Dyadic::pow2_neg(self.depth as u32)
    }

    /// Level `n` (`1..=depth`) of point `i` as a bit pattern.
    pub fn level(&self, i: usize, n: usize) -> u64 {
        let mut w = i as u64;
        for _ in n..self.depth {
            w = self.factor.forward_bits(w, self.period());
        }
        w
    }

    pub fn levels(&self, i: usize) -> Vec<u64> {
        (1..=self.depth).map(|n| self.level(i, n)).collect()
    }

    /// Level word as a periodic point of `{0, 1}^Z`.
    pub fn level_point(&self, i: usize, n: usize) -> SymbolicPoint {
        SymbolicPoint::periodic(bits_to_word(self.level(i, n), self.period())).unwrap()
    }

    /// `y_n = F(y_{n+1})` on every level, checked on symbolic points.
    pub fn is_compatible(&self, i: usize) -> bool {
        (1..self.depth).all(|n| {
            self.factor
                .forward(&self.level_point(i, n + 1))
                .same_point(&self.level_point(i, n))
        })
    }

    /// `sup_t D(g^t i, g^t j)`; the pair has period dividing `2T`.
    pub fn gamma_distance(&self, i: usize, j: usize) -> Dyadic {
        let (mut a, mut b) = (i, j);
        let mut best = Dyadic::ZERO;
        for _ in 0..self.period() {
            best = best.max(self.system.dist(a, b));
            a = self.system.image(a);
            b = self.system.image(b);
        }
        best
    }

    /// The point with the top word complemented; it agrees with `i` below
    /// the top level.
    pub fn top_flip(&self, i: usize) -> usize {
        i ^ (self.size() - 1)
    }

    /// Single-level system of period-`2T` words with the plain two-sided
    /// metric, and `F` as an index table on it.
    pub fn level_system(&self) -> Result<(FiniteSystem, Vec<usize>)> {
        let period = self.period();
        let t = self.half_window as i64;
        let weights: Vec<u32> = (-t..t).map(|j| j.unsigned_abs() as u32).collect();
        let size = self.size();
        let mut values = Vec::with_capacity(size * weights.len());
        for w in 0..size as u64 {
            for j in -t..t {
                values.push(((w >> j.rem_euclid(period as i64)) & 1) as i64);
            }
        }
        let (metric, scale) = CoordinateMetric::new(&weights, 0, false, values);
        let image = (0..size as u64).map(|w| rotate_down(w, period) as usize).collect();
        let sys = FiniteSystem::from_coordinates(metric, scale, image)?.with_invertible(true);
        let f = (0..size as u64).map(|w| self.factor.forward_bits(w, period) as usize).collect();
        Ok((sys, f))
    }

    /// Top words in the kernel of `F^m`.
    pub fn kernel(&self, m: usize) -> Vec<usize> {
        let period = self.period();
        (0..self.size())
            .filter(|&w| {
                let mut x = w as u64;
                for _ in 0..m {
                    x = self.factor.forward_bits(x, period);
                }
                x == 0
            })
            .collect()
    }
}

pub(crate) fn bits_to_word(w: u64, len: u32) -> Vec<u8> {
    (0..len).map(|p| ((w >> p) & 1) as u8).collect()
}

/// Points agreeing with `q` on levels `1..=N` and branching freely above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcFamily {
    pub q: usize,
    pub level: usize,
    pub eps: Dyadic,
    pub points: Vec<usize>,
    /// `sup_t D(g^t q, g^t p)` for each point.
    pub distances: Vec<Dyadic>,
}

impl QcFamily {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

pub fn qc_family(tower: &Tower, q: usize, level: usize, eps: Dyadic) -> Result<QcFamily> {
    tower.system.check_index(q)?;
    if level > tower.depth {
        return Err(Error::InvalidParameter(format!("level {level} above depth {}", tower.depth)));
    }
    let free = tower.depth - level;
    let kernel = tower.kernel(free);
    if kernel.len() != 1 << free {
        return Err(Error::Precondition(format!(
            "period {} admits only {} branch choices over {free} levels",
            tower.period(),
            kernel.len()
        )));
    }
    let mut points: Vec<usize> = kernel.iter().map(|&k| q ^ k).collect();
    points.sort_unstable();
    let keep: Vec<u64> = (1..=level).map(|n| tower.level(q, n)).collect();
    for &p in &points {
        if (1..=level).any(|n| tower.level(p, n) != keep[n - 1]) {
            return Err(Error::Inconsistency(format!("point {p} leaves q below level {level}")));
        }
    }
    let distances: Vec<Dyadic> = points.iter().map(|&p| tower.gamma_distance(q, p)).collect();
    let need = distances.iter().copied().fold(Dyadic::ZERO, Dyadic::max);
    if need > eps {
        return Err(Error::InvalidParameter(format!(
            "eps {eps} below the level-{level} scale; smallest feasible eps is {need}"
        )));
    }
    Ok(QcFamily { q, level, eps, points, distances })
}

/// One lifted pair whose base pair is asymptotic.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedPair {
    pub level: usize,
    pub base: PairVerdict,
    pub lift: PairVerdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma41Report {
    pub from_level: usize,
    pub examined: usize,
    /// Asymptotic base pairs with a scrambled lift.
    pub found: Vec<LiftedPair>,
    /// How the lifts of asymptotic base pairs classify.
    pub lift_classes: BTreeMap<&'static str, usize>,
}

impl Lemma41Report {
    pub fn pattern_found(&self) -> bool {
        !self.found.is_empty()
    }
}

/// Scans `(base, lift)` verdicts level by level for an asymptotic base
/// pair with a scrambled lift. `candidates(M)` returns verdicts for pairs
/// at level `M` and their lifts at level `M + 1`.
pub fn lemma41_scan(
    depth: usize,
    from_level: usize,
    candidates: &dyn Fn(usize) -> Result<Vec<(PairVerdict, PairVerdict)>>,
) -> Result<Lemma41Report> {
    let mut report = Lemma41Report { from_level, examined: 0, found: Vec::new(), lift_classes: BTreeMap::new() };
    for level in from_level..depth {
        for (base, lift) in candidates(level)? {
            if base.class != PairClass::Asymptotic {
                continue;
            }
            report.examined += 1;
            *report.lift_classes.entry(lift.class.name()).or_insert(0) += 1;
            if lift.class == PairClass::Scrambled {
                report.found.push(LiftedPair { level, base, lift });
            }
        }
    }
    Ok(report)
}

/// Scrambled-lift search on the XOR tower: every base pair in `pool`
/// is lifted through both fiber choices on each side and classified
/// exactly.
pub fn lemma41_probe(
    tower: &Tower,
    from_level: usize,
    pool: &[(SymbolicPoint, SymbolicPoint)],
    horizon: usize,
    s_lo: Dyadic,
    s_hi: Dyadic,
) -> Result<Lemma41Report> {
    let space = SymbolicSystem::binary_full_shift(crate::symbolic::Sided::Two);
    let f = tower.factor;
    let candidates = |_: usize| -> Result<Vec<(PairVerdict, PairVerdict)>> {
        let mut out = Vec::new();
        for (x, y) in pool {
            let base = classify_symbolic_pair(&space, x, y, horizon, s_lo, s_hi)?;
            for z in f.fiber(x)? {
                for w in f.fiber(y)? {
                    let lift = classify_symbolic_pair(&space, &z, &w, horizon, s_lo, s_hi)?;
                    out.push((base.clone(), lift));
                }
            }
        }
        Ok(out)
    };
    lemma41_scan(tower.depth, from_level, &candidates)
}
