//! Eventually periodic symbolic points and their finite compilations.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::scalar::Dyadic;
use crate::system::{CoordinateMetric, FiniteSystem};

/// Default bound on the number of compiled classes.
pub const DEFAULT_CLASS_CAP: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sided {
    One,
    Two,
}

/// An eventually periodic word over symbol indices.
///
/// Coordinates `offset..offset + center.len()` are read from `center`.
/// To the right the word continues with `right_period` repeated; to the
/// left (two-sided only) with `left_period` repeated, so that the
/// coordinate just before `offset` is the last symbol of `left_period`.
/// One-sided words start at coordinate 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicPoint {
    sided: Sided,
    center: Vec<u8>,
    left_period: Vec<u8>,
    right_period: Vec<u8>,
    offset: i64,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl SymbolicPoint {
    pub fn two_sided(
        left_period: Vec<u8>,
        center: Vec<u8>,
        offset: i64,
        right_period: Vec<u8>,
    ) -> Result<SymbolicPoint> {
        if left_period.is_empty() || right_period.is_empty() {
            return Err(Error::InvalidParameter("periods must be nonempty".into()));
        }
        Ok(SymbolicPoint { sided: Sided::Two, center, left_period, right_period, offset })
    }

    pub fn one_sided(prefix: Vec<u8>, period: Vec<u8>) -> Result<SymbolicPoint> {
        if period.is_empty() {
            return Err(Error::InvalidParameter("period must be nonempty".into()));
        }
        Ok(SymbolicPoint {
            sided: Sided::One,
            center: prefix,
            left_period: Vec::new(),
            right_period: period,
            offset: 1,
        })
    }

    /// The two-sided periodic point `x_n = word[n mod len]`.
    pub fn periodic(word: Vec<u8>) -> Result<SymbolicPoint> {
        SymbolicPoint::two_sided(word.clone(), word.clone(), 0, word)
    }

    pub fn constant(sided: Sided, symbol: u8) -> SymbolicPoint {
        match sided {
            Sided::One => SymbolicPoint::one_sided(Vec::new(), vec![symbol]).unwrap(),
            Sided::Two => SymbolicPoint::periodic(vec![symbol]).unwrap(),
        }
    }

    pub fn sided(&self) -> Sided {
        self.sided
    }

    pub fn center(&self) -> &[u8] {
        &self.center
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn left_period(&self) -> &[u8] {
        &self.left_period
    }

    pub fn right_period(&self) -> &[u8] {
        &self.right_period
    }

    /// First coordinate of the right-periodic regime.
    pub fn periodic_from(&self) -> i64 {
        self.hi()
    }

    fn lo(&self) -> i64 {
        self.offset
    }

    fn hi(&self) -> i64 {
        self.offset + self.center.len() as i64
    }

    pub fn symbols(&self) -> impl Iterator<Item = u8> + '_ {
        self.center
            .iter()
            .chain(&self.left_period)
            .chain(&self.right_period)
            .copied()
    }

    /// Coordinate `n`. One-sided words panic below coordinate 1.
    pub fn at(&self, n: i64) -> u8 {
        if n >= self.hi() {
            let p = self.right_period.len() as i64;
            self.right_period[((n - self.hi()) % p) as usize]
        } else if n >= self.lo() {
            self.center[(n - self.lo()) as usize]
        } else {
            assert!(self.sided == Sided::Two, "coordinate {n} of a one-sided word");
            let p = self.left_period.len() as i64;
            let j = (self.lo() - 1 - n) % p;
            self.left_period[(p - 1 - j) as usize]
        }
    }

    /// `sigma(x)_n = x_{n+1}`; one-sided words drop their first coordinate.
    pub fn shift(&self) -> SymbolicPoint {
        match self.sided {
            Sided::Two => {
                let mut out = self.clone();
                out.offset -= 1;
                out
            }
            Sided::One => {
                let mut out = self.clone();
                if out.center.is_empty() {
                    out.right_period.rotate_left(1);
                } else {
                    out.center.remove(0);
                }
                out
            }
        }
    }

    /// `sigma^k`; negative powers only for two-sided words.
    pub fn shift_by(&self, k: i64) -> Result<SymbolicPoint> {
        match self.sided {
            Sided::Two => {
                let mut out = self.clone();
                out.offset -= k;
                Ok(out)
            }
            Sided::One => {
                if k < 0 {
                    return Err(Error::NotInvertible);
                }
                let mut out = self.clone();
                for _ in 0..k {
                    out = out.shift();
                }
                Ok(out)
            }
        }
    }

    /// Range of coordinates outside of which both words are periodic with
    /// period `(left, right)`.
    fn joint_frame(&self, other: &SymbolicPoint) -> (i64, i64, usize, usize) {
        let lo = self.lo().min(other.lo());
        let hi = self.hi().max(other.hi());
        let right = lcm(self.right_period.len(), other.right_period.len());
        let left = match self.sided {
            Sided::Two => lcm(self.left_period.len(), other.left_period.len()),
            Sided::One => 0,
        };
        (lo, hi, left, right)
    }

    /// Exact equality as infinite words.
    pub fn same_point(&self, other: &SymbolicPoint) -> bool {
        if self.sided != other.sided {
            return false;
        }
        let (lo, hi, left, right) = self.joint_frame(other);
        let start = match self.sided {
            Sided::One => 1,
            Sided::Two => lo - left as i64,
        };
        (start..hi + right as i64).all(|n| self.at(n) == other.at(n))
    }

    /// Applies the sliding block code `y_n = rule(x_n, ..., x_{n+anticipation})`.
    pub fn slide(&self, anticipation: usize, rule: impl Fn(&[u8]) -> u8) -> SymbolicPoint {
        let a = anticipation as i64;
        let block = |n: i64| -> u8 {
            let w: Vec<u8> = (n..=n + a).map(|m| self.at(m)).collect();
            rule(&w)
        };
        let hi = self.hi().max(match self.sided {
            Sided::One => 1,
            Sided::Two => self.hi(),
        });
        let rp = self.right_period.len() as i64;
        let right_period: Vec<u8> = (hi..hi + rp).map(block).collect();
        match self.sided {
            Sided::One => {
                let center = (1..hi).map(block).collect();
                SymbolicPoint::one_sided(center, right_period).unwrap()
            }
            Sided::Two => {
                let lo = self.lo() - a;
                let lp = self.left_period.len() as i64;
                let left_period = (lo - lp..lo).map(block).collect();
                let center = (lo..hi).map(block).collect();
                SymbolicPoint::two_sided(left_period, center, lo, right_period).unwrap()
            }
        }
    }

    /// Coordinates `lo..=hi` as a word.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<u8> {
        (lo..=hi).map(|n| self.at(n)).collect()
    }
}

/// Admissibility rule for the words of a symbolic space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    FullShift,
    /// `|x_1| >= |x_2| >= ...`.
    MonotoneModulus,
    /// Top-level words of an inverse-limit tower; every word is admissible
    /// and compatibility of the lower levels holds by construction.
    InverseLimitCompatibility,
}

impl Constraint {
    pub fn name(self) -> &'static str {
        match self {
            Constraint::FullShift => "full-shift",
            Constraint::MonotoneModulus => "example31-monotone",
            Constraint::InverseLimitCompatibility => "inverse-limit-compatibility",
        }
    }

    pub fn from_name(name: &str) -> Option<Constraint> {
        match name {
            "full-shift" => Some(Constraint::FullShift),
            "example31-monotone" => Some(Constraint::MonotoneModulus),
            "inverse-limit-compatibility" => Some(Constraint::InverseLimitCompatibility),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicSystem {
    alphabet: Vec<Dyadic>,
    sided: Sided,
    constraint: Constraint,
}

impl SymbolicSystem {
    pub fn new(alphabet: Vec<Dyadic>, sided: Sided, constraint: Constraint) -> Result<SymbolicSystem> {
        if alphabet.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if alphabet.len() > u8::MAX as usize {
            return Err(Error::InvalidParameter("alphabet larger than 255 symbols".into()));
        }
        for (i, a) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(a) {
                return Err(Error::InvalidParameter(format!("repeated symbol value {a}")));
            }
        }
        Ok(SymbolicSystem { alphabet, sided, constraint })
    }

    /// `{0, 1}` with the given sidedness and no constraint.
    pub fn binary_full_shift(sided: Sided) -> SymbolicSystem {
        SymbolicSystem::new(vec![Dyadic::ZERO, Dyadic::ONE], sided, Constraint::FullShift).unwrap()
    }

    pub fn alphabet(&self) -> &[Dyadic] {
        &self.alphabet
    }

    pub fn sided(&self) -> Sided {
        self.sided
    }

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    pub fn value(&self, symbol: u8) -> Dyadic {
        self.alphabet[symbol as usize]
    }

    fn weight_exp(&self, n: i64) -> u32 {
        n.unsigned_abs() as u32
    }

    /// Whether appending `next` to a word ending in `last` keeps it admissible.
    fn extends(&self, last: Option<u8>, next: u8) -> bool {
        match (self.constraint, last) {
            (Constraint::MonotoneModulus, Some(prev)) => {
                self.value(next).abs() <= self.value(prev).abs()
            }
            _ => true,
        }
    }

    pub fn admits_word(&self, word: &[u8]) -> bool {
        word.iter().all(|&s| (s as usize) < self.alphabet.len())
            && word.windows(2).all(|w| self.extends(Some(w[0]), w[1]))
    }

    /// Whether every coordinate of `x` obeys the constraint.
    pub fn admits(&self, x: &SymbolicPoint) -> bool {
        if x.sided != self.sided || x.symbols().any(|s| s as usize >= self.alphabet.len()) {
            return false;
        }
        let (lo, hi, left, right) = x.joint_frame(x);
        let start = match self.sided {
            Sided::One => 1,
            Sided::Two => lo - 2 * left as i64,
        };
        let w = x.window(start, hi + 2 * right as i64);
        self.admits_word(&w)
    }

    fn check_point(&self, x: &SymbolicPoint) -> Result<()> {
        if x.sided != self.sided || x.symbols().any(|s| s as usize >= self.alphabet.len()) {
            return Err(Error::MismatchedSpaces);
        }
        Ok(())
    }

    /// Exact `sup_n w(n) |x_n - y_n|` with `w(n) = 2^{-|n|}` (two-sided) or
    /// `2^{-n}`, `n >= 1` (one-sided).
    pub fn metric(&self, x: &SymbolicPoint, y: &SymbolicPoint) -> Result<Dyadic> {
        self.check_point(x)?;
        self.check_point(y)?;
        let (lo, hi, left, right) = x.joint_frame(y);
        // Outside [start, end) the difference sequence repeats values already
        // seen closer to the origin, where weights are larger.
        let (start, end) = match self.sided {
            Sided::One => (1, hi.max(1) + right as i64),
            Sided::Two => (lo.min(0) - left as i64, hi.max(0) + right as i64),
        };
        let mut best = Dyadic::ZERO;
        for n in start..end {
            let (a, b) = (x.at(n), y.at(n));
            if a != b {
                let d = (self.value(a) - self.value(b)).abs().shr(self.weight_exp(n));
                best = best.max(d);
            }
        }
        Ok(best)
    }
}

/// Map applied to compiled classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapSpec {
    /// `sigma^power`, `power >= 1`.
    Shift { power: u32 },
}

/// How window classes are turned into points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompileMode {
    /// Classes of words agreeing on the window. The canonical image extends
    /// the representative by repeating its last symbol; successors range
    /// over every admissible extension.
    Window,
    /// Two-sided words of period `2T + 1`, one per window word. The shift
    /// is an exact bijection on this finite invariant set.
    Periodic,
}

#[derive(Clone, Debug)]
pub struct Compiled {
    pub system: FiniteSystem,
    /// Canonical representative of each class.
    pub dictionary: Vec<SymbolicPoint>,
    /// Window coordinates of each class (positions `-T..=T`, or `1..=T`).
    pub words: Vec<Vec<u8>>,
    pub depth: u32,
    pub mode: CompileMode,
}

impl Compiled {
    /// First coordinate of the window.
    pub fn window_start(&self) -> i64 {
        match self.dictionary.first().map(|p| p.sided()) {
            Some(Sided::One) | None => 1,
            Some(Sided::Two) => -(self.depth as i64),
        }
    }

    /// Class index of the window word, if admissible.
    pub fn index_of(&self, word: &[u8]) -> Option<usize> {
        self.words.binary_search_by(|w| w.as_slice().cmp(word)).ok()
    }

    /// Class containing the point `x` (its window coordinates).
    pub fn class_of(&self, x: &SymbolicPoint) -> Option<usize> {
        let lo = self.window_start();
        let len = self.words.first().map_or(0, |w| w.len()) as i64;
        self.index_of(&x.window(lo, lo + len - 1))
    }
}

fn enumerate_words(space: &SymbolicSystem, len: usize, cap: usize) -> Result<Vec<Vec<u8>>> {
    let k = space.alphabet.len() as u8;
    let mut out = Vec::new();
    let mut word: Vec<u8> = Vec::with_capacity(len);
    // iterative depth-first enumeration in lexicographic order
    let mut next: Vec<u8> = vec![0];
    while let Some(top) = next.last_mut() {
        if *top >= k {
            next.pop();
            word.pop();
            if let Some(t) = next.last_mut() {
                *t += 1;
            }
            continue;
        }
        let s = *top;
        if !space.extends(word.last().copied(), s) {
            *top += 1;
            continue;
        }
        word.push(s);
        if word.len() == len {
            if out.len() == cap {
                return Err(Error::CapExceeded { what: "compiled classes", size: cap + 1, cap });
            }
            out.push(word.clone());
            word.pop();
            *next.last_mut().unwrap() += 1;
        } else {
            next.push(0);
        }
    }
    Ok(out)
}

fn label(word: &[u8]) -> String {
    let mut s = String::with_capacity(word.len());
    for (i, &c) in word.iter().enumerate() {
        if i > 0 && c > 9 {
            s.push(',');
        }
        let _ = write!(s, "{c}");
    }
    s
}

/// Compiles a symbolic space to a finite system of window classes.
///
/// The window is `-T..=T` for two-sided spaces and `1..=T` for one-sided
/// ones. Distances are the exact metric between class representatives, and
/// `resolution` records `2^{-T}`.
pub fn compile_symbolic(
    space: &SymbolicSystem,
    map: MapSpec,
    depth: u32,
    mode: CompileMode,
    cap: usize,
) -> Result<Compiled> {
    let MapSpec::Shift { power } = map;
    if depth < 1 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    if power < 1 {
        return Err(Error::InvalidParameter("shift power must be at least 1".into()));
    }
    let t = depth as i64;
    let (len, start) = match space.sided {
        Sided::Two => (2 * depth as usize + 1, -t),
        Sided::One => (depth as usize, 1),
    };
    if mode == CompileMode::Periodic && space.sided == Sided::One {
        return Err(Error::InvalidParameter("periodic compilation needs a two-sided space".into()));
    }
    if mode == CompileMode::Periodic && space.constraint == Constraint::MonotoneModulus {
        return Err(Error::InvalidParameter(
            "periodic compilation of a constrained space is not supported".into(),
        ));
    }
    let bound = libm::pow(space.alphabet.len() as f64, len as f64);
    if space.constraint != Constraint::MonotoneModulus && bound > cap as f64 {
        return Err(Error::CapExceeded {
            what: "compiled classes",
            size: if bound > usize::MAX as f64 { usize::MAX } else { bound as usize },
            cap,
        });
    }
    let words = enumerate_words(space, len, cap)?;
    let n = words.len();
    let index = |w: &[u8]| words.binary_search_by(|x| x.as_slice().cmp(w)).ok();
    let p = power as usize;

    let mut image = Vec::with_capacity(n);
    let mut successors = Vec::new();
    for w in &words {
        let mut next: Vec<u8> = Vec::with_capacity(len);
        match mode {
            CompileMode::Window => {
                if p >= len {
                    next.resize(len, *w.last().unwrap());
                } else {
                    next.extend_from_slice(&w[p..]);
                    next.resize(len, *w.last().unwrap());
                }
            }
            CompileMode::Periodic => {
                next.extend((0..len).map(|i| w[(i + p) % len]));
            }
        }
        image.push(index(&next).ok_or_else(|| {
            Error::Inconsistency(format!("image of class {} not admissible", label(w)))
        })?);
        if mode == CompileMode::Window {
            let keep = len.saturating_sub(p);
            let mut succ = Vec::new();
            let mut stack = vec![w[len - keep..].to_vec()];
            while let Some(u) = stack.pop() {
                if u.len() == len {
                    if let Some(j) = index(&u) {
                        succ.push(j);
                    }
                    continue;
                }
                for s in 0..space.alphabet.len() as u8 {
                    if space.extends(u.last().copied(), s) {
                        let mut v = u.clone();
                        v.push(s);
                        stack.push(v);
                    }
                }
            }
            successors.push(succ);
        }
    }

    let value_exp = space.alphabet.iter().map(|a| a.exponent()).max().unwrap_or(0);
    let weights: Vec<u32> = (0..len as i64).map(|i| space.weight_exp(start + i)).collect();
    let mut values = Vec::with_capacity(n * len);
    for w in &words {
        for &s in w {
            values.push(space.value(s).at_exponent(value_exp).expect("alphabet value representable"));
        }
    }
    let (metric, scale) = CoordinateMetric::new(&weights, value_exp, false, values);
    let mut system = FiniteSystem::from_coordinates(metric, scale, image)?
        .with_labels(words.iter().map(|w| label(w)).collect())
        .with_resolution(Dyadic::pow2_neg(depth));
    match mode {
        CompileMode::Window => system = system.with_successors(successors)?,
        CompileMode::Periodic => system = system.with_invertible(true),
    }

    let dictionary = words
        .iter()
        .map(|w| match (mode, space.sided) {
            (CompileMode::Periodic, _) => {
                let mut rot = w.clone();
                rot.rotate_left(depth as usize);
                SymbolicPoint::periodic(rot).unwrap()
            }
            (CompileMode::Window, Sided::Two) => {
                SymbolicPoint::two_sided(vec![w[0]], w.clone(), start, vec![w[len - 1]]).unwrap()
            }
            (CompileMode::Window, Sided::One) => {
                SymbolicPoint::one_sided(w.clone(), vec![w[len - 1]]).unwrap()
            }
        })
        .collect();
    Ok(Compiled { system, dictionary, words, depth, mode })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    #[test]
    fn coordinates_of_two_sided_word() {
        let x = SymbolicPoint::two_sided(bits("01"), bits("111"), 2, bits("0")).unwrap();
        assert_eq!(x.window(-1, 6), bits("10111100"));
        assert_eq!(x.at(0), 0);
        assert_eq!(x.at(1), 1);
        assert_eq!(x.shift().at(1), 1);
        assert_eq!(x.shift().at(0), 1);
    }

    #[test]
    fn periodic_point_reads_modulo_period() {
        let x = SymbolicPoint::periodic(bits("001")).unwrap();
        assert_eq!(x.window(-3, 5), bits("001001001"));
    }

    #[test]
    fn one_sided_shift_drops_first_coordinate() {
        let x = SymbolicPoint::one_sided(bits("10"), bits("01")).unwrap();
        assert_eq!(x.window(1, 6), bits("100101"));
        assert_eq!(x.shift().window(1, 5), bits("00101"));
        assert_eq!(x.shift().shift().shift().window(1, 4), bits("1010"));
    }

    #[test]
    fn same_point_ignores_presentation() {
        let a = SymbolicPoint::periodic(bits("01")).unwrap();
        let b = SymbolicPoint::two_sided(bits("0101"), bits("010101"), -4, bits("01")).unwrap();
        assert!(a.same_point(&b));
        assert!(!a.same_point(&a.shift()));
        assert!(a.same_point(&a.shift().shift()));
    }

    #[test]
    fn metric_examples() {
        let space = SymbolicSystem::binary_full_shift(Sided::Two);
        let zero = SymbolicPoint::constant(Sided::Two, 0);
        let at = |n: i64| SymbolicPoint::two_sided(bits("0"), bits("1"), n, bits("0")).unwrap();
        assert_eq!(space.metric(&zero, &zero).unwrap(), Dyadic::ZERO);
        assert_eq!(space.metric(&zero, &at(0)).unwrap(), Dyadic::ONE);
        assert_eq!(space.metric(&zero, &at(3)).unwrap(), Dyadic::pow2_neg(3));
        assert_eq!(space.metric(&zero, &at(-3)).unwrap(), Dyadic::pow2_neg(3));
        let one = SymbolicPoint::one_sided(vec![], bits("0")).unwrap();
        assert_eq!(space.metric(&zero, &one), Err(Error::MismatchedSpaces));
    }

    #[test]
    fn metric_sees_far_periodic_difference() {
        let space = SymbolicSystem::binary_full_shift(Sided::Two);
        let x = SymbolicPoint::two_sided(bits("0"), bits("0000000000"), 5, bits("01")).unwrap();
        let zero = SymbolicPoint::constant(Sided::Two, 0);
        // first 1 sits at coordinate 16
        assert_eq!(space.metric(&x, &zero).unwrap(), Dyadic::pow2_neg(16));
    }

    #[test]
    fn slide_xor() {
        let x = SymbolicPoint::two_sided(bits("0"), bits("1"), 0, bits("0")).unwrap();
        let y = x.slide(1, |w| w[0] ^ w[1]);
        assert_eq!(y.window(-3, 3), bits("0011000"));
    }

    #[test]
    fn compile_counts() {
        let space = SymbolicSystem::binary_full_shift(Sided::Two);
        let c = compile_symbolic(&space, MapSpec::Shift { power: 1 }, 1, CompileMode::Window, 1 << 20)
            .unwrap();
        assert_eq!(c.system.size(), 8);
        for i in 0..8 {
            assert_eq!(c.system.successors(i).len(), 2);
        }
        assert!(c.system.validate().is_empty());
    }

    #[test]
    fn compile_cap() {
        let space = SymbolicSystem::binary_full_shift(Sided::Two);
        let err = compile_symbolic(&space, MapSpec::Shift { power: 1 }, 3, CompileMode::Window, 100);
        assert!(matches!(err, Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn monotone_words_are_filtered() {
        let alphabet = vec![Dyadic::ZERO, Dyadic::new(1, 1), Dyadic::new(-1, 1), Dyadic::new(1, 2)];
        let space = SymbolicSystem::new(alphabet, Sided::One, Constraint::MonotoneModulus).unwrap();
        let c = compile_symbolic(&space, MapSpec::Shift { power: 1 }, 2, CompileMode::Window, 1 << 20)
            .unwrap();
        for w in &c.words {
            assert!(space.admits_word(w));
        }
        // pairs (a, b) with |b| <= |a|: 0 -> 1, +-1/2 -> 4 each, 1/4 -> 2
        assert_eq!(c.system.size(), 11);
    }
}
