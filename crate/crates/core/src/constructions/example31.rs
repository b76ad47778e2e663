//! One-sided shift on sequences with non-increasing modulus over the values
//! `{0} ∪ {±s_k}`, `s_k = 2^{-c k}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::nodeset::NodeSet;
use crate::scalar::Dyadic;
use crate::symbolic::{compile_symbolic, CompileMode, Compiled, Constraint, MapSpec, Sided, SymbolicPoint, SymbolicSystem};

#[derive(Clone, Debug)]
pub struct Example31 {
    pub space: SymbolicSystem,
    pub compiled: Compiled,
    /// `s_1 > s_2 > ... > s_K`.
    pub s: Vec<Dyadic>,
    /// Class of `(s_1, s_2, ..., s_K, 0, 0, ...)`.
    pub x: usize,
    /// `xs[k-1]` is the class of `(s_1, ..., s_k, s_k, ...)`.
    pub xs: Vec<usize>,
    /// `levels[0]` is the class of `0^∞`; `levels[k]` holds the classes of
    /// words over `{±s_k}`.
    pub levels: Vec<NodeSet>,
}

impl Example31 {
    /// Symbol of `+s_k` (`k >= 1`); `-s_k` is the next one, `0` is symbol 0.
    pub fn plus(k: usize) -> u8 {
        (2 * k - 1) as u8
    }

    /// Level of a window word: `Some(0)` for zeros, `Some(k)` when every
    /// entry is `±s_k`, `None` otherwise.
    pub fn level_of_word(word: &[u8]) -> Option<usize> {
        let level = |s: u8| (s as usize).div_ceil(2);
        let first = level(*word.first()?);
        word.iter().all(|&s| level(s) == first).then_some(first)
    }

    /// Level of a class, as above.
    pub fn level_of(&self, class: usize) -> Option<usize> {
        Example31::level_of_word(&self.compiled.words[class])
    }

    pub fn marked_point(&self) -> SymbolicPoint {
        let k = self.s.len();
        SymbolicPoint::one_sided((1..=k).map(Example31::plus).collect(), vec![0]).unwrap()
    }

    pub fn marked_level_point(&self, k: usize) -> SymbolicPoint {
        SymbolicPoint::one_sided((1..=k).map(Example31::plus).collect(), vec![Example31::plus(k)]).unwrap()
    }
}

/// Compiles the system at window `1..=depth` with `levels` nonzero moduli.
pub fn example31(levels: usize, depth: u32, c: u32, cap: usize) -> Result<Example31> {
    if levels == 0 || c == 0 {
        return Err(Error::InvalidParameter("example31 needs K >= 1 and c >= 1".into()));
    }
    if levels > 100 || (levels as u64) * c as u64 > 48 {
        return Err(Error::InvalidParameter("s_K too small to represent".into()));
    }
    let s: Vec<Dyadic> = (1..=levels).map(|k| Dyadic::pow2_neg(c * k as u32)).collect();
    let mut alphabet = vec![Dyadic::ZERO];
    for &v in &s {
        alphabet.push(v);
        alphabet.push(Dyadic::ZERO - v);
    }
    let space = SymbolicSystem::new(alphabet, Sided::One, Constraint::MonotoneModulus)?;
    let compiled = compile_symbolic(&space, MapSpec::Shift { power: 1 }, depth, CompileMode::Window, cap)?;
    let n = compiled.system.size();
    let mut level_sets = vec![NodeSet::empty(n); levels + 1];
    for (i, w) in compiled.words.iter().enumerate() {
        if let Some(k) = Example31::level_of_word(w) {
            level_sets[k].insert(i);
        }
    }
    let mut out = Example31 { space, compiled, s, x: 0, xs: Vec::new(), levels: level_sets };
    let missing = || Error::Inconsistency("marked point not admissible".into());
    out.x = out.compiled.class_of(&out.marked_point()).ok_or_else(missing)?;
    for k in 1..=levels {
        let class = out.compiled.class_of(&out.marked_level_point(k)).ok_or_else(missing)?;
        out.xs.push(class);
    }
    Ok(out)
}
