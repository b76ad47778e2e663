//! The two-to-one factor `F(y)_n = y_n + y_{n+1} (mod 2)` on `{0, 1}^Z`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Dyadic;
use crate::symbolic::{Sided, SymbolicPoint};

/// A sliding-block factor map together with its fiber rule and the
/// open-map modulus `delta -> r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorMapSpec {
    pub name: &'static str,
    /// Number of points in every fiber.
    pub fiber_size: usize,
}

pub fn xor_factor() -> FactorMapSpec {
    FactorMapSpec { name: "xor", fiber_size: 2 }
}

impl FactorMapSpec {
    pub fn forward(&self, y: &SymbolicPoint) -> SymbolicPoint {
        y.slide(1, |w| w[0] ^ w[1])
    }

    /// `F` on a cyclic word (a periodic point given by one period).
    pub fn forward_cyclic(&self, w: &[u8]) -> Vec<u8> {
        let n = w.len();
        (0..n).map(|i| w[i] ^ w[(i + 1) % n]).collect()
    }

    /// `F` on a cyclic word of length at most 64 packed into bits, bit `p`
    /// holding coordinate `p`.
    pub fn forward_bits(&self, w: u64, len: u32) -> u64 {
        w ^ rotate_down(w, len)
    }

    /// The preimage of `x` whose coordinate 0 (1 for one-sided words) is
    /// `seed`, obtained by integrating `y_{n+1} = x_n + y_n`.
    pub fn lift(&self, x: &SymbolicPoint, seed: u8) -> Result<SymbolicPoint> {
        if x.symbols().any(|s| s > 1) || seed > 1 {
            return Err(Error::InvalidParameter("xor factor acts on binary words".into()));
        }
        let pr = x.right_period().len() as i64;
        let right_parity = x.right_period().iter().fold(0, |a, &b| a ^ b);
        let rp = if right_parity == 1 { 2 * pr } else { pr };
        match x.sided() {
            Sided::One => {
                let hi = x.periodic_from().max(1);
                let ys = integrate(x, 1, seed, 1, hi + rp);
                let center = ys[..(hi - 1) as usize].to_vec();
                let right = ys[(hi - 1) as usize..].to_vec();
                SymbolicPoint::one_sided(center, right)
            }
            Sided::Two => {
                let lo = x.offset().min(0);
                let hi = x.periodic_from().max(1);
                let pl = x.left_period().len() as i64;
                let left_parity = x.left_period().iter().fold(0, |a, &b| a ^ b);
                let lp = if left_parity == 1 { 2 * pl } else { pl };
                let ys = integrate(x, 0, seed, lo - lp, hi + rp);
                let at = |n: i64| (n - (lo - lp)) as usize;
                SymbolicPoint::two_sided(
                    ys[at(lo - lp)..at(lo)].to_vec(),
                    ys[at(lo)..at(hi)].to_vec(),
                    lo,
                    ys[at(hi)..].to_vec(),
                )
            }
        }
    }

    /// Both preimages of `x`, seed 0 first.
    pub fn fiber(&self, x: &SymbolicPoint) -> Result<Vec<SymbolicPoint>> {
        Ok(vec![self.lift(x, 0)?, self.lift(x, 1)?])
    }

    /// Open-map radius: if `d(x, x') <= delta` then every preimage of `x`
    /// has a preimage of `x'` within `delta`. For dyadic `delta` the
    /// preimage with the same coordinate 0 agrees on the same block.
    pub fn modulus(&self, delta: Dyadic) -> Dyadic {
        delta
    }
}

/// Bit `p` of the result is bit `p + 1` of `w` (cyclically).
pub(crate) fn rotate_down(w: u64, len: u32) -> u64 {
    let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
    ((w >> 1) | (w << (len - 1))) & mask
}

/// `y_n` for `n` in `lo..hi` with `y_anchor = seed`.
fn integrate(x: &SymbolicPoint, anchor: i64, seed: u8, lo: i64, hi: i64) -> Vec<u8> {
    let mut ys = vec![0u8; (hi - lo) as usize];
    let at = |n: i64| (n - lo) as usize;
    ys[at(anchor)] = seed;
    for n in anchor..hi - 1 {
        ys[at(n + 1)] = ys[at(n)] ^ x.at(n);
    }
    for n in (lo + 1..=anchor).rev() {
        ys[at(n - 1)] = ys[at(n)] ^ x.at(n - 1);
    }
    ys
}
