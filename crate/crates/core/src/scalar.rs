//! Exact dyadic rationals.
//!
//! Every distance, tolerance and scale parameter in the crate is a
//! [`Dyadic`]: an integer numerator over a power-of-two denominator.
//! Comparisons are exact, so a test like `d(f(x), y) <= delta` never
//! depends on rounding.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::Error;

/// `num / 2^exp`, kept in lowest terms (odd numerator or `exp == 0`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: i64, exp: u32) -> Dyadic {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    pub fn from_int(n: i64) -> Dyadic {
        Dyadic { num: n, exp: 0 }
    }

    /// `2^{-k}`.
    pub fn pow2_neg(k: u32) -> Dyadic {
        Dyadic { num: 1, exp: k }
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn exponent(self) -> u32 {
        self.exp
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_positive(self) -> bool {
        self.num > 0
    }

    pub fn is_negative(self) -> bool {
        self.num < 0
    }

    pub fn abs(self) -> Dyadic {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    /// Multiply by `2^{-k}`.
    pub fn shr(self, k: u32) -> Dyadic {
        Dyadic::new(self.num, self.exp + k)
    }

    pub fn half(self) -> Dyadic {
        self.shr(1)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / libm::exp2(self.exp as f64)
    }

    /// Returns the value as `(num, exp)` with the given denominator
    /// exponent, if it is representable without loss.
    pub fn at_exponent(self, exp: u32) -> Option<i64> {
        if exp >= self.exp {
            let shift = exp - self.exp;
            if shift >= 63 {
                return if self.num == 0 { Some(0) } else { None };
            }
            self.num.checked_mul(1i64 << shift)
        } else {
            None
        }
    }

    /// `floor(self * 2^exp)` for non-negative values, saturating.
    pub fn floor_at_exponent(self, exp: u32) -> u64 {
        if self.num <= 0 {
            return 0;
        }
        let n = self.num as u64;
        if exp >= self.exp {
            let shift = exp - self.exp;
            if shift >= 64 || n.leading_zeros() < shift {
                u64::MAX
            } else {
                n << shift
            }
        } else {
            let shift = self.exp - exp;
            if shift >= 64 {
                0
            } else {
                n >> shift
            }
        }
    }

    /// Builds `key / 2^exp` from an unsigned fixed-point key.
    pub fn from_key(key: u64, exp: u32) -> Dyadic {
        debug_assert!(key <= i64::MAX as u64);
        Dyadic::new(key as i64, exp)
    }

    pub fn min(self, other: Dyadic) -> Dyadic {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Dyadic) -> Dyadic {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Parses the `[numerator, k]` wire form.
    pub fn from_pair(num: i64, exp: i64) -> Result<Dyadic, Error> {
        if !(0..=62).contains(&exp) {
            return Err(Error::InvalidScalar { num, exp });
        }
        Ok(Dyadic::new(num, exp as u32))
    }

    fn widen(self) -> (i128, u32) {
        (self.num as i128, self.exp)
    }
}

fn align(a: Dyadic, b: Dyadic) -> (i128, i128, u32) {
    let (an, ae) = a.widen();
    let (bn, be) = b.widen();
    let e = ae.max(be);
    (an << (e - ae), bn << (e - be), e)
}

fn narrow(num: i128, exp: u32) -> Dyadic {
    let mut num = num;
    let mut exp = exp;
    while num != 0 && num % 2 == 0 && exp > 0 {
        num /= 2;
        exp -= 1;
    }
    assert!(
        num >= i64::MIN as i128 && num <= i64::MAX as i128,
        "dyadic overflow"
    );
    Dyadic::new(num as i64, exp)
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = align(*self, *other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = align(self, rhs);
        narrow(a + b, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = align(self, rhs);
        narrow(a - b, e)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, exp: self.exp }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        narrow(self.num as i128 * rhs.num as i128, self.exp + rhs.exp)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::ZERO
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}
