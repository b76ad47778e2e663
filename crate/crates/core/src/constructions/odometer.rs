//! Truncated odometers `Z/m_1 <- Z/m_2 <- ... <- Z/m_K`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Dyadic;
use crate::system::{CoordinateMetric, FiniteSystem};

/// `+1` on `Z/m_K`, with `d(x, y) = 2^{-k}` for the first level `k` at
/// which the residues differ.
pub fn odometer(m: &[u64]) -> Result<FiniteSystem> {
    if m.is_empty() || m[0] == 0 {
        return Err(Error::InvalidParameter("odometer needs m_1 >= 1".into()));
    }
    for w in m.windows(2) {
        if w[0] == 0 || w[1] % w[0] != 0 {
            return Err(Error::InvalidParameter(format!("{} does not divide {}", w[0], w[1])));
        }
    }
    let levels = m.len();
    if levels > 60 {
        return Err(Error::InvalidParameter("too many levels".into()));
    }
    let size = *m.last().unwrap() as usize;
    let weights: Vec<u32> = (1..=levels as u32).collect();
    let mut values = Vec::with_capacity(size * levels);
    for x in 0..size as u64 {
        values.extend(m.iter().map(|&mk| (x % mk) as i64));
    }
    let (metric, scale) = CoordinateMetric::new(&weights, 0, true, values);
    let image = (0..size).map(|x| (x + 1) % size).collect();
    Ok(FiniteSystem::from_coordinates(metric, scale, image)?
        .with_invertible(true)
        .with_labels((0..size).map(|x| format!("{x}")).collect())
        .with_resolution(Dyadic::pow2_neg(levels as u32)))
}
