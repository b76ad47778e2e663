//! Full shifts over a finite alphabet.

use crate::error::{Error, Result};
use crate::scalar::Dyadic;
use crate::symbolic::{compile_symbolic, CompileMode, Compiled, Constraint, MapSpec, Sided, SymbolicSystem};
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct FullShift {
    pub space: SymbolicSystem,
    pub compiled: Compiled,
}

/// The unconstrained shift, compiled at window depth `depth`.
pub fn full_shift(alphabet: Vec<Dyadic>, sided: Sided, depth: u32, mode: CompileMode, cap: usize) -> Result<FullShift> {
    if alphabet.len() < 2 {
        return Err(Error::InvalidParameter("full shift needs at least two symbols".into()));
    }
    let space = SymbolicSystem::new(alphabet, sided, Constraint::FullShift)?;
    let compiled = compile_symbolic(&space, MapSpec::Shift { power: 1 }, depth, mode, cap)?;
    Ok(FullShift { space, compiled })
}

/// `{0, 1}^Z` in window mode.
pub fn binary(depth: u32, cap: usize) -> Result<FullShift> {
    full_shift(alloc::vec![Dyadic::ZERO, Dyadic::ONE], Sided::Two, depth, CompileMode::Window, cap)
}
