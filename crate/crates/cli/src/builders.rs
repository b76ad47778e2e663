//! Named builders with JSON parameters.

use chainscope_core::constructions::{example31, example41, full_shift, odometer, Example31, Tower};
use chainscope_core::symbolic::{CompileMode, Sided};
use chainscope_core::{Dyadic, FiniteSystem};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};
use crate::format::{scalars, Scalar};

pub const NAMES: [&str; 4] = ["odometer", "full_shift", "example31", "example41"];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OdometerParams {
    pub m: Vec<u64>,
}

impl Default for OdometerParams {
    fn default() -> Self {
        OdometerParams { m: vec![2, 4, 8, 16] }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftParams {
    pub depth: u32,
    pub sided: String,
    pub alphabet: Vec<Scalar>,
    pub mode: String,
}

impl Default for ShiftParams {
    fn default() -> Self {
        ShiftParams { depth: 3, sided: "two".into(), alphabet: vec![Scalar(0, 0), Scalar(1, 0)], mode: "window".into() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Example31Params {
    pub levels: usize,
    pub depth: u32,
    /// `s_k = 2^{-c k}`.
    pub c: u32,
}

impl Default for Example31Params {
    fn default() -> Self {
        Example31Params { levels: 3, depth: 6, c: 2 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Example41Params {
    pub depth: usize,
    pub half_window: u32,
}

impl Default for Example41Params {
    fn default() -> Self {
        Example41Params { depth: 4, half_window: 6 }
    }
}

pub fn params<T: DeserializeOwned + Default>(v: &Value) -> Result<T> {
    if v.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(v.clone()).map_err(|e| CliError::Config(format!("params: {e}")))
}

pub fn build_example31(v: &Value, cap: usize) -> Result<(Example31Params, Example31)> {
    let p: Example31Params = params(v)?;
    let e = example31(p.levels, p.depth, p.c, cap)?;
    Ok((p, e))
}

pub fn build_example41(v: &Value, cap: usize) -> Result<(Example41Params, Tower)> {
    let p: Example41Params = params(v)?;
    let t = example41(p.depth, p.half_window, cap)?;
    Ok((p, t))
}

pub fn build_odometer(v: &Value, cap: usize) -> Result<(OdometerParams, FiniteSystem)> {
    let p: OdometerParams = params(v)?;
    if p.m.last().is_some_and(|&n| n as usize > cap) {
        return Err(CliError::Cap(format!("odometer size exceeds cap {cap}")));
    }
    let sys = odometer(&p.m)?;
    Ok((p, sys))
}

fn build_shift(v: &Value, cap: usize) -> Result<FiniteSystem> {
    let p: ShiftParams = params(v)?;
    let sided = match p.sided.as_str() {
        "one" => Sided::One,
        "two" => Sided::Two,
        s => return Err(CliError::Config(format!("sided must be one or two, got {s}"))),
    };
    let mode = match p.mode.as_str() {
        "window" => CompileMode::Window,
        "periodic" => CompileMode::Periodic,
        s => return Err(CliError::Config(format!("mode must be window or periodic, got {s}"))),
    };
    let alphabet: Vec<Dyadic> = scalars(&p.alphabet)?;
    Ok(full_shift(alphabet, sided, p.depth, mode, cap)?.compiled.system)
}

pub fn build(name: &str, v: &Value, cap: usize) -> Result<FiniteSystem> {
    match name {
        "odometer" => Ok(build_odometer(v, cap)?.1),
        "full_shift" => build_shift(v, cap),
        "example31" => Ok(build_example31(v, cap)?.1.compiled.system),
        "example41" => Ok(build_example41(v, cap)?.1.system),
        _ => Err(CliError::Config(format!("unknown builder {name}; known: {}", NAMES.join(", ")))),
    }
}
