//! Finite-resolution topological dynamics.
//!
//! Chain recurrence and chain components, shadowing verdicts, separated-set
//! entropy estimates, orbit-pair classification, and builders for symbolic
//! systems (full shifts, odometers, a monotone-modulus subshift and an
//! XOR inverse-limit tower). Every verdict is stated at an explicit finite
//! scale over exact dyadic distances.

#![no_std]

extern crate alloc;

pub mod chain;
pub mod constructions;
pub mod entropy;
pub mod error;
pub mod mis;
pub mod nodeset;
pub mod pairs;
pub mod scalar;
pub mod shadowing;
pub mod symbolic;
pub mod system;

pub use error::{Error, Result};
pub use nodeset::NodeSet;
pub use scalar::Dyadic;
pub use system::{CoordinateMetric, FiniteSystem, Metric, Violation};
