//! Builders for concrete systems and for the constructive steps in the
//! entropy and factor arguments.

pub mod chains;
pub mod example31;
pub mod odometer;
pub mod shift;
pub mod tower;
pub mod xor;

pub use chains::{
    chain_pair_search, hexpansiveness_probe, separated_family_builder, subshift_factor_builder, ChainPair,
    PairSearch,
};
pub use example31::{example31, Example31};
pub use odometer::odometer;
pub use shift::{full_shift, FullShift};
pub use tower::{example41, lemma41_probe, qc_family, Tower};
pub use xor::{xor_factor, FactorMapSpec};
