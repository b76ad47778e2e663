use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::format::{scalars, Scalar};
use chainscope_core::Dyadic;

/// Default global size cap; `CHAINSCOPE_CAP` overrides it.
pub const DEFAULT_CAP: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Components,
    Entropy,
    Shadowing,
    Pairs,
    Example31,
    Example41,
    Odometer,
    Hexp,
    /// Write the selected system in the JSON file format.
    Export,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    File(String),
    Builder { name: String, params: serde_json::Value },
    /// The command builds its own system from `params`.
    Default { params: serde_json::Value },
}

/// Parameter schedules. Empty lists take command defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub eps: Vec<Scalar>,
    pub delta: Vec<Scalar>,
    pub r: Vec<Scalar>,
    pub n: Vec<usize>,
    pub balls: Vec<Scalar>,
    /// Centers, or the set `K` for entropy.
    pub points: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
    /// Size of a seeded random pair pool when `pairs` is empty.
    pub pool: Option<usize>,
    pub b: Option<f64>,
    pub threshold: Option<f64>,
    pub horizon: Option<usize>,
    pub length_bound: Option<usize>,
}

impl Grid {
    pub fn check(&self) -> Result<()> {
        for (name, v) in [("eps", &self.eps), ("delta", &self.delta), ("r", &self.r), ("balls", &self.balls)] {
            monotone(name, &scalars(v)?)?;
        }
        monotone("n", &self.n)?;
        if self.n.contains(&0) {
            return Err(CliError::Config("n must be positive".into()));
        }
        if self.horizon == Some(0) || self.length_bound == Some(0) || self.pool == Some(0) {
            return Err(CliError::Config("horizon, length_bound and pool must be positive".into()));
        }
        Ok(())
    }

    pub fn eps_or(&self, default: &[Dyadic]) -> Result<Vec<Dyadic>> {
        or_default(&self.eps, default)
    }

    pub fn delta_or(&self, default: &[Dyadic]) -> Result<Vec<Dyadic>> {
        or_default(&self.delta, default)
    }

    pub fn r_or(&self, default: &[Dyadic]) -> Result<Vec<Dyadic>> {
        or_default(&self.r, default)
    }

    pub fn balls_or(&self, default: &[Dyadic]) -> Result<Vec<Dyadic>> {
        or_default(&self.balls, default)
    }

    pub fn n_or(&self, default: std::ops::RangeInclusive<usize>) -> Vec<usize> {
        if self.n.is_empty() { default.collect() } else { self.n.clone() }
    }
}

fn or_default(v: &[Scalar], default: &[Dyadic]) -> Result<Vec<Dyadic>> {
    if v.is_empty() { Ok(default.to_vec()) } else { scalars(v) }
}

/// Strictly increasing or strictly decreasing.
fn monotone<T: PartialOrd>(name: &str, v: &[T]) -> Result<()> {
    let up = v.windows(2).all(|w| w[0] < w[1]);
    let down = v.windows(2).all(|w| w[0] > w[1]);
    if up || down {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} schedule is not strictly monotone")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub source: Source,
    pub grid: Grid,
    pub exact_cap: usize,
    pub cap: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<String>,
}

impl RunConfig {
    pub fn check(&self) -> Result<()> {
        if self.exact_cap == 0 || self.cap == 0 {
            return Err(CliError::Config("caps must be positive".into()));
        }
        self.grid.check()
    }
}
