//! JSON file format for finite systems. Scalars are `[numerator, k]`,
//! meaning `numerator / 2^k`; `dist` is the row-major distance table.

use chainscope_core::{Dyadic, FiniteSystem};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Largest system whose metric axioms are checked on load.
pub const VALIDATE_LIMIT: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scalar(pub i64, pub i64);

impl Scalar {
    pub fn get(self) -> Result<Dyadic> {
        Dyadic::from_pair(self.0, self.1).map_err(|e| CliError::Config(e.to_string()))
    }
}

impl From<Dyadic> for Scalar {
    fn from(d: Dyadic) -> Self {
        Scalar(d.numerator(), d.exponent() as i64)
    }
}

pub fn scalars(v: &[Scalar]) -> Result<Vec<Dyadic>> {
    v.iter().map(|s| s.get()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub size: usize,
    pub dist: Vec<Scalar>,
    pub image: Vec<usize>,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default)]
    pub invertible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub successors: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Scalar>,
}

impl SystemFile {
    pub fn from_system(sys: &FiniteSystem) -> SystemFile {
        let n = sys.size();
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(sys.dist(i, j).into());
            }
        }
        SystemFile {
            size: n,
            dist,
            image: sys.image_table().to_vec(),
            labels: sys.labels().to_vec(),
            invertible: sys.invertible(),
            successors: sys.successor_table().map(<[_]>::to_vec),
            resolution: sys.resolution().map(Scalar::from),
        }
    }

    pub fn into_system(self) -> Result<FiniteSystem> {
        let n = self.size;
        if self.dist.len() != n * n {
            return Err(CliError::Config(format!("dist has {} entries, expected {}", self.dist.len(), n * n)));
        }
        let flat = scalars(&self.dist)?;
        let rows: Vec<Vec<Dyadic>> = flat.chunks(n.max(1)).map(<[_]>::to_vec).collect();
        let mut sys = FiniteSystem::from_table(&rows, self.image)?;
        if let Some(succ) = self.successors {
            sys = sys.with_successors(succ)?;
        }
        if !self.labels.is_empty() {
            if self.labels.len() != n {
                return Err(CliError::Config("labels do not match size".into()));
            }
            sys = sys.with_labels(self.labels);
        }
        if let Some(r) = self.resolution {
            sys = sys.with_resolution(r.get()?);
        }
        sys = sys.with_invertible(self.invertible);
        if n <= VALIDATE_LIMIT {
            if let Some(v) = sys.validate().first() {
                return Err(CliError::Config(format!("invalid system: {v}")));
            }
        }
        Ok(sys)
    }
}

pub fn read_system(path: &std::path::Path) -> Result<FiniteSystem> {
    let text = std::fs::read_to_string(path)?;
    let file: SystemFile = serde_json::from_str(&text)?;
    file.into_system()
}

pub fn write_system(sys: &FiniteSystem) -> Result<String> {
    Ok(serde_json::to_string(&SystemFile::from_system(sys))?)
}
