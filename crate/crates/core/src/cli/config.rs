//! TOML configuration for the verification harness.
//!
//! ```toml
//! seed = 42
//! points = 20
//!
//! [manifold]
//! id = "s2:r=1"
//!
//! [connection]
//! A = "i*0.3*x1 dx2"
//! B = "i*0.1 dx1"
//!
//! [tolerances]
//! "sl.relative" = 1e-7
//! ```
//!
//! A user metric replaces `id` by `name`, `domain` and `metric`:
//!
//! ```toml
//! [manifold]
//! name = "round-r2"
//! domain = [[0.2, 2.9], [-3.0, 3.0]]
//! metric = [["4", "0"], ["0", "4 sin(x1)^2"]]
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::expr::Expr;
use crate::geometry::ChartGeometry;
use crate::spinor_bundle::ConnectionPair;
use crate::{Error, Result};

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub manifold: Option<ManifoldConfig>,
    pub connection: Option<ConnectionConfig>,
    pub group: Option<GroupConfig>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ManifoldConfig {
    pub id: Option<String>,
    pub name: Option<String>,
    pub domain: Option<Vec<[f64; 2]>>,
    pub metric: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConnectionConfig {
    #[serde(rename = "A")]
    pub a: Option<String>,
    #[serde(rename = "B")]
    pub b: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub n: Option<usize>,
}

impl Config {
    pub fn from_toml(src: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(src).map_err(|e| Error::Config(e.to_string()))?;
        for (name, tol) in &cfg.tolerances {
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(Error::Config(format!("tolerance for '{name}' must be non-negative")));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&src)
    }
}

impl ManifoldConfig {
    pub fn from_id(id: &str) -> Self {
        ManifoldConfig {
            id: Some(id.to_string()),
            ..Default::default()
        }
    }

    pub fn build(&self) -> Result<ChartGeometry> {
        match (&self.id, &self.metric) {
            (Some(id), None) => ChartGeometry::from_id(id),
            (None, Some(rows)) => {
                let domain = self
                    .domain
                    .as_ref()
                    .ok_or_else(|| Error::Config("user metric needs a domain".into()))?;
                let n = domain.len();
                let components = rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|s| Expr::parse(s, n).map_err(|e| Error::Config(format!("metric '{s}': {e}"))))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let name = self.name.clone().unwrap_or_else(|| "user".into());
                ChartGeometry::user(&name, domain.iter().map(|d| (d[0], d[1])).collect(), components)
                    .map_err(|e| Error::Config(e.to_string()))
            }
            (Some(_), Some(_)) => Err(Error::Config("give either a manifold id or a metric, not both".into())),
            (None, None) => Err(Error::Config("no manifold specified".into())),
        }
    }
}

/// Parses the connection pair for an `n`-dimensional chart; missing forms are zero.
pub fn build_connection(a: Option<&str>, b: Option<&str>, n: usize) -> Result<ConnectionPair> {
    ConnectionPair::parse(a.unwrap_or("0"), b.unwrap_or("0"), n).map_err(|e| Error::Config(e.to_string()))
}
